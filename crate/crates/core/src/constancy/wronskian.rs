//! Wronskian identities `f·Xg − g·Xf ≡ 0` and their precision bookkeeping.
//!
//! Bounds follow two rules: each differentiation costs one degree, and
//! cancelling a factor of order `ω` costs `ω` degrees.

use std::collections::BTreeMap;
use std::fmt;

use super::frame::FrameInverse;
use super::SeriesPair;
use crate::error::{Error, Result, Stage};
use crate::manifold::{BracketWord, CrFields, FormalVectorField, Generator, ManifoldModel};
use crate::number::GaussianRational;
use crate::series::{cofactor_cancel, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subject {
    Word(BracketWord),
    /// `∂/∂x_i` in intrinsic coordinates.
    Coordinate(usize),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Word(w) => write!(f, "{w}"),
            Subject::Coordinate(i) => write!(f, "d/dx{}", i + 1),
        }
    }
}

/// How an identity was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Differentiated reality identity gives `W·ḡ|_𝓜 ≡ 0`; then `ḡ|_𝓜`,
    /// of order `factor_order`, is cancelled.
    FirstOrder {
        product_residual: TruncatedSeries,
        factor_order: u32,
    },
    /// `f, g` do not depend on ζ, so the residual is identically empty.
    Trivial,
    /// From the identities of `R` and `S`: first `Sf·Rg − Sg·Rf ≡ 0` (after
    /// cancelling `g`), then the Leibniz subtraction.
    Bracket {
        elimination_residual: TruncatedSeries,
        elimination_bound: usize,
        leibniz_residual: TruncatedSeries,
    },
    /// `∂_i = Σ_j a_ij T_j`, so the residual equals `Σ_j a_ij W_j`; the
    /// difference of the two is recorded.
    Coordinate {
        combination_residual: TruncatedSeries,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WronskianIdentity {
    pub subject: Subject,
    /// `f·Xg − g·Xf`, computed at its natural precision.
    pub residual: TruncatedSeries,
    /// Degree below which the argument guarantees the residual vanishes.
    pub certified_precision: usize,
    pub kind: StepKind,
}

impl WronskianIdentity {
    /// The residual has no term of degree below the certified bound.
    pub fn holds(&self) -> bool {
        self.residual
            .terms()
            .all(|(e, _)| e.total_degree() as usize >= self.certified_precision)
    }
}

fn low_terms_vanish(s: &TruncatedSeries, bound: usize) -> bool {
    s.terms().all(|(e, _)| e.total_degree() as usize >= bound)
}

fn check_frames(pair: &SeriesPair, model: &ManifoldModel) -> Result<()> {
    if pair.frame() != model.t_frame() {
        return Err(Error::FrameMismatch(model.t_frame(), pair.frame()));
    }
    Ok(())
}

/// `f·Xg − g·Xf`.
pub(crate) fn wronskian(
    x: &FormalVectorField,
    f: &TruncatedSeries,
    g: &TruncatedSeries,
) -> Result<TruncatedSeries> {
    f.mul(&x.apply(g)?)?.sub(&g.mul(&x.apply(f)?)?)
}

fn underflow_at(stage: Stage) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::PrecisionUnderflow | Error::ZeroPrecision => Error::InsufficientPrecision(stage),
        other => other,
    }
}

/// `(f(t)ḡ(τ) − g(t)f̄(τ))|_𝓜` in intrinsic coordinates. Empty exactly when
/// the reality identity holds modulo the shared precision.
pub fn reality_defect(pair: &SeriesPair, model: &ManifoldModel) -> Result<TruncatedSeries> {
    check_frames(pair, model)?;
    let full = model.full_frame();
    let f = pair.f().reframe(full)?;
    let g = pair.g().reframe(full)?;
    let f_bar = pair.f().conjugate_swap()?.reframe(full)?;
    let g_bar = pair.g().conjugate_swap()?.reframe(full)?;
    let defect = f.mul(&g_bar)?.sub(&g.mul(&f_bar)?)?;
    model.restrict_to_m(&defect)
}

fn require_hypothesis(pair: &SeriesPair, model: &ManifoldModel) -> Result<()> {
    let d = reality_defect(pair, model)?;
    match d.witness() {
        Some(w) => Err(Error::HypothesisNotSatisfied(Box::new(w))),
        None => Ok(()),
    }
}

/// Identities for the generators: `L_1..L_m` (derived) followed by
/// `U_1..U_m` (trivial). Requires the reality identity to hold.
pub fn first_order_identities(
    pair: &SeriesPair,
    model: &ManifoldModel,
) -> Result<Vec<WronskianIdentity>> {
    check_frames(pair, model)?;
    require_hypothesis(pair, model)?;
    let fields = CrFields::new(model)?;
    first_order_with(pair, model, &fields)
}

pub(crate) fn first_order_with(
    pair: &SeriesPair,
    model: &ManifoldModel,
    fields: &CrFields,
) -> Result<Vec<WronskianIdentity>> {
    let (f, g) = pair.intrinsic()?;
    let g_bar_m = model.restrict_to_m(&pair.g().conjugate_swap()?.reframe(model.full_frame())?)?;
    let mut out = Vec::with_capacity(2 * model.m());
    for (k, l) in fields.l().iter().enumerate() {
        let w = wronskian(l, &f, &g).map_err(underflow_at(Stage::FirstOrder))?;
        let product = w.mul(&g_bar_m)?;
        let bound = match cofactor_cancel(&product, &g_bar_m) {
            Ok(b) => b,
            Err(Error::NotZero(witness)) => {
                return Err(Error::Inconsistent(format!(
                    "L{} product identity fails at {witness}",
                    k + 1
                )))
            }
            Err(Error::ZeroFactor { .. } | Error::FactorOrderTooLarge { .. }) => {
                return Err(Error::InsufficientPrecision(Stage::FirstOrder))
            }
            Err(e) => return Err(e),
        };
        let factor_order = g_bar_m.order().expect("checked by cofactor_cancel");
        let id = WronskianIdentity {
            subject: Subject::Word(BracketWord::generator(Generator::L(k))),
            residual: w,
            certified_precision: bound,
            kind: StepKind::FirstOrder {
                product_residual: product,
                factor_order,
            },
        };
        if !id.holds() {
            return Err(Error::Inconsistent(format!(
                "L{} identity fails below its bound",
                k + 1
            )));
        }
        out.push(id);
    }
    for (k, u) in fields.u().iter().enumerate() {
        let w = wronskian(u, &f, &g).map_err(underflow_at(Stage::FirstOrder))?;
        let id = WronskianIdentity {
            subject: Subject::Word(BracketWord::generator(Generator::U(k))),
            certified_precision: w.precision(),
            residual: w,
            kind: StepKind::Trivial,
        };
        if !id.holds() {
            return Err(Error::Inconsistent(format!(
                "U{} identity is not trivial",
                k + 1
            )));
        }
        out.push(id);
    }
    Ok(out)
}

/// The universal identity
/// `S(fRg − gRf) − R(fSg − gSf) − 2(Sf·Rg − Sg·Rf) + f·[R,S]g − g·[R,S]f`,
/// which is the zero series for every `f, g, R, S`.
pub fn leibniz_residual(
    r: &FormalVectorField,
    s: &FormalVectorField,
    f: &TruncatedSeries,
    g: &TruncatedSeries,
) -> Result<TruncatedSeries> {
    let w_r = wronskian(r, f, g)?;
    let w_s = wronskian(s, f, g)?;
    let elimination = s
        .apply(f)?
        .mul(&r.apply(g)?)?
        .sub(&s.apply(g)?.mul(&r.apply(f)?)?)?;
    let rs = r.bracket(s)?;
    let two = GaussianRational::from(2);
    s.apply(&w_r)?
        .sub(&r.apply(&w_s)?)?
        .sub(&elimination.scale(&two))?
        .add(&wronskian(&rs, f, g)?)
}

/// [`leibniz_residual`] for the embedded pair.
pub fn leibniz_bracket_identity(
    r: &FormalVectorField,
    s: &FormalVectorField,
    pair: &SeriesPair,
) -> Result<TruncatedSeries> {
    let (f, g) = pair.intrinsic()?;
    leibniz_residual(r, s, &f, &g)
}

/// Identities `f·Tg − g·Tf ≡ 0` for each word, with certified bounds.
///
/// For `T = [R, S]` the bound is `min(b_R, b_S) − max(1, ord g)`: the
/// elimination cancels `g`, the Leibniz step differentiates once.
pub fn bracket_closure(
    pair: &SeriesPair,
    model: &ManifoldModel,
    words: &[BracketWord],
) -> Result<Vec<WronskianIdentity>> {
    check_frames(pair, model)?;
    require_hypothesis(pair, model)?;
    let fields = CrFields::new(model)?;
    let first = first_order_with(pair, model, &fields)?;
    closure_with(pair, &fields, &first, words)
}

struct Node {
    field: FormalVectorField,
    identity: WronskianIdentity,
}

pub(crate) fn closure_with(
    pair: &SeriesPair,
    fields: &CrFields,
    first: &[WronskianIdentity],
    words: &[BracketWord],
) -> Result<Vec<WronskianIdentity>> {
    let (f, g) = pair.intrinsic()?;
    let g_order = pair.g().order().expect("g is nonzero") as usize;
    let mut memo: BTreeMap<BracketWord, Node> = BTreeMap::new();
    for id in first {
        if let Subject::Word(w @ BracketWord::Gen(gen)) = &id.subject {
            memo.insert(
                w.clone(),
                Node {
                    field: fields.get(*gen)?.clone(),
                    identity: id.clone(),
                },
            );
        }
    }
    let ctx = ClosureCtx {
        f: &f,
        g: &g,
        g_order,
    };
    words
        .iter()
        .map(|w| {
            ctx.node(w, &mut memo)?;
            Ok(memo[w].identity.clone())
        })
        .collect()
}

struct ClosureCtx<'a> {
    f: &'a TruncatedSeries,
    g: &'a TruncatedSeries,
    g_order: usize,
}

impl ClosureCtx<'_> {
    fn node(&self, word: &BracketWord, memo: &mut BTreeMap<BracketWord, Node>) -> Result<()> {
        if memo.contains_key(word) {
            return Ok(());
        }
        let BracketWord::Bracket(a, b) = word else {
            return Err(Error::Inconsistent(format!(
                "generator {word} has no first-order identity"
            )));
        };
        self.node(a, memo)?;
        self.node(b, memo)?;
        let (r, b_r) = (&memo[&**a].field, memo[&**a].identity.certified_precision);
        let (s, b_s) = (&memo[&**b].field, memo[&**b].identity.certified_precision);
        let (f, g) = (self.f, self.g);
        let insufficient = underflow_at(Stage::BracketClosure);

        let t = r.bracket(s).map_err(&insufficient)?;
        let residual = wronskian(&t, f, g).map_err(&insufficient)?;
        let elimination = s
            .apply(f)?
            .mul(&r.apply(g)?)?
            .sub(&s.apply(g)?.mul(&r.apply(f)?)?)
            .map_err(&insufficient)?;
        let base = b_r.min(b_s);
        let elimination_bound = base.saturating_sub(self.g_order);
        let bound = base.saturating_sub(self.g_order.max(1));
        if bound == 0 {
            return Err(Error::InsufficientPrecision(Stage::BracketClosure));
        }
        if !low_terms_vanish(&elimination, elimination_bound) {
            return Err(Error::Inconsistent(format!(
                "elimination step fails for {word}"
            )));
        }
        let leibniz = leibniz_residual(r, s, f, g).map_err(&insufficient)?;
        if !leibniz.is_zero() {
            return Err(Error::Inconsistent(format!(
                "Leibniz identity fails for {word}: {leibniz}"
            )));
        }
        let identity = WronskianIdentity {
            subject: Subject::Word(word.clone()),
            residual,
            certified_precision: bound,
            kind: StepKind::Bracket {
                elimination_residual: elimination,
                elimination_bound,
                leibniz_residual: leibniz,
            },
        };
        if !identity.holds() {
            return Err(Error::Inconsistent(format!(
                "bracket identity fails for {word}"
            )));
        }
        memo.insert(word.clone(), Node { field: t, identity });
        Ok(())
    }
}

/// `f·∂_i g − g·∂_i f ≡ 0` for every intrinsic coordinate, via
/// `∂_i = Σ_j a_ij T_j`. `frame_identities[j]` must belong to the j-th word of
/// the inverted frame.
pub fn coordinate_identities(
    pair: &SeriesPair,
    model: &ManifoldModel,
    inverse: &FrameInverse,
    frame_identities: &[WronskianIdentity],
) -> Result<Vec<WronskianIdentity>> {
    check_frames(pair, model)?;
    let n = model.dimension();
    if frame_identities.len() != n || inverse.words.len() != n {
        return Err(Error::FrameSize {
            expected: n,
            got: frame_identities.len().min(inverse.words.len()),
        });
    }
    for (id, w) in frame_identities.iter().zip(&inverse.words) {
        if id.subject != Subject::Word(w.clone()) {
            return Err(Error::Inconsistent(format!(
                "identity for {} does not match frame word {w}",
                id.subject
            )));
        }
    }
    let (f, g) = pair.intrinsic()?;
    let frame = model.intrinsic_frame();
    let bound = frame_identities
        .iter()
        .map(|id| id.certified_precision)
        .min()
        .unwrap_or(0)
        .min(inverse.precision);
    if bound == 0 {
        return Err(Error::InsufficientPrecision(Stage::CoordinateIdentities));
    }
    let insufficient = underflow_at(Stage::CoordinateIdentities);
    (0..n)
        .map(|i| {
            let coord = FormalVectorField::coordinate(frame, i, f.precision())?;
            let direct = wronskian(&coord, &f, &g).map_err(&insufficient)?;
            let mut combo = TruncatedSeries::zero(frame, direct.precision())?;
            for (a, id) in inverse.coefficients[i].iter().zip(frame_identities) {
                combo = combo.add(&a.mul(&id.residual)?)?;
            }
            let combination_residual = direct.sub(&combo)?;
            if !low_terms_vanish(&combination_residual, bound) {
                return Err(Error::Inconsistent(format!(
                    "frame expansion of d/dx{} fails",
                    i + 1
                )));
            }
            let identity = WronskianIdentity {
                subject: Subject::Coordinate(i),
                residual: direct,
                certified_precision: bound,
                kind: StepKind::Coordinate {
                    combination_residual,
                },
            };
            if !identity.holds() {
                return Err(Error::Inconsistent(format!(
                    "coordinate identity fails for d/dx{}",
                    i + 1
                )));
            }
            Ok(identity)
        })
        .collect()
}
