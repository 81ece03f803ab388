//! Sparse truncated multivariate power series over ℚ(i).
//!
//! A `TruncatedSeries` with precision `N` stores the exact coefficients of all
//! monomials of total degree `< N`; everything of degree `>= N` is unknown.
//!
//! Invariants:
//! - no stored coefficient is zero
//! - no stored exponent has total degree `>= N`
//! - `N >= 1`
//!
//! Coefficient tables are `BTreeMap`s keyed by [`Exponent`], whose `Ord` is
//! the graded lexicographic order, so iteration runs grlex-ascending and the
//! first entry is the leading term.

mod ops;
mod subst;

pub use ops::cofactor_cancel;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::number::GaussianRational;

/// Multi-index of a monomial, ordered by grlex.
///
/// Total degree decides first. Ties are broken lexicographically with the
/// earlier variable dominant and the larger power first, so in two variables
/// `(1,0)` precedes `(0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    degree: u32,
    powers: Vec<u32>,
}

impl Exponent {
    pub fn new(powers: Vec<u32>) -> Self {
        let degree = powers.iter().sum();
        Self { degree, powers }
    }

    pub fn zero(arity: usize) -> Self {
        Self {
            degree: 0,
            powers: vec![0; arity],
        }
    }

    pub fn unit(arity: usize, index: usize) -> Self {
        let mut powers = vec![0; arity];
        powers[index] = 1;
        Self { degree: 1, powers }
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    pub fn arity(&self) -> usize {
        self.powers.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.degree
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0
    }

    /// Product of monomials. Arity must agree.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity(), other.arity());
        Self {
            degree: self.degree + other.degree,
            powers: self
                .powers
                .iter()
                .zip(&other.powers)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Lowers the power of `index` by one, `None` if it is already zero.
    pub fn decrement(&self, index: usize) -> Option<Self> {
        let p = *self.powers.get(index)?;
        if p == 0 {
            return None;
        }
        let mut powers = self.powers.clone();
        powers[index] -= 1;
        Some(Self {
            degree: self.degree - 1,
            powers,
        })
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.powers.iter().zip(&other.powers) {
                match b.cmp(a) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            self.powers.len().cmp(&other.powers.len())
        })
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Grlex comparison with an arity check.
pub fn grlex_cmp(a: &Exponent, b: &Exponent) -> Result<Ordering> {
    if a.arity() != b.arity() {
        return Err(Error::ArityMismatch(a.arity(), b.arity()));
    }
    Ok(a.cmp(b))
}

/// A single coordinate of `(z, w, ζ, ξ)`, zero-based within its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    Z(usize),
    W(usize),
    Zeta(usize),
    Xi(usize),
}

impl Variable {
    /// The slot this variable occupies after conjugation: z ↔ ζ, w ↔ ξ.
    pub fn conjugate(self) -> Self {
        match self {
            Variable::Z(k) => Variable::Zeta(k),
            Variable::Zeta(k) => Variable::Z(k),
            Variable::W(j) => Variable::Xi(j),
            Variable::Xi(j) => Variable::W(j),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Z(k) => write!(f, "z{}", k + 1),
            Variable::W(j) => write!(f, "w{}", j + 1),
            Variable::Zeta(k) => write!(f, "zeta{}", k + 1),
            Variable::Xi(j) => write!(f, "xi{}", j + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameKind {
    /// `t = (z, w)`
    T,
    /// `τ = (ζ, ξ)`
    Tau,
    /// `(z, w, ζ)`, coordinates on the complexified manifold with ξ eliminated.
    Intrinsic,
    /// `(z, w, ζ, ξ)`
    Full,
}

/// An ordered list of variables, identified by its kind and the dimensions
/// `(m, d)`. Two series can only be combined if their frames are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VariableFrame {
    kind: FrameKind,
    m: usize,
    d: usize,
}

impl VariableFrame {
    pub fn new(kind: FrameKind, m: usize, d: usize) -> Self {
        Self { kind, m, d }
    }

    pub fn t(m: usize, d: usize) -> Self {
        Self::new(FrameKind::T, m, d)
    }

    pub fn tau(m: usize, d: usize) -> Self {
        Self::new(FrameKind::Tau, m, d)
    }

    pub fn intrinsic(m: usize, d: usize) -> Self {
        Self::new(FrameKind::Intrinsic, m, d)
    }

    pub fn full(m: usize, d: usize) -> Self {
        Self::new(FrameKind::Full, m, d)
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn with_kind(&self, kind: FrameKind) -> Self {
        Self { kind, ..*self }
    }

    pub fn arity(&self) -> usize {
        match self.kind {
            FrameKind::T | FrameKind::Tau => self.m + self.d,
            FrameKind::Intrinsic => 2 * self.m + self.d,
            FrameKind::Full => 2 * (self.m + self.d),
        }
    }

    pub fn variable(&self, index: usize) -> Option<Variable> {
        let (m, d) = (self.m, self.d);
        if index >= self.arity() {
            return None;
        }
        Some(match self.kind {
            FrameKind::T => {
                if index < m {
                    Variable::Z(index)
                } else {
                    Variable::W(index - m)
                }
            }
            FrameKind::Tau => {
                if index < m {
                    Variable::Zeta(index)
                } else {
                    Variable::Xi(index - m)
                }
            }
            FrameKind::Intrinsic | FrameKind::Full => {
                if index < m {
                    Variable::Z(index)
                } else if index < m + d {
                    Variable::W(index - m)
                } else if index < 2 * m + d {
                    Variable::Zeta(index - m - d)
                } else {
                    Variable::Xi(index - 2 * m - d)
                }
            }
        })
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        (0..self.arity()).filter_map(move |i| self.variable(i))
    }

    pub fn index_of(&self, var: Variable) -> Option<usize> {
        let (m, d) = (self.m, self.d);
        let in_m = |k: usize| k < m;
        let in_d = |j: usize| j < d;
        match (self.kind, var) {
            (FrameKind::T, Variable::Z(k)) if in_m(k) => Some(k),
            (FrameKind::T, Variable::W(j)) if in_d(j) => Some(m + j),
            (FrameKind::Tau, Variable::Zeta(k)) if in_m(k) => Some(k),
            (FrameKind::Tau, Variable::Xi(j)) if in_d(j) => Some(m + j),
            (FrameKind::Intrinsic | FrameKind::Full, Variable::Z(k)) if in_m(k) => Some(k),
            (FrameKind::Intrinsic | FrameKind::Full, Variable::W(j)) if in_d(j) => Some(m + j),
            (FrameKind::Intrinsic | FrameKind::Full, Variable::Zeta(k)) if in_m(k) => {
                Some(m + d + k)
            }
            (FrameKind::Full, Variable::Xi(j)) if in_d(j) => Some(2 * m + d + j),
            _ => None,
        }
    }

    /// The frame obtained by conjugation, if defined.
    pub fn conjugate(&self) -> Option<Self> {
        match self.kind {
            FrameKind::T => Some(self.with_kind(FrameKind::Tau)),
            FrameKind::Tau => Some(self.with_kind(FrameKind::T)),
            FrameKind::Full => Some(*self),
            FrameKind::Intrinsic => None,
        }
    }

    /// `z1^2*zeta1`, or `1` for the constant monomial.
    pub fn format_monomial(&self, exp: &Exponent) -> String {
        let parts: Vec<String> = exp
            .powers()
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0)
            .map(|(i, p)| {
                let v = self.variable(i).expect("exponent arity matches frame");
                if *p == 1 {
                    v.to_string()
                } else {
                    format!("{v}^{p}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for VariableFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            FrameKind::T => "T",
            FrameKind::Tau => "TAU",
            FrameKind::Intrinsic => "M_INTRINSIC",
            FrameKind::Full => "FULL",
        };
        write!(f, "{name}(m={}, d={})", self.m, self.d)
    }
}

/// A single term singled out as evidence: usually the grlex-least nonzero
/// term of a series that was expected to vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub frame: VariableFrame,
    pub exponent: Exponent,
    pub coefficient: GaussianRational,
}

impl Witness {
    pub fn monomial(&self) -> String {
        self.frame.format_monomial(&self.exponent)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = self.monomial();
        if self.exponent.is_constant() {
            write!(f, "{}", self.coefficient)
        } else if self.coefficient.is_one() {
            write!(f, "{mono}")
        } else {
            write!(f, "{}*{mono}", self.coefficient)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    frame: VariableFrame,
    precision: usize,
    coeffs: BTreeMap<Exponent, GaussianRational>,
}

impl TruncatedSeries {
    pub fn zero(frame: VariableFrame, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        Ok(Self {
            frame,
            precision,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn constant(frame: VariableFrame, c: GaussianRational, precision: usize) -> Result<Self> {
        Self::monomial(frame, Exponent::zero(frame.arity()), c, precision)
    }

    pub fn one(frame: VariableFrame, precision: usize) -> Result<Self> {
        Self::constant(frame, GaussianRational::one(), precision)
    }

    /// The coordinate function `x_index`.
    pub fn variable(frame: VariableFrame, index: usize, precision: usize) -> Result<Self> {
        if index >= frame.arity() {
            return Err(Error::VariableOutOfRange { index, frame });
        }
        Self::monomial(
            frame,
            Exponent::unit(frame.arity(), index),
            GaussianRational::one(),
            precision,
        )
    }

    pub fn var(frame: VariableFrame, var: Variable, precision: usize) -> Result<Self> {
        let index = frame
            .index_of(var)
            .ok_or_else(|| Error::VariableNotInFrame {
                name: var.to_string(),
                frame,
            })?;
        Self::variable(frame, index, precision)
    }

    /// `c·x^exp`, silently zero if `deg(exp) >= precision`.
    pub fn monomial(
        frame: VariableFrame,
        exp: Exponent,
        c: GaussianRational,
        precision: usize,
    ) -> Result<Self> {
        if exp.arity() != frame.arity() {
            return Err(Error::ArityMismatch(exp.arity(), frame.arity()));
        }
        let mut s = Self::zero(frame, precision)?;
        s.insert(exp, c);
        Ok(s)
    }

    /// Builds a series from terms, summing repeats and dropping terms at or
    /// beyond the precision.
    pub fn from_terms<I>(frame: VariableFrame, precision: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, GaussianRational)>,
    {
        let mut s = Self::zero(frame, precision)?;
        for (e, c) in terms {
            if e.arity() != frame.arity() {
                return Err(Error::ArityMismatch(e.arity(), frame.arity()));
            }
            s.accumulate(e, &c);
        }
        Ok(s)
    }

    /// Like [`from_terms`](Self::from_terms) but rejects any nonzero term of
    /// degree `>= precision` instead of truncating it.
    pub fn from_terms_strict<I>(frame: VariableFrame, precision: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, GaussianRational)>,
    {
        let mut table: BTreeMap<Exponent, GaussianRational> = BTreeMap::new();
        for (e, c) in terms {
            if e.arity() != frame.arity() {
                return Err(Error::ArityMismatch(e.arity(), frame.arity()));
            }
            *table.entry(e).or_default() += &c;
        }
        table.retain(|_, c| !c.is_zero());
        if let Some(top) = table.keys().map(Exponent::total_degree).max() {
            if top as usize >= precision {
                return Err(Error::DegreeTooHigh {
                    degree: top,
                    precision,
                });
            }
        }
        let mut s = Self::zero(frame, precision)?;
        s.coeffs = table;
        Ok(s)
    }

    pub fn frame(&self) -> VariableFrame {
        self.frame
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Nonzero terms in grlex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exp: &Exponent) -> GaussianRational {
        self.coeffs.get(exp).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&Exponent::zero(self.frame.arity()))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// True when the coefficient table is empty, i.e. the series vanishes
    /// modulo degree `precision`.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Least total degree of a stored monomial, `None` for the empty table.
    pub fn order(&self) -> Option<u32> {
        self.coeffs.keys().next().map(Exponent::total_degree)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(Exponent::total_degree).max()
    }

    /// Grlex-least term.
    pub fn leading_term(&self) -> Option<(&Exponent, &GaussianRational)> {
        self.coeffs.iter().next()
    }

    /// The leading term packaged as a [`Witness`].
    pub fn witness(&self) -> Option<Witness> {
        self.leading_term().map(|(e, c)| Witness {
            frame: self.frame,
            exponent: e.clone(),
            coefficient: c.clone(),
        })
    }

    /// Reduces the precision to `min(self.precision, precision)`.
    pub fn truncate(&self, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if precision >= self.precision {
            return Ok(self.clone());
        }
        Ok(Self {
            frame: self.frame,
            precision,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| (e.total_degree() as usize) < precision)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        })
    }

    /// Treats the stored table as an exact polynomial known to a higher
    /// precision. Only sound when the caller knows the series is a
    /// polynomial whose terms are all below the current precision.
    pub fn assume_exact_to(&self, precision: usize) -> Self {
        Self {
            precision: precision.max(self.precision),
            ..self.clone()
        }
    }

    /// Evaluates the stored polynomial part at a point.
    pub fn evaluate(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        if point.len() != self.frame.arity() {
            return Err(Error::ArityMismatch(point.len(), self.frame.arity()));
        }
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.coeffs {
            let mut term = c.clone();
            for (x, p) in point.iter().zip(e.powers()) {
                if *p > 0 {
                    term *= &x.pow(*p);
                }
            }
            acc += &term;
        }
        Ok(acc)
    }

    fn insert(&mut self, exp: Exponent, c: GaussianRational) {
        if !c.is_zero() && (exp.total_degree() as usize) < self.precision {
            self.coeffs.insert(exp, c);
        }
    }

    fn accumulate(&mut self, exp: Exponent, c: &GaussianRational) {
        if c.is_zero() || (exp.total_degree() as usize) >= self.precision {
            return;
        }
        match self.coeffs.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_frame(&self, other: &Self) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch(self.frame, other.frame));
        }
        Ok(())
    }
}

/// Prints in the expression syntax, terms in grlex order, `0` when empty.
impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.coeffs.iter().enumerate() {
            let negative_real = c.is_real() && c.re() < &num_rational::BigRational::zero();
            let negative_imag = c.re().is_zero() && c.im() < &num_rational::BigRational::zero();
            let (sign, mag) = if negative_real || negative_imag {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if n == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mono = self.frame.format_monomial(e);
            if e.is_constant() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: &[u32]) -> Exponent {
        Exponent::new(p.to_vec())
    }

    #[test]
    fn degree_dominates() {
        assert_eq!(grlex_cmp(&e(&[1, 0]), &e(&[0, 2])).unwrap(), Ordering::Less);
        assert_eq!(
            grlex_cmp(&e(&[0, 2]), &e(&[1, 0])).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn tie_break_prefers_earlier_variable() {
        assert_eq!(grlex_cmp(&e(&[1, 0]), &e(&[0, 1])).unwrap(), Ordering::Less);
        assert_eq!(
            grlex_cmp(&e(&[2, 0, 1]), &e(&[2, 1, 0])).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        assert_eq!(
            grlex_cmp(&e(&[1]), &e(&[1, 0])),
            Err(Error::ArityMismatch(1, 2))
        );
    }

    #[test]
    fn sort_of_quadratic_exponents_is_frozen() {
        let mut all: Vec<Exponent> = Vec::new();
        for a in 0..=2 {
            for b in 0..=2 - a {
                all.push(e(&[a, b]));
            }
        }
        all.sort();
        let got: Vec<Vec<u32>> = all.iter().map(|x| x.powers().to_vec()).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn frames_index_round_trip() {
        for kind in [
            FrameKind::T,
            FrameKind::Tau,
            FrameKind::Intrinsic,
            FrameKind::Full,
        ] {
            let fr = VariableFrame::new(kind, 2, 3);
            for i in 0..fr.arity() {
                let v = fr.variable(i).unwrap();
                assert_eq!(fr.index_of(v), Some(i));
            }
            assert!(fr.variable(fr.arity()).is_none());
        }
        assert_eq!(VariableFrame::intrinsic(2, 1).arity(), 5);
    }

    #[test]
    fn leading_term_examples() {
        let fr = VariableFrame::t(1, 1);
        let p = TruncatedSeries::from_terms(
            fr,
            4,
            [
                (e(&[0, 1]), GaussianRational::from(3)),
                (e(&[2, 0]), GaussianRational::one()),
            ],
        )
        .unwrap();
        let (le, lc) = p.leading_term().unwrap();
        assert_eq!(le, &e(&[0, 1]));
        assert_eq!(lc, &GaussianRational::from(3));

        let q = TruncatedSeries::from_terms(
            fr,
            4,
            [
                (e(&[0, 1]), GaussianRational::one()),
                (e(&[1, 0]), GaussianRational::one()),
            ],
        )
        .unwrap();
        assert_eq!(q.leading_term().unwrap().0, &e(&[1, 0]));
        assert!(TruncatedSeries::zero(fr, 3)
            .unwrap()
            .leading_term()
            .is_none());
    }

    #[test]
    fn strict_construction_rejects_high_degree() {
        let fr = VariableFrame::t(1, 1);
        let err =
            TruncatedSeries::from_terms_strict(fr, 2, [(e(&[2, 0]), GaussianRational::one())]);
        assert_eq!(
            err,
            Err(Error::DegreeTooHigh {
                degree: 2,
                precision: 2
            })
        );
        let cancelled = TruncatedSeries::from_terms_strict(
            fr,
            2,
            [
                (e(&[2, 0]), GaussianRational::one()),
                (e(&[2, 0]), GaussianRational::from(-1)),
            ],
        )
        .unwrap();
        assert!(cancelled.is_zero());
    }

    #[test]
    fn zero_precision_is_rejected() {
        assert_eq!(
            TruncatedSeries::zero(VariableFrame::t(1, 1), 0),
            Err(Error::ZeroPrecision)
        );
    }

    #[test]
    fn display() {
        let fr = VariableFrame::full(1, 1);
        let z = TruncatedSeries::var(fr, Variable::Z(0), 8).unwrap();
        let w = TruncatedSeries::var(fr, Variable::W(0), 8).unwrap();
        let zeta = TruncatedSeries::var(fr, Variable::Zeta(0), 8).unwrap();
        let two_i = GaussianRational::i().scale_int(2);
        let theta = w.sub(&z.mul(&zeta).unwrap().scale(&two_i)).unwrap();
        assert_eq!(theta.to_string(), "w1 - 2*i*z1*zeta1");
        assert_eq!(TruncatedSeries::zero(fr, 3).unwrap().to_string(), "0");
    }
}
