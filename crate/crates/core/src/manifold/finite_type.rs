//! Bloom–Graham finite type at the origin via left-normed brackets.
//!
//! Depth 1 holds the `2m` generators; depth `ℓ + 1` holds `[X, W]` for every
//! generator `X` and every kept depth-`ℓ` word `W`. Within a depth, words whose
//! fields are ℂ-linear combinations of earlier ones are dropped, since
//! brackets are bilinear. The origin values of kept words feed a
//! fraction-free rank computation.

use super::{BracketWord, CrFields, FormalVectorField, ManifoldModel};
use crate::error::{Error, Result};
use crate::linalg::{self, EchelonBasis};
use crate::number::GaussianRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteTypeOutcome {
    /// Full rank first reached at this bracket length.
    FiniteType { type_length: usize },
    /// Rank still deficient at the last depth examined.
    Undetermined { max_depth_reached: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTypeReport {
    pub outcome: FiniteTypeOutcome,
    /// `(depth, rank)` for each depth examined, rank of all words up to that depth.
    pub span_by_depth: Vec<(usize, usize)>,
    /// `2m + d` words whose origin values form a basis; empty unless finite type.
    pub spanning_frame: Vec<BracketWord>,
    pub dimension: usize,
    /// True when the requested depth exceeded what the precision supports.
    pub precision_limited: bool,
}

impl FiniteTypeReport {
    pub fn is_finite_type(&self) -> bool {
        matches!(self.outcome, FiniteTypeOutcome::FiniteType { .. })
    }

    pub fn type_length(&self) -> Option<usize> {
        match self.outcome {
            FiniteTypeOutcome::FiniteType { type_length } => Some(type_length),
            FiniteTypeOutcome::Undetermined { .. } => None,
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.span_by_depth.iter().map(|(_, r)| *r).collect()
    }
}

struct OriginSpan {
    rows: Vec<Vec<GaussianRational>>,
    words: Vec<BracketWord>,
}

impl OriginSpan {
    fn offer(&mut self, word: &BracketWord, field: &FormalVectorField) {
        let v = field.evaluate_at_origin();
        if v.iter().all(num_traits::Zero::is_zero) {
            return;
        }
        self.rows.push(v);
        if linalg::rank(&self.rows) == self.rows.len() {
            self.words.push(word.clone());
        } else {
            self.rows.pop();
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Runs the span test up to `max_depth` (capped at `N − 1`, the deepest
/// bracket length the precision supports).
pub fn finite_type_check(model: &ManifoldModel, max_depth: usize) -> Result<FiniteTypeReport> {
    let fields = CrFields::new(model)?;
    finite_type_check_with(model, &fields, max_depth)
}

pub(crate) fn finite_type_check_with(
    model: &ManifoldModel,
    fields: &CrFields,
    max_depth: usize,
) -> Result<FiniteTypeReport> {
    if max_depth == 0 {
        return Err(Error::Inconsistent("max_depth must be at least 1".into()));
    }
    let n = model.dimension();
    let supported = model.precision() - 1;
    let limit = max_depth.min(supported);
    let precision_limited = max_depth > supported;

    let generators: Vec<(BracketWord, FormalVectorField)> = fields
        .generators()
        .into_iter()
        .map(|g| Ok((BracketWord::generator(g), fields.get(g)?.clone())))
        .collect::<Result<_>>()?;

    let mut span = OriginSpan {
        rows: Vec::new(),
        words: Vec::new(),
    };
    let mut span_by_depth = Vec::new();
    let mut frontier: Vec<(BracketWord, FormalVectorField)> = Vec::new();
    let mut basis = EchelonBasis::new();
    for (w, f) in &generators {
        if !f.is_zero() && basis.insert(f.as_sparse_vector()) {
            span.offer(w, f);
            frontier.push((w.clone(), f.clone()));
        }
    }
    span_by_depth.push((1, span.rank()));

    let mut depth = 1;
    while span.rank() < n && depth < limit {
        depth += 1;
        let mut next = Vec::new();
        let mut basis = EchelonBasis::new();
        for (w, fw) in &frontier {
            for (x, fx) in &generators {
                let fb = match fx.bracket(fw) {
                    Ok(f) => f,
                    Err(Error::PrecisionUnderflow) => continue,
                    Err(e) => return Err(e),
                };
                if fb.is_zero() || !basis.insert(fb.as_sparse_vector()) {
                    continue;
                }
                let word = BracketWord::bracket(x.clone(), w.clone());
                span.offer(&word, &fb);
                next.push((word, fb));
            }
        }
        frontier = next;
        span_by_depth.push((depth, span.rank()));
    }

    let outcome = if span.rank() == n {
        FiniteTypeOutcome::FiniteType { type_length: depth }
    } else {
        FiniteTypeOutcome::Undetermined {
            max_depth_reached: depth,
        }
    };
    let spanning_frame = if span.rank() == n {
        span.words
    } else {
        Vec::new()
    };
    Ok(FiniteTypeReport {
        outcome,
        span_by_depth,
        spanning_frame,
        dimension: n,
        precision_limited,
    })
}
