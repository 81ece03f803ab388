//! Reading off `f = c·g` once every coordinate Wronskian vanishes.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::number::GaussianRational;
use crate::series::{Exponent, TruncatedSeries, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotProportional {
    /// Grlex-least offending term: either the leading term of the relation
    /// `f·∂_i g − g·∂_i f` (leading exponents differ) or of `f − c·g`.
    pub witness: Witness,
    /// The coordinate `i` with `α_i ≠ β_i`, when the leading exponents differ.
    pub coordinate: Option<usize>,
}

impl fmt::Display for NotProportional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coordinate {
            Some(i) => write!(
                f,
                "leading exponents differ in coordinate {}: {}",
                i + 1,
                self.witness
            ),
            None => write!(f, "residual f - c*g has term {}", self.witness),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ratio {
    Constant(GaussianRational),
    NotProportional(NotProportional),
}

impl Ratio {
    pub fn constant(&self) -> Option<&GaussianRational> {
        match self {
            Ratio::Constant(c) => Some(c),
            Ratio::NotProportional(_) => None,
        }
    }
}

fn truncated_pair(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    precision: usize,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    if f.frame() != g.frame() {
        return Err(Error::FrameMismatch(f.frame(), g.frame()));
    }
    let f = f.truncate(precision)?;
    let g = g.truncate(precision)?;
    if f.is_zero() {
        return Err(Error::ZeroSeries("f"));
    }
    if g.is_zero() {
        return Err(Error::ZeroSeries("g"));
    }
    Ok((f, g))
}

fn exponent_mismatch(
    f: &TruncatedSeries,
    alpha: &Exponent,
    big_f: &GaussianRational,
    beta: &Exponent,
    big_g: &GaussianRational,
) -> NotProportional {
    let i = alpha
        .powers()
        .iter()
        .zip(beta.powers())
        .position(|(a, b)| a != b)
        .expect("exponents differ");
    let sum = alpha.add(beta);
    // α_i ≠ β_i, so one of them is positive and the sum can be decremented at i.
    let exponent = sum.decrement(i).expect("positive entry");
    let diff = GaussianRational::from(i64::from(beta.powers()[i]) - i64::from(alpha.powers()[i]));
    let coefficient = &(big_f * big_g) * &diff;
    NotProportional {
        witness: Witness {
            frame: f.frame(),
            exponent,
            coefficient,
        },
        coordinate: Some(i),
    }
}

/// Direct check: `c = F/G` from the grlex-least terms, then `f − c·g` must
/// vanish below `certified_precision`.
pub fn ratio_constant(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    certified_precision: usize,
) -> Result<Ratio> {
    let (f, g) = truncated_pair(f, g, certified_precision)?;
    let (alpha, big_f) = f.leading_term().expect("nonzero");
    let (beta, big_g) = g.leading_term().expect("nonzero");
    if alpha != beta {
        return Ok(Ratio::NotProportional(exponent_mismatch(
            &f, alpha, big_f, beta, big_g,
        )));
    }
    let c = big_f
        .checked_div(big_g)
        .expect("nonzero leading coefficient");
    let residual = f.sub(&g.scale(&c))?;
    Ok(match residual.witness() {
        None => Ratio::Constant(c),
        Some(witness) => Ratio::NotProportional(NotProportional {
            witness,
            coordinate: None,
        }),
    })
}

/// One exponent of the term-by-term comparison of `f/F` with `g/G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionStep {
    pub exponent: Exponent,
    pub f_normalized: GaussianRational,
    pub g_normalized: GaussianRational,
}

impl InductionStep {
    pub fn agrees(&self) -> bool {
        self.f_normalized == self.g_normalized
    }
}

/// The induction replayed: after dividing `f` by `F` and `g` by `G`, the
/// coefficients are compared in grlex order from the leading exponent on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionTrace {
    pub leading_f: (Exponent, GaussianRational),
    pub leading_g: (Exponent, GaussianRational),
    /// Every exponent in the support of either series, below the precision.
    pub steps: Vec<InductionStep>,
    pub result: Ratio,
}

pub fn ratio_trace(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    certified_precision: usize,
) -> Result<InductionTrace> {
    let (f, g) = truncated_pair(f, g, certified_precision)?;
    let (alpha, big_f) = f
        .leading_term()
        .map(|(e, c)| (e.clone(), c.clone()))
        .expect("nonzero");
    let (beta, big_g) = g
        .leading_term()
        .map(|(e, c)| (e.clone(), c.clone()))
        .expect("nonzero");
    let leading_f = (alpha.clone(), big_f.clone());
    let leading_g = (beta.clone(), big_g.clone());
    if alpha != beta {
        let np = exponent_mismatch(&f, &alpha, &big_f, &beta, &big_g);
        return Ok(InductionTrace {
            leading_f,
            leading_g,
            steps: Vec::new(),
            result: Ratio::NotProportional(np),
        });
    }
    let inv_f = big_f.inv().expect("nonzero");
    let inv_g = big_g.inv().expect("nonzero");
    let support: BTreeSet<&Exponent> = f.terms().chain(g.terms()).map(|(e, _)| e).collect();
    let mut steps = Vec::with_capacity(support.len());
    let mut result = None;
    for e in support {
        let step = InductionStep {
            exponent: e.clone(),
            f_normalized: &f.coeff(e) * &inv_f,
            g_normalized: &g.coeff(e) * &inv_g,
        };
        if !step.agrees() {
            let coefficient = &(&step.f_normalized - &step.g_normalized) * &big_f;
            let witness = Witness {
                frame: f.frame(),
                exponent: e.clone(),
                coefficient,
            };
            result = Some(Ratio::NotProportional(NotProportional {
                witness,
                coordinate: None,
            }));
            steps.push(step);
            break;
        }
        steps.push(step);
    }
    let result =
        result.unwrap_or_else(|| Ratio::Constant(big_f.checked_div(&big_g).expect("nonzero")));
    Ok(InductionTrace {
        leading_f,
        leading_g,
        steps,
        result,
    })
}
