//! Ring operations and differentiation.
//!
//! Binary operations require equal frames and return precision
//! `min(N_p, N_q)`; differentiation returns `N - 1`.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Exponent, TruncatedSeries};
use crate::error::{Error, Result};
use crate::number::GaussianRational;

impl TruncatedSeries {
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        let precision = self.precision.min(other.precision);
        let mut out = self.truncate(precision)?;
        for (e, c) in &other.coeffs {
            out.accumulate(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            frame: self.frame,
            precision: self.precision,
            coeffs: self.coeffs.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return Self {
                coeffs: BTreeMap::new(),
                ..self.clone()
            };
        }
        Self {
            frame: self.frame,
            precision: self.precision,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e.clone(), c * s))
                .collect(),
        }
    }

    /// Truncated product; all monomials of degree `>= min(N_p, N_q)` are
    /// discarded.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        let precision = self.precision.min(other.precision);
        let mut table: BTreeMap<Exponent, GaussianRational> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            let room = precision.saturating_sub(ea.total_degree() as usize);
            if room == 0 {
                // terms are grlex-sorted, so every later term is at least as deep
                break;
            }
            for (eb, cb) in &other.coeffs {
                if eb.total_degree() as usize >= room {
                    break;
                }
                let prod = ca * cb;
                *table.entry(ea.add(eb)).or_default() += &prod;
            }
        }
        table.retain(|_, c| !c.is_zero());
        Ok(Self {
            frame: self.frame,
            precision,
            coeffs: table,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.frame, self.precision)?;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `∂p/∂x_index` with precision `N - 1`; fails when that would be zero.
    pub fn derivative(&self, index: usize) -> Result<Self> {
        if index >= self.frame.arity() {
            return Err(Error::VariableOutOfRange {
                index,
                frame: self.frame,
            });
        }
        if self.precision <= 1 {
            return Err(Error::PrecisionUnderflow);
        }
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            if let Some(lower) = e.decrement(index) {
                let k = e.powers()[index] as i64;
                coeffs.insert(lower, c.scale_int(k));
            }
        }
        Ok(Self {
            frame: self.frame,
            precision: self.precision - 1,
            coeffs,
        })
    }
}

/// Division by a nonzero factor at finite precision.
///
/// If `product ≡ 0 mod N` and `factor` has order `ω < N`, then any cofactor
/// `q` with `q · factor = product` vanishes modulo degree `N - ω`. Returns that
/// bound after checking the hypotheses.
pub fn cofactor_cancel(product: &TruncatedSeries, factor: &TruncatedSeries) -> Result<usize> {
    let n = product.precision();
    if let Some(w) = product.witness() {
        return Err(Error::NotZero(Box::new(w)));
    }
    let order = factor.order().ok_or(Error::ZeroFactor {
        precision: factor.precision(),
    })?;
    if order as usize >= n {
        return Err(Error::FactorOrderTooLarge {
            order,
            precision: n,
        });
    }
    Ok(n - order as usize)
}
