//! The complexified generic submanifold `𝓜 ⊂ ℂⁿ × ℂⁿ` through the origin.
//!
//! `𝓜` is given by `ξ_j = Θ_j(ζ, z, w)`, equivalently `w_j = Θ̄_j(z, ζ, ξ)`.
//! Coordinates on `𝓜` are `(z, w, ζ)`: ξ is eliminated by `ξ = Θ(ζ, z, w)`.
//! In these coordinates the antiholomorphic generators are exactly
//! `∂/∂ζ_k` and the holomorphic generators carry the series coefficients.

mod bracket;
mod field;
pub(crate) mod finite_type;

pub use bracket::{BracketWord, Generator};
pub use field::{CrFields, FormalVectorField};
pub use finite_type::{finite_type_check, FiniteTypeOutcome, FiniteTypeReport};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::number::GaussianRational;
use crate::series::{Exponent, TruncatedSeries, Variable, VariableFrame};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldModel {
    m: usize,
    d: usize,
    precision: usize,
    /// Θ_j in the FULL frame (no ξ dependence).
    theta: Vec<TruncatedSeries>,
    /// Θ̄_j = conjugate_swap(Θ_j) in the FULL frame (no w dependence).
    theta_bar: Vec<TruncatedSeries>,
    /// Θ_j in the intrinsic frame, the values substituted for ξ_j.
    theta_intrinsic: Vec<TruncatedSeries>,
}

/// Residuals of the tangency identities for one generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangencyResidual {
    pub generator: Generator,
    pub equation: usize,
    pub residual: TruncatedSeries,
}

impl ManifoldModel {
    /// Validates and builds a model from `Θ_1..Θ_d`, given in the FULL or the
    /// intrinsic frame.
    ///
    /// Checks, in order: each Θ_j vanishes at 0, its linear part in `w` is
    /// exactly `w_j`, and the involution identity
    /// `Θ̄_j(z, ζ, Θ(ζ, z, w)) ≡ w_j mod N` holds. Θ̄ is always derived.
    pub fn new(m: usize, d: usize, theta: Vec<TruncatedSeries>, precision: usize) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::InvalidDimensions { m, d });
        }
        if theta.len() != d {
            return Err(Error::ThetaCount {
                expected: d,
                got: theta.len(),
            });
        }
        if precision < 2 {
            return Err(Error::PrecisionUnderflow);
        }
        let full = VariableFrame::full(m, d);
        let intrinsic = VariableFrame::intrinsic(m, d);

        let mut theta_full = Vec::with_capacity(d);
        let mut theta_intrinsic = Vec::with_capacity(d);
        for (j, t) in theta.iter().enumerate() {
            let t = t.truncate(precision)?;
            let ti = t.reframe(intrinsic).map_err(|e| match e {
                Error::VariableNotInFrame { name, .. } => Error::NormalizationFailure {
                    equation: j + 1,
                    reason: format!("theta may not depend on {name}"),
                },
                other => other,
            })?;
            if !ti.constant_term().is_zero() {
                return Err(Error::OriginNotOnManifold { equation: j + 1 });
            }
            for l in 0..d {
                let idx = intrinsic.index_of(Variable::W(l)).expect("w in frame");
                let c = ti.coeff(&Exponent::unit(intrinsic.arity(), idx));
                let expected = if l == j {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                };
                if c != expected {
                    return Err(Error::NormalizationFailure {
                        equation: j + 1,
                        reason: format!("coefficient of w{} is {c}, expected {expected}", l + 1),
                    });
                }
            }
            theta_full.push(ti.reframe(full)?);
            theta_intrinsic.push(ti);
        }
        let theta_bar = theta_full
            .iter()
            .map(TruncatedSeries::conjugate_swap)
            .collect::<Result<Vec<_>>>()?;

        let model = Self {
            m,
            d,
            precision,
            theta: theta_full,
            theta_bar,
            theta_intrinsic,
        };
        for (j, residual) in model.involution_residuals()?.into_iter().enumerate() {
            if let Some(witness) = residual.witness() {
                return Err(Error::InvolutionFailure {
                    equation: j + 1,
                    witness: Box::new(witness),
                });
            }
        }
        Ok(model)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Dimension `2m + d` of `𝓜`.
    pub fn dimension(&self) -> usize {
        2 * self.m + self.d
    }

    pub fn theta(&self) -> &[TruncatedSeries] {
        &self.theta
    }

    pub fn theta_bar(&self) -> &[TruncatedSeries] {
        &self.theta_bar
    }

    pub fn theta_intrinsic(&self) -> &[TruncatedSeries] {
        &self.theta_intrinsic
    }

    pub fn full_frame(&self) -> VariableFrame {
        VariableFrame::full(self.m, self.d)
    }

    pub fn intrinsic_frame(&self) -> VariableFrame {
        VariableFrame::intrinsic(self.m, self.d)
    }

    pub fn t_frame(&self) -> VariableFrame {
        VariableFrame::t(self.m, self.d)
    }

    /// `a(z, w, ζ, ξ) ↦ a(z, w, ζ, Θ(ζ, z, w))`.
    pub fn restrict_to_m(&self, p: &TruncatedSeries) -> Result<TruncatedSeries> {
        let full = self.full_frame();
        if p.frame() != full {
            return Err(Error::FrameMismatch(full, p.frame()));
        }
        let intrinsic = self.intrinsic_frame();
        let n = self.precision.max(p.precision());
        let mut assignment = Vec::with_capacity(full.arity());
        for v in full.variables() {
            assignment.push(match v {
                Variable::Xi(j) => self.theta_intrinsic[j].clone(),
                other => TruncatedSeries::var(intrinsic, other, n)?,
            });
        }
        p.substitute(&assignment)
    }

    /// `Θ̄_j(z, ζ, Θ(ζ, z, w)) − w_j`, one per equation; empty for a valid model.
    pub fn involution_residuals(&self) -> Result<Vec<TruncatedSeries>> {
        let intrinsic = self.intrinsic_frame();
        (0..self.d)
            .map(|j| {
                let w = TruncatedSeries::var(intrinsic, Variable::W(j), self.precision)?;
                self.restrict_to_m(&self.theta_bar[j])?.sub(&w)
            })
            .collect()
    }

    /// Tangency identities in chain-rule form, restricted to `𝓜`:
    ///
    /// - for `𝓛_k`: `∂Θ_ℓ/∂z_k + Σ_j ∂Θ̄_j/∂z_k · ∂Θ_ℓ/∂w_j`
    /// - for `𝓛̲_k`: `∂Θ̄_ℓ/∂ζ_k + Σ_j ∂Θ_j/∂ζ_k · ∂Θ̄_ℓ/∂ξ_j`
    ///
    /// Every residual vanishes modulo `N - 1` on a valid model.
    pub fn tangency_residuals(&self) -> Result<Vec<TangencyResidual>> {
        let full = self.full_frame();
        let idx = |v: Variable| full.index_of(v).expect("variable in FULL frame");
        let mut out = Vec::new();
        for k in 0..self.m {
            for l in 0..self.d {
                let mut acc = self.theta[l].derivative(idx(Variable::Z(k)))?;
                for j in 0..self.d {
                    let a = self.theta_bar[j].derivative(idx(Variable::Z(k)))?;
                    let b = self.theta[l].derivative(idx(Variable::W(j)))?;
                    acc = acc.add(&a.mul(&b)?)?;
                }
                out.push(TangencyResidual {
                    generator: Generator::L(k),
                    equation: l,
                    residual: self.restrict_to_m(&acc)?,
                });
            }
        }
        for k in 0..self.m {
            for l in 0..self.d {
                let mut acc = self.theta_bar[l].derivative(idx(Variable::Zeta(k)))?;
                for j in 0..self.d {
                    let a = self.theta[j].derivative(idx(Variable::Zeta(k)))?;
                    let b = self.theta_bar[l].derivative(idx(Variable::Xi(j)))?;
                    acc = acc.add(&a.mul(&b)?)?;
                }
                out.push(TangencyResidual {
                    generator: Generator::U(k),
                    equation: l,
                    residual: self.restrict_to_m(&acc)?,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn full_var(m: usize, d: usize, v: Variable, n: usize) -> TruncatedSeries {
        TruncatedSeries::var(VariableFrame::full(m, d), v, n).unwrap()
    }

    /// `Θ = w - c·z^k ζ^k` for m = d = 1.
    pub(crate) fn power_theta(k: u32, c: GaussianRational, n: usize) -> TruncatedSeries {
        let z = full_var(1, 1, Variable::Z(0), n);
        let zeta = full_var(1, 1, Variable::Zeta(0), n);
        let w = full_var(1, 1, Variable::W(0), n);
        w.sub(
            &z.pow(k)
                .unwrap()
                .mul(&zeta.pow(k).unwrap())
                .unwrap()
                .scale(&c),
        )
        .unwrap()
    }

    pub(crate) fn two_i() -> GaussianRational {
        GaussianRational::i().scale_int(2)
    }

    pub(crate) fn heisenberg(n: usize) -> ManifoldModel {
        ManifoldModel::new(1, 1, vec![power_theta(1, two_i(), n)], n).unwrap()
    }

    pub(crate) fn power_model(k: u32, n: usize) -> ManifoldModel {
        ManifoldModel::new(1, 1, vec![power_theta(k, two_i(), n)], n).unwrap()
    }

    pub(crate) fn levi_flat(n: usize) -> ManifoldModel {
        ManifoldModel::new(1, 1, vec![full_var(1, 1, Variable::W(0), n)], n).unwrap()
    }

    #[test]
    fn heisenberg_is_accepted_with_derived_bar() {
        let m = heisenberg(8);
        assert_eq!(m.theta_bar()[0].to_string(), "xi1 + 2*i*z1*zeta1");
        assert!(m
            .involution_residuals()
            .unwrap()
            .iter()
            .all(TruncatedSeries::is_zero));
    }

    #[test]
    fn real_coefficient_quadric_is_rejected() {
        let theta = power_theta(1, GaussianRational::one(), 8);
        match ManifoldModel::new(1, 1, vec![theta], 8) {
            Err(Error::InvolutionFailure { equation, witness }) => {
                assert_eq!(equation, 1);
                assert_eq!(witness.monomial(), "z1*zeta1");
                assert_eq!(witness.coefficient, GaussianRational::from(-2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn origin_and_normalization_are_checked() {
        let n = 6;
        let w = full_var(1, 1, Variable::W(0), n);
        let one = TruncatedSeries::one(VariableFrame::full(1, 1), n).unwrap();
        assert_eq!(
            ManifoldModel::new(1, 1, vec![w.add(&one).unwrap()], n),
            Err(Error::OriginNotOnManifold { equation: 1 })
        );
        assert!(matches!(
            ManifoldModel::new(1, 1, vec![w.scale(&GaussianRational::from(2))], n),
            Err(Error::NormalizationFailure { equation: 1, .. })
        ));
        let xi = full_var(1, 1, Variable::Xi(0), n);
        assert!(matches!(
            ManifoldModel::new(1, 1, vec![w.add(&xi.mul(&xi).unwrap()).unwrap()], n),
            Err(Error::NormalizationFailure { .. })
        ));
        assert_eq!(
            ManifoldModel::new(0, 1, vec![], n),
            Err(Error::InvalidDimensions { m: 0, d: 1 })
        );
    }

    #[test]
    fn linear_z_terms_with_matching_conjugate_are_valid() {
        // Θ = w + a z − ā ζ is a real hyperplane
        let n = 5;
        let a = GaussianRational::from_parts((1, 1), (2, 1));
        let theta = full_var(1, 1, Variable::W(0), n)
            .add(&full_var(1, 1, Variable::Z(0), n).scale(&a))
            .unwrap()
            .sub(&full_var(1, 1, Variable::Zeta(0), n).scale(&a.conj()))
            .unwrap();
        assert!(ManifoldModel::new(1, 1, vec![theta], n).is_ok());
    }

    #[test]
    fn restriction_examples() {
        let n = 8;
        let h = heisenberg(n);
        let w = full_var(1, 1, Variable::W(0), n);
        let xi = full_var(1, 1, Variable::Xi(0), n);
        let r = h.restrict_to_m(&w.sub(&xi).unwrap()).unwrap();
        assert_eq!(r.to_string(), "2*i*z1*zeta1");
        assert_eq!(r.frame(), VariableFrame::intrinsic(1, 1));
        assert!(h
            .restrict_to_m(&xi.sub(&h.theta()[0]).unwrap())
            .unwrap()
            .is_zero());
        assert!(levi_flat(n)
            .restrict_to_m(&w.sub(&xi).unwrap())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn tangency_holds_for_example_models() {
        for model in [
            heisenberg(8),
            power_model(2, 8),
            power_model(3, 9),
            levi_flat(6),
        ] {
            for t in model.tangency_residuals().unwrap() {
                assert!(
                    t.residual.is_zero(),
                    "{:?} eq {} -> {}",
                    t.generator,
                    t.equation,
                    t.residual
                );
                assert_eq!(t.residual.precision(), model.precision() - 1);
            }
        }
    }

    #[test]
    fn two_codimensional_model() {
        // m = 1, d = 2: ξ1 = w1 − 2i zζ, ξ2 = w2 − 2i(z²ζ + zζ²)
        let (m, d, n) = (1, 2, 7);
        let v = |var| full_var(m, d, var, n);
        let z = v(Variable::Z(0));
        let zeta = v(Variable::Zeta(0));
        let t1 = v(Variable::W(0))
            .sub(&z.mul(&zeta).unwrap().scale(&two_i()))
            .unwrap();
        let cubic = z
            .mul(&z)
            .unwrap()
            .mul(&zeta)
            .unwrap()
            .add(&z.mul(&zeta).unwrap().mul(&zeta).unwrap())
            .unwrap();
        let t2 = v(Variable::W(1)).sub(&cubic.scale(&two_i())).unwrap();
        let model = ManifoldModel::new(m, d, vec![t1, t2], n).unwrap();
        for t in model.tangency_residuals().unwrap() {
            assert!(t.residual.is_zero());
        }
    }
}
