use std::collections::BTreeMap;

use num_traits::One;

use super::{Generator, ManifoldModel};
use crate::error::{Error, Result};
use crate::number::GaussianRational;
use crate::series::{Exponent, TruncatedSeries, Variable, VariableFrame};

/// A vector field `Σ_i X^i ∂/∂x_i` with truncated series coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalVectorField {
    frame: VariableFrame,
    precision: usize,
    coeffs: Vec<TruncatedSeries>,
}

impl FormalVectorField {
    /// One coefficient per coordinate of `frame`; precision is the minimum.
    pub fn new(frame: VariableFrame, coeffs: Vec<TruncatedSeries>) -> Result<Self> {
        if coeffs.len() != frame.arity() {
            return Err(Error::ArityMismatch(coeffs.len(), frame.arity()));
        }
        for c in &coeffs {
            if c.frame() != frame {
                return Err(Error::FrameMismatch(frame, c.frame()));
            }
        }
        let precision = coeffs
            .iter()
            .map(TruncatedSeries::precision)
            .min()
            .ok_or(Error::ZeroPrecision)?;
        let coeffs = coeffs
            .iter()
            .map(|c| c.truncate(precision))
            .collect::<Result<_>>()?;
        Ok(Self {
            frame,
            precision,
            coeffs,
        })
    }

    pub fn zero(frame: VariableFrame, precision: usize) -> Result<Self> {
        let coeffs = (0..frame.arity())
            .map(|_| TruncatedSeries::zero(frame, precision))
            .collect::<Result<_>>()?;
        Ok(Self {
            frame,
            precision,
            coeffs,
        })
    }

    /// `∂/∂x_index`.
    pub fn coordinate(frame: VariableFrame, index: usize, precision: usize) -> Result<Self> {
        if index >= frame.arity() {
            return Err(Error::VariableOutOfRange { index, frame });
        }
        let coeffs = (0..frame.arity())
            .map(|i| {
                if i == index {
                    TruncatedSeries::one(frame, precision)
                } else {
                    TruncatedSeries::zero(frame, precision)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            frame,
            precision,
            coeffs,
        })
    }

    pub fn frame(&self) -> VariableFrame {
        self.frame
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn coeffs(&self) -> &[TruncatedSeries] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TruncatedSeries::is_zero)
    }

    /// `X(p) = Σ_i X^i ∂_i p`, precision `min(N_X, N_p − 1)`.
    pub fn apply(&self, p: &TruncatedSeries) -> Result<TruncatedSeries> {
        if p.frame() != self.frame {
            return Err(Error::FrameMismatch(self.frame, p.frame()));
        }
        if p.precision() <= 1 {
            return Err(Error::PrecisionUnderflow);
        }
        let precision = self.precision.min(p.precision() - 1);
        let mut acc = TruncatedSeries::zero(self.frame, precision)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&c.mul(&p.derivative(i)?)?)?;
        }
        Ok(acc)
    }

    /// `[X, Y]^i = X(Y^i) − Y(X^i)`, precision `min(N_X, N_Y) − 1`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch(self.frame, other.frame));
        }
        let base = self.precision.min(other.precision);
        if base <= 1 {
            return Err(Error::PrecisionUnderflow);
        }
        let precision = base - 1;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(xi, yi)| self.apply(yi)?.sub(&other.apply(xi)?)?.truncate(precision))
            .collect::<Result<_>>()?;
        Ok(Self {
            frame: self.frame,
            precision,
            coeffs,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch(self.frame, other.frame));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Self::new(self.frame, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-GaussianRational::one()))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|s| s.scale(c)).collect(),
            ..self.clone()
        }
    }

    /// Multiplies every coefficient by the function `h`.
    pub fn scale_by_series(&self, h: &TruncatedSeries) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| s.mul(h))
            .collect::<Result<_>>()?;
        Self::new(self.frame, coeffs)
    }

    /// Constant terms of the coefficients: the value of the field at 0.
    pub fn evaluate_at_origin(&self) -> Vec<GaussianRational> {
        self.coeffs
            .iter()
            .map(TruncatedSeries::constant_term)
            .collect()
    }

    /// Flattens the coefficient tables into one sparse vector, for exact
    /// linear dependence tests between fields of equal precision.
    pub fn as_sparse_vector(&self) -> BTreeMap<(usize, Exponent), GaussianRational> {
        let mut v = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            for (e, x) in c.terms() {
                v.insert((i, e.clone()), x.clone());
            }
        }
        v
    }
}

/// The generators `𝓛_1..𝓛_m` and `𝓛̲_1..𝓛̲_m` of a model, in intrinsic
/// coordinates `(z, w, ζ)`.
#[derive(Clone, Debug)]
pub struct CrFields {
    l: Vec<FormalVectorField>,
    u: Vec<FormalVectorField>,
}

impl CrFields {
    pub fn new(model: &ManifoldModel) -> Result<Self> {
        Ok(Self {
            l: build_l_fields(model)?,
            u: build_u_fields(model)?,
        })
    }

    pub fn l(&self) -> &[FormalVectorField] {
        &self.l
    }

    pub fn u(&self) -> &[FormalVectorField] {
        &self.u
    }

    pub fn get(&self, g: Generator) -> Result<&FormalVectorField> {
        match g {
            Generator::L(k) => self.l.get(k),
            Generator::U(k) => self.u.get(k),
        }
        .ok_or(Error::GeneratorOutOfRange(g.index()))
    }

    /// `L_1..L_m, U_1..U_m`.
    pub fn generators(&self) -> Vec<Generator> {
        (0..self.l.len())
            .map(Generator::L)
            .chain((0..self.u.len()).map(Generator::U))
            .collect()
    }
}

/// `𝓛_k = ∂/∂z_k + Σ_j (∂Θ̄_j/∂z_k)|_𝓜 ∂/∂w_j`, precision `N − 1`.
pub fn build_l_fields(model: &ManifoldModel) -> Result<Vec<FormalVectorField>> {
    let full = model.full_frame();
    let intrinsic = model.intrinsic_frame();
    let n = model.precision() - 1;
    (0..model.m())
        .map(|k| {
            let mut coeffs: Vec<TruncatedSeries> = (0..intrinsic.arity())
                .map(|_| TruncatedSeries::zero(intrinsic, n))
                .collect::<Result<_>>()?;
            coeffs[intrinsic.index_of(Variable::Z(k)).expect("z in frame")] =
                TruncatedSeries::one(intrinsic, n)?;
            let zk = full.index_of(Variable::Z(k)).expect("z in frame");
            for j in 0..model.d() {
                let c = model.restrict_to_m(&model.theta_bar()[j].derivative(zk)?)?;
                coeffs[intrinsic.index_of(Variable::W(j)).expect("w in frame")] = c;
            }
            FormalVectorField::new(intrinsic, coeffs)
        })
        .collect()
}

/// `𝓛̲_k = ∂/∂ζ_k` in intrinsic coordinates, precision `N`.
pub fn build_u_fields(model: &ManifoldModel) -> Result<Vec<FormalVectorField>> {
    let intrinsic = model.intrinsic_frame();
    (0..model.m())
        .map(|k| {
            let idx = intrinsic
                .index_of(Variable::Zeta(k))
                .expect("zeta in frame");
            FormalVectorField::coordinate(intrinsic, idx, model.precision())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::tests::{heisenberg, levi_flat, power_model, two_i};
    use num_traits::Zero;

    fn intrinsic_var(v: Variable, n: usize) -> TruncatedSeries {
        TruncatedSeries::var(VariableFrame::intrinsic(1, 1), v, n).unwrap()
    }

    #[test]
    fn heisenberg_generators() {
        let fields = CrFields::new(&heisenberg(8)).unwrap();
        let l = &fields.l()[0];
        assert_eq!(l.precision(), 7);
        assert_eq!(l.coeffs()[0].to_string(), "1");
        assert_eq!(l.coeffs()[1].to_string(), "2*i*zeta1");
        assert!(l.coeffs()[2].is_zero());
        let u = &fields.u()[0];
        assert_eq!(u.precision(), 8);
        assert_eq!(
            u.evaluate_at_origin(),
            vec![
                GaussianRational::zero(),
                GaussianRational::zero(),
                GaussianRational::one()
            ]
        );
    }

    #[test]
    fn levi_flat_l_is_coordinate_field() {
        let fields = CrFields::new(&levi_flat(8)).unwrap();
        assert_eq!(
            fields.l()[0],
            FormalVectorField::coordinate(VariableFrame::intrinsic(1, 1), 0, 7).unwrap()
        );
    }

    #[test]
    fn bracket_examples() {
        let fields = CrFields::new(&heisenberg(8)).unwrap();
        let (l, u) = (&fields.l()[0], &fields.u()[0]);
        let ul = u.bracket(l).unwrap();
        assert_eq!(ul.precision(), 6);
        assert_eq!(
            ul.evaluate_at_origin(),
            vec![GaussianRational::zero(), two_i(), GaussianRational::zero()]
        );
        assert_eq!(
            ul,
            FormalVectorField::coordinate(VariableFrame::intrinsic(1, 1), 1, 6)
                .unwrap()
                .scale(&two_i())
        );
        assert!(l.bracket(l).unwrap().is_zero());
        assert_eq!(l.bracket(u).unwrap(), ul.scale(&-GaussianRational::one()));
    }

    #[test]
    fn apply_examples() {
        let fr = VariableFrame::intrinsic(1, 1);
        let z = intrinsic_var(Variable::Z(0), 6);
        let dz = FormalVectorField::coordinate(fr, 0, 6).unwrap();
        assert_eq!(
            dz.apply(&z.mul(&z).unwrap()).unwrap(),
            z.scale(&GaussianRational::from(2)).truncate(5).unwrap()
        );
        let fields = CrFields::new(&heisenberg(8)).unwrap();
        let lw = fields.l()[0]
            .apply(&intrinsic_var(Variable::W(0), 8))
            .unwrap();
        assert_eq!(lw.to_string(), "2*i*zeta1");
        assert_eq!(lw.precision(), 7);
    }

    #[test]
    fn l_annihilates_xi_on_the_manifold() {
        for model in [heisenberg(8), power_model(2, 8)] {
            let fields = CrFields::new(&model).unwrap();
            for l in fields.l() {
                for t in model.theta_intrinsic() {
                    assert!(l.apply(t).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn u_kills_t_frame_functions() {
        let model = heisenberg(8);
        let fields = CrFields::new(&model).unwrap();
        let f = intrinsic_var(Variable::Z(0), 8)
            .mul(&intrinsic_var(Variable::W(0), 8))
            .unwrap();
        assert!(fields.u()[0].apply(&f).unwrap().is_zero());
    }

    #[test]
    fn underflow() {
        let fr = VariableFrame::intrinsic(1, 1);
        let x = FormalVectorField::coordinate(fr, 0, 1).unwrap();
        assert_eq!(x.bracket(&x), Err(Error::PrecisionUnderflow));
        let p = TruncatedSeries::one(fr, 1).unwrap();
        assert_eq!(x.apply(&p), Err(Error::PrecisionUnderflow));
    }
}
