//! Substitution, frame changes and the conjugation operator.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Exponent, TruncatedSeries, VariableFrame};
use crate::error::{Error, Result};
use crate::number::GaussianRational;

impl TruncatedSeries {
    /// Composes `p(s_1, ..., s_n)` where `assignment[i]` replaces variable `i`.
    ///
    /// All substituted series must live in one target frame. A variable that
    /// `p` actually uses must receive a series without constant term, which
    /// keeps the usual precision semantics. The result has precision
    /// `min(N_p, N_{s_1}, ..., N_{s_n})`.
    pub fn substitute(&self, assignment: &[TruncatedSeries]) -> Result<TruncatedSeries> {
        let arity = self.frame.arity();
        if assignment.len() != arity {
            return Err(Error::AssignmentLength {
                expected: arity,
                got: assignment.len(),
            });
        }
        let Some(first) = assignment.first() else {
            return Ok(self.clone());
        };
        let target = first.frame();
        let mut precision = self.precision;
        for s in assignment {
            if s.frame() != target {
                return Err(Error::FrameMismatch(target, s.frame()));
            }
            precision = precision.min(s.precision());
        }
        let mut used = vec![false; arity];
        for e in self.coeffs.keys() {
            for (u, p) in used.iter_mut().zip(e.powers()) {
                *u |= *p > 0;
            }
        }
        for (i, s) in assignment.iter().enumerate() {
            if used[i] && !s.constant_term().is_zero() {
                let name = self
                    .frame
                    .variable(i)
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                return Err(Error::ConstantTermSubstitution { name });
            }
        }

        let mut powers: Vec<Vec<TruncatedSeries>> = assignment
            .iter()
            .map(|s| s.truncate(precision).map(|s| vec![s]))
            .collect::<Result<_>>()?;
        let mut table: BTreeMap<Exponent, GaussianRational> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            if e.total_degree() as usize >= precision {
                break;
            }
            let mut term = TruncatedSeries::constant(target, c.clone(), precision)?;
            for (i, p) in e.powers().iter().enumerate() {
                if *p == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() < *p as usize {
                    let next = cache.last().expect("nonempty").mul(&cache[0])?;
                    cache.push(next);
                }
                term = term.mul(&cache[*p as usize - 1])?;
                if term.is_zero() {
                    break;
                }
            }
            for (te, tc) in term.coeffs {
                *table.entry(te).or_default() += &tc;
            }
        }
        table.retain(|_, c| !c.is_zero());
        Ok(TruncatedSeries {
            frame: target,
            precision,
            coeffs: table,
        })
    }

    /// Rewrites the series in another frame with the same `(m, d)`, matching
    /// variables by name. Fails if a variable that occurs does not exist in
    /// the target.
    pub fn reframe(&self, target: VariableFrame) -> Result<TruncatedSeries> {
        if target.m() != self.frame.m() || target.d() != self.frame.d() {
            return Err(Error::FrameMismatch(self.frame, target));
        }
        if target == self.frame {
            return Ok(self.clone());
        }
        let map = self.slot_map(target, false);
        self.remap(target, &map, false)
    }

    /// The bar operator: conjugates every coefficient and renames
    /// `z ↔ ζ`, `w ↔ ξ`. Maps T to TAU, TAU to T and FULL to itself.
    pub fn conjugate_swap(&self) -> Result<TruncatedSeries> {
        let target = self
            .frame
            .conjugate()
            .ok_or(Error::UnsupportedFrame(self.frame))?;
        let map = self.slot_map(target, true);
        self.remap(target, &map, true)
    }

    fn slot_map(&self, target: VariableFrame, conjugate: bool) -> Vec<Option<usize>> {
        (0..self.frame.arity())
            .map(|i| {
                let v = self.frame.variable(i).expect("in range");
                let v = if conjugate { v.conjugate() } else { v };
                target.index_of(v)
            })
            .collect()
    }

    fn remap(
        &self,
        target: VariableFrame,
        map: &[Option<usize>],
        conjugate: bool,
    ) -> Result<TruncatedSeries> {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let mut powers = vec![0u32; target.arity()];
            for (i, p) in e.powers().iter().enumerate() {
                if *p == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => powers[j] = *p,
                    None => {
                        let name = self
                            .frame
                            .variable(i)
                            .map(|v| v.to_string())
                            .unwrap_or_default();
                        return Err(Error::VariableNotInFrame {
                            name,
                            frame: target,
                        });
                    }
                }
            }
            let c = if conjugate { c.conj() } else { c.clone() };
            coeffs.insert(Exponent::new(powers), c);
        }
        Ok(TruncatedSeries {
            frame: target,
            precision: self.precision,
            coeffs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Variable;

    fn full() -> VariableFrame {
        VariableFrame::full(1, 1)
    }

    fn v(var: Variable, n: usize) -> TruncatedSeries {
        TruncatedSeries::var(full(), var, n).unwrap()
    }

    fn heisenberg_theta(n: usize) -> TruncatedSeries {
        let two_i = GaussianRational::i().scale_int(2);
        v(Variable::W(0), n)
            .sub(
                &v(Variable::Z(0), n)
                    .mul(&v(Variable::Zeta(0), n))
                    .unwrap()
                    .scale(&two_i),
            )
            .unwrap()
    }

    #[test]
    fn substitute_xi_into_w_minus_xi() {
        let n = 8;
        let p = v(Variable::W(0), n).sub(&v(Variable::Xi(0), n)).unwrap();
        let assignment = vec![
            v(Variable::Z(0), n),
            v(Variable::W(0), n),
            v(Variable::Zeta(0), n),
            heisenberg_theta(n),
        ];
        let r = p.substitute(&assignment).unwrap();
        assert_eq!(r.to_string(), "2*i*z1*zeta1");
        assert_eq!(r.precision(), n);
    }

    #[test]
    fn identity_substitution() {
        let n = 6;
        let p = heisenberg_theta(n)
            .pow(2)
            .unwrap()
            .add(&v(Variable::Xi(0), n))
            .unwrap();
        let id: Vec<_> = (0..4)
            .map(|i| TruncatedSeries::variable(full(), i, n).unwrap())
            .collect();
        assert_eq!(p.substitute(&id).unwrap(), p);
    }

    #[test]
    fn zero_substitution_gives_constant_term() {
        let n = 5;
        let p = heisenberg_theta(n)
            .add(&TruncatedSeries::constant(full(), GaussianRational::from(7), n).unwrap())
            .unwrap();
        let zeros: Vec<_> = (0..4)
            .map(|_| TruncatedSeries::zero(full(), n).unwrap())
            .collect();
        let r = p.substitute(&zeros).unwrap();
        assert_eq!(
            r,
            TruncatedSeries::constant(full(), GaussianRational::from(7), n).unwrap()
        );
    }

    #[test]
    fn constant_term_for_used_variable_is_rejected() {
        let n = 5;
        let p = v(Variable::Z(0), n);
        let mut a: Vec<_> = (0..4)
            .map(|i| TruncatedSeries::variable(full(), i, n).unwrap())
            .collect();
        a[0] = TruncatedSeries::one(full(), n).unwrap();
        assert!(matches!(
            p.substitute(&a),
            Err(Error::ConstantTermSubstitution { .. })
        ));
        // unused variable may carry a constant
        a[0] = v(Variable::Z(0), n);
        a[3] = TruncatedSeries::one(full(), n).unwrap();
        assert_eq!(p.substitute(&a).unwrap(), p);
    }

    #[test]
    fn precision_is_min_over_inputs() {
        let p = v(Variable::Z(0), 9);
        let mut a: Vec<_> = (0..4)
            .map(|i| TruncatedSeries::variable(full(), i, 9).unwrap())
            .collect();
        a[2] = a[2].truncate(4).unwrap();
        assert_eq!(p.substitute(&a).unwrap().precision(), 4);
    }

    #[test]
    fn conjugate_swap_examples() {
        let t = VariableFrame::t(1, 1);
        let iz = TruncatedSeries::var(t, Variable::Z(0), 4)
            .unwrap()
            .scale(&GaussianRational::i());
        let bar = iz.conjugate_swap().unwrap();
        assert_eq!(bar.frame(), VariableFrame::tau(1, 1));
        assert_eq!(
            bar,
            TruncatedSeries::var(VariableFrame::tau(1, 1), Variable::Zeta(0), 4)
                .unwrap()
                .scale(&-GaussianRational::i())
        );
        assert_eq!(bar.conjugate_swap().unwrap(), iz);

        let theta_bar = heisenberg_theta(8).conjugate_swap().unwrap();
        assert_eq!(theta_bar.to_string(), "xi1 + 2*i*z1*zeta1");
        let intrinsic = TruncatedSeries::one(VariableFrame::intrinsic(1, 1), 3).unwrap();
        assert!(matches!(
            intrinsic.conjugate_swap(),
            Err(Error::UnsupportedFrame(_))
        ));
    }

    #[test]
    fn reframe_embeds_and_rejects_missing_variables() {
        let t = VariableFrame::t(1, 1);
        let w = TruncatedSeries::var(t, Variable::W(0), 5).unwrap();
        let e = w.reframe(full()).unwrap();
        assert_eq!(e, v(Variable::W(0), 5));
        assert_eq!(e.reframe(t).unwrap(), w);
        let xi = v(Variable::Xi(0), 5);
        assert!(matches!(
            xi.reframe(VariableFrame::intrinsic(1, 1)),
            Err(Error::VariableNotInFrame { .. })
        ));
    }
}
