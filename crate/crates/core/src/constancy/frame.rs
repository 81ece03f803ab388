//! Expressing coordinate fields in a spanning bracket frame.
//!
//! With `A[k][j]` the k-th coefficient of frame field `T_j`, the coordinate
//! field `∂_i` equals `Σ_j u_i[j] T_j` where `A·u_i = e_i`. Since
//! `A − A(0)` has order at least 1, the iteration
//! `u ← A(0)⁻¹(e_i − (A − A(0))u)` gains one correct degree per step.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::{BracketWord, CrFields, ManifoldModel};
use crate::number::GaussianRational;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameInverse {
    pub words: Vec<BracketWord>,
    /// `coefficients[i][j]` = `a_ij`, so that `∂_i = Σ_j a_ij T_j`.
    pub coefficients: Vec<Vec<TruncatedSeries>>,
    pub precision: usize,
    /// Largest number of iterations any system needed to stabilize.
    pub iterations: usize,
}

/// Inverts the frame given by `words`, which must number `2m + d`.
pub fn invert_bracket_frame(model: &ManifoldModel, words: &[BracketWord]) -> Result<FrameInverse> {
    let fields = CrFields::new(model)?;
    invert_with(&fields, words, model.dimension())
}

pub(crate) fn invert_with(
    fields: &CrFields,
    words: &[BracketWord],
    dimension: usize,
) -> Result<FrameInverse> {
    if words.len() != dimension {
        return Err(Error::FrameSize {
            expected: dimension,
            got: words.len(),
        });
    }
    let mut memo = BTreeMap::new();
    let frame_fields = words
        .iter()
        .map(|w| w.materialize_with(fields, &mut memo))
        .collect::<Result<Vec<_>>>()?;
    let a: Vec<Vec<TruncatedSeries>> = (0..dimension)
        .map(|k| frame_fields.iter().map(|t| t.coeffs()[k].clone()).collect())
        .collect();
    let (coefficients, iterations) = solve_counting(&a)?;
    let precision = coefficients
        .first()
        .and_then(|row| row.first())
        .map_or(0, TruncatedSeries::precision);
    Ok(FrameInverse {
        words: words.to_vec(),
        coefficients,
        precision,
        iterations,
    })
}

/// Solves `A·u_i = e_i` for every `i`; entry `[i][j]` of the result is
/// `u_i[j]`, at the minimum precision of `A`.
pub fn solve_unit_systems(a: &[Vec<TruncatedSeries>]) -> Result<Vec<Vec<TruncatedSeries>>> {
    solve_counting(a).map(|(u, _)| u)
}

fn solve_counting(a: &[Vec<TruncatedSeries>]) -> Result<(Vec<Vec<TruncatedSeries>>, usize)> {
    let n = a.len();
    if n == 0 {
        return Err(Error::FrameSize {
            expected: 1,
            got: 0,
        });
    }
    if let Some(row) = a.iter().find(|row| row.len() != n) {
        return Err(Error::FrameSize {
            expected: n,
            got: row.len(),
        });
    }
    let frame = a[0][0].frame();
    let precision = a
        .iter()
        .flatten()
        .map(TruncatedSeries::precision)
        .min()
        .expect("nonempty");
    let a = a
        .iter()
        .map(|row| row.iter().map(|s| s.truncate(precision)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;

    let a0: Vec<Vec<GaussianRational>> = a
        .iter()
        .map(|row| row.iter().map(TruncatedSeries::constant_term).collect())
        .collect();
    let inv = linalg::invert(&a0).ok_or(Error::SingularFrame)?;
    let tail: Vec<Vec<TruncatedSeries>> = a
        .iter()
        .zip(&a0)
        .map(|(row, row0)| {
            row.iter()
                .zip(row0)
                .map(|(s, c)| s.sub(&TruncatedSeries::constant(frame, c.clone(), precision)?))
                .collect()
        })
        .collect::<Result<_>>()?;

    let apply_inv = |v: &[TruncatedSeries]| -> Result<Vec<TruncatedSeries>> {
        inv.iter()
            .map(|row| {
                let mut acc = TruncatedSeries::zero(frame, precision)?;
                for (c, s) in row.iter().zip(v) {
                    if !c.is_zero() {
                        acc = acc.add(&s.scale(c))?;
                    }
                }
                Ok(acc)
            })
            .collect()
    };

    let mut solutions = Vec::with_capacity(n);
    let mut max_iterations = 0;
    for i in 0..n {
        let e: Vec<TruncatedSeries> = (0..n)
            .map(|k| {
                let c = if k == i {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                };
                TruncatedSeries::constant(frame, c, precision)
            })
            .collect::<Result<_>>()?;
        let mut u = apply_inv(&e)?;
        let mut stable = false;
        let mut steps = 0;
        while steps <= precision {
            steps += 1;
            let mut rhs = Vec::with_capacity(n);
            for (ek, tk) in e.iter().zip(&tail) {
                let mut r = ek.clone();
                for (t, uj) in tk.iter().zip(&u) {
                    if !t.is_zero() {
                        r = r.sub(&t.mul(uj)?)?;
                    }
                }
                rhs.push(r);
            }
            let next = apply_inv(&rhs)?;
            if next == u {
                stable = true;
                break;
            }
            u = next;
        }
        if !stable {
            return Err(Error::Inconsistent(format!(
                "frame inversion for coordinate {} did not stabilize",
                i + 1
            )));
        }
        max_iterations = max_iterations.max(steps);
        solutions.push(u);
    }
    Ok((solutions, max_iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::tests::{heisenberg, two_i};
    use crate::manifold::{finite_type_check, FormalVectorField, Generator};
    use crate::series::{Variable, VariableFrame};

    #[test]
    fn heisenberg_frame_hand_solution() {
        let model = heisenberg(8);
        let words = finite_type_check(&model, 7).unwrap().spanning_frame;
        let inv = invert_bracket_frame(&model, &words).unwrap();
        let shown: Vec<Vec<String>> = inv
            .coefficients
            .iter()
            .map(|row| row.iter().map(|s| s.to_string()).collect())
            .collect();
        let half_over_i = two_i().inv().unwrap();
        assert_eq!(shown[0], vec!["1", "0", "-zeta1"]);
        assert_eq!(
            shown[1],
            vec!["0".to_string(), "0".to_string(), half_over_i.to_string()]
        );
        assert_eq!(shown[2], vec!["0", "1", "0"]);
        assert_eq!(inv.precision, 6);
    }

    #[test]
    fn recombination_gives_coordinate_fields() {
        let model = heisenberg(8);
        let fields = CrFields::new(&model).unwrap();
        let words = vec![
            BracketWord::generator(Generator::L(0)),
            BracketWord::generator(Generator::U(0)),
            BracketWord::left_normed(&[Generator::U(0), Generator::L(0)]),
        ];
        let inv = invert_with(&fields, &words, 3).unwrap();
        let frame = model.intrinsic_frame();
        for (i, row) in inv.coefficients.iter().enumerate() {
            let mut acc = FormalVectorField::zero(frame, inv.precision).unwrap();
            for (a, w) in row.iter().zip(&words) {
                acc = acc
                    .add(&w.materialize(&fields).unwrap().scale_by_series(a).unwrap())
                    .unwrap();
            }
            assert_eq!(
                acc,
                FormalVectorField::coordinate(frame, i, inv.precision).unwrap()
            );
        }
    }

    #[test]
    fn constant_frame_is_one_step() {
        let fr = VariableFrame::t(1, 1);
        let c = |re, im| {
            TruncatedSeries::constant(fr, GaussianRational::from_parts((re, 1), (im, 1)), 5)
                .unwrap()
        };
        let a = vec![vec![c(1, 0), c(0, 1)], vec![c(2, 0), c(1, 0)]];
        let (u, steps) = solve_counting(&a).unwrap();
        assert_eq!(steps, 1);
        assert!(u.iter().flatten().all(|s| s.max_degree().unwrap_or(0) == 0));
    }

    #[test]
    fn unit_diagonal_residual() {
        let fr = VariableFrame::t(1, 1);
        let z = TruncatedSeries::var(fr, Variable::Z(0), 6).unwrap();
        let w = TruncatedSeries::var(fr, Variable::W(0), 6).unwrap();
        let one = TruncatedSeries::one(fr, 6).unwrap();
        let a = vec![
            vec![one.add(&z).unwrap(), w.mul(&w).unwrap()],
            vec![z.clone(), one.sub(&w).unwrap()],
        ];
        let u = solve_unit_systems(&a).unwrap();
        for (i, ui) in u.iter().enumerate() {
            for (k, row) in a.iter().enumerate() {
                let mut s = TruncatedSeries::zero(fr, 6).unwrap();
                for (akj, uj) in row.iter().zip(ui) {
                    s = s.add(&akj.mul(uj).unwrap()).unwrap();
                }
                let expected = if i == k {
                    one.clone()
                } else {
                    TruncatedSeries::zero(fr, 6).unwrap()
                };
                assert_eq!(s, expected);
            }
        }
    }

    #[test]
    fn singular_and_wrong_size() {
        let fr = VariableFrame::t(1, 1);
        let z = TruncatedSeries::var(fr, Variable::Z(0), 4).unwrap();
        assert_eq!(solve_unit_systems(&[vec![z]]), Err(Error::SingularFrame));
        let model = heisenberg(8);
        let words = vec![BracketWord::generator(Generator::L(0))];
        assert_eq!(
            invert_bracket_frame(&model, &words),
            Err(Error::FrameSize {
                expected: 3,
                got: 1
            })
        );
    }
}
