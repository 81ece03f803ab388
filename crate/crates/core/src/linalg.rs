//! Exact linear algebra over ℚ(i).
//!
//! Rank decisions go through fraction-free (Bareiss) elimination on Gaussian
//! integer matrices; inversion and incremental independence tests run over
//! the field directly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::number::GaussianRational;

/// `a + b·i` with integer parts.
#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussianInteger {
    re: BigInt,
    im: BigInt,
}

impl GaussianInteger {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Self {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    /// Exact quotient; Bareiss guarantees divisibility.
    fn div_exact(&self, o: &Self) -> Self {
        let n = &o.re * &o.re + &o.im * &o.im;
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        let (qr, rr) = re.div_rem(&n);
        let (qi, ri) = im.div_rem(&n);
        debug_assert!(rr.is_zero() && ri.is_zero(), "inexact Bareiss division");
        Self { re: qr, im: qi }
    }
}

/// Scales a row of Gaussian rationals by the lcm of its denominators.
fn clear_denominators(row: &[GaussianRational]) -> Vec<GaussianInteger> {
    let mut l = BigInt::one();
    for x in row {
        l = l.lcm(x.re().denom());
        l = l.lcm(x.im().denom());
    }
    row.iter()
        .map(|x| GaussianInteger {
            re: x.re().numer() * (&l / x.re().denom()),
            im: x.im().numer() * (&l / x.im().denom()),
        })
        .collect()
}

/// Rank of a matrix given by rows, by fraction-free elimination.
pub fn rank(rows: &[Vec<GaussianRational>]) -> usize {
    let mut m: Vec<Vec<GaussianInteger>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let Some(cols) = m.first().map(Vec::len) else {
        return 0;
    };
    let mut prev = GaussianInteger {
        re: BigInt::one(),
        im: BigInt::zero(),
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..m.len() {
            let lead = m[i][c].clone();
            for j in c..cols {
                let v = pivot.mul(&m[i][j]).sub(&lead.mul(&m[r][j]));
                m[i][j] = v.div_exact(&prev);
            }
        }
        prev = pivot;
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Inverse of a square matrix, `None` if singular.
pub fn invert(a: &[Vec<GaussianRational>]) -> Option<Vec<Vec<GaussianRational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<GaussianRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            debug_assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                }
            }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(c, p);
        let inv = aug[c][c].inv()?;
        for x in aug[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..2 * n {
                    let v = &aug[c][j] * &f;
                    aug[i][j] -= &v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Incrementally maintained row-echelon basis of sparse vectors.
///
/// Each stored row is normalized so its pivot (least key) is 1, and no other
/// stored row has a nonzero entry at that pivot.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis<K: Ord + Clone> {
    rows: BTreeMap<K, BTreeMap<K, GaussianRational>>,
}

impl<K: Ord + Clone> EchelonBasis<K> {
    pub fn new() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis.
    pub fn reduce(&self, mut v: BTreeMap<K, GaussianRational>) -> BTreeMap<K, GaussianRational> {
        v.retain(|_, c| !c.is_zero());
        for (pivot, row) in &self.rows {
            let Some(f) = v.get(pivot).cloned() else {
                continue;
            };
            for (k, c) in row {
                let e = v.entry(k.clone()).or_default();
                *e -= &(c * &f);
                if e.is_zero() {
                    v.remove(k);
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the basis; returns whether it was.
    pub fn insert(&mut self, v: BTreeMap<K, GaussianRational>) -> bool {
        let r = self.reduce(v);
        let Some((pivot, lead)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        let r: BTreeMap<K, GaussianRational> = r.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&pivot).cloned() {
                for (k, c) in &r {
                    let e = row.entry(k.clone()).or_default();
                    *e -= &(c * &f);
                    if e.is_zero() {
                        row.remove(k);
                    }
                }
            }
        }
        self.rows.insert(pivot, r);
        true
    }
}
