#![allow(dead_code)]

use cr_constancy::manifold::ManifoldModel;
use cr_constancy::{Exponent, GaussianRational, TruncatedSeries, Variable, VariableFrame};
use proptest::prelude::*;

pub fn gr(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_parts((re, 1), (im, 1))
}

pub fn two_i() -> GaussianRational {
    gr(0, 2)
}

pub fn var(frame: VariableFrame, v: Variable, n: usize) -> TruncatedSeries {
    TruncatedSeries::var(frame, v, n).unwrap()
}

/// `w − c·z^k ζ^k` in the full frame.
pub fn power_theta(k: u32, c: GaussianRational, n: usize) -> TruncatedSeries {
    let fr = VariableFrame::full(1, 1);
    let zk = var(fr, Variable::Z(0), n).pow(k).unwrap();
    let zetak = var(fr, Variable::Zeta(0), n).pow(k).unwrap();
    var(fr, Variable::W(0), n)
        .sub(&zk.mul(&zetak).unwrap().scale(&c))
        .unwrap()
}

pub fn power_model(k: u32, n: usize) -> ManifoldModel {
    ManifoldModel::new(1, 1, vec![power_theta(k, two_i(), n)], n).unwrap()
}

pub fn heisenberg(n: usize) -> ManifoldModel {
    power_model(1, n)
}

pub fn levi_flat(n: usize) -> ManifoldModel {
    ManifoldModel::new(
        1,
        1,
        vec![var(VariableFrame::full(1, 1), Variable::W(0), n)],
        n,
    )
    .unwrap()
}

pub fn small_gr() -> impl Strategy<Value = GaussianRational> {
    (-3i64..=3, 1i64..=3, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| GaussianRational::from_parts((a, b), (c, d)))
}

pub fn small_real() -> impl Strategy<Value = GaussianRational> {
    (-5i64..=5, 1i64..=4)
        .prop_filter("nonzero", |(a, _)| *a != 0)
        .prop_map(|(a, b)| GaussianRational::from_ratio(a, b))
}

fn exponent(arity: usize, max_degree: u32) -> impl Strategy<Value = Exponent> {
    proptest::collection::vec(0..=max_degree, arity)
        .prop_filter("degree bound", move |p| p.iter().sum::<u32>() <= max_degree)
        .prop_map(Exponent::new)
}

/// Sparse polynomial with up to `terms` terms of degree ≤ `max_degree`.
pub fn poly(
    frame: VariableFrame,
    n: usize,
    max_degree: u32,
    terms: usize,
) -> impl Strategy<Value = TruncatedSeries> {
    proptest::collection::vec((exponent(frame.arity(), max_degree), small_gr()), 0..=terms)
        .prop_map(move |ts| TruncatedSeries::from_terms(frame, n, ts).unwrap())
}

pub fn nonzero_poly(
    frame: VariableFrame,
    n: usize,
    max_degree: u32,
    terms: usize,
) -> impl Strategy<Value = TruncatedSeries> {
    poly(frame, n, max_degree, terms).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn point(arity: usize) -> impl Strategy<Value = Vec<GaussianRational>> {
    proptest::collection::vec(small_gr(), arity)
}
