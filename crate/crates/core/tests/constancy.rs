mod common;

use common::*;
use cr_constancy::constancy::{
    bracket_closure, first_order_identities, invert_bracket_frame, ratio_constant, reality_defect,
    solve_unit_systems, verify_lemma, verify_real_constant, Outcome, Ratio, SeriesPair, Subject,
};
use cr_constancy::manifold::finite_type_check;
use cr_constancy::{Error, GaussianRational, TruncatedSeries, Variable, VariableFrame};
use proptest::prelude::*;

fn t() -> VariableFrame {
    VariableFrame::t(1, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn planted_constant_on_heisenberg(g in nonzero_poly(t(), 32, 4, 5), c in small_real()) {
        let pair = SeriesPair::new(g.scale(&c), g).unwrap();
        let cert = verify_lemma(&pair, &heisenberg(32), 6).unwrap();
        prop_assert_eq!(&cert.outcome, &Outcome::ConstantFound);
        prop_assert_eq!(cert.constant.as_ref(), Some(&c));
        prop_assert!(cert.is_real && cert.is_nonzero);
        // Soundness: f − c·g vanishes below the certified bound.
        let bound = cert.ratio_precision.unwrap();
        let residual = pair.f().sub(&pair.g().scale(&c)).unwrap().truncate(bound).unwrap();
        prop_assert!(residual.is_zero());
        prop_assert!(cert.steps().all(|s| s.holds()));
    }

    #[test]
    fn planted_constant_on_k2_model(g in nonzero_poly(t(), 32, 4, 5), c in small_real()) {
        let pair = SeriesPair::new(g.scale(&c), g).unwrap();
        let cert = verify_lemma(&pair, &power_model(2, 32), 6).unwrap();
        prop_assert_eq!(cert.constant, Some(c));
    }

    /// Non-real multiples always leave a defect.
    #[test]
    fn complex_multiple_has_defect(g in nonzero_poly(t(), 8, 3, 4), im in 1i64..5) {
        let c = gr(1, im);
        let pair = SeriesPair::new(g.scale(&c), g).unwrap();
        prop_assert!(!reality_defect(&pair, &heisenberg(8)).unwrap().is_zero());
    }

    #[test]
    fn unit_diagonal_systems(entries in proptest::collection::vec(poly(t(), 6, 3, 3), 9)) {
        let one = TruncatedSeries::one(t(), 6).unwrap();
        let a: Vec<Vec<TruncatedSeries>> = (0..3)
            .map(|k| {
                (0..3)
                    .map(|j| {
                        let e = &entries[3 * k + j];
                        let tail = e.sub(&TruncatedSeries::constant(t(), e.constant_term(), 6).unwrap()).unwrap();
                        if j == k { one.add(&tail).unwrap() } else { tail }
                    })
                    .collect()
            })
            .collect();
        let u = solve_unit_systems(&a).unwrap();
        for (i, ui) in u.iter().enumerate() {
            for (k, row) in a.iter().enumerate() {
                let mut s = TruncatedSeries::zero(t(), 6).unwrap();
                for (x, y) in row.iter().zip(ui) {
                    s = s.add(&x.mul(y).unwrap()).unwrap();
                }
                if i == k {
                    s = s.sub(&one).unwrap();
                }
                prop_assert!(s.is_zero());
            }
        }
    }
}

#[test]
fn falsification_sample_on_heisenberg() {
    use rand::{Rng, SeedableRng};
    let model = heisenberg(8);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let random = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let terms: Vec<_> = (0..4)
            .map(|_| {
                let a = rng.gen_range(0..=3u32);
                let b = rng.gen_range(0..=3 - a);
                (
                    cr_constancy::Exponent::new(vec![a, b]),
                    gr(rng.gen_range(-3..=3), rng.gen_range(-3..=3)),
                )
            })
            .collect();
        let p = TruncatedSeries::from_terms(t(), 8, terms).unwrap();
        if !p.is_zero() {
            return p;
        }
    };
    let mut checked = 0;
    while checked < 200 {
        let f = random(&mut rng);
        let g = random(&mut rng);
        let pair = SeriesPair::new(f.clone(), g.clone()).unwrap();
        if let Ratio::Constant(_) = ratio_constant(&f, &g, 8).unwrap() {
            continue;
        }
        assert!(
            !reality_defect(&pair, &model).unwrap().is_zero(),
            "counterexample: f = {f}, g = {g}"
        );
        checked += 1;
    }
}

#[test]
fn hypothesis_propagation_on_k3_model() {
    let fr = t();
    let g = TruncatedSeries::one(fr, 24)
        .unwrap()
        .add(&var(fr, Variable::W(0), 24).pow(2).unwrap())
        .unwrap();
    let pair = SeriesPair::new(g.scale(&GaussianRational::from_ratio(7, 3)), g).unwrap();
    let model = power_model(3, 24);
    let cert = verify_lemma(&pair, &model, 10).unwrap();
    assert_eq!(cert.outcome, Outcome::ConstantFound);
    assert_eq!(cert.finite_type.as_ref().unwrap().type_length(), Some(6));
    for s in cert.steps() {
        assert!(s.residual.is_zero(), "{}", s.subject);
    }
    let coords: Vec<_> = cert
        .coordinate_identities
        .iter()
        .map(|s| s.subject.clone())
        .collect();
    assert_eq!(
        coords,
        vec![
            Subject::Coordinate(0),
            Subject::Coordinate(1),
            Subject::Coordinate(2)
        ]
    );
}

#[test]
fn certified_bounds_shrink_along_the_proof() {
    let fr = t();
    let g = var(fr, Variable::Z(0), 16)
        .add(&TruncatedSeries::one(fr, 16).unwrap())
        .unwrap();
    let pair = SeriesPair::new(g.clone(), g).unwrap();
    let model = power_model(2, 16);
    let first = first_order_identities(&pair, &model).unwrap();
    assert_eq!(
        first
            .iter()
            .map(|s| s.certified_precision)
            .collect::<Vec<_>>(),
        vec![15, 15]
    );
    let frame = finite_type_check(&model, 8).unwrap().spanning_frame;
    let ids = bracket_closure(&pair, &model, &frame).unwrap();
    let depth_bounds: Vec<(usize, usize)> = frame
        .iter()
        .zip(&ids)
        .map(|(w, s)| (w.len(), s.certified_precision))
        .collect();
    for (len, b) in depth_bounds {
        assert!(b <= 16 - len + 1, "length {len} bound {b}");
    }
    let inverse = invert_bracket_frame(&model, &frame).unwrap();
    assert!(inverse.precision >= 1);
}

#[test]
fn examples_through_the_pipeline() {
    let fr = t();
    let w = var(fr, Variable::W(0), 8);
    match verify_real_constant(&w, &heisenberg(8), 7).unwrap().outcome {
        Outcome::DefectNonzero(wit) => assert_eq!(wit.monomial(), "z1*zeta1"),
        other => panic!("{other:?}"),
    }
    let cert = verify_real_constant(&w, &levi_flat(8), 7).unwrap();
    assert!(cert.defect.is_zero());
    assert_eq!(
        cert.outcome,
        Outcome::NotFiniteType {
            max_depth_reached: 7
        }
    );
    let zero = TruncatedSeries::zero(fr, 8).unwrap();
    assert_eq!(
        SeriesPair::new(zero, w).unwrap_err(),
        Error::ZeroSeries("f")
    );
}
