use cr_constancy::{Exponent, FrameKind, GaussianRational, TruncatedSeries, VariableFrame};
use cr_constancy_cli::expr::{parse_expression, print_series, ParseOptions};
use proptest::prelude::*;

const N: usize = 9;

fn coefficient() -> impl Strategy<Value = GaussianRational> {
    (-40i64..=40, 1i64..=12, -40i64..=40, 1i64..=12)
        .prop_map(|(a, b, c, d)| GaussianRational::from_parts((a, b), (c, d)))
}

fn series(kind: FrameKind, m: usize, d: usize) -> impl Strategy<Value = TruncatedSeries> {
    let frame = VariableFrame::new(kind, m, d);
    let exponent = proptest::collection::vec(0u32..=4, frame.arity())
        .prop_filter("degree < N", |p| p.iter().sum::<u32>() < N as u32)
        .prop_map(Exponent::new);
    proptest::collection::vec((exponent, coefficient()), 0..=6)
        .prop_map(move |ts| TruncatedSeries::from_terms(frame, N, ts).unwrap())
}

fn kinds() -> impl Strategy<Value = FrameKind> {
    prop_oneof![
        Just(FrameKind::T),
        Just(FrameKind::Tau),
        Just(FrameKind::Intrinsic),
        Just(FrameKind::Full)
    ]
}

fn case() -> impl Strategy<Value = (FrameKind, usize, usize, TruncatedSeries)> {
    (kinds(), 1usize..=2, 1usize..=2)
        .prop_flat_map(|(k, m, d)| series(k, m, d).prop_map(move |s| (k, m, d, s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parse_inverts_print((kind, m, d, s) in case()) {
        let text = print_series(&s);
        let back = parse_expression(&text, ParseOptions::new(m, d, N).in_frame(kind)).unwrap();
        prop_assert_eq!(&back, &s, "{}", text);
        prop_assert_eq!(print_series(&back), text);
    }

    #[test]
    fn printing_normalises_input(a in -9i64..=9, b in 1i64..=9, e in 0u32..=3) {
        let text = format!("({a}/{b})*z1^{e} + 2*({a}/{b})*z1^{e} - i*w1");
        let s = parse_expression(&text, ParseOptions::new(1, 1, N)).unwrap();
        let again = parse_expression(&print_series(&s), ParseOptions::new(1, 1, N).in_frame(FrameKind::T)).unwrap();
        prop_assert_eq!(again, s);
    }
}
