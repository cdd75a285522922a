use std::sync::OnceLock;

use bergman_solid::config::parse_decomposition;
use bergman_solid::harness::corpus::{build_corpus, CoeffLaw, CorpusSpec};
use bergman_solid::lacunary::solve_balancing;
use bergman_solid::measure::RadialMeasure;
use bergman_solid::norms::{bergman_norm, circle_mean, equivalent_norm, solid_core_norm};
use bergman_solid::poly::coefficient_multiplier;
use bergman_solid::{CoeffSeq, LacunaryDecomposition};
use num_complex::Complex64;
use proptest::prelude::*;

fn area_decomposition() -> &'static LacunaryDecomposition {
    static D: OnceLock<LacunaryDecomposition> = OnceLock::new();
    D.get_or_init(|| solve_balancing(&RadialMeasure::disc_area(), 6.0, 5).unwrap())
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn poly(max_len: usize) -> impl Strategy<Value = CoeffSeq> {
    prop::collection::vec(coeff(), 1..=max_len).prop_map(CoeffSeq::new)
}

fn multiplier(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solid_core_is_solid((g, theta) in poly(200).prop_flat_map(|g| { let n = g.len(); (Just(g), multiplier(n)) })) {
        let d = area_decomposition();
        let tg = coefficient_multiplier(&g, &theta).unwrap();
        prop_assert!(solid_core_norm(&tg, d).unwrap() <= solid_core_norm(&g, d).unwrap());
    }

    #[test]
    fn block_functionals_are_homogeneous(g in poly(150), lambda in coeff()) {
        prop_assume!(lambda.norm() > 1e-3);
        let d = area_decomposition();
        let lg = g.scale(lambda);
        for f in [equivalent_norm, solid_core_norm] {
            let base = f(&g, d).unwrap();
            if base.is_zero() {
                continue;
            }
            let scaled = f(&lg, d).unwrap();
            prop_assert!((scaled.ln() - base.ln() - lambda.norm().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_means_are_ordered(g in poly(25), r in 0.05..1.5f64, dr in 0.0..0.5f64) {
        let m1 = circle_mean(&g, r, 1.0).unwrap();
        let m2 = circle_mean(&g, r, 2.0).unwrap();
        prop_assert!(m1 <= m2 * (1.0 + 1e-8));
        prop_assert!(m2 <= circle_mean(&g, r + dr, 2.0).unwrap() * (1.0 + 1e-14));
        prop_assert!(m1 >= g.coeff(0).norm() * (1.0 - 1e-8));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bergman_triangle_inequality(f in poly(12), g in poly(12)) {
        let area = RadialMeasure::disc_area();
        let sum = bergman_norm(&f.add(&g), &area, 1.0).unwrap().value();
        let parts = bergman_norm(&f, &area, 1.0).unwrap().value() + bergman_norm(&g, &area, 1.0).unwrap().value();
        prop_assert!(sum <= parts * (1.0 + 1e-8), "{} > {}", sum, parts);
    }
}

#[test]
fn decompositions_round_trip_through_json() {
    let d = area_decomposition();
    let back = parse_decomposition(&serde_json::to_string(d).unwrap()).unwrap();
    assert_eq!(&back, d);
}

#[test]
fn corpora_are_reproducible() {
    let spec = CorpusSpec::new(7, 2, 3, CoeffLaw::ComplexGaussian);
    assert_eq!(build_corpus(&spec).unwrap(), build_corpus(&spec).unwrap());
    let zeros = build_corpus(&CorpusSpec::new(7, 4, 3, CoeffLaw::Sparse { density: 0.0 })).unwrap();
    assert!(zeros.iter().all(CoeffSeq::is_zero));
}
