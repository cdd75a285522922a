//! Library results against independent closed forms and dense-grid sums.

use std::f64::consts::{PI, TAU};

use bergman_solid::harness::corpus::item_rng;
use bergman_solid::hull::{hinfty_norm, WeightMoments};
use bergman_solid::lacunary::solve_balancing;
use bergman_solid::measure::RadialMeasure;
use bergman_solid::norms::{bergman_norm, circle_mean, equivalent_norm, solid_core_norm};
use bergman_solid::weight::make_builtin_weight;
use bergman_solid::CoeffSeq;
use num_complex::Complex64;
use rand::Rng;
use statrs::function::beta::ln_beta;

fn random_poly(seed: u64, degree: usize) -> CoeffSeq {
    let mut rng = item_rng(seed, 0);
    CoeffSeq::new((0..=degree).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
}

fn dense_mean(g: &CoeffSeq, r: f64, p: i32, nodes: usize) -> f64 {
    let sum: f64 = (0..nodes)
        .map(|j| g.eval(Complex64::from_polar(r, TAU * (j as f64 + 0.5) / nodes as f64)).norm().powi(p))
        .sum();
    (sum / nodes as f64).powf(1.0 / p as f64)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn area_decomposition_follows_its_recursion() {
    // for 2r dr: s_n^{m_n + 2} = b/(1+b) and s_n^{m_{n+1} + 2} = 1/2
    let b = 6.0;
    let d = solve_balancing(&RadialMeasure::disc_area(), b, 12).unwrap();
    let ratio = std::f64::consts::LN_2 / ((1.0 + b) / b).ln();
    let mut m = 0.0;
    for n in 0..d.blocks() {
        assert!(rel(d.m()[n] + 2.0, m + 2.0) < 1e-10, "m_{n}");
        let log_s = (b / (1.0 + b)).ln() / (m + 2.0);
        assert!(rel(d.log_s()[n], log_s) < 1e-10, "s_{n}");
        let next = (m + 2.0) * ratio - 2.0;
        let s2 = (2.0 * log_s).exp();
        let dn = 2.0 * s2 / (m + 2.0) + 2.0 * ((-next * log_s).exp() - s2) / (next + 2.0);
        assert!(rel(d.log_d()[n].value(), dn) < 1e-9, "d_{n}");
        m = next;
    }
}

#[test]
fn circle_means_match_dense_sums() {
    for (seed, degree, r) in [(1, 5, 0.5), (2, 12, 0.9), (3, 30, 1.0), (4, 8, 1.7)] {
        let g = random_poly(seed, degree);
        let m1 = circle_mean(&g, r, 1.0).unwrap();
        let m2 = circle_mean(&g, r, 2.0).unwrap();
        assert!(rel(m1, dense_mean(&g, r, 1, 1 << 17)) < 1e-7, "M1 seed {seed}");
        assert!(rel(m2, dense_mean(&g, r, 2, 1 << 10)) < 1e-12, "M2 seed {seed}");
    }
    let one_plus_z = CoeffSeq::from_real(&[1.0, 1.0]);
    assert!(rel(circle_mean(&one_plus_z, 1.0, 1.0).unwrap(), 4.0 / PI) < 1e-8);
}

#[test]
fn area_norms_match_grid_and_closed_forms() {
    let area = RadialMeasure::disc_area();
    let g = random_poly(5, 6);
    let (nr, nt) = (1500, 1024);
    let oracle: f64 = (0..nr)
        .map(|i| {
            let r = (i as f64 + 0.5) / nr as f64;
            2.0 * r * dense_mean(&g, r, 1, nt) / nr as f64
        })
        .sum();
    assert!(rel(bergman_norm(&g, &area, 1.0).unwrap().value(), oracle) < 1e-5);

    // ‖Σ a_k z^k‖₂² = Σ |a_k|² / (k + 1)
    let two: f64 = g.coeffs().iter().enumerate().map(|(k, a)| a.norm_sqr() / (k + 1) as f64).sum();
    assert!(rel(bergman_norm(&g, &area, 2.0).unwrap().value(), two.sqrt()) < 1e-12);
}

#[test]
fn plane_monomial_norms() {
    // ∫₀^∞ r^k exp(-ln² r) dr = √π exp((k+1)²/4)
    let plane = RadialMeasure::plane_exp_log2();
    for k in [0usize, 1, 5, 20, 60] {
        let expect = 0.5 * PI.ln() + ((k + 1) as f64).powi(2) / 4.0;
        let got = bergman_norm(&CoeffSeq::monomial(k, Complex64::new(0.0, 2.0)), &plane, 1.0).unwrap();
        assert!((got.ln() - 2f64.ln() - expect).abs() < 1e-9, "k = {k}");
    }
}

fn tent(d: &bergman_solid::LacunaryDecomposition, n: usize, k: usize) -> f64 {
    let f = |i: usize| d.floor_m(i) as f64;
    let k = k as f64;
    if n == 0 {
        return ((f(1) - k) / f(1)).max(0.0);
    }
    if k <= f(n - 1) || k > f(n + 1) {
        0.0
    } else if k <= f(n) {
        (k - f(n - 1)) / (f(n) - f(n - 1))
    } else {
        (f(n + 1) - k) / (f(n + 1) - f(n))
    }
}

#[test]
fn block_functionals_match_direct_sums() {
    let d = solve_balancing(&RadialMeasure::disc_area(), 6.0, 4).unwrap();
    let g = random_poly(9, d.tent_coverage());
    let mut equiv = 0.0;
    let mut core = 0.0;
    for n in 0..d.blocks() {
        let s = d.log_s()[n].exp();
        let dn = d.log_d()[n].value();
        let tg = CoeffSeq::new(g.coeffs().iter().enumerate().map(|(k, a)| a * tent(&d, n, k)).collect());
        if !tg.is_zero() {
            equiv += dn * dense_mean(&tg, s, 1, 1 << 14);
        }
        let (lo, hi) = d.block_range(n);
        let part = g.restrict(lo, hi);
        if !part.is_zero() {
            core += dn * dense_mean(&part, s, 2, 1 << 12);
        }
    }
    assert!(rel(equivalent_norm(&g, &d).unwrap().value(), equiv) < 1e-6);
    assert!(rel(solid_core_norm(&g, &d).unwrap().value(), core) < 1e-10);
}

#[test]
fn power_weight_moments_are_beta_integrals() {
    // W_k = ∫₀¹ r^{2k+1} (1-r)^{2γ} dr = B(2k+2, 2γ+1)
    for gamma in [0.5, 2.0] {
        let w = make_builtin_weight("power", &[gamma]).unwrap();
        let moments = WeightMoments::new(&w, 16).unwrap();
        for k in [0usize, 1, 15, 40, 500] {
            let expect = ln_beta(2.0 * k as f64 + 2.0, 2.0 * gamma + 1.0);
            assert!((moments.get(k).unwrap().ln() - expect).abs() < 1e-9, "gamma {gamma}, k {k}");
        }
    }
}

#[test]
fn monomial_sup_norms() {
    // sup r^k e^{-1/(1-r²)} at u = r² with k = 2u/(1-u)², so 1 - u = (√(2k+1) - 1)/k
    let w = make_builtin_weight("exponential", &[1.0, 1.0, 2.0]).unwrap();
    for k in [1usize, 4, 30, 200] {
        let kf = k as f64;
        let one_minus_u = ((2.0 * kf + 1.0).sqrt() - 1.0) / kf;
        let expect = 0.5 * kf * (-one_minus_u).ln_1p() - 1.0 / one_minus_u;
        let got = hinfty_norm(&CoeffSeq::monomial(k, Complex64::new(1.0, 0.0)), &w).value.ln();
        assert!(got <= expect + 1e-12, "k = {k}: {got} > {expect}");
        assert!(expect - got < 1e-6, "k = {k}: {got} vs {expect}");
    }
}
