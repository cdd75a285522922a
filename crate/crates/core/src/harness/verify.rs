//! Self-test suites run by `verify`.
//!
//! `trivial` evaluates closed-form identities (zero inputs, monomials, unit
//! vectors, determinism). `paper` reproduces the closed-form statements and
//! examples: closed-form decomposition sequences, the gap dichotomy, the
//! condition (b) example and the Laplacian diagnostic.

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::harness::checks::{equivalence_ratios, khintchine_check, KHINTCHINE_A1};
use crate::harness::corpus::{build_corpus, CoeffLaw, CorpusSpec};
use crate::harness::report::{config_digest, CheckRecord, ReportDoc};
use crate::hull::{
    dual_pairing, find_condition_b_sequence, hinfty_core_norm, hinfty_norm, hull_norm, max_point, w0_diagnostic,
    HullOptions,
};
use crate::lacunary::{closed_form_decomposition, gap_profile, solve_balancing, GapClass};
use crate::logreal::LogReal;
use crate::measure::{Domain, RadialMeasure};
use crate::norms::{bergman_norm, circle_mean, solid_core_norm};
use crate::poly::{coefficient_multiplier, CoeffSeq};
use crate::weight::{make_builtin_weight, RadialWeight};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Trivial,
    Paper,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "trivial" => Ok(Suite::Trivial),
            "paper" => Ok(Suite::Paper),
            other => Err(Error::Config(format!("unknown suite `{other}` (expected `trivial` or `paper`)"))),
        }
    }
}

type Check = (&'static str, fn() -> Result<CheckRecord>);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
}

fn rec(id: &str, pass: bool) -> CheckRecord {
    CheckRecord::new(id, config_digest(&json!({ "check": id })), pass)
}

fn exp_weight(ell: f64) -> RadialWeight {
    make_builtin_weight("exponential", &[1.0, 1.0, ell]).expect("valid parameters")
}

fn circle_means() -> Result<CheckRecord> {
    let z3 = CoeffSeq::monomial(3, c(1.0));
    let m1 = circle_mean(&z3, 0.5, 1.0)?;
    let m2 = circle_mean(&z3, 0.5, 2.0)?;
    Ok(rec("circle-mean.monomial", close(m1, 0.125, 1e-12) && close(m2, 0.125, 1e-12))
        .tolerance(1e-12)
        .observe_num("m1", m1)
        .observe_num("m2", m2))
}

fn bergman_basics() -> Result<CheckRecord> {
    let area = RadialMeasure::disc_area();
    let zero = bergman_norm(&CoeffSeq::zero(), &area, 1.0)?;
    let z3 = bergman_norm(&CoeffSeq::monomial(3, c(1.0)), &area, 1.0)?.value();
    Ok(rec("bergman-norm.zero-and-monomial", zero.is_zero() && close(z3, 0.4, 1e-7)).tolerance(1e-7).observe_num("z3", z3))
}

fn multipliers() -> Result<CheckRecord> {
    let f = CoeffSeq::from_real(&[1.0, 1.0, 1.0]);
    let id = coefficient_multiplier(&f, &[c(1.0); 3])? == f;
    let zero = coefficient_multiplier(&f, &[c(0.0); 3])?.is_zero();
    let alt = coefficient_multiplier(&f, &[c(1.0), c(-1.0), c(1.0)])? == CoeffSeq::from_real(&[1.0, -1.0, 1.0]);
    let rejects = coefficient_multiplier(&f, &[c(1.5); 3]).is_err();
    Ok(rec("multiplier.identities", id && zero && alt && rejects))
}

fn solid_core_single_term() -> Result<CheckRecord> {
    let mu = RadialMeasure::disc_area();
    let d = solve_balancing(&mu, 6.0, 4)?;
    let mut ok = solid_core_norm(&CoeffSeq::zero(), &d)?.is_zero();
    for k in [1usize, d.floor_m(1) + 1, d.floor_m(2)] {
        let n = d.block_of(k).expect("covered");
        let expect = d.log_d()[n] * LogReal::from_ln(k as f64 * d.log_s()[n]);
        ok &= solid_core_norm(&CoeffSeq::monomial(k, c(1.0)), &d)?.rel_diff(expect) < 1e-12;
    }
    Ok(rec("solid-core.single-term", ok).tolerance(1e-12))
}

fn hull_unit_vectors() -> Result<CheckRecord> {
    let hp = find_condition_b_sequence(&exp_weight(2.0), 2.5, 25.0, 6, &HullOptions::default())?;
    let mut ok = hull_norm(&CoeffSeq::zero(), &hp)?.is_zero() && hinfty_core_norm(&CoeffSeq::zero(), &hp)?.is_zero();
    for k in [0usize, 3, hp.coverage()] {
        let e = CoeffSeq::monomial(k, c(1.0));
        ok &= hull_norm(&e, &hp)?.rel_diff(hp.s_coeff(k)?) < 1e-14;
        let n = hp.interval_of(k).expect("covered");
        let core = LogReal::from_ln(hp.log_v_of_interval(n)) * hp.sigma(k)?;
        ok &= hinfty_core_norm(&e, &hp)?.rel_diff(core) < 1e-14;
    }
    Ok(rec("hull.unit-vectors", ok).tolerance(1e-14))
}

fn hinfty_constants() -> Result<CheckRecord> {
    let w = exp_weight(1.0);
    let one = hinfty_norm(&CoeffSeq::from_real(&[1.0]), &w).value.value();
    let three = hinfty_norm(&CoeffSeq::from_real(&[3.0]), &w).value.value();
    let v0 = w.eval(0.0);
    Ok(rec("hinfty.constants", close(one, v0, 1e-12) && close(three, 3.0 * v0, 1e-12))
        .tolerance(1e-12)
        .observe_num("f=1", one))
}

fn pairing_basics() -> Result<CheckRecord> {
    let z = |k| CoeffSeq::monomial(k, c(1.0));
    let off = dual_pairing(&z(2), &z(5), &exp_weight(2.0))?;
    let w0 = dual_pairing(&z(0), &z(0), &RadialWeight::unit())?;
    let w3 = dual_pairing(&z(3), &z(3), &RadialWeight::unit())?;
    let ok = off == c(0.0) && close(w0.re, 0.5, 1e-12) && close(w3.re, 1.0 / 8.0, 1e-12);
    Ok(rec("pairing.monomials", ok).tolerance(1e-12).observe_num("w0", w0.re))
}

fn khintchine_single() -> Result<CheckRecord> {
    let r = khintchine_check(&[1.0], KHINTCHINE_A1)?;
    Ok(rec("khintchine.single-term", close(r.average, 1.0, 1e-12) && close(r.margin, 1.0 - KHINTCHINE_A1, 1e-12))
        .observe_num("margin", r.margin))
}

fn corpus_contracts() -> Result<CheckRecord> {
    let spec = CorpusSpec::new(7, 2, 3, CoeffLaw::ComplexGaussian);
    let same = build_corpus(&spec)? == build_corpus(&spec)?;
    let sparse = build_corpus(&CorpusSpec::new(7, 4, 8, CoeffLaw::Sparse { density: 0.0 }))?;
    Ok(rec("corpus.determinism", same && sparse.iter().all(CoeffSeq::is_zero)))
}

fn w0_unit() -> Result<CheckRecord> {
    let r = w0_diagnostic(&RadialWeight::unit(), 1024)?;
    Ok(rec("w0.unit-weight-fails", !r.pass).observe_num("min_laplacian", r.min_laplacian))
}

fn max_point_limit() -> Result<CheckRecord> {
    let mut ok = true;
    for w in [exp_weight(1.0), exp_weight(2.0), make_builtin_weight("power", &[1.0])?] {
        ok &= max_point(&w, 0.001)? < 0.05;
    }
    Ok(rec("max-point.small-order", ok))
}

fn monomial_ratios() -> Result<CheckRecord> {
    let mu = RadialMeasure::disc_area();
    let d = solve_balancing(&mu, 6.0, 4)?;
    let corpus: Vec<CoeffSeq> = (0..=40.min(d.tent_coverage())).map(|k| CoeffSeq::monomial(k, c(1.0))).collect();
    let stats = equivalence_ratios(&corpus, &d, &mu)?;
    let ok = stats.ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    Ok(rec("equivalence.monomials-positive", ok).observe_num("min", stats.min).observe_num("max", stats.max))
}

fn closed_form_quartic() -> Result<CheckRecord> {
    let cf = closed_form_decomposition(1.0, 1.0, 1.0, 10)?;
    let mut worst: f64 = 0.0;
    for (i, n) in (cf.n0..=10).enumerate() {
        let n = n as f64;
        worst = worst.max(((cf.m[i] - (n.powi(4) - n * n)) / (n.powi(4) - n * n)).abs());
        worst = worst.max(((cf.s[i] - (1.0 - n.powi(-2))) / (1.0 - n.powi(-2))).abs());
    }
    Ok(rec("closed-form.quartic", cf.n0 == 2 && worst <= 1e-12).tolerance(1e-12).observe_num("worst_rel", worst))
}

fn plane_plateau() -> Result<CheckRecord> {
    let d = solve_balancing(&RadialMeasure::plane_exp_log2(), 6.0, 100)?;
    let p = d.gap_profile()?;
    Ok(rec("gaps.plane-bounded", p.classification == GapClass::BoundedPlateau)
        .observe_num("first_quartile_mean", p.first_quartile_mean)
        .observe_num("last_quartile_mean", p.last_quartile_mean))
}

fn disc_growing() -> Result<CheckRecord> {
    let cf = closed_form_decomposition(1.0, 1.0, 1.0, 120)?;
    let p = gap_profile(&cf.m)?;
    Ok(rec("gaps.disc-exponential-growing", p.classification == GapClass::Growing)
        .observe_num("first_quartile_mean", p.first_quartile_mean)
        .observe_num("last_quartile_mean", p.last_quartile_mean))
}

fn condition_b_example() -> Result<CheckRecord> {
    let w = exp_weight(2.0);
    let hp = find_condition_b_sequence(&w, 2.5, 50.0, 50, &HullOptions { w_cache_max: 64, ..HullOptions::default() })?;
    let max_u = hp.upper_ratios().iter().copied().fold(0.0, f64::max);
    let min_l = hp.lower_ratios().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(rec("condition-b.example", min_l >= 2.5 && max_u <= 50.0)
        .observe_num("min_lower", min_l)
        .observe_num("max_upper", max_u)
        .observe_num("mu_last", *hp.mu().last().unwrap()))
}

fn w0_example() -> Result<CheckRecord> {
    let r = w0_diagnostic(&exp_weight(2.0), 1024)?;
    Ok(rec("w0.exponential-passes", r.pass).observe_num("min_laplacian", r.min_laplacian))
}

fn area_measure_sanity() -> Result<CheckRecord> {
    let a = RadialMeasure::weighted_area(RadialWeight::unit(), Domain::Disc)?;
    Ok(rec("measure.area-mass", a.total_log_moment(0.0)?.ln().abs() < 1e-12).tolerance(1e-12))
}

const TRIVIAL: &[Check] = &[
    ("circle-mean.monomial", circle_means),
    ("bergman-norm.zero-and-monomial", bergman_basics),
    ("measure.area-mass", area_measure_sanity),
    ("multiplier.identities", multipliers),
    ("solid-core.single-term", solid_core_single_term),
    ("hull.unit-vectors", hull_unit_vectors),
    ("hinfty.constants", hinfty_constants),
    ("pairing.monomials", pairing_basics),
    ("khintchine.single-term", khintchine_single),
    ("corpus.determinism", corpus_contracts),
    ("w0.unit-weight-fails", w0_unit),
    ("max-point.small-order", max_point_limit),
    ("equivalence.monomials-positive", monomial_ratios),
];

const PAPER: &[Check] = &[
    ("closed-form.quartic", closed_form_quartic),
    ("gaps.plane-bounded", plane_plateau),
    ("gaps.disc-exponential-growing", disc_growing),
    ("condition-b.example", condition_b_example),
    ("w0.exponential-passes", w0_example),
];

/// Runs a suite; a check that errors is recorded as failed with the error.
pub fn run_suite(suite: Suite) -> ReportDoc {
    let checks = match suite {
        Suite::Trivial => TRIVIAL,
        Suite::Paper => PAPER,
    };
    ReportDoc::new(
        checks
            .iter()
            .map(|(id, f)| f().unwrap_or_else(|e| rec(id, false).note(e.to_string())))
            .collect(),
    )
}
