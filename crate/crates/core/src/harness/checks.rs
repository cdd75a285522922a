//! Corpus-level checks of the two-sided norm estimates.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::corpus::{item_rng, random_multiplier, BlockSum};
use crate::harness::report::{config_digest, num, CheckRecord, ReportDoc};
use crate::hull::{hull_norm, HullParameters};
use crate::lacunary::LacunaryDecomposition;
use crate::logreal::LogReal;
use crate::measure::{Density, RadialMeasure};
use crate::norms::{bergman_norm, equivalent_norm, log_circle_mean, solid_core_norm, Exponent};
use crate::poly::{coefficient_multiplier, CoeffSeq};

/// Largest spread `max/min` of the equivalence ratio accepted as stable.
pub const EQUIVALENCE_SPREAD_MAX: f64 = 1e3;
/// Relative slack for `‖h‖₁ <= Σ ‖h_j‖₁`.
pub const ADDITIVITY_TOL: f64 = 1e-6;
/// Largest variation `max/min` of an observed constant across seeds.
pub const STABILITY_FACTOR: f64 = 2.0;
/// Default Khintchine constant `a₁`.
pub const KHINTCHINE_A1: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Sign patterns are enumerated exhaustively up to this length.
pub const KHINTCHINE_EXHAUSTIVE_MAX: usize = 14;
pub const KHINTCHINE_SAMPLES: usize = 4096;
const KHINTCHINE_SEED: u64 = 0x6b68_696e;
/// Multipliers drawn per polynomial on the core side of the sandwich.
pub const SANDWICH_MULTIPLIERS: usize = 16;

/// Digest of the objects a check depends on.
pub fn digest_of(parts: &[&serde_json::Value]) -> String {
    config_digest(parts)
}

/// `max / min` of positive values; infinite if any value is zero.
pub fn spread(values: &[f64]) -> f64 {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(0.0, f64::max);
    max / min
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceStats {
    /// `equivalent_norm / bergman_norm` per non-zero polynomial.
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub skipped_zero: usize,
}

/// Ratios of the block-equivalent norm to the Bergman norm over a corpus.
pub fn equivalence_ratios(corpus: &[CoeffSeq], decomp: &LacunaryDecomposition, measure: &RadialMeasure) -> Result<EquivalenceStats> {
    let ratios = corpus
        .par_iter()
        .map(|g| {
            if g.is_zero() {
                return Ok(None);
            }
            let eq = equivalent_norm(g, decomp)?;
            let b = bergman_norm(g, measure, 1.0)?;
            Ok(Some((eq / b).value()))
        })
        .collect::<Result<Vec<_>>>()?;
    let skipped_zero = ratios.iter().filter(|r| r.is_none()).count();
    let ratios: Vec<f64> = ratios.into_iter().flatten().collect();
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    Ok(EquivalenceStats { spread: max / min, ratios, min, max, skipped_zero })
}

fn ratio_record(stats: &EquivalenceStats, digest: String) -> CheckRecord {
    let finite = stats.ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    let pass = finite && !stats.ratios.is_empty() && stats.spread <= EQUIVALENCE_SPREAD_MAX;
    CheckRecord::new("equivalence.ratio", digest, pass)
        .tolerance(EQUIVALENCE_SPREAD_MAX)
        .observe_num("min", stats.min)
        .observe_num("max", stats.max)
        .observe_num("spread", stats.spread)
        .observe("polynomials", stats.ratios.len())
}

pub fn equivalence_report(corpus: &[CoeffSeq], decomp: &LacunaryDecomposition, measure: &RadialMeasure) -> Result<ReportDoc> {
    let stats = equivalence_ratios(corpus, decomp, measure)?;
    let digest = digest_of(&[&serde_json::to_value(measure).unwrap(), &serde_json::to_value(decomp).unwrap()]);
    Ok(ReportDoc::new(vec![ratio_record(&stats, digest)]))
}

/// One ratio record per seeded corpus, plus the variation of the spread
/// across seeds against [`STABILITY_FACTOR`].
pub fn equivalence_stability_report(
    corpora: &[(u64, Vec<CoeffSeq>)],
    decomp: &LacunaryDecomposition,
    measure: &RadialMeasure,
) -> Result<ReportDoc> {
    let digest = digest_of(&[&serde_json::to_value(measure).unwrap(), &serde_json::to_value(decomp).unwrap()]);
    let stats = corpora
        .iter()
        .map(|(_, c)| equivalence_ratios(c, decomp, measure))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<CheckRecord> = corpora
        .iter()
        .zip(&stats)
        .map(|((seed, _), s)| ratio_record(s, digest.clone()).observe("seed", *seed))
        .collect();
    let spreads: Vec<f64> = stats.iter().map(|s| s.spread).collect();
    let variation = spread(&spreads);
    records.push(
        CheckRecord::new("equivalence.seed-stability", digest, variation <= STABILITY_FACTOR)
            .tolerance(STABILITY_FACTOR)
            .observe_num("variation", variation)
            .observe("seeds", corpora.len()),
    );
    Ok(ReportDoc::new(records))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdditivityStats {
    pub instances: usize,
    /// Smallest `(Σ ‖h_j‖₁ - ‖h‖₁) / ‖h‖₁`; non-negative up to quadrature error.
    pub worst_lower_margin: f64,
    /// Largest `Σ ‖h_j‖₁ / ‖h‖₁`.
    pub constant: f64,
    pub lower_holds: bool,
}

/// `‖h‖₁ <= Σ_j ‖h_j‖₁ <= C ‖h‖₁` over block-aligned sums.
pub fn block_additivity(sums: &[BlockSum], decomp: &LacunaryDecomposition, measure: &RadialMeasure) -> Result<AdditivityStats> {
    let rows = sums
        .par_iter()
        .map(|h| {
            let whole = bergman_norm(&h.sum, measure, 1.0)?;
            let parts = h
                .parts(decomp)
                .iter()
                .map(|p| bergman_norm(p, measure, 1.0))
                .collect::<Result<Vec<_>>>()?;
            let total: LogReal = parts.into_iter().sum();
            Ok(((total.ln() - whole.ln()).exp_m1(), (total / whole).value()))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let constant = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(AdditivityStats { instances: rows.len(), worst_lower_margin: worst, constant, lower_holds: worst >= -ADDITIVITY_TOL })
}

pub fn additivity_report(sums: &[BlockSum], decomp: &LacunaryDecomposition, measure: &RadialMeasure) -> Result<ReportDoc> {
    let s = block_additivity(sums, decomp, measure)?;
    let digest = digest_of(&[&serde_json::to_value(measure).unwrap(), &serde_json::to_value(decomp).unwrap()]);
    Ok(ReportDoc::new(vec![CheckRecord::new("equivalence.block-additivity", digest, s.lower_holds)
        .tolerance(ADDITIVITY_TOL)
        .observe("instances", s.instances)
        .observe_num("worst_lower_margin", s.worst_lower_margin)
        .observe_num("constant", s.constant)]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhintchineResult {
    /// Mean of `M₁(Σ θ_k a_k z^k, 1)` over the sign patterns.
    pub average: f64,
    /// `a₁ (Σ a_k²)^{1/2}`.
    pub bound: f64,
    pub margin: f64,
    pub exhaustive: bool,
    pub patterns: usize,
    /// The pattern with the largest mean, and that mean.
    pub best_signs: Vec<i8>,
    pub best_value: f64,
}

fn signed_mean(a: &[f64], signs: &[i8]) -> Result<f64> {
    let g = CoeffSeq::new(a.iter().zip(signs).map(|(&x, &s)| Complex64::new(s as f64 * x, 0.0)).collect());
    Ok(log_circle_mean(&g, 0.0, Exponent::One)?.value())
}

/// Average of `M₁` over all sign patterns `θ ∈ {±1}^len` (exhaustive up to
/// length 14, otherwise 4096 seeded random patterns), compared with
/// `a₁ ‖a‖₂`. Means are taken on the unit circle.
pub fn khintchine_check(a: &[f64], a1: f64) -> Result<KhintchineResult> {
    if !(a1 > 0.0 && a1 <= 1.0) {
        return Err(Error::InvalidParameter(format!("a1 must lie in (0, 1], got {a1}")));
    }
    if a.is_empty() || a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("coefficients must be finite and non-empty".into()));
    }
    let len = a.len();
    let exhaustive = len <= KHINTCHINE_EXHAUSTIVE_MAX;
    // θ and -θ give the same mean, so the first sign is fixed to +1 when enumerating
    let patterns: Vec<Vec<i8>> = if exhaustive {
        (0..1usize << (len - 1))
            .map(|bits| (0..len).map(|k| if k > 0 && bits >> (k - 1) & 1 == 1 { -1 } else { 1 }).collect())
            .collect()
    } else {
        let mut rng = item_rng(KHINTCHINE_SEED, len);
        (0..KHINTCHINE_SAMPLES)
            .map(|_| (0..len).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
            .collect()
    };
    let values = patterns.par_iter().map(|s| signed_mean(a, s)).collect::<Result<Vec<f64>>>()?;
    let average = values.iter().sum::<f64>() / values.len() as f64;
    let (best, &best_value) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("at least one pattern");
    let bound = a1 * a.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(KhintchineResult {
        average,
        bound,
        margin: average - bound,
        exhaustive,
        patterns: if exhaustive { 1 << len } else { KHINTCHINE_SAMPLES },
        best_signs: patterns[best].clone(),
        best_value,
    })
}

pub fn khintchine_report(vectors: &[Vec<f64>], a1: f64) -> Result<ReportDoc> {
    let digest = digest_of(&[&serde_json::to_value(vectors).unwrap(), &num(a1)]);
    let results = vectors.iter().map(|a| khintchine_check(a, a1)).collect::<Result<Vec<_>>>()?;
    let worst = results.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let all_exhaustive = results.iter().all(|r| r.exhaustive);
    let best_ok = results.iter().all(|r| r.best_value >= r.average);
    Ok(ReportDoc::new(vec![CheckRecord::new("khintchine.lower-bound", digest, worst > 0.0 && best_ok)
        .observe_num("a1", a1)
        .observe_num("worst_margin", worst)
        .observe("vectors", results.len())
        .observe("exhaustive", all_exhaustive)]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichStats {
    /// Largest `hull_norm(g) / bergman_norm(g)`.
    pub c_hull: f64,
    /// Largest `bergman_norm(M_θ g) / solid_core_norm(g)`.
    pub c_core: f64,
    /// Pairs where `solid_core_norm(M_θ g) > solid_core_norm(g)`.
    pub core_solidity_violations: usize,
    /// Pairs where `hull_norm(M_θ g) > hull_norm(g)`.
    pub hull_solidity_violations: usize,
    pub polynomials: usize,
}

/// Both sides of the solid core/hull sandwich over a corpus.
///
/// `measure` must be the weighted-area measure of the weight behind `hp`,
/// and `decomp` a decomposition of that measure. Multipliers for item `i`
/// come from stream `i` of `seed`.
pub fn sandwich(
    corpus: &[CoeffSeq],
    decomp: &LacunaryDecomposition,
    hp: &HullParameters,
    measure: &RadialMeasure,
    seed: u64,
) -> Result<SandwichStats> {
    match measure.density() {
        Density::WeightedArea(w) if w == hp.weight() => {}
        _ => return Err(Error::InvalidParameter("sandwich needs the weighted-area measure of the hull weight".into())),
    }
    let rows = corpus
        .par_iter()
        .enumerate()
        .filter(|(_, g)| !g.is_zero())
        .map(|(i, g)| {
            let norm = bergman_norm(g, measure, 1.0)?;
            let core = solid_core_norm(g, decomp)?;
            let hull = hull_norm(g, hp)?;
            let mut rng = item_rng(seed, i);
            let mut c_core: f64 = 0.0;
            let (mut core_bad, mut hull_bad) = (0, 0);
            for _ in 0..SANDWICH_MULTIPLIERS {
                let theta = random_multiplier(&mut rng, g.len());
                let tg = coefficient_multiplier(g, &theta)?;
                c_core = c_core.max((bergman_norm(&tg, measure, 1.0)? / core).value());
                if solid_core_norm(&tg, decomp)? > core {
                    core_bad += 1;
                }
                if hull_norm(&tg, hp)? > hull {
                    hull_bad += 1;
                }
            }
            Ok(((hull / norm).value(), c_core, core_bad, hull_bad))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SandwichStats {
        c_hull: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        c_core: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        core_solidity_violations: rows.iter().map(|r| r.2).sum(),
        hull_solidity_violations: rows.iter().map(|r| r.3).sum(),
        polynomials: rows.len(),
    })
}

/// Runs [`sandwich`] once per seed and records the observed constants and
/// their variation across seeds.
pub fn sandwich_report(
    corpora: &[(u64, Vec<CoeffSeq>)],
    decomp: &LacunaryDecomposition,
    hp: &HullParameters,
    measure: &RadialMeasure,
) -> Result<ReportDoc> {
    let digest = digest_of(&[
        &serde_json::to_value(measure).unwrap(),
        &serde_json::to_value(decomp).unwrap(),
        &serde_json::to_value(hp.mu()).unwrap(),
    ]);
    let stats = corpora
        .iter()
        .map(|(seed, c)| sandwich(c, decomp, hp, measure, *seed))
        .collect::<Result<Vec<_>>>()?;
    let hull: Vec<f64> = stats.iter().map(|s| s.c_hull).collect();
    let core: Vec<f64> = stats.iter().map(|s| s.c_core).collect();
    let finite = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x > 0.0);
    let hull_spread = spread(&hull);
    let core_spread = spread(&core);
    let core_bad: usize = stats.iter().map(|s| s.core_solidity_violations).sum();
    let hull_bad: usize = stats.iter().map(|s| s.hull_solidity_violations).sum();
    Ok(ReportDoc::new(vec![
        CheckRecord::new("sandwich.hull", digest.clone(), finite(&hull) && hull_spread <= STABILITY_FACTOR)
            .tolerance(STABILITY_FACTOR)
            .observe_num("c_hull_max", hull.iter().copied().fold(0.0, f64::max))
            .observe_num("seed_spread", hull_spread)
            .observe("solidity_violations", hull_bad),
        CheckRecord::new("sandwich.core", digest, finite(&core) && core_spread <= STABILITY_FACTOR && core_bad == 0)
            .tolerance(STABILITY_FACTOR)
            .observe_num("c_core_max", core.iter().copied().fold(0.0, f64::max))
            .observe_num("seed_spread", core_spread)
            .observe("solidity_violations", core_bad),
    ]))
}

/// Analytic Fejér kernel of half-width `width` centred at degree `centre`:
/// coefficients `1 - |k - centre| / (width + 1)`; its modulus on the unit
/// circle is a non-negative kernel of mean one.
pub fn fejer_kernel(centre: usize, width: usize) -> CoeffSeq {
    let w = width.min(centre);
    let mut c = vec![Complex64::new(0.0, 0.0); centre + w + 1];
    for (k, slot) in c.iter_mut().enumerate().skip(centre - w) {
        *slot = Complex64::new(1.0 - (k as f64 - centre as f64).abs() / (w as f64 + 1.0), 0.0);
    }
    CoeffSeq::new(c)
}

/// `sup_g M₁(P_K g, 1) / M₁(g, 1)` over Fejér kernels centred at `K` with
/// half-widths `K/4, K/2, K`. Grows without bound in `K`.
pub fn projection_growth(k: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    for width in [k / 4, k / 2, k] {
        let g = fejer_kernel(k, width.max(1));
        let full = log_circle_mean(&g, 0.0, Exponent::One)?;
        let cut = log_circle_mean(&g.restrict(0, k), 0.0, Exponent::One)?;
        best = best.max((cut / full).value());
    }
    Ok(best)
}

/// Report-only record of [`projection_growth`] at `K = ⌊m_n⌋` for the
/// blocks of `decomp` with `⌊m_n⌋ <= max_k`.
pub fn projection_report(decomp: &LacunaryDecomposition, max_k: usize) -> Result<ReportDoc> {
    let ks: Vec<usize> = (1..=decomp.blocks()).map(|n| decomp.floor_m(n)).filter(|&k| k >= 1 && k <= max_k).collect();
    let growth = ks.par_iter().map(|&k| projection_growth(k)).collect::<Result<Vec<_>>>()?;
    let mut rec = CheckRecord::new("projection.growth", config_digest(decomp), true).note("report only");
    for (k, g) in ks.iter().zip(&growth) {
        rec = rec.observe_num(&format!("K={k}"), *g);
    }
    Ok(ReportDoc::new(vec![rec]))
}
