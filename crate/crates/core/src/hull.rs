//! Condition (b) sequences, the solid-hull and `H^∞_v` solid-core norms,
//! the `H^∞_v` norm itself and the dual pairing against `v² dA`.
//!
//! Intervals follow the convention `μ_0 = 0`: interval 0 is `[0, μ_1]`
//! (the constant term included) and uses `r_{μ_1}`, interval `n >= 1` is
//! `(μ_n, μ_{n+1}]` and uses `r_{μ_n}`.

use std::cell::RefCell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logreal::LogReal;
use crate::measure::{Domain, LineDensity, RadialMeasure, DISC_AXIS_MAX};
use crate::poly::CoeffSeq;
use crate::roots::{bisect_increasing, bracket_increasing, golden_max};
use crate::weight::{Radius, RadialWeight};

/// Largest order considered when bracketing the next `μ`.
const MAX_MU: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HullOptions {
    /// `μ_1`.
    pub mu_seed: f64,
    /// Relative overshoot of the lower ratio above `b`.
    pub margin: f64,
    /// Moments `W_k` with `k` below this are computed eagerly; larger ones
    /// on demand.
    pub w_cache_max: usize,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions { mu_seed: 1.0, margin: 1e-3, w_cache_max: 4096 }
    }
}

/// `r_m`, the maximiser of `r^m v(r)` on `(0, 1)`, as a [`Radius`].
pub fn max_point_radius(weight: &RadialWeight, m: f64) -> Result<Radius> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("order must be positive, got {m}")));
    }
    if weight.r_phi_prime_at(Radius::new(0.5)).is_none() {
        return Err(Error::UnsupportedWeight("no derivative of log v available".into()));
    }
    let target = m.ln();
    // r φ'(r) is increasing; solve on the axis r = 1 - e^{-t}
    let f = |t: f64| match weight.r_phi_prime_at(Radius::from_disc_axis(t)) {
        Some(v) if v > 0.0 => v.ln() - target,
        Some(_) => f64::NEG_INFINITY,
        None => f64::NAN,
    };
    let (lo, hi) = bracket_increasing(f, 1.0, 0.0, DISC_AXIS_MAX, "maximum point")
        .map_err(|e| Error::SolverFailure(format!("r φ'(r) = {m} has no root: {e}")))?;
    let (_, t) = bisect_increasing(f, lo, hi, 0.0, 200);
    Ok(Radius::from_disc_axis(t))
}

/// `r_m` solving `r φ'(r) = m`.
pub fn max_point(weight: &RadialWeight, m: f64) -> Result<f64> {
    Ok(max_point_radius(weight, m)?.r)
}

/// `W_k = ∫_0^1 r^{2k+1} v(r)² dr`, cached for small `k`.
#[derive(Clone, Debug)]
pub struct WeightMoments {
    measure: RadialMeasure,
    cache: Vec<LogReal>,
}

impl WeightMoments {
    /// Computes `W_0, …, W_{eager-1}` up front.
    pub fn new(weight: &RadialWeight, eager: usize) -> Result<WeightMoments> {
        let measure = RadialMeasure::line(LineDensity::WeightPower { weight: weight.clone(), power: 2.0 }, Domain::Disc)?;
        let cache = (0..eager)
            .into_par_iter()
            .map(|k| measure.total_log_moment(2.0 * k as f64 + 1.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightMoments { measure, cache })
    }

    pub fn get(&self, k: usize) -> Result<LogReal> {
        match self.cache.get(k) {
            Some(&w) => Ok(w),
            None => self.measure.total_log_moment(2.0 * k as f64 + 1.0),
        }
    }

    pub fn cached(&self) -> &[LogReal] {
        &self.cache
    }
}

/// Condition (b) data for a weight: the sequence `μ_n`, its maximum points,
/// the ratios of both sides of the condition and the moments `W_k`.
#[derive(Clone, Debug, Serialize)]
pub struct HullParameters {
    b: f64,
    #[serde(rename = "K")]
    k_upper: f64,
    weight: RadialWeight,
    mu: Vec<f64>,
    r_mu: Vec<f64>,
    log_r_mu: Vec<f64>,
    log_v_mu: Vec<f64>,
    /// `L_n` for the pairs `(μ_n, μ_{n+1})`.
    lower_ratio: Vec<f64>,
    /// `U_n` for the same pairs.
    upper_ratio: Vec<f64>,
    #[serde(rename = "log_w")]
    moments_cache: Vec<LogReal>,
    #[serde(skip)]
    moments: WeightMoments,
}

struct Point {
    m: f64,
    log_r: f64,
    phi: f64,
}

fn point(weight: &RadialWeight, m: f64) -> Result<Point> {
    let x = max_point_radius(weight, m)?;
    Ok(Point { m, log_r: x.log_r, phi: weight.phi_at(x) })
}

/// `ln((r_a / r_b)^{μ_a} v(r_a) / v(r_b))`.
fn log_lower(a: &Point, b: &Point) -> f64 {
    a.m * (a.log_r - b.log_r) + b.phi - a.phi
}

/// `ln((r_b / r_a)^{μ_b} v(r_b) / v(r_a))`.
fn log_upper(a: &Point, b: &Point) -> f64 {
    b.m * (b.log_r - a.log_r) - b.phi + a.phi
}

/// The lower and upper ratios of condition (b) for a pair of orders,
/// evaluated from scratch.
pub fn condition_b_ratios(weight: &RadialWeight, mu: f64, mu_next: f64) -> Result<(f64, f64)> {
    let (a, b) = (point(weight, mu)?, point(weight, mu_next)?);
    Ok((log_lower(&a, &b).exp(), log_upper(&a, &b).exp()))
}

// Smallest μ' > μ with L(μ, μ') >= target, by bisection on an increasing map.
fn next_mu(weight: &RadialWeight, cur: &Point, log_target: f64) -> Result<Point> {
    let err = RefCell::new(None);
    let f = |m: f64| match point(weight, m) {
        Ok(p) => log_lower(cur, &p) - log_target,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let bracket = bracket_increasing(f, cur.m, cur.m, MAX_MU, "next condition (b) order");
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    let (lo, hi) = bracket?;
    let (_, m) = bisect_increasing(f, lo, hi, 0.0, 200);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    point(weight, m)
}

/// Greedy condition (b) sequence of `count` orders.
///
/// Starting from `μ_1 = opts.mu_seed`, each `μ_{n+1}` is the smallest order
/// whose lower ratio reaches `b (1 + margin)`; the upper ratio is then
/// checked against `K`.
pub fn find_condition_b_sequence(
    weight: &RadialWeight,
    b: f64,
    k_upper: f64,
    count: usize,
    opts: &HullOptions,
) -> Result<HullParameters> {
    if !(b > 2.0) {
        return Err(Error::InvalidParameter(format!("condition (b) needs b > 2, got {b}")));
    }
    if !(k_upper > b) {
        return Err(Error::InvalidParameter(format!("condition (b) needs K > b, got K = {k_upper}, b = {b}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    if !(opts.mu_seed > 0.0) || !(opts.margin >= 0.0) {
        return Err(Error::InvalidParameter("mu_seed must be positive and margin non-negative".into()));
    }
    let log_target = (b * (1.0 + opts.margin)).ln();
    let mut points = vec![point(weight, opts.mu_seed)?];
    let mut lower_ratio = Vec::with_capacity(count);
    let mut upper_ratio = Vec::with_capacity(count);
    while points.len() < count {
        let cur = points.last().unwrap();
        let next = next_mu(weight, cur, log_target)?;
        let upper = log_upper(cur, &next).exp();
        if !(upper <= k_upper) {
            return Err(Error::ConditionBViolation { n: points.len(), upper, k: k_upper });
        }
        lower_ratio.push(log_lower(cur, &next).exp());
        upper_ratio.push(upper);
        points.push(next);
    }

    let mu: Vec<f64> = points.iter().map(|p| p.m).collect();
    let log_r_mu: Vec<f64> = points.iter().map(|p| p.log_r).collect();
    let covered = mu[count - 1].floor() as usize + 1;
    let moments = WeightMoments::new(weight, covered.min(opts.w_cache_max))?;
    Ok(HullParameters {
        b,
        k_upper,
        weight: weight.clone(),
        r_mu: log_r_mu.iter().map(|x| x.exp()).collect(),
        log_v_mu: points.iter().map(|p| -p.phi).collect(),
        log_r_mu,
        mu,
        lower_ratio,
        upper_ratio,
        moments_cache: moments.cached().to_vec(),
        moments,
    })
}

/// Like [`find_condition_b_sequence`] with `K` starting at `10 b` and doubled
/// on every violation up to `10⁴ b`.
pub fn find_condition_b_sequence_auto(weight: &RadialWeight, b: f64, count: usize, opts: &HullOptions) -> Result<HullParameters> {
    let k_max = 1e4 * b;
    let mut k = 10.0 * b;
    loop {
        match find_condition_b_sequence(weight, b, k, count, opts) {
            Err(Error::ConditionBViolation { upper, .. }) if k < k_max => {
                while k < upper && k < k_max {
                    k = (2.0 * k).min(k_max);
                }
            }
            other => return other,
        }
    }
}

impl HullParameters {
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k_upper(&self) -> f64 {
        self.k_upper
    }

    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    /// `μ_1, …, μ_N`.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn r_mu(&self) -> &[f64] {
        &self.r_mu
    }

    pub fn lower_ratios(&self) -> &[f64] {
        &self.lower_ratio
    }

    pub fn upper_ratios(&self) -> &[f64] {
        &self.upper_ratio
    }

    pub fn moments(&self) -> &WeightMoments {
        &self.moments
    }

    /// Number of intervals, equal to the length of `μ`.
    pub fn intervals(&self) -> usize {
        self.mu.len()
    }

    /// Largest coefficient index covered, `⌊μ_N⌋`.
    pub fn coverage(&self) -> usize {
        self.mu[self.mu.len() - 1].floor() as usize
    }

    /// Inclusive coefficient range of interval `n`.
    pub fn interval_range(&self, n: usize) -> (usize, usize) {
        let lo = if n == 0 { 0 } else { self.mu[n - 1].floor() as usize + 1 };
        (lo, self.mu[n].floor() as usize)
    }

    /// Interval containing coefficient `k`.
    pub fn interval_of(&self, k: usize) -> Option<usize> {
        if k > self.coverage() {
            return None;
        }
        Some(self.mu.partition_point(|&m| m.floor() < k as f64))
    }

    fn radius_index(n: usize) -> usize {
        n.saturating_sub(1)
    }

    /// `ln v(r_{μ_n})` for the radius attached to interval `n`.
    pub fn log_v_of_interval(&self, n: usize) -> f64 {
        self.log_v_mu[Self::radius_index(n)]
    }

    /// `σ_k = r_{μ_n}^k` for the interval `n` containing `k`.
    pub fn sigma(&self, k: usize) -> Result<LogReal> {
        let n = self.interval_of(k).ok_or(Error::InsufficientBlocks { degree: k, max: self.coverage() })?;
        Ok(self.sigma_in(n, k))
    }

    fn sigma_in(&self, n: usize, k: usize) -> LogReal {
        if k == 0 {
            LogReal::ONE
        } else {
            LogReal::from_ln(k as f64 * self.log_r_mu[Self::radius_index(n)])
        }
    }

    pub fn w(&self, k: usize) -> Result<LogReal> {
        self.moments.get(k)
    }

    /// `S_k = W_k / (v(r_{μ_n}) σ_k)`.
    pub fn s_coeff(&self, k: usize) -> Result<LogReal> {
        let n = self.interval_of(k).ok_or(Error::InsufficientBlocks { degree: k, max: self.coverage() })?;
        Ok(self.w(k)? / (LogReal::from_ln(self.log_v_of_interval(n)) * self.sigma_in(n, k)))
    }

    fn check_degree(&self, f: &CoeffSeq) -> Result<()> {
        match f.exact_degree() {
            Some(d) if d > self.coverage() => Err(Error::InsufficientBlocks { degree: d, max: self.coverage() }),
            _ => Ok(()),
        }
    }

    fn interval_terms<'a>(&'a self, f: &'a CoeffSeq) -> impl Iterator<Item = (usize, usize, f64)> + 'a {
        f.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(move |(k, a)| (self.interval_of(k).unwrap(), k, a.norm()))
    }
}

/// `Σ_n sup_{k in interval n} |b_k| S_k`.
pub fn hull_norm(bcoeffs: &CoeffSeq, hp: &HullParameters) -> Result<LogReal> {
    hp.check_degree(bcoeffs)?;
    let mut sups = vec![LogReal::ZERO; hp.intervals()];
    for (n, k, a) in hp.interval_terms(bcoeffs) {
        let term = LogReal::from_value(a) * hp.s_coeff(k)?;
        sups[n] = sups[n].max(term);
    }
    Ok(sups.into_iter().sum())
}

/// `sup_n v(r_{μ_n}) Σ_{k in interval n} |b_k| σ_k`.
pub fn hinfty_core_norm(bcoeffs: &CoeffSeq, hp: &HullParameters) -> Result<LogReal> {
    hp.check_degree(bcoeffs)?;
    let mut sums = vec![LogReal::ZERO; hp.intervals()];
    for (n, k, a) in hp.interval_terms(bcoeffs) {
        sums[n] = sums[n] + LogReal::from_value(a) * hp.sigma_in(n, k);
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(n, s)| s * LogReal::from_ln(hp.log_v_of_interval(n)))
        .fold(LogReal::ZERO, LogReal::max))
}

/// Result of the grid search for `sup_z v(|z|) |f(z)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupEstimate {
    /// The best value found; a lower bound for the supremum.
    pub value: LogReal,
    /// Radius where it was found.
    pub radius: f64,
    /// Number of radii in the final grid.
    pub radii: usize,
    /// Relative change against the previous (half as fine) grid.
    pub last_change: f64,
}

/// Relative change between grid doublings at which [`hinfty_norm`] stops.
pub const HINFTY_TOL: f64 = 1e-6;
const HINFTY_AXIS_MAX: f64 = 36.0;
const HINFTY_START_RADII: usize = 512;
const HINFTY_MAX_RADII: usize = 1 << 16;

fn log_circle_max(f: &CoeffSeq, r: f64) -> f64 {
    let samples = 8 * (f.degree() + 1);
    let h = std::f64::consts::TAU / samples as f64;
    let modulus = |phi: f64| f.eval(Complex64::from_polar(r, phi)).norm();
    let mut vals: Vec<(f64, f64)> = (0..samples).map(|j| (j as f64 * h, modulus(j as f64 * h))).collect();
    vals.sort_by(|a, b| b.1.total_cmp(&a.1));
    let best = vals
        .iter()
        .take(3)
        .map(|&(phi, v)| golden_max(&modulus, phi - h, phi + h).1.max(v))
        .fold(0.0, f64::max);
    best.ln()
}

fn radial_sup(f: &CoeffSeq, weight: &RadialWeight, radii: usize) -> (f64, f64) {
    let g = |t: f64| {
        let x = Radius::from_disc_axis(t);
        weight.log_eval_at(x) + log_circle_max(f, x.r)
    };
    let step = HINFTY_AXIS_MAX / (radii - 1) as f64;
    let vals: Vec<f64> = (0..radii).into_par_iter().map(|j| g(j as f64 * step)).collect();
    let (j, &v) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let t0 = j as f64 * step;
    let (t, refined) = golden_max(&g, (t0 - step).max(0.0), (t0 + step).min(HINFTY_AXIS_MAX));
    if refined > v {
        (refined, t)
    } else {
        (v, t0)
    }
}

/// `sup_{|z|<1} v(|z|) |f(z)|` on a radial grid geometric toward the unit
/// circle (`1 - r = e^{-t}`, `t ∈ [0, 36]`), starting with 512 radii and
/// doubling until the value changes by less than [`HINFTY_TOL`].
pub fn hinfty_norm(f: &CoeffSeq, weight: &RadialWeight) -> SupEstimate {
    if f.is_zero() {
        return SupEstimate { value: LogReal::ZERO, radius: 0.0, radii: 0, last_change: 0.0 };
    }
    let mut radii = HINFTY_START_RADII;
    let (mut prev, _) = radial_sup(f, weight, radii);
    loop {
        radii *= 2;
        let (v, t) = radial_sup(f, weight, radii);
        let change = (v - prev).exp_m1().abs();
        if change < HINFTY_TOL || radii >= HINFTY_MAX_RADII {
            return SupEstimate {
                value: LogReal::from_ln(v.max(prev)),
                radius: Radius::from_disc_axis(t).r,
                radii,
                last_change: change,
            };
        }
        prev = v;
    }
}

/// `⟨f, g⟩ = Σ_k f̂(k) conj(ĝ(k)) W_k`.
pub fn dual_pairing(f: &CoeffSeq, g: &CoeffSeq, weight: &RadialWeight) -> Result<Complex64> {
    let n = f.len().min(g.len());
    let moments = WeightMoments::new(weight, n)?;
    dual_pairing_with(f, g, &moments)
}

/// [`dual_pairing`] with precomputed moments.
pub fn dual_pairing_with(f: &CoeffSeq, g: &CoeffSeq, moments: &WeightMoments) -> Result<Complex64> {
    let n = f.len().min(g.len());
    let mut terms = Vec::new();
    for k in 0..n {
        let p = f.coeff(k) * g.coeff(k).conj();
        let m = p.norm();
        if m > 0.0 {
            terms.push((m.ln() + moments.get(k)?.ln(), p / m));
        }
    }
    let shift = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sum: Complex64 = terms.iter().map(|(l, phase)| phase * (l - shift).exp()).sum();
    Ok(sum * shift.exp())
}

/// Sampled check that `Δφ = φ'' + φ'/r` is positive, with the induced
/// `ρ = Δφ^{-1/2}` and its largest sampled difference quotient. Sampling
/// evidence only; it does not prove membership in the class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct W0Report {
    pub samples: usize,
    pub min_laplacian: f64,
    pub argmin_r: f64,
    pub pass: bool,
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
    pub rho_lipschitz: Option<f64>,
}

/// Samples `Δφ` at `r_j = (j + 1/2) / n`, `j < n`.
pub fn w0_diagnostic(weight: &RadialWeight, samples: usize) -> Result<W0Report> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    let missing = || Error::UnsupportedWeight("Laplacian of log v needs φ' and φ''".into());
    let rs: Vec<f64> = (0..samples).map(|j| (j as f64 + 0.5) / samples as f64).collect();
    let lap = rs
        .iter()
        .map(|&r| Ok(weight.phi_second(r).ok_or_else(missing)? + weight.phi_prime(r).ok_or_else(missing)? / r))
        .collect::<Result<Vec<f64>>>()?;
    let (jmin, &min) = lap
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two samples");
    let pass = lap.iter().all(|&d| d > 0.0);
    let (rho_min, rho_max, rho_lipschitz) = if pass {
        let rho: Vec<f64> = lap.iter().map(|d| d.sqrt().recip()).collect();
        let lip = rho
            .windows(2)
            .zip(rs.windows(2))
            .map(|(p, r)| (p[1] - p[0]).abs() / (r[1] - r[0]))
            .fold(0.0, f64::max);
        (
            Some(rho.iter().copied().fold(f64::INFINITY, f64::min)),
            Some(rho.iter().copied().fold(0.0, f64::max)),
            Some(lip),
        )
    } else {
        (None, None, None)
    };
    Ok(W0Report { samples, min_laplacian: min, argmin_r: rs[jmin], pass, rho_min, rho_max, rho_lipschitz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::make_builtin_weight;

    fn exp_weight(ell: f64) -> RadialWeight {
        make_builtin_weight("exponential", &[1.0, 1.0, ell]).unwrap()
    }

    #[test]
    fn max_points_from_quadratics() {
        // r/(1-r)² = 2  ⇔  2r² - 5r + 2 = 0
        assert!((max_point(&exp_weight(1.0), 2.0).unwrap() - 0.5).abs() < 1e-12);
        // 2u/(1-u)² = 4 with u = r²  ⇔  u = 1/2
        assert!((max_point(&exp_weight(2.0), 4.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        for w in [exp_weight(1.0), exp_weight(2.0), make_builtin_weight("power", &[2.0]).unwrap()] {
            assert!(max_point(&w, 0.001).unwrap() < 0.05);
        }
        // r γ/(1-r) = m  ⇔  r = m/(m+γ)
        let p = make_builtin_weight("power", &[3.0]).unwrap();
        assert!((max_point(&p, 5.0).unwrap() - 5.0 / 8.0).abs() < 1e-12);
        assert!(matches!(max_point(&RadialWeight::unit(), 2.0), Err(Error::SolverFailure(_))));
        assert!(max_point(&exp_weight(1.0), 0.0).is_err());
    }

    #[test]
    fn unit_weight_moments() {
        let w = WeightMoments::new(&RadialWeight::unit(), 8).unwrap();
        for k in [0usize, 3, 7, 20] {
            let v = w.get(k).unwrap().value();
            assert!((v - 1.0 / (2.0 * k as f64 + 2.0)).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn condition_b_sequence_small() {
        let w = exp_weight(2.0);
        let hp = find_condition_b_sequence(&w, 2.5, 25.0, 8, &HullOptions::default()).unwrap();
        assert_eq!(hp.mu().len(), 8);
        assert_eq!(hp.mu()[0], 1.0);
        for n in 0..7 {
            let (l, u) = condition_b_ratios(&w, hp.mu()[n], hp.mu()[n + 1]).unwrap();
            assert!(l >= 2.5 && u <= 25.0 && l <= u, "n = {n}: {l} {u}");
            assert!(((l - hp.lower_ratios()[n]) / l).abs() < 1e-9);
        }
        assert!(hp.r_mu().windows(2).all(|p| p[1] > p[0]));
        assert!(matches!(
            find_condition_b_sequence(&w, 2.5, 5.0, 8, &HullOptions::default()),
            Err(Error::ConditionBViolation { n: 1, .. })
        ));
        assert!(find_condition_b_sequence(&w, 2.0, 25.0, 8, &HullOptions::default()).is_err());
        let auto = find_condition_b_sequence_auto(&w, 2.5, 8, &HullOptions::default()).unwrap();
        assert_eq!(auto.k_upper(), 25.0);
    }

    #[test]
    fn sigma_and_s_identities() {
        let hp = find_condition_b_sequence(&exp_weight(2.0), 2.5, 25.0, 6, &HullOptions::default()).unwrap();
        for k in 0..=hp.coverage() {
            let n = hp.interval_of(k).unwrap();
            let (lo, hi) = hp.interval_range(n);
            assert!(lo <= k && k <= hi);
            let lhs = hp.s_coeff(k).unwrap() * LogReal::from_ln(hp.log_v_of_interval(n)) * hp.sigma(k).unwrap();
            assert!(lhs.rel_diff(hp.w(k).unwrap()) < 1e-10);
            if k < hi && k > 0 {
                let ratio = (hp.sigma(k).unwrap() / hp.sigma(k + 1).unwrap()).value();
                assert!((ratio * hp.r_mu()[n.saturating_sub(1)] - 1.0).abs() < 1e-12);
            }
        }
        assert!(hp.sigma(hp.coverage() + 1).is_err());
    }

    #[test]
    fn hull_and_core_norms_on_unit_vectors() {
        let hp = find_condition_b_sequence(&exp_weight(2.0), 2.5, 25.0, 6, &HullOptions::default()).unwrap();
        assert!(hull_norm(&CoeffSeq::zero(), &hp).unwrap().is_zero());
        assert!(hinfty_core_norm(&CoeffSeq::zero(), &hp).unwrap().is_zero());
        for k in [0usize, 1, 5, hp.coverage()] {
            let e = CoeffSeq::monomial(k, Complex64::new(1.0, 0.0));
            assert!(hull_norm(&e, &hp).unwrap().rel_diff(hp.s_coeff(k).unwrap()) < 1e-14);
            let n = hp.interval_of(k).unwrap();
            let expect = LogReal::from_ln(hp.log_v_of_interval(n)) * hp.sigma(k).unwrap();
            assert!(hinfty_core_norm(&e, &hp).unwrap().rel_diff(expect) < 1e-14);
        }
        let too_long = CoeffSeq::monomial(hp.coverage() + 1, Complex64::new(1.0, 0.0));
        assert!(matches!(hull_norm(&too_long, &hp), Err(Error::InsufficientBlocks { .. })));
    }

    #[test]
    fn hinfty_closed_forms() {
        let w = exp_weight(1.0);
        let one = hinfty_norm(&CoeffSeq::from_real(&[1.0]), &w);
        assert!((one.value.value() - w.eval(0.0)).abs() < 1e-12);
        let c = hinfty_norm(&CoeffSeq::from_real(&[-3.0]), &w);
        assert!((c.value.value() - 3.0 * w.eval(0.0)).abs() < 1e-12);
        // sup at r_2 = 1/2: v(1/2)/4 = e^{-2}/4
        let z2 = hinfty_norm(&CoeffSeq::monomial(2, Complex64::new(1.0, 0.0)), &w);
        assert!((z2.value.value() / ((-2.0f64).exp() / 4.0) - 1.0).abs() < 1e-6, "{:?}", z2);
        assert!((z2.radius - 0.5).abs() < 1e-3);
    }

    #[test]
    fn pairing_orthogonality() {
        let w = exp_weight(2.0);
        let moments = WeightMoments::new(&w, 12).unwrap();
        let z = |k| CoeffSeq::monomial(k, Complex64::new(1.0, 0.0));
        assert_eq!(dual_pairing_with(&z(3), &z(5), &moments).unwrap(), Complex64::new(0.0, 0.0));
        let d = dual_pairing_with(&z(4), &z(4), &moments).unwrap();
        assert!((d.re / moments.get(4).unwrap().value() - 1.0).abs() < 1e-14 && d.im == 0.0);
        let u = dual_pairing(&z(0), &z(0), &RadialWeight::unit()).unwrap();
        assert!((u.re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn w0_diagnostics() {
        let r = w0_diagnostic(&exp_weight(2.0), 1024).unwrap();
        assert!(r.pass && r.min_laplacian > 0.0 && r.rho_lipschitz.unwrap().is_finite());
        let u = w0_diagnostic(&RadialWeight::unit(), 1024).unwrap();
        assert!(!u.pass && u.min_laplacian == 0.0);
        let tab = RadialWeight::new(crate::weight::WeightFamily::Tabulated { r: vec![0.0, 1.0], log_v: vec![0.0, -1.0] }).unwrap();
        assert!(matches!(w0_diagnostic(&tab, 16), Err(Error::UnsupportedWeight(_))));
    }
}
