//! Lacunary block decompositions `(m_n, s_n, d_n)` of a radial measure and
//! the de la Vallée Poussin tents `t_{n,k}` that define the block operators.
//!
//! Block `n` is described by the triple `(m_n, m_{n+1}, s_n)` and the weight
//! `d_n`. The balanced construction starts from `m_0 = 0` and alternates the
//! two balancing equations
//!
//! ```text
//! ∫_0^{s_n} r^{m_n} dμ     = b ∫_{s_n}^R r^{m_n} dμ
//! ∫_0^{s_n} r^{m_{n+1}} dμ =   ∫_{s_n}^R r^{m_{n+1}} dμ
//! ```
//!
//! so that `s_0` comes from `m_0`, `m_1` from `s_0`, and so on.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::logreal::LogReal;
use crate::measure::RadialMeasure;
use crate::roots::{bisect_increasing, bracket_increasing};

/// Default balancing constant (must exceed 5).
pub const DEFAULT_BALANCING_B: f64 = 6.0;
/// Relative residual accepted when rechecking the balancing equations.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Orders beyond this are treated as a failed bracket.
pub const MAX_ORDER: f64 = 1e200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Balanced,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RawDecomposition {
    b: f64,
    m: Vec<f64>,
    #[serde(default, skip_deserializing)]
    s: Vec<f64>,
    log_s: Vec<f64>,
    log_d: Vec<f64>,
    method: Method,
}

/// Block data of a lacunary decomposition. `m` has one more entry than `s`
/// and `log_d`; block `n` pairs `s[n]`, `d[n]` with `(m[n], m[n+1])`.
///
/// Radii are held as `ln s_n`: on the disc `s_n` approaches 1 faster than
/// `f64` can resolve, while `ln s_n ≈ -(1 - s_n)` stays exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDecomposition", into = "RawDecomposition")]
pub struct LacunaryDecomposition {
    b: f64,
    m: Vec<f64>,
    log_s: Vec<f64>,
    s: Vec<f64>,
    log_d: Vec<LogReal>,
    method: Method,
}

impl TryFrom<RawDecomposition> for LacunaryDecomposition {
    type Error = Error;

    fn try_from(raw: RawDecomposition) -> Result<Self> {
        let log_d = raw.log_d.iter().map(|&x| LogReal::from_ln(x)).collect();
        LacunaryDecomposition::from_parts(raw.b, raw.m, raw.log_s, log_d, raw.method)
    }
}

impl From<LacunaryDecomposition> for RawDecomposition {
    fn from(d: LacunaryDecomposition) -> Self {
        RawDecomposition {
            b: d.b,
            m: d.m,
            s: d.s,
            log_s: d.log_s,
            log_d: d.log_d.iter().map(|x| x.ln()).collect(),
            method: d.method,
        }
    }
}

impl LacunaryDecomposition {
    /// Assembles a decomposition from raw arrays, checking the shape and
    /// monotonicity invariants.
    pub fn from_parts(b: f64, m: Vec<f64>, log_s: Vec<f64>, log_d: Vec<LogReal>, method: Method) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("decomposition: {msg}")));
        if log_s.is_empty() || m.len() != log_s.len() + 1 || log_d.len() != log_s.len() {
            return bad("need |m| = |s| + 1 = |d| + 1 >= 2");
        }
        if m[0] != 0.0 {
            return bad("m_0 must be 0");
        }
        if m.windows(2).any(|w| !(w[1] > w[0])) || m.iter().any(|x| !x.is_finite()) {
            return bad("m must be finite and strictly increasing");
        }
        if !log_s[0].is_finite() || log_s.windows(2).any(|w| !(w[1] > w[0])) || log_s.iter().any(|x| x.is_nan()) {
            return bad("s must be positive and strictly increasing");
        }
        if log_d.iter().any(|d| !d.ln().is_finite()) {
            return bad("all d_n must be positive and finite");
        }
        let s = log_s.iter().map(|x| x.exp()).collect();
        Ok(LacunaryDecomposition { b, m, log_s, s, log_d, method })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    /// Radii `s_n`; on the disc these may round to 1, see [`Self::log_s`].
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// `ln s_n`.
    pub fn log_s(&self) -> &[f64] {
        &self.log_s
    }

    pub fn log_d(&self) -> &[LogReal] {
        &self.log_d
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Number of blocks `N`.
    pub fn blocks(&self) -> usize {
        self.s.len()
    }

    /// `⌊m_n⌋`.
    pub fn floor_m(&self, n: usize) -> usize {
        self.m[n].floor() as usize
    }

    /// Largest degree on which the tents `T_n` sum to one.
    pub fn tent_coverage(&self) -> usize {
        self.floor_m(self.blocks() - 1)
    }

    /// Largest degree covered by the coefficient blocks `(⌊m_n⌋, ⌊m_{n+1}⌋]`.
    pub fn block_coverage(&self) -> usize {
        self.floor_m(self.blocks())
    }

    /// Block index `n` with `⌊m_n⌋ < k <= ⌊m_{n+1}⌋`; `k = 0` goes to block 0.
    pub fn block_of(&self, k: usize) -> Option<usize> {
        if k > self.block_coverage() {
            return None;
        }
        Some((0..self.blocks()).find(|&n| k <= self.floor_m(n + 1)).unwrap_or(0))
    }

    /// Coefficient range `(lo, hi)` (inclusive) of block `n`.
    pub fn block_range(&self, n: usize) -> (usize, usize) {
        let lo = if n == 0 { 0 } else { self.floor_m(n) + 1 };
        (lo, self.floor_m(n + 1))
    }

    /// The tent `t_{n,·}` of block `n`. Block 0 is the descending half-tent
    /// on `[0, ⌊m_1⌋]`.
    pub fn tent(&self, n: usize) -> Result<Tent> {
        if n >= self.blocks() {
            return Err(Error::InsufficientBlocks { degree: n, max: self.blocks() - 1 });
        }
        if n == 0 {
            return leading_tent(self.m[1]);
        }
        vpoussin_coeffs(self.m[n - 1], self.m[n], self.m[n + 1])
    }

    /// Relative residuals of the two balancing equations at block `n`.
    pub fn balancing_residuals(&self, measure: &RadialMeasure, n: usize) -> Result<(f64, f64)> {
        let domain = measure.domain();
        let (lo, hi) = domain.axis_range();
        let x = domain.axis_from_log_radius(self.log_s[n]);
        let a0 = measure.log_moment_axis(self.m[n], lo, x)?;
        let a1 = measure.log_moment_axis(self.m[n], x, hi)?;
        let b0 = measure.log_moment_axis(self.m[n + 1], lo, x)?;
        let b1 = measure.log_moment_axis(self.m[n + 1], x, hi)?;
        let first = (a0.ln() - self.b.ln() - a1.ln()).exp_m1().abs();
        let second = (b0.ln() - b1.ln()).exp_m1().abs();
        Ok((first, second))
    }

    pub fn gap_profile(&self) -> Result<GapProfile> {
        gap_profile(&self.m)
    }

    /// Closed-form sequences completed into a decomposition: block 0 spans
    /// `(0, m_{n₀}]` with its radius from the first balancing equation at
    /// `m = 0` and constant `b`; the remaining blocks reproduce the formulas.
    pub fn from_closed_form(cf: &ClosedFormSequences, measure: &RadialMeasure, b: f64) -> Result<Self> {
        let domain = measure.domain();
        let x0 = measure.solve_balancing_radius(0.0, b)?;
        let log_s0 = domain.radius_at(x0).log_r;
        let mut m = vec![0.0];
        m.extend_from_slice(&cf.m);
        let mut log_s = vec![log_s0];
        log_s.extend_from_slice(&cf.log_s[..cf.log_s.len() - 1]);
        if !(log_s0 < cf.log_s[0]) {
            return Err(Error::DegenerateRange(format!(
                "block-0 radius {} is not below s_{} = {}",
                log_s0.exp(),
                cf.n0,
                cf.s[0]
            )));
        }
        let log_d = (0..log_s.len())
            .map(|n| compute_dn_axis(measure, m[n], m[n + 1], domain.axis_from_log_radius(log_s[n])))
            .collect::<Result<Vec<_>>>()?;
        LacunaryDecomposition::from_parts(b, m, log_s, log_d, Method::ClosedForm)
    }
}

/// Balanced decomposition with `n_blocks` blocks.
///
/// Every radius and order is found by bisection run to floating-point
/// exhaustion; both balancing equations are then rechecked at every block.
pub fn solve_balancing(measure: &RadialMeasure, b: f64, n_blocks: usize) -> Result<LacunaryDecomposition> {
    if !(b > 5.0) {
        return Err(Error::InvalidParameter(format!("balancing constant must exceed 5, got {b}")));
    }
    if n_blocks < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 blocks, got {n_blocks}")));
    }
    let domain = measure.domain();
    let mut m = vec![0.0];
    let mut log_s = Vec::with_capacity(n_blocks);
    let mut log_d = Vec::with_capacity(n_blocks);
    for n in 0..n_blocks {
        let x = measure.solve_balancing_radius(m[n], b)?;
        let next = solve_order(measure, x, m[n])?;
        log_d.push(compute_dn_axis(measure, m[n], next, x)?);
        log_s.push(domain.radius_at(x).log_r);
        m.push(next);
    }
    let decomp = LacunaryDecomposition::from_parts(b, m, log_s, log_d, Method::Balanced)?;
    for n in 0..n_blocks {
        let (first, second) = decomp.balancing_residuals(measure, n)?;
        let worst = first.max(second);
        if !(worst <= RESIDUAL_TOL) {
            return Err(Error::SolverInconsistency { index: n, residual: worst });
        }
    }
    Ok(decomp)
}

// Order m' > m with ∫_0^s r^{m'} dμ = ∫_s^R r^{m'} dμ, at axis coordinate x of s.
fn solve_order(measure: &RadialMeasure, x: f64, m: f64) -> Result<f64> {
    let (lo, hi) = measure.domain().axis_range();
    let err = std::cell::RefCell::new(None);
    // increasing in the order
    let f = |order: f64| {
        let inner = measure.log_moment_axis(order, lo, x);
        let outer = measure.log_moment_axis(order, x, hi);
        match (inner, outer) {
            (Ok(a), Ok(b)) => b.ln() - a.ln(),
            (Err(e), _) | (_, Err(e)) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let bracket = bracket_increasing(f, m, m, MAX_ORDER, "next block order");
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    let (a, c) = bracket?;
    let (_, root) = bisect_increasing(f, a, c, 0.0, 200);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(root)
}

/// `d_n = ∫_0^{s}(r/s)^{m_n} dμ + ∫_s^R (r/s)^{m_{n+1}} dμ`.
pub fn compute_dn(measure: &RadialMeasure, m_n: f64, m_next: f64, s_n: f64) -> Result<LogReal> {
    if !(s_n > 0.0 && s_n < measure.outer_radius()) {
        return Err(Error::InvalidParameter(format!("radius {s_n} outside (0, R)")));
    }
    compute_dn_axis(measure, m_n, m_next, measure.domain().to_axis(s_n))
}

fn compute_dn_axis(measure: &RadialMeasure, m_n: f64, m_next: f64, x: f64) -> Result<LogReal> {
    if !(m_n < m_next) {
        return Err(Error::InvalidParameter(format!("need m_n < m_(n+1), got {m_n} and {m_next}")));
    }
    let domain = measure.domain();
    let (lo, hi) = domain.axis_range();
    let log_s = domain.radius_at(x).log_r;
    let inner = measure.log_moment_axis(m_n, lo, x)?;
    let outer = measure.log_moment_axis(m_next, x, hi)?;
    let scale = |order: f64| if order == 0.0 { LogReal::ONE } else { LogReal::from_ln(-order * log_s) };
    Ok(inner * scale(m_n) + outer * scale(m_next))
}

/// Closed-form orders and radii for `v(r) = exp(-α (1 - r^ℓ)^{-β})` with
/// `dμ = r v(r) dr dθ`, over the valid index range `n₀..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormSequences {
    pub n0: usize,
    pub m: Vec<f64>,
    pub s: Vec<f64>,
    pub log_s: Vec<f64>,
}

impl ClosedFormSequences {
    pub fn gaps(&self) -> Vec<f64> {
        self.m.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// `m_n = ℓβ²(β/α)^{1/β} n^{2+2/β} - ℓβ² n²` and
/// `s_n = (1 - (α/β)^{1/β} n^{-2/β})^{1/ℓ}` for `n <= n_max`, trimmed to the
/// range where `s_n > 0`, `m_n > 0` and `m` is strictly increasing.
pub fn closed_form_decomposition(alpha: f64, beta: f64, ell: f64, n_max: usize) -> Result<ClosedFormSequences> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("ell", ell)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let lead = ell * beta * beta * (beta / alpha).powf(1.0 / beta);
    let m_of = |n: f64| lead * n.powf(2.0 + 2.0 / beta) - ell * beta * beta * n * n;
    let log_s_of = |n: f64| {
        let c = (alpha / beta).powf(1.0 / beta) * n.powf(-2.0 / beta);
        if c < 1.0 {
            (-c).ln_1p() / ell
        } else {
            f64::NEG_INFINITY
        }
    };
    let ms: Vec<f64> = (0..=n_max).map(|n| m_of(n as f64)).collect();
    let log_ss: Vec<f64> = (0..=n_max).map(|n| if n == 0 { f64::NEG_INFINITY } else { log_s_of(n as f64) }).collect();
    let ss: Vec<f64> = log_ss.iter().map(|x| x.exp()).collect();

    // smallest n0 from which everything is valid up to n_max
    let mut n0 = n_max + 1;
    for n in (1..=n_max).rev() {
        let ok = log_ss[n].is_finite()
            && ms[n] > 0.0
            && (n == n_max || ms[n + 1] > ms[n])
            && (n == n_max || log_ss[n + 1] > log_ss[n]);
        if !ok {
            break;
        }
        n0 = n;
    }
    if n0 > n_max {
        return Err(Error::DegenerateRange(format!("no valid indices up to n = {n_max}")));
    }
    Ok(ClosedFormSequences { n0, m: ms[n0..].to_vec(), s: ss[n0..].to_vec(), log_s: log_ss[n0..].to_vec() })
}

/// Tent coefficients `t_k` for `k = start, start + 1, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tent {
    pub start: usize,
    pub values: Vec<f64>,
}

impl Tent {
    pub fn get(&self, k: usize) -> f64 {
        if k < self.start {
            return 0.0;
        }
        self.values.get(k - self.start).copied().unwrap_or(0.0)
    }

    /// Last index with a stored coefficient.
    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }
}

/// de la Vallée Poussin tent for the block around `m_n`: rises linearly
/// from 0 at `⌊m_prev⌋` to 1 at `⌊m_n⌋` and falls back to 0 at `⌊m_next⌋`.
/// Defined for `⌊m_prev⌋ < k <= ⌊m_next⌋`.
pub fn vpoussin_coeffs(m_prev: f64, m_n: f64, m_next: f64) -> Result<Tent> {
    if !(m_prev < m_n && m_n < m_next) || m_prev < 0.0 {
        return Err(Error::InvalidParameter(format!("need 0 <= m_prev < m_n < m_next, got {m_prev}, {m_n}, {m_next}")));
    }
    let (a, p, c) = (m_prev.floor(), m_n.floor(), m_next.floor());
    if a == p {
        return Err(Error::DegenerateBlock { prev: m_prev, next: m_n });
    }
    if p == c {
        return Err(Error::DegenerateBlock { prev: m_n, next: m_next });
    }
    let (ai, pi, ci) = (a as usize, p as usize, c as usize);
    let values = (ai + 1..=ci)
        .map(|k| {
            let k = k as f64;
            if k <= p {
                (k - a) / (p - a)
            } else {
                (c - k) / (c - p)
            }
        })
        .collect();
    debug_assert!(pi > ai);
    Ok(Tent { start: ai + 1, values })
}

/// Descending half-tent of block 0: `t_k = (⌊m_1⌋ - k) / ⌊m_1⌋` for
/// `0 <= k <= ⌊m_1⌋`.
pub fn leading_tent(m1: f64) -> Result<Tent> {
    let c = m1.floor();
    if c < 1.0 {
        return Err(Error::DegenerateBlock { prev: 0.0, next: m1 });
    }
    let values = (0..=c as usize).map(|k| (c - k as f64) / c).collect();
    Ok(Tent { start: 0, values })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapClass {
    BoundedPlateau,
    Growing,
}

/// Heuristic evidence on whether `sup (m_{n+1} - m_n)` is finite. This is a
/// statistical reading of a finite prefix, not a proof.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub gaps: Vec<f64>,
    pub classification: GapClass,
    pub first_quartile_mean: f64,
    pub last_quartile_mean: f64,
    pub slope: f64,
    pub slope_stderr: f64,
    /// One-sided 95% Student-t quantile the slope's t-statistic is compared to.
    pub t_critical: f64,
}

pub const MIN_PROFILE_GAPS: usize = 20;

/// Classifies the gap sequence of `m` as `growing` when the last-quartile
/// mean gap exceeds twice the first-quartile mean and the least-squares
/// slope of the gaps is positive at 95% one-sided confidence.
pub fn gap_profile(m: &[f64]) -> Result<GapProfile> {
    let gaps: Vec<f64> = m.windows(2).map(|w| w[1] - w[0]).collect();
    let n = gaps.len();
    if n < MIN_PROFILE_GAPS {
        return Err(Error::InvalidParameter(format!("gap profile needs >= {MIN_PROFILE_GAPS} blocks, got {n}")));
    }
    let q = n / 4;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let first = mean(&gaps[..q]);
    let last = mean(&gaps[n - q..]);

    let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let xbar = mean(&xs);
    let ybar = mean(&gaps);
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&gaps).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let sse: f64 = xs.iter().zip(&gaps).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = (n - 2) as f64;
    let stderr = (sse / dof / sxx).sqrt();
    let t_critical = StudentsT::new(0.0, 1.0, dof).expect("dof > 0").inverse_cdf(0.95);
    let significant = stderr > 0.0 && slope / stderr > t_critical || stderr == 0.0 && slope > 0.0;
    let classification = if last > 2.0 * first && significant { GapClass::Growing } else { GapClass::BoundedPlateau };
    Ok(GapProfile {
        gaps,
        classification,
        first_quartile_mean: first,
        last_quartile_mean: last,
        slope,
        slope_stderr: stderr,
        t_critical,
    })
}
