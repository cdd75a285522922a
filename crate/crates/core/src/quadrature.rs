//! Globally adaptive Gauss–Legendre quadrature of positive integrands given
//! by their logarithm.
//!
//! Panels are scored by comparing one Gauss–Legendre rule on the whole panel
//! with the same rule on its two halves; the panel with the largest error is
//! split until the summed error falls below the requested relative
//! tolerance. All accumulation happens in the log domain.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logreal::{log_sum_exp, LogReal};
use crate::roots::unimodal_argmax;

const GL_ORDER: usize = 15;

/// Log-magnitude drop below the peak beyond which the integrand is ignored.
pub const TAIL_CUTOFF: f64 = 80.0;

const NOISE_FACTOR: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Target relative error of the whole integral.
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-10, max_panels: 4096 }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let terms: Vec<f64> = nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| f(mid + half * x) + w.ln())
        .collect();
    log_sum_exp(&terms) + half.ln()
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    log_err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, coarse: f64) -> Panel {
        let m = 0.5 * (a + b);
        let left = gl_panel(f, a, m);
        let right = gl_panel(f, m, b);
        let fine = log_sum_exp(&[left, right]);
        let log_err = LogReal::from_ln(coarse).abs_diff(LogReal::from_ln(fine)).ln();
        Panel { a, b, left, right, log_err }
    }

    fn value(&self) -> f64 {
        log_sum_exp(&[self.left, self.right])
    }
}

/// Integrates `exp(log_f)` over the finite interval `[a, b]`.
///
/// Returns the log of the integral. The interval is first cut into
/// `initial_panels` equal pieces. When the log-integrand is so large in
/// magnitude that its rounding error exceeds `cfg.rel_tol`, the target is
/// relaxed to that rounding level.
pub fn integrate_log<F>(log_f: &F, a: f64, b: f64, initial_panels: usize, cfg: &QuadConfig) -> Result<LogReal>
where
    F: Fn(f64) -> f64,
{
    if !(b > a) {
        return Ok(LogReal::ZERO);
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let pa = a + width * i as f64;
            let pb = if i + 1 == n0 { b } else { a + width * (i + 1) as f64 };
            Panel::new(log_f, pa, pb, gl_panel(log_f, pa, pb))
        })
        .collect();

    loop {
        let values: Vec<f64> = panels.iter().map(Panel::value).collect();
        let total = log_sum_exp(&values);
        if total == f64::NEG_INFINITY {
            return Ok(LogReal::ZERO);
        }
        let errs: Vec<f64> = panels.iter().map(|p| p.log_err).collect();
        let err = log_sum_exp(&errs);
        // a log-integrand of size L is only known to about L·ε in absolute terms
        let floor = NOISE_FACTOR * f64::EPSILON * total.abs();
        if err <= cfg.rel_tol.max(floor).ln() + total {
            return Ok(LogReal::from_ln(total));
        }
        if panels.len() >= cfg.max_panels {
            return Err(Error::QuadratureFailure { achieved: (err - total).exp(), panels: panels.len() });
        }
        let (worst, _) = errs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc });
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            return Err(Error::QuadratureFailure { achieved: (err - total).exp(), panels: panels.len() + 1 });
        }
        panels.push(Panel::new(log_f, p.a, m, p.left));
        panels.push(Panel::new(log_f, m, p.b, p.right));
    }
}

/// The sub-interval of `[a, b]` where a unimodal log-integrand stays within
/// [`TAIL_CUTOFF`] of its maximum, together with the location and value of
/// that maximum.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub peak: f64,
    pub peak_value: f64,
}

/// Finds the significant window of a unimodal log-integrand on `[a, b]`
/// (either end may be infinite). `x0` and `scale` seed the peak search.
pub fn significant_window<F>(log_f: &F, a: f64, b: f64, x0: f64, scale: f64, cutoff: f64) -> Window
where
    F: Fn(f64) -> f64,
{
    let scale = if a.is_finite() && b.is_finite() { scale.min(0.25 * (b - a)).max(f64::MIN_POSITIVE) } else { scale };
    let (peak, peak_value) = unimodal_argmax(log_f, a, b, x0, scale);
    if peak_value == f64::NEG_INFINITY {
        return Window { lo: peak, hi: peak, peak, peak_value };
    }
    let threshold = peak_value - cutoff;
    let first = 1e-6 * (1.0 + peak.abs()).min(scale.max(1e-12));
    let hi = edge(log_f, peak, b, threshold, first);
    let lo = edge(log_f, peak, a, threshold, -first);
    Window { lo, hi, peak, peak_value }
}

// Walks away from the peak until the integrand drops below `threshold`
// (or the domain end is reached), then pins the crossing by bisection.
fn edge<F: Fn(f64) -> f64>(log_f: &F, peak: f64, end: f64, threshold: f64, first: f64) -> f64 {
    if peak == end {
        return end;
    }
    let mut inside = peak;
    let mut step = first;
    loop {
        let next = if step > 0.0 { (peak + step).min(end) } else { (peak + step).max(end) };
        if log_f(next) < threshold {
            let mut outside = next;
            for _ in 0..60 {
                let mid = 0.5 * (inside + outside);
                if mid == inside || mid == outside {
                    break;
                }
                if log_f(mid) < threshold {
                    outside = mid;
                } else {
                    inside = mid;
                }
            }
            return outside;
        }
        if next == end {
            return end;
        }
        inside = next;
        step *= 2.0;
    }
}
