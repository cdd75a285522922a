//! Circle means, Bergman norms and the block functionals built on a
//! lacunary decomposition.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lacunary::LacunaryDecomposition;
use crate::logreal::{log_sum_exp, LogReal};
use crate::measure::RadialMeasure;
use crate::poly::CoeffSeq;
use crate::quadrature::{integrate_log, QuadConfig, TAIL_CUTOFF};

/// Relative change between node doublings at which a trapezoid mean is accepted.
pub const CIRCLE_MEAN_TOL: f64 = 1e-8;
/// Relative tolerance of the radial quadrature in [`bergman_norm`].
pub const NORM_REL_TOL: f64 = 1e-7;
const MAX_NODES: usize = 1 << 20;
const NORM_INITIAL_PANELS: usize = 8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn inverse_fft(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Exponent for circle means and Bergman norms; only `p = 1, 2` are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    One,
    Two,
}

impl TryFrom<f64> for Exponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Exponent> {
        if p == 1.0 {
            Ok(Exponent::One)
        } else if p == 2.0 {
            Ok(Exponent::Two)
        } else {
            Err(Error::InvalidParameter(format!("only p = 1 and p = 2 are supported, got {p}")))
        }
    }
}

// Coefficients a_k r^k divided by their largest modulus, and the log of that modulus.
fn scaled_coeffs(g: &CoeffSeq, log_r: f64) -> Option<(Vec<Complex64>, f64)> {
    let logs: Vec<f64> = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let m = a.norm();
            if m == 0.0 {
                f64::NEG_INFINITY
            } else if k == 0 {
                m.ln()
            } else {
                m.ln() + k as f64 * log_r
            }
        })
        .collect();
    let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return None;
    }
    let scaled = g
        .coeffs()
        .iter()
        .zip(&logs)
        .map(|(a, &l)| if l == f64::NEG_INFINITY { Complex64::new(0.0, 0.0) } else { a / a.norm() * (l - shift).exp() })
        .collect();
    Some((scaled, shift))
}

fn trapezoid_abs_mean(coeffs: &[Complex64], nodes: usize) -> f64 {
    let mut buf = vec![Complex64::new(0.0, 0.0); nodes];
    buf[..coeffs.len()].copy_from_slice(coeffs);
    inverse_fft(nodes).process(&mut buf);
    buf.iter().map(|z| z.norm()).sum::<f64>() / nodes as f64
}

/// `ln M_p(g, e^{log_r})`.
///
/// `p = 2` is exact via Parseval. `p = 1` uses the periodic trapezoid rule
/// on `max(256, 8(D+1))` nodes, doubled until the relative change drops
/// below [`CIRCLE_MEAN_TOL`].
pub fn log_circle_mean(g: &CoeffSeq, log_r: f64, p: Exponent) -> Result<LogReal> {
    let Some((b, shift)) = scaled_coeffs(g, log_r) else {
        return Ok(LogReal::ZERO);
    };
    let mean = match p {
        Exponent::Two => b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        Exponent::One => {
            let nonzero = b.iter().filter(|z| z.norm_sqr() > 0.0).count();
            if nonzero == 1 {
                1.0
            } else {
                let mut nodes = 256.max(8 * b.len());
                let mut prev = trapezoid_abs_mean(&b, nodes);
                loop {
                    nodes *= 2;
                    if nodes > MAX_NODES {
                        return Err(Error::QuadratureFailure { achieved: f64::NAN, panels: nodes / 2 });
                    }
                    let next = trapezoid_abs_mean(&b, nodes);
                    if (next - prev).abs() <= CIRCLE_MEAN_TOL * next {
                        break next;
                    }
                    prev = next;
                }
            }
        }
    };
    Ok(LogReal::from_ln(mean.ln() + shift))
}

/// `M_p(g, r) = ((1/2π) ∫ |g(r e^{iφ})|^p dφ)^{1/p}`.
pub fn circle_mean(g: &CoeffSeq, r: f64, p: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {r}")));
    }
    Ok(log_circle_mean(g, r.ln(), Exponent::try_from(p)?)?.value())
}

/// `‖f‖_p = (∫_0^R M_p(f, r)^p dμ(r))^{1/p}` for `p ∈ {1, 2}`.
///
/// `p = 2` sums `|a_k|² ∫ r^{2k} dμ`; `p = 1` integrates trapezoid circle
/// means over the union of the significant windows of the extreme monomials,
/// doubling the angular grid until the integral changes by at most
/// [`NORM_REL_TOL`].
pub fn bergman_norm(f: &CoeffSeq, measure: &RadialMeasure, p: f64) -> Result<LogReal> {
    let p = Exponent::try_from(p)?;
    let (Some(kmin), Some(kmax)) = (f.lowest_degree(), f.exact_degree()) else {
        return Ok(LogReal::ZERO);
    };
    match p {
        Exponent::Two => {
            let mut terms = Vec::with_capacity(kmax - kmin + 1);
            for (k, a) in f.coeffs().iter().enumerate().skip(kmin) {
                if a.norm_sqr() > 0.0 {
                    terms.push(LogReal::from_value(a.norm_sqr()) * measure.total_log_moment(2.0 * k as f64)?);
                }
            }
            Ok(terms.into_iter().sum::<LogReal>().sqrt())
        }
        Exponent::One => bergman_norm_one(f, measure, kmin, kmax),
    }
}

// Trapezoid mean of |g| on `nodes` equispaced points of the circle of radius e^{log_r}.
fn log_trapezoid_mean(g: &CoeffSeq, log_r: f64, nodes: usize) -> f64 {
    let Some((b, shift)) = scaled_coeffs(g, log_r) else {
        return f64::NEG_INFINITY;
    };
    if b.iter().filter(|z| z.norm_sqr() > 0.0).count() == 1 {
        return shift;
    }
    trapezoid_abs_mean(&b, nodes).ln() + shift
}

// The angular grid is shared by all radii and doubled for the whole radial
// integral: a zero of f near a circle spoils the trapezoid rule only on a
// thin band of radii, so the area integral converges long before every
// circle mean does.
fn bergman_norm_one(f: &CoeffSeq, measure: &RadialMeasure, kmin: usize, kmax: usize) -> Result<LogReal> {
    let domain = measure.domain();
    let (lo, hi) = domain.axis_range();
    let cutoff = TAIL_CUTOFF + ((kmax + 1) as f64).ln();
    let w_lo = measure.moment_window(kmin as f64, lo, hi, cutoff);
    let w_hi = measure.moment_window(kmax as f64, lo, hi, cutoff);
    let (a, b) = (w_lo.lo.min(w_hi.lo), w_lo.hi.max(w_hi.hi));

    let cfg = QuadConfig { rel_tol: 0.1 * NORM_REL_TOL, max_panels: measure.quad().max_panels };
    let radial = |nodes: usize| {
        let integrand = |x: f64| log_trapezoid_mean(f, domain.radius_at(x).log_r, nodes) + measure.log_density_axis(x);
        integrate_log(&integrand, a, b, NORM_INITIAL_PANELS, &cfg)
    };
    let mut nodes = (4 * f.len()).max(64).next_power_of_two();
    let mut prev = radial(nodes)?;
    loop {
        nodes *= 2;
        if nodes > MAX_NODES {
            return Err(Error::QuadratureFailure { achieved: f64::NAN, panels: nodes / 2 });
        }
        let next = radial(nodes)?;
        if next.rel_diff(prev) <= NORM_REL_TOL {
            return Ok(next);
        }
        prev = next;
    }
}

/// `T_n g = Σ t_{n,k} ĝ(k) z^k` over the support of the tent of block `n`.
pub fn block_operator(g: &CoeffSeq, decomp: &LacunaryDecomposition, n: usize) -> Result<CoeffSeq> {
    let tent = decomp.tent(n)?;
    let coeffs = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &a)| a * tent.get(k))
        .collect();
    Ok(CoeffSeq::new(coeffs))
}

fn check_degree(g: &CoeffSeq, max: usize) -> Result<()> {
    match g.exact_degree() {
        Some(d) if d > max => Err(Error::InsufficientBlocks { degree: d, max }),
        _ => Ok(()),
    }
}

/// `Σ_n d_n M_1(T_n g, s_n)`.
///
/// Requires `deg g <= ⌊m_{N-1}⌋`, the range on which the tents form a
/// partition of unity.
pub fn equivalent_norm(g: &CoeffSeq, decomp: &LacunaryDecomposition) -> Result<LogReal> {
    check_degree(g, decomp.tent_coverage())?;
    let (Some(kmin), Some(kmax)) = (g.lowest_degree(), g.exact_degree()) else {
        return Ok(LogReal::ZERO);
    };
    let mut total = LogReal::ZERO;
    for n in 0..decomp.blocks() {
        let tent = decomp.tent(n)?;
        if tent.end() < kmin || tent.start > kmax {
            continue;
        }
        let tg = block_operator(g, decomp, n)?;
        let m1 = log_circle_mean(&tg, decomp.log_s()[n], Exponent::One)?;
        total = total + decomp.log_d()[n] * m1;
    }
    Ok(total)
}

/// `Σ_n d_n (Σ_{k in block n} |ĝ(k)|² s_n^{2k})^{1/2}`, with `k = 0`
/// counted in block 0. Requires `deg g <= ⌊m_N⌋`.
pub fn solid_core_norm(g: &CoeffSeq, decomp: &LacunaryDecomposition) -> Result<LogReal> {
    check_degree(g, decomp.block_coverage())?;
    let coeffs = g.coeffs();
    let mut total = LogReal::ZERO;
    for n in 0..decomp.blocks() {
        let (lo, hi) = decomp.block_range(n);
        if lo >= coeffs.len() {
            break;
        }
        let log_s = decomp.log_s()[n];
        let terms: Vec<f64> = (lo..=hi.min(coeffs.len() - 1))
            .filter(|&k| coeffs[k].norm_sqr() > 0.0)
            .map(|k| coeffs[k].norm_sqr().ln() + if k == 0 { 0.0 } else { 2.0 * k as f64 * log_s })
            .collect();
        if terms.is_empty() {
            continue;
        }
        total = total + decomp.log_d()[n] * LogReal::from_ln(0.5 * log_sum_exp(&terms));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lacunary::{LacunaryDecomposition, Method};
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn monomial_means() {
        for k in [0usize, 1, 7, 40] {
            let g = CoeffSeq::monomial(k, c(1.0));
            for r in [0.3f64, 0.9, 1.0, 2.5] {
                let expect = r.powi(k as i32);
                assert!((circle_mean(&g, r, 1.0).unwrap() - expect).abs() < 1e-12 * expect.max(1.0));
                assert!((circle_mean(&g, r, 2.0).unwrap() - expect).abs() < 1e-12 * expect.max(1.0));
            }
        }
    }

    #[test]
    fn one_plus_z_on_unit_circle() {
        let g = CoeffSeq::from_real(&[1.0, 1.0]);
        let m1 = circle_mean(&g, 1.0, 1.0).unwrap();
        assert!((m1 - 4.0 / PI).abs() < 1e-7, "{m1}");
        assert!((m1 - 1.27324).abs() < 1e-5);
        assert!((circle_mean(&g, 1.0, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(circle_mean(&g, 1.0, 3.0).is_err());
    }

    #[test]
    fn huge_radius_does_not_overflow() {
        let g = CoeffSeq::from_real(&[1.0, 0.0, 3.0]);
        let m = log_circle_mean(&g, 600.0, Exponent::One).unwrap();
        assert!((m.ln() - (1200.0 + 3f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn area_measure_monomial_norms() {
        let mu = RadialMeasure::disc_area();
        for k in [0usize, 1, 3, 10] {
            let v = bergman_norm(&CoeffSeq::monomial(k, c(1.0)), &mu, 1.0).unwrap().value();
            assert!((v - 2.0 / (k as f64 + 2.0)).abs() < 1e-7 * v, "k = {k}: {v}");
        }
        let v = bergman_norm(&CoeffSeq::monomial(3, c(1.0)), &mu, 1.0).unwrap().value();
        assert!((v - 0.4).abs() < 1e-7);
        assert!(bergman_norm(&CoeffSeq::zero(), &mu, 1.0).unwrap().is_zero());
    }

    #[test]
    fn one_plus_z_against_riemann_oracle() {
        // 2D midpoint rule in (r, φ) on dμ = 2r dr
        let (nr, nphi) = (2000, 512);
        let mut sum = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            let mut inner = 0.0;
            for j in 0..nphi {
                let phi = 2.0 * PI * (j as f64 + 0.5) / nphi as f64;
                inner += (Complex64::new(1.0, 0.0) + Complex64::from_polar(r, phi)).norm();
            }
            sum += inner / nphi as f64 * 2.0 * r / nr as f64;
        }
        let v = bergman_norm(&CoeffSeq::from_real(&[1.0, 1.0]), &RadialMeasure::disc_area(), 1.0).unwrap().value();
        assert!(((v - sum) / sum).abs() < 1e-5, "{v} vs {sum}");
    }

    fn synthetic() -> LacunaryDecomposition {
        LacunaryDecomposition::from_parts(
            6.0,
            vec![0.0, 4.0, 8.0, 16.0],
            vec![0.5f64.ln(), 0.7f64.ln(), 0.9f64.ln()],
            vec![LogReal::from_value(2.0), LogReal::from_value(3.0), LogReal::from_value(5.0)],
            Method::Balanced,
        )
        .unwrap()
    }

    #[test]
    fn block_operator_tent() {
        let d = synthetic();
        let g = CoeffSeq::from_real(&[0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let t1 = block_operator(&g, &d, 1).unwrap();
        for k in 1..=8usize {
            let expect = if k <= 4 { k as f64 / 4.0 } else { (8 - k) as f64 / 4.0 };
            assert_eq!(t1.coeff(k).re, expect, "k = {k}");
        }
        let peak = block_operator(&CoeffSeq::monomial(4, c(1.0)), &d, 1).unwrap();
        assert_eq!(peak, CoeffSeq::monomial(4, c(1.0)));
        // support beyond ⌊m_2⌋ = 8
        assert!(block_operator(&CoeffSeq::monomial(12, c(1.0)), &d, 1).unwrap().is_zero());
    }

    #[test]
    fn equivalent_norm_direct_tent_evaluation() {
        let d = synthetic();
        assert!(equivalent_norm(&CoeffSeq::zero(), &d).unwrap().is_zero());
        // z^4 sits at the peak of block 1 and the foot of blocks 0 and 2
        let v = equivalent_norm(&CoeffSeq::monomial(4, c(1.0)), &d).unwrap().value();
        assert!((v - 3.0 * 0.7f64.powi(4)).abs() < 1e-14);
        // z^6: t_{1,6} = 1/2, t_{2,6} = 1/2
        let v = equivalent_norm(&CoeffSeq::monomial(6, c(1.0)), &d).unwrap().value();
        let expect = 3.0 * 0.5 * 0.7f64.powi(6) + 5.0 * 0.5 * 0.9f64.powi(6);
        assert!((v - expect).abs() < 1e-14);
        assert!(matches!(equivalent_norm(&CoeffSeq::monomial(9, c(1.0)), &d), Err(Error::InsufficientBlocks { .. })));
    }

    #[test]
    fn solid_core_single_terms() {
        let d = synthetic();
        assert!(solid_core_norm(&CoeffSeq::zero(), &d).unwrap().is_zero());
        let v = solid_core_norm(&CoeffSeq::monomial(6, c(1.0)), &d).unwrap().value();
        assert!((v - 3.0 * 0.7f64.powi(6)).abs() < 1e-14);
        let v = solid_core_norm(&CoeffSeq::monomial(0, c(2.0)), &d).unwrap().value();
        assert!((v - 4.0).abs() < 1e-14);
        assert!(solid_core_norm(&CoeffSeq::monomial(16, c(1.0)), &d).is_ok());
        assert!(solid_core_norm(&CoeffSeq::monomial(17, c(1.0)), &d).is_err());
    }
}
