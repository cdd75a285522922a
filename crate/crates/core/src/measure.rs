//! Radial measures on the disc (`R = 1`) or the plane (`R = ∞`) and their
//! moments `∫ r^m dμ(r)`, evaluated in the log domain.
//!
//! Integration runs on a transformed axis: `r = 1 - e^{-t}` on the disc,
//! which resolves the boundary layer of weights that vanish at `r = 1`, and
//! `r = e^u` on the plane, which turns log-normal shaped integrands into
//! Gaussians.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logreal::LogReal;
use crate::quadrature::{integrate_log, significant_window, QuadConfig, Window, TAIL_CUTOFF};
use crate::roots::{bisect_increasing, bracket_increasing};
use crate::weight::{RadialWeight, Radius};

/// Largest disc axis coordinate; `e^{-700}` is the last representable gap to 1.
pub const DISC_AXIS_MAX: f64 = 700.0;
pub const PLANE_AXIS_MAX: f64 = 1.0e9;

const INITIAL_PANELS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Disc,
    Plane,
}

impl Domain {
    /// The outer radius `R`.
    pub fn outer_radius(self) -> f64 {
        match self {
            Domain::Disc => 1.0,
            Domain::Plane => f64::INFINITY,
        }
    }

    pub fn axis_range(self) -> (f64, f64) {
        match self {
            Domain::Disc => (0.0, DISC_AXIS_MAX),
            Domain::Plane => (-PLANE_AXIS_MAX, PLANE_AXIS_MAX),
        }
    }

    pub fn radius_at(self, x: f64) -> Radius {
        match self {
            Domain::Disc => Radius::from_disc_axis(x),
            Domain::Plane => Radius::from_log(x),
        }
    }

    /// Axis coordinate of a radius; `0` and `R` map to the axis ends.
    pub fn to_axis(self, r: f64) -> f64 {
        let (lo, hi) = self.axis_range();
        match self {
            Domain::Disc => {
                if r >= 1.0 {
                    hi
                } else {
                    (-(-r).ln_1p()).min(hi)
                }
            }
            Domain::Plane => {
                if r <= 0.0 {
                    lo
                } else {
                    r.ln().clamp(lo, hi)
                }
            }
        }
    }

    /// Axis coordinate of the radius `e^{log_r}`, accurate for disc radii
    /// too close to 1 to be represented directly.
    pub fn axis_from_log_radius(self, log_r: f64) -> f64 {
        let (lo, hi) = self.axis_range();
        match self {
            Domain::Disc => (-(-log_r.exp_m1()).ln()).clamp(lo, hi),
            Domain::Plane => log_r.clamp(lo, hi),
        }
    }

    /// `ln(dr/dx)`.
    fn log_jacobian(self, x: f64) -> f64 {
        match self {
            Domain::Disc => -x,
            Domain::Plane => x,
        }
    }

    fn seed(self) -> f64 {
        match self {
            Domain::Disc => 1.0,
            Domain::Plane => 0.0,
        }
    }
}

/// Densities `w` of line measures `dμ = w(r) dr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "density", rename_all = "kebab-case")]
pub enum LineDensity {
    /// `w(r) = exp(-log² r)`.
    ExpLog2,
    /// `w(r) = v(r)^power`.
    WeightPower { weight: RadialWeight, power: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Density {
    /// `dμ = 2 r v(r) dr`, so that `μ([0,1)) = 1` when `v ≡ 1` on the disc.
    WeightedArea(RadialWeight),
    Line(LineDensity),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasure {
    domain: Domain,
    density: Density,
    quad: QuadConfig,
}

impl RadialMeasure {
    pub fn new(domain: Domain, density: Density, quad: QuadConfig) -> Result<RadialMeasure> {
        let weight = match &density {
            Density::WeightedArea(w) => Some(w),
            Density::Line(LineDensity::WeightPower { weight, power }) => {
                if !(*power > 0.0) {
                    return Err(Error::InvalidParameter(format!("density power must be positive, got {power}")));
                }
                Some(weight)
            }
            Density::Line(LineDensity::ExpLog2) => None,
        };
        if domain == Domain::Plane && weight.is_some_and(RadialWeight::disc_only) {
            return Err(Error::InvalidParameter("weight family is only defined on the disc".into()));
        }
        let m = RadialMeasure { domain, density, quad };
        m.check_admissible()?;
        Ok(m)
    }

    /// `dμ = 2 r v(r) dr`.
    pub fn weighted_area(weight: RadialWeight, domain: Domain) -> Result<RadialMeasure> {
        RadialMeasure::new(domain, Density::WeightedArea(weight), QuadConfig::default())
    }

    pub fn line(density: LineDensity, domain: Domain) -> Result<RadialMeasure> {
        RadialMeasure::new(domain, Density::Line(density), QuadConfig::default())
    }

    /// `dμ = exp(-log² r) dr` on `[0, ∞)`.
    pub fn plane_exp_log2() -> RadialMeasure {
        RadialMeasure::line(LineDensity::ExpLog2, Domain::Plane).expect("built-in measure is admissible")
    }

    /// `dμ = 2 r dr` on the disc (normalised area measure).
    pub fn disc_area() -> RadialMeasure {
        RadialMeasure::weighted_area(RadialWeight::unit(), Domain::Disc).expect("built-in measure is admissible")
    }

    pub fn with_quad(mut self, quad: QuadConfig) -> RadialMeasure {
        self.quad = quad;
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn quad(&self) -> &QuadConfig {
        &self.quad
    }

    /// The attached weight of a weighted-area measure.
    pub fn weight(&self) -> Option<&RadialWeight> {
        match &self.density {
            Density::WeightedArea(w) => Some(w),
            Density::Line(_) => None,
        }
    }

    pub fn outer_radius(&self) -> f64 {
        self.domain.outer_radius()
    }

    fn check_admissible(&self) -> Result<()> {
        for m in [0.0, 1.0, 10.0, 100.0] {
            let total = self.total_log_moment(m)?;
            if !total.ln().is_finite() {
                return Err(Error::InvalidParameter(format!("moment of order {m} is not finite and positive")));
            }
        }
        // r = 1 - e^{-30} on the disc, r = e^{30} on the plane
        let (_, hi) = self.domain.axis_range();
        if self.log_moment_axis(0.0, 30.0, hi)?.is_zero() {
            return Err(Error::InvalidParameter("measure has no mass near the outer radius".into()));
        }
        Ok(())
    }

    /// `ln(dμ/dx)` at axis coordinate `x`.
    pub fn log_density_axis(&self, x: f64) -> f64 {
        let pt = self.domain.radius_at(x);
        let base = match &self.density {
            Density::WeightedArea(w) => std::f64::consts::LN_2 + pt.log_r + w.log_eval_at(pt),
            Density::Line(LineDensity::ExpLog2) => -pt.log_r * pt.log_r,
            Density::Line(LineDensity::WeightPower { weight, power }) => power * weight.log_eval_at(pt),
        };
        base + self.domain.log_jacobian(x)
    }

    /// The log of `r^m dμ/dx` on the transformed axis.
    pub fn log_moment_integrand(&self, m: f64, x: f64) -> f64 {
        let d = self.log_density_axis(x);
        if m == 0.0 {
            return d;
        }
        let lr = self.domain.radius_at(x).log_r;
        let v = m * lr + d;
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    /// Significant window of the order-`m` moment integrand on `[xa, xb]`.
    pub fn moment_window(&self, m: f64, xa: f64, xb: f64, cutoff: f64) -> Window {
        let f = |x: f64| self.log_moment_integrand(m, x);
        significant_window(&f, xa, xb, self.domain.seed(), 1.0, cutoff)
    }

    /// `ln ∫ r^m dμ` over the axis interval `[xa, xb]`.
    pub fn log_moment_axis(&self, m: f64, xa: f64, xb: f64) -> Result<LogReal> {
        if !(xb > xa) {
            return Ok(LogReal::ZERO);
        }
        let f = |x: f64| self.log_moment_integrand(m, x);
        let w = significant_window(&f, xa, xb, self.domain.seed(), 1.0, TAIL_CUTOFF);
        if w.peak_value == f64::NEG_INFINITY {
            return Ok(LogReal::ZERO);
        }
        integrate_log(&f, w.lo, w.hi, INITIAL_PANELS, &self.quad)
    }

    /// `ln ∫_lower^upper r^m dμ(r)`.
    pub fn log_moment(&self, m: f64, lower: f64, upper: f64) -> Result<LogReal> {
        let r_out = self.outer_radius();
        if !(m >= 0.0) {
            return Err(Error::InvalidParameter(format!("moment order must be >= 0, got {m}")));
        }
        if !(0.0 <= lower && lower <= upper && upper <= r_out) {
            return Err(Error::InvalidParameter(format!("need 0 <= lower <= upper <= R, got [{lower}, {upper}]")));
        }
        self.log_moment_axis(m, self.domain.to_axis(lower), self.domain.to_axis(upper))
    }

    /// `ln ∫_0^R r^m dμ`.
    pub fn total_log_moment(&self, m: f64) -> Result<LogReal> {
        let (lo, hi) = self.domain.axis_range();
        self.log_moment_axis(m, lo, hi)
    }

    /// Residual of the first balancing equation at axis coordinate `x`:
    /// `ln ∫_0^s r^m dμ - ln(b ∫_s^R r^m dμ)`. Increasing in `x`.
    pub fn balancing_residual_axis(&self, m: f64, x: f64, b: f64) -> Result<f64> {
        let (lo, hi) = self.domain.axis_range();
        let inner = self.log_moment_axis(m, lo, x)?;
        let outer = self.log_moment_axis(m, x, hi)?;
        Ok(residual(inner.ln(), b.ln() + outer.ln()))
    }

    /// `ln ∫_0^s r^m dμ - ln(b ∫_s^R r^m dμ)`.
    pub fn balancing_residual(&self, m: f64, s: f64, b: f64) -> Result<f64> {
        if !(s > 0.0 && s < self.outer_radius()) {
            return Err(Error::InvalidParameter(format!("radius {s} outside (0, R)")));
        }
        if !(b > 0.0) || !(m >= 0.0) {
            return Err(Error::InvalidParameter("need b > 0 and m >= 0".into()));
        }
        self.balancing_residual_axis(m, self.domain.to_axis(s), b)
    }

    /// Axis coordinate of the unique root of the balancing residual in `x`.
    pub fn solve_balancing_radius(&self, m: f64, b: f64) -> Result<f64> {
        let (lo, hi) = self.domain.axis_range();
        let err = RefCell::new(None);
        let f = |x: f64| match self.balancing_residual_axis(m, x, b) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let bracket = bracket_increasing(f, self.domain.seed(), lo, hi, "balancing radius");
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
}

fn residual(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    a - b
}
