//! Radial weights `v(r) = exp(-φ(r))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a radius lives. `comp` is `1 - r`, kept separately so that weights
/// which blow up at the unit circle stay accurate for `r` within a few ulps
/// of 1; it is NaN for plane radii beyond 1.
#[derive(Clone, Copy, Debug)]
pub struct Radius {
    pub r: f64,
    pub log_r: f64,
    pub comp: f64,
}

impl Radius {
    pub fn new(r: f64) -> Radius {
        Radius { r, log_r: r.ln(), comp: 1.0 - r }
    }

    /// Disc radius `1 - e^{-t}`.
    pub fn from_disc_axis(t: f64) -> Radius {
        let comp = (-t).exp();
        Radius { r: -(-t).exp_m1(), log_r: (-comp).ln_1p(), comp }
    }

    /// Radius `e^u`.
    pub fn from_log(u: f64) -> Radius {
        let r = u.exp();
        Radius { r, log_r: u, comp: if u <= 0.0 { -u.exp_m1() } else { f64::NAN } }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum WeightFamily {
    /// `v(r) = exp(-α (1 - r^ℓ)^{-β})` on the disc.
    Exponential { alpha: f64, beta: f64, ell: f64 },
    /// `v(r) = (1 - r)^γ` on the disc.
    Power { gamma: f64 },
    /// `v ≡ 1`.
    Unit,
    /// Piecewise-linear `log v` through the given nodes; constant slope
    /// beyond the last node.
    Tabulated { r: Vec<f64>, log_v: Vec<f64> },
}

/// A positive, non-increasing radial weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightFamily", into = "WeightFamily")]
pub struct RadialWeight {
    family: WeightFamily,
}

const ADMISSION_GRID: usize = 256;

impl RadialWeight {
    pub fn new(family: WeightFamily) -> Result<RadialWeight> {
        match &family {
            WeightFamily::Exponential { alpha, beta, ell } => {
                for (name, v) in [("alpha", alpha), ("beta", beta), ("ell", ell)] {
                    if !(*v > 0.0 && v.is_finite()) {
                        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
                    }
                }
            }
            WeightFamily::Power { gamma } => {
                if !(*gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
                }
            }
            WeightFamily::Unit => {}
            WeightFamily::Tabulated { r, log_v } => {
                if r.len() < 2 || r.len() != log_v.len() {
                    return Err(Error::InvalidParameter("tabulated weight needs >= 2 matching nodes".into()));
                }
                if r[0] != 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidParameter("tabulated radii must start at 0 and increase".into()));
                }
                if log_v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("tabulated log_v must be finite".into()));
                }
            }
        }
        let w = RadialWeight { family };
        w.check_monotone()?;
        Ok(w)
    }

    pub fn unit() -> RadialWeight {
        RadialWeight { family: WeightFamily::Unit }
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// True for the families that are only defined on the unit disc.
    pub fn disc_only(&self) -> bool {
        matches!(self.family, WeightFamily::Exponential { .. } | WeightFamily::Power { .. })
    }

    fn check_monotone(&self) -> Result<()> {
        let upper = match &self.family {
            WeightFamily::Tabulated { r, .. } => *r.last().unwrap(),
            _ => 1.0,
        };
        let mut prev = f64::INFINITY;
        for j in 0..ADMISSION_GRID {
            let r = upper * j as f64 / ADMISSION_GRID as f64;
            let lv = self.log_eval(r);
            if lv.is_nan() || lv > prev + 1e-12 * prev.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!("weight is not non-increasing near r = {r}")));
            }
            prev = lv;
        }
        Ok(())
    }

    pub fn log_eval_at(&self, x: Radius) -> f64 {
        -self.phi_at(x)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.log_eval(r).exp()
    }

    pub fn log_eval(&self, r: f64) -> f64 {
        self.log_eval_at(Radius::new(r))
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.phi_at(Radius::new(r))
    }

    pub fn phi_at(&self, x: Radius) -> f64 {
        match &self.family {
            WeightFamily::Exponential { alpha, beta, ell } => {
                let one_minus = one_minus_pow(x, *ell);
                if one_minus <= 0.0 {
                    return f64::INFINITY;
                }
                alpha * (-beta * one_minus.ln()).exp()
            }
            WeightFamily::Power { gamma } => {
                if x.comp <= 0.0 {
                    return f64::INFINITY;
                }
                -gamma * x.comp.ln()
            }
            WeightFamily::Unit => 0.0,
            WeightFamily::Tabulated { r, log_v } => -interp(r, log_v, x.r).0,
        }
    }

    /// `φ'(r)`, when the family has an analytic derivative.
    pub fn phi_prime_at(&self, x: Radius) -> Option<f64> {
        match &self.family {
            WeightFamily::Exponential { alpha, beta, ell } => {
                let q = one_minus_pow(x, *ell);
                Some(alpha * beta * ell * ((ell - 1.0) * x.log_r - (beta + 1.0) * q.ln()).exp())
            }
            WeightFamily::Power { gamma } => Some(gamma / x.comp),
            WeightFamily::Unit => Some(0.0),
            WeightFamily::Tabulated { r, log_v } => Some(-interp(r, log_v, x.r).1),
        }
    }

    pub fn phi_prime(&self, r: f64) -> Option<f64> {
        self.phi_prime_at(Radius::new(r))
    }

    /// `φ''(r)`; not available for tabulated weights.
    pub fn phi_second(&self, r: f64) -> Option<f64> {
        let x = Radius::new(r);
        match &self.family {
            WeightFamily::Exponential { alpha, beta, ell } => {
                let q = one_minus_pow(x, *ell);
                let c = alpha * beta * ell;
                let t1 = (ell - 1.0) * ((ell - 2.0) * x.log_r - (beta + 1.0) * q.ln()).exp();
                let t2 = (beta + 1.0) * ell * ((2.0 * ell - 2.0) * x.log_r - (beta + 2.0) * q.ln()).exp();
                Some(c * (t1 + t2))
            }
            WeightFamily::Power { gamma } => Some(gamma / (x.comp * x.comp)),
            WeightFamily::Unit => Some(0.0),
            WeightFamily::Tabulated { .. } => None,
        }
    }

    /// `r φ'(r)`, the stationarity map of `r^m v(r)`.
    pub fn r_phi_prime_at(&self, x: Radius) -> Option<f64> {
        match &self.family {
            WeightFamily::Exponential { alpha, beta, ell } => {
                let q = one_minus_pow(x, *ell);
                if q <= 0.0 {
                    return Some(f64::INFINITY);
                }
                Some(alpha * beta * ell * (ell * x.log_r - (beta + 1.0) * q.ln()).exp())
            }
            _ => self.phi_prime_at(x).map(|d| d * x.r),
        }
    }

    /// Whether `v(r) → 0` as `r → 1`, judged at `1 - r = e^{-36}`.
    pub fn vanishes_at_boundary(&self) -> bool {
        self.log_eval_at(Radius::from_disc_axis(36.0)) < -30.0
    }
}

/// `1 - r^ℓ`, accurate for `r` close to 1.
fn one_minus_pow(x: Radius, ell: f64) -> f64 {
    -(ell * x.log_r).exp_m1()
}

fn interp(r: &[f64], y: &[f64], at: f64) -> (f64, f64) {
    let n = r.len();
    let i = match r.partition_point(|&ri| ri <= at) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let slope = (y[i + 1] - y[i]) / (r[i + 1] - r[i]);
    (y[i] + slope * (at - r[i]), slope)
}

impl TryFrom<WeightFamily> for RadialWeight {
    type Error = Error;

    fn try_from(family: WeightFamily) -> Result<RadialWeight> {
        RadialWeight::new(family)
    }
}

impl From<RadialWeight> for WeightFamily {
    fn from(w: RadialWeight) -> WeightFamily {
        w.family
    }
}

/// Builds one of the built-in weights from a family name and parameter list.
///
/// `exponential` takes `[α, β, ℓ]`, `power` takes `[γ]`, `unit` takes none.
pub fn make_builtin_weight(family: &str, params: &[f64]) -> Result<RadialWeight> {
    let need = |n: usize| -> Result<()> {
        if params.len() != n {
            return Err(Error::InvalidParameter(format!("family `{family}` takes {n} parameters, got {}", params.len())));
        }
        Ok(())
    };
    let fam = match family {
        "exponential" => {
            need(3)?;
            WeightFamily::Exponential { alpha: params[0], beta: params[1], ell: params[2] }
        }
        "power" => {
            need(1)?;
            WeightFamily::Power { gamma: params[0] }
        }
        "unit" => {
            need(0)?;
            WeightFamily::Unit
        }
        other => return Err(Error::UnsupportedFamily(other.to_string())),
    };
    RadialWeight::new(fam)
}
