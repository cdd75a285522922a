//! JSON configuration for weights, measures, polynomials and decompositions.
//!
//! Weights and measures share one flat object:
//!
//! ```json
//! {"family": "exponential", "alpha": 1.0, "beta": 1.0, "ell": 1.0, "domain": "disc"}
//! {"density": "exp-log2", "domain": "plane"}
//! {"density": "weight-power", "power": 2.0, "family": "power", "gamma": 1.5}
//! ```
//!
//! A `family` without `density` means the weighted-area measure
//! `2 r v(r) dr`. Every error names the offending field.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lacunary::LacunaryDecomposition;
use crate::measure::{Density, Domain, LineDensity, RadialMeasure};
use crate::poly::CoeffSeq;
use crate::quadrature::QuadConfig;
use crate::weight::{RadialWeight, WeightFamily};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub domain: Option<Domain>,
    pub family: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub ell: Option<f64>,
    pub gamma: Option<f64>,
    pub r: Option<Vec<f64>>,
    pub log_v: Option<Vec<f64>>,
    pub density: Option<String>,
    pub power: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_panels: Option<usize>,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("field `{field}`: {msg}"))
}

fn json_err(what: &str, e: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = e.path().to_string();
    if path == "." {
        Error::Config(format!("{what}: {}", e.inner()))
    } else {
        Error::Config(format!("{what}: field `{path}`: {}", e.inner()))
    }
}

fn from_json<T: serde::de::DeserializeOwned>(what: &str, json: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(json);
    let v = serde_path_to_error::deserialize(&mut de).map_err(|e| json_err(what, e))?;
    de.end().map_err(|e| Error::Config(format!("{what}: {e}")))?;
    Ok(v)
}

impl SpecFile {
    pub fn parse(json: &str) -> Result<SpecFile> {
        from_json("weight/measure config", json)
    }

    fn weight_fields(&self) -> [(&'static str, bool); 6] {
        [
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("ell", self.ell.is_some()),
            ("gamma", self.gamma.is_some()),
            ("r", self.r.is_some()),
            ("log_v", self.log_v.is_some()),
        ]
    }

    fn reject_others(&self, allowed: &[&str], context: &str) -> Result<()> {
        match self.weight_fields().iter().find(|(name, set)| *set && !allowed.contains(name)) {
            Some((name, _)) => Err(field_err(name, format!("not used by {context}"))),
            None => Ok(()),
        }
    }

    /// The weight described by `family` and its parameters.
    pub fn weight(&self) -> Result<RadialWeight> {
        let family = self.family.as_deref().ok_or_else(|| field_err("family", "missing"))?;
        let need = |name: &str, v: Option<f64>| v.ok_or_else(|| field_err(name, format!("required by family `{family}`")));
        let fam = match family {
            "exponential" => {
                self.reject_others(&["alpha", "beta", "ell"], "family `exponential`")?;
                WeightFamily::Exponential {
                    alpha: need("alpha", self.alpha)?,
                    beta: need("beta", self.beta)?,
                    ell: need("ell", self.ell)?,
                }
            }
            "power" => {
                self.reject_others(&["gamma"], "family `power`")?;
                WeightFamily::Power { gamma: need("gamma", self.gamma)? }
            }
            "unit" => {
                self.reject_others(&[], "family `unit`")?;
                WeightFamily::Unit
            }
            "tabulated" => {
                self.reject_others(&["r", "log_v"], "family `tabulated`")?;
                WeightFamily::Tabulated {
                    r: self.r.clone().ok_or_else(|| field_err("r", "required by family `tabulated`"))?,
                    log_v: self.log_v.clone().ok_or_else(|| field_err("log_v", "required by family `tabulated`"))?,
                }
            }
            other => return Err(field_err("family", format!("unknown family `{other}`"))),
        };
        RadialWeight::new(fam).map_err(|e| field_err("family", e))
    }

    fn quad(&self) -> Result<QuadConfig> {
        let mut q = QuadConfig::default();
        if let Some(t) = self.rel_tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(field_err("rel_tol", "must lie in (0, 1)"));
            }
            q.rel_tol = t;
        }
        if let Some(p) = self.max_panels {
            if p < 1 {
                return Err(field_err("max_panels", "must be positive"));
            }
            q.max_panels = p;
        }
        Ok(q)
    }

    /// The radial measure; `domain` defaults to the disc.
    pub fn measure(&self) -> Result<RadialMeasure> {
        let domain = self.domain.unwrap_or(Domain::Disc);
        let density = match self.density.as_deref() {
            None | Some("weighted-area") => {
                if self.power.is_some() {
                    return Err(field_err("power", "only used with density `weight-power`"));
                }
                Density::WeightedArea(self.weight()?)
            }
            Some("exp-log2") => {
                if let Some(f) = &self.family {
                    return Err(field_err("family", format!("`{f}` given but density `exp-log2` takes no weight")));
                }
                self.reject_others(&[], "density `exp-log2`")?;
                if self.power.is_some() {
                    return Err(field_err("power", "only used with density `weight-power`"));
                }
                Density::Line(LineDensity::ExpLog2)
            }
            Some("weight-power") => {
                let power = self.power.ok_or_else(|| field_err("power", "required by density `weight-power`"))?;
                Density::Line(LineDensity::WeightPower { weight: self.weight()?, power })
            }
            Some(other) => return Err(field_err("density", format!("unknown density `{other}`"))),
        };
        RadialMeasure::new(domain, density, self.quad()?).map_err(|e| field_err("domain", e))
    }
}

pub fn parse_weight(json: &str) -> Result<RadialWeight> {
    let spec = SpecFile::parse(json)?;
    if spec.density.is_some() {
        return Err(field_err("density", "a weight config takes no density"));
    }
    if spec.domain == Some(Domain::Plane) {
        return Err(field_err("domain", "weights are used on the disc"));
    }
    spec.weight()
}

pub fn parse_measure(json: &str) -> Result<RadialMeasure> {
    SpecFile::parse(json)?.measure()
}

/// A polynomial as a JSON array of `[re, im]` pairs.
pub fn parse_poly(json: &str) -> Result<CoeffSeq> {
    let p: CoeffSeq = from_json("polynomial (array of [re, im])", json)?;
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Config("polynomial: coefficients must be finite".into()));
    }
    Ok(p)
}

pub fn parse_decomposition(json: &str) -> Result<LacunaryDecomposition> {
    from_json("decomposition", json)
}
