//! Finite Taylor coefficient sequences.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients `a_0, …, a_D` of a polynomial `Σ a_k z^k`. Trailing zeros
/// are allowed, so `degree()` is the storage degree, not the exact one.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoeffSeq {
    coeffs: Vec<Complex64>,
}

impl CoeffSeq {
    pub fn new(coeffs: Vec<Complex64>) -> CoeffSeq {
        CoeffSeq { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> CoeffSeq {
        CoeffSeq { coeffs: coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect() }
    }

    /// `c · z^k`.
    pub fn monomial(k: usize, c: Complex64) -> CoeffSeq {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        CoeffSeq { coeffs }
    }

    pub fn zero() -> CoeffSeq {
        CoeffSeq { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Storage degree `len - 1` (0 for the empty sequence).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Largest `k` with a non-zero coefficient.
    pub fn exact_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm_sqr() > 0.0)
    }

    /// Smallest `k` with a non-zero coefficient.
    pub fn lowest_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm_sqr() > 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.exact_degree().is_none()
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn scale(&self, lambda: Complex64) -> CoeffSeq {
        CoeffSeq { coeffs: self.coeffs.iter().map(|c| c * lambda).collect() }
    }

    pub fn add(&self, other: &CoeffSeq) -> CoeffSeq {
        let n = self.len().max(other.len());
        CoeffSeq { coeffs: (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect() }
    }

    /// Keeps only the coefficients with `lo <= k <= hi`.
    pub fn restrict(&self, lo: usize, hi: usize) -> CoeffSeq {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if (lo..=hi).contains(&k) { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        CoeffSeq { coeffs }
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

/// Dirichlet projection `P_n g = Σ_{k ≤ n} ĝ(k) z^k`.
pub fn dirichlet_project(g: &CoeffSeq, n: usize) -> CoeffSeq {
    CoeffSeq { coeffs: g.coeffs.iter().take(n + 1).copied().collect() }
}

/// Coefficient multiplier `M_θ f = Σ θ_k f̂(k) z^k`; coefficients beyond the
/// end of `theta` are dropped.
pub fn coefficient_multiplier(f: &CoeffSeq, theta: &[Complex64]) -> Result<CoeffSeq> {
    for (index, t) in theta.iter().enumerate() {
        let modulus = t.norm();
        if !(modulus <= 1.0) {
            return Err(Error::InvalidMultiplier { index, modulus });
        }
    }
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| c * theta.get(k).copied().unwrap_or_default())
        .collect();
    Ok(CoeffSeq { coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dirichlet_projection_cases() {
        let g = CoeffSeq::from_real(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(dirichlet_project(&g, 2), CoeffSeq::from_real(&[1.0, 1.0, 1.0]));
        assert_eq!(dirichlet_project(&g, 3), g);
        assert_eq!(dirichlet_project(&g, 10), g);
        assert!(dirichlet_project(&CoeffSeq::monomial(5, c(1.0)), 0).is_zero());
        let p = dirichlet_project(&g, 1);
        assert_eq!(dirichlet_project(&p, 1), p);
    }

    #[test]
    fn multiplier_cases() {
        let f = CoeffSeq::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(coefficient_multiplier(&f, &[c(1.0); 3]).unwrap(), f);
        assert!(coefficient_multiplier(&f, &[c(0.0); 3]).unwrap().is_zero());
        let alt = coefficient_multiplier(&f, &[c(1.0), c(-1.0), c(1.0)]).unwrap();
        assert_eq!(alt, CoeffSeq::from_real(&[1.0, -1.0, 1.0]));
        assert!(matches!(
            coefficient_multiplier(&f, &[c(1.0), Complex64::new(0.9, 0.9)]),
            Err(Error::InvalidMultiplier { index: 1, .. })
        ));
    }

    #[test]
    fn horner() {
        let f = CoeffSeq::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(f.eval(c(2.0)), c(17.0));
        assert_eq!(f.exact_degree(), Some(2));
        assert_eq!(CoeffSeq::from_real(&[0.0, 1.0, 0.0]).exact_degree(), Some(1));
    }
}
