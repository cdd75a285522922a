//! Non-negative reals stored by their natural logarithm.
//!
//! Moments such as `∫ r^m dμ` underflow or overflow `f64` long before `m`
//! reaches the sizes the block decompositions need, so every quantity of
//! that kind is carried as a [`LogReal`]. Zero is represented by a log
//! magnitude of `-inf`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    /// Wraps a log magnitude. NaN is rejected; `-inf` means zero.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogReal from NaN");
        LogReal(ln)
    }

    /// Converts a non-negative value.
    pub fn from_value(x: f64) -> Self {
        assert!(x >= 0.0, "LogReal requires a non-negative value, got {x}");
        LogReal(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The plain value; overflows to `inf` past `e^709`.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn powf(self, p: f64) -> Self {
        if self.is_zero() {
            if p > 0.0 {
                return Self::ZERO;
            }
            return Self::ONE;
        }
        LogReal(self.0 * p)
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    /// `|self - other|`, computed without leaving the log domain.
    pub fn abs_diff(self, other: Self) -> Self {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if hi == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if lo == hi {
            return Self::ZERO;
        }
        LogReal(hi + (-(lo - hi).exp_m1()).ln())
    }

    /// `|self / other - 1|` as a plain float, for relative comparisons.
    pub fn rel_diff(self, other: Self) -> f64 {
        (self.0 - other.0).exp_m1().abs()
    }

    pub fn max(self, other: Self) -> Self {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }
}

/// `ln(Σ exp(x_i))` with a max shift.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let s: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + s.ln()
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        let (hi, lo) = if self.0 >= rhs.0 { (self.0, rhs.0) } else { (rhs.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return LogReal(hi);
        }
        LogReal(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogReal(self.0 + rhs.0)
    }
}

impl Div for LogReal {
    type Output = LogReal;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogReal) -> LogReal {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogReal(self.0 - rhs.0)
    }
}

impl Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        let logs: Vec<f64> = iter.map(|x| x.0).collect();
        LogReal(log_sum_exp(&logs))
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.abs() < 700.0 {
            write!(f, "{:.6e}", self.value())
        } else {
            write!(f, "exp({:.6})", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_plain_arithmetic() {
        let a = LogReal::from_value(3.0);
        let b = LogReal::from_value(4.5);
        assert!(((a + b).value() - 7.5).abs() < 1e-14);
        assert_eq!(a + LogReal::ZERO, a);
        assert!((a * b).value() - 13.5 < 1e-13);
        assert!(((b / a).value() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn no_overflow_at_huge_magnitudes() {
        let a = LogReal::from_ln(1.0e6);
        let b = LogReal::from_ln(1.0e6 - 1.0);
        let s = a + b;
        let expected = 1.0e6 + (1.0 + (-1.0f64).exp()).ln();
        assert!((s.ln() - expected).abs() < 1e-9);
        assert!(a > b);
        let sum: LogReal = [a, b, LogReal::ZERO].into_iter().sum();
        assert!((sum.ln() - expected).abs() < 1e-9);
    }

    #[test]
    fn abs_diff_and_zero() {
        let a = LogReal::from_value(5.0);
        let b = LogReal::from_value(2.0);
        assert!((a.abs_diff(b).value() - 3.0).abs() < 1e-14);
        assert!(a.abs_diff(a).is_zero());
        assert!(LogReal::ZERO.powf(0.5).is_zero());
        assert!((a.sqrt().value() - 5f64.sqrt()).abs() < 1e-15);
    }
}
