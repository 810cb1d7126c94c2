//! Log-domain complex values.
//!
//! Wavefunctions and migrated sigma values span hundreds of decades, so the
//! library carries them as `ln(value)` and only exponentiates on request.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// A complex number stored as its logarithm. The imaginary part of the
/// logarithm is an unwrapped phase; zero is represented by `log_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_abs: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { log_abs: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: LogComplex = LogComplex { log_abs: 0.0, phase: 0.0 };
    pub const MINUS_ONE: LogComplex = LogComplex { log_abs: 0.0, phase: PI };

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            return Self::ZERO;
        }
        let (r, theta) = z.to_polar();
        LogComplex { log_abs: r.ln(), phase: theta }
    }

    /// `e^w` for a complex exponent `w`.
    pub fn from_exponent(w: Complex64) -> Self {
        LogComplex { log_abs: w.re, phase: w.im }
    }

    pub fn from_sign(sign: i8) -> Self {
        if sign < 0 {
            Self::MINUS_ONE
        } else {
            Self::ONE
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// The principal argument in (-π, π].
    pub fn arg(&self) -> f64 {
        wrap_phase(self.phase)
    }

    /// The logarithm as a complex number (`log_abs + i·phase`).
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.log_abs, self.phase)
    }

    /// Exponentiates back to a plain complex value; may overflow or underflow.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_abs.exp(), self.arg())
    }

    pub fn powi(&self, n: i32) -> Self {
        if self.is_zero() {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        LogComplex { log_abs: self.log_abs * n as f64, phase: self.phase * n as f64 }
    }

    pub fn recip(&self) -> Self {
        LogComplex { log_abs: -self.log_abs, phase: -self.phase }
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex { log_abs: self.log_abs + rhs.log_abs, phase: self.phase + rhs.phase }
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        self * LogComplex::MINUS_ONE
    }
}

/// Difference of logarithms, i.e. `ln(self / rhs)` as a complex number with
/// the phase wrapped into (-π, π].
impl Sub for LogComplex {
    type Output = Complex64;
    fn sub(self, rhs: LogComplex) -> Complex64 {
        Complex64::new(self.log_abs - rhs.log_abs, wrap_phase(self.phase - rhs.phase))
    }
}

/// Sum of two log-domain values; the result is rescaled by the larger
/// magnitude before exponentiating.
impl Add for LogComplex {
    type Output = LogComplex;
    fn add(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_abs >= rhs.log_abs { (self, rhs) } else { (rhs, self) };
        let ratio = Complex64::from_polar((small.log_abs - big.log_abs).exp(), small.phase - big.phase);
        let sum = Complex64::new(1.0, 0.0) + ratio;
        if sum.norm() == 0.0 {
            return LogComplex::ZERO;
        }
        let (r, theta) = sum.to_polar();
        LogComplex { log_abs: big.log_abs + r.ln(), phase: big.phase + theta }
    }
}

/// Wraps a phase into (-π, π].
pub fn wrap_phase(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_products() {
        let a = Complex64::new(0.3, -1.7);
        let b = Complex64::new(-2.0, 0.25);
        let la = LogComplex::from_complex(a);
        let lb = LogComplex::from_complex(b);
        assert!(((la * lb).to_complex() - a * b).norm() < 1e-14);
        assert!(((la + lb).to_complex() - (a + b)).norm() < 1e-14);
        assert!(((-la).to_complex() + a).norm() < 1e-15);
        assert!((la.recip().to_complex() - a.inv()).norm() < 1e-14);
    }

    #[test]
    fn zero_is_absorbing() {
        let z = LogComplex::ZERO;
        assert!((z * LogComplex::from_complex(Complex64::new(3.0, 1.0))).is_zero());
        assert_eq!(z.to_complex(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_wrapping() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(-3.5 * PI) - 0.5 * PI).abs() < 1e-14);
        assert_eq!(wrap_phase(PI), PI);
    }
}
