//! Jacobi ϑ₁ from its product form.
//!
//! The nome is always taken with |q| < 1: a basis with Im τ < 0 is evaluated
//! through −τ, which leaves the zero set {mπ + nπτ} and the normalized ratio
//! ϑ₁(u)/(u·ϑ₁'(0)) unchanged.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Hard cap on product factors.
pub const PRODUCT_CAP: usize = 512;

const EPS: f64 = 1.1102230246251565e-16; // 2^-53

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaContext {
    tau: Complex64,
    q: Complex64,
    q_abs: f64,
    /// q^(2n) for n = 1..=len, until it underflows against 1e-300.
    q2n: Vec<Complex64>,
    truncation: usize,
}

/// Factors of the normalized product at a point, plus the number of product
/// terms that were needed.
#[derive(Debug, Clone, Copy)]
pub struct ProductTerms {
    /// (sin u / u) · Π (1 − a)(1 − b)/(1 − x)², a = x e^{2iu}, b = x e^{−2iu}, x = q^{2n}
    pub ln_ratio: Complex64,
    pub terms: usize,
}

impl ThetaContext {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im.is_finite() && tau.re.is_finite()) || tau.im == 0.0 {
            return Err(Error::InvalidArgument(format!("theta needs Im τ ≠ 0, got {tau}")));
        }
        let tau = if tau.im < 0.0 { -tau } else { tau };
        let q = (Complex64::new(0.0, PI) * tau).exp();
        let q_abs = q.norm();
        let mut q2n = Vec::new();
        let log_x = Complex64::new(0.0, 2.0 * PI) * tau;
        for n in 1..=PRODUCT_CAP {
            let x = (log_x * n as f64).exp();
            if x.norm() < 1e-300 {
                break;
            }
            q2n.push(x);
        }
        let truncation = q2n.iter().position(|x| x.norm() < EPS).map_or(q2n.len(), |p| p + 1);
        Ok(ThetaContext { tau, q, q_abs, q2n, truncation })
    }

    /// τ with Im τ > 0.
    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn q_abs(&self) -> f64 {
        self.q_abs
    }

    /// Number of factors after which |q|^(2n) < 2⁻⁵³ (independent of u).
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn x(&self, n: usize) -> Complex64 {
        self.q2n.get(n - 1).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Runs `f(n, x, a, b)` over the product factors needed at `u`.
    fn for_each_factor(&self, u: Complex64, mut f: impl FnMut(Complex64, Complex64, Complex64)) -> Result<usize> {
        let e2iu = (Complex64::i() * 2.0 * u).exp();
        let em2iu = (-Complex64::i() * 2.0 * u).exp();
        let cos_bound = 2.0 + e2iu.norm() + em2iu.norm();
        let mut n = 1;
        loop {
            if n > PRODUCT_CAP {
                return Err(Error::ConvergenceFailure { what: "theta product", terms: PRODUCT_CAP });
            }
            let x = self.x(n);
            if x.norm() * cos_bound < EPS {
                return Ok(n - 1);
            }
            f(x, x * e2iu, x * em2iu);
            n += 1;
        }
    }

    /// ϑ₁(u|τ) = 2q^(1/4) sin u Π (1 − q^(2n))(1 − 2q^(2n)cos 2u + q^(4n)).
    pub fn theta1(&self, u: Complex64) -> Result<Complex64> {
        let mut prod = Complex64::new(1.0, 0.0);
        self.for_each_factor(u, |x, a, b| prod *= (1.0 - x) * (1.0 - a) * (1.0 - b))?;
        let q_quarter = (Complex64::new(0.0, PI / 4.0) * self.tau).exp();
        Ok(2.0 * q_quarter * u.sin() * prod)
    }

    /// ϑ₁'(0|τ) = 2q^(1/4) Π (1 − q^(2n))³.
    pub fn theta1_prime_zero(&self) -> Complex64 {
        let mut prod = Complex64::new(1.0, 0.0);
        for n in 1..=self.truncation {
            let x = self.x(n);
            prod *= (1.0 - x).powi(3);
        }
        let q_quarter = (Complex64::new(0.0, PI / 4.0) * self.tau).exp();
        2.0 * q_quarter * prod
    }

    /// ln[ϑ₁(u)/(u·ϑ₁'(0))], which → 0 as u → 0.
    pub fn ln_normalized(&self, u: Complex64) -> Result<ProductTerms> {
        let mut prod = Complex64::new(1.0, 0.0);
        let terms = self.for_each_factor(u, |x, a, b| {
            let d = 1.0 - x;
            prod *= (1.0 - a) * (1.0 - b) / (d * d);
        })?;
        Ok(ProductTerms { ln_ratio: ln_sin_over(u) + prod.ln(), terms })
    }

    /// d/du ln ϑ₁(u).
    pub fn dlog(&self, u: Complex64) -> Result<Complex64> {
        let i = Complex64::i();
        let mut s = cot(u);
        self.for_each_factor(u, |_, a, b| s += -2.0 * i * a / (1.0 - a) + 2.0 * i * b / (1.0 - b))?;
        Ok(s)
    }

    /// d²/du² ln ϑ₁(u).
    pub fn d2log(&self, u: Complex64) -> Result<Complex64> {
        let mut s = -csc2(u);
        self.for_each_factor(u, |_, a, b| {
            let (da, db) = (1.0 - a, 1.0 - b);
            s += 4.0 * a / (da * da) + 4.0 * b / (db * db);
        })?;
        Ok(s)
    }
}

/// ln(sin u / u), stable for large |Im u|.
fn ln_sin_over(u: Complex64) -> Complex64 {
    if u.norm() < 1.0 {
        if u.norm() < 1e-8 {
            return -u * u / 6.0;
        }
        return (u.sin() / u).ln();
    }
    let i = Complex64::i();
    // sin u = e^{−iu}(e^{2iu} − 1)/(2i) = e^{iu}(1 − e^{−2iu})/(2i)
    let ln_sin = if u.im >= 0.0 {
        -i * u + (((i * 2.0 * u).exp() - 1.0) / (2.0 * i)).ln()
    } else {
        i * u + ((1.0 - (-i * 2.0 * u).exp()) / (2.0 * i)).ln()
    };
    ln_sin - u.ln()
}

fn cot(u: Complex64) -> Complex64 {
    let i = Complex64::i();
    if u.im >= 0.0 {
        let e = (i * 2.0 * u).exp();
        i * (e + 1.0) / (e - 1.0)
    } else {
        let e = (-i * 2.0 * u).exp();
        i * (1.0 + e) / (1.0 - e)
    }
}

fn csc2(u: Complex64) -> Complex64 {
    let i = Complex64::i();
    let e = if u.im >= 0.0 { (i * 2.0 * u).exp() } else { (-i * 2.0 * u).exp() };
    -4.0 * e / ((e - 1.0) * (e - 1.0))
}
