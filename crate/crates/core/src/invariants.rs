//! Lattice invariants γ₂ₖ(Λ).
//!
//! γ₂ follows the Eisenstein ordering (inner sum over m along ω₁, outer
//! symmetric limit over n), with the inner sum done in closed form:
//!
//! ```text
//! Σ_m 1/(2mω₁ + 2nω₂)² = (π/2ω₁)² / sin²(nπτ)
//! Γ₂(ω₁) = (π/2ω₁)² [1/3 + 2 Σ_{n≥1} sin⁻²(nπτ)]
//! γ₂     = Γ₂(ω₁) − (π/A)(ω₁*/ω₁)
//! ```
//!
//! For k ≥ 2 the sums converge absolutely and the same row-by-row closed
//! form (Lipschitz) gives a q-series:
//!
//! ```text
//! Σ'(m + nτ)^(−2k) = 2ζ(2k) + 2(2πi)^(2k)/(2k−1)! Σ_{r≥1} r^(2k−1) x^r/(1 − x^r),  x = e^{2πiτ}
//! ```

use crate::error::{Error, Result};
use crate::lattice::ReducedBasis;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Term cap for the Γ₂ series before reporting non-convergence.
pub const GAMMA2_TERM_CAP: usize = 100_000;

const SERIES_TOL: f64 = 1e-17;

/// Largest k accepted by [`gamma2k_reduced`].
pub const MAX_K: u32 = 64;

/// τ with positive imaginary part; the lattice sums are symmetric under n ↦ −n.
fn upper_tau(omega1: Complex64, omega2: Complex64) -> Complex64 {
    let tau = omega2 / omega1;
    if tau.im < 0.0 {
        -tau
    } else {
        tau
    }
}

/// Γ₂(ω₁, Λ) in the basis (ω₁, ω₂). Basis-dependent.
pub fn eisenstein_big_gamma2(omega1: Complex64, omega2: Complex64, cap: usize) -> Result<Complex64> {
    let tau = upper_tau(omega1, omega2);
    let two_pi_i_tau = Complex64::new(0.0, 2.0 * PI) * tau;
    // sin⁻²(nπτ) = −4xⁿ/(1 − xⁿ)², x = e^{2πiτ}
    let mut sum = Complex64::new(0.0, 0.0);
    let mut converged = false;
    for n in 1..=cap {
        let xn = (two_pi_i_tau * n as f64).exp();
        let term = xn / ((1.0 - xn) * (1.0 - xn));
        sum += term;
        let scale = (Complex64::new(1.0 / 3.0, 0.0) - 8.0 * sum).norm().max(1.0 / 3.0);
        if 8.0 * term.norm() < SERIES_TOL * scale && xn.norm() < SERIES_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { what: "Eisenstein-ordered Γ₂ series", terms: cap });
    }
    let pref = Complex64::new(PI, 0.0) / (2.0 * omega1);
    Ok(pref * pref * (Complex64::new(1.0 / 3.0, 0.0) - 8.0 * sum))
}

/// γ₂(Λ) = Γ₂(ω₁, Λ) − (π/A)(ω₁*/ω₁), computed in the given basis.
pub fn eisenstein_gamma2(omega1: Complex64, omega2: Complex64, area: f64, cap: usize) -> Result<Complex64> {
    let big = eisenstein_big_gamma2(omega1, omega2, cap)?;
    Ok(big - PI / area * omega1.conj() / omega1)
}

/// γ₂ₖ for k ≥ 2 from a reduced basis.
pub fn gamma2k_reduced(rb: &ReducedBasis, k: u32) -> Result<Complex64> {
    if !(2..=MAX_K).contains(&k) {
        return Err(Error::InvalidArgument(format!("gamma2k needs 2 <= k <= {MAX_K}, got {k}")));
    }
    let g = eisenstein_g2k(upper_tau(rb.omega1, rb.omega2), k)?;
    Ok(g / (2.0 * rb.omega1).powi(2 * k as i32))
}

/// G₂ₖ(τ) = Σ'(m + nτ)^(−2k), Im τ > 0.
fn eisenstein_g2k(tau: Complex64, k: u32) -> Result<Complex64> {
    let s = 2 * k;
    let x_log = Complex64::new(0.0, 2.0 * PI) * tau;
    // 2(2πi)^s/(s−1)!  in log form: (−1)^k · exp(s·ln 2π − ln (s−1)!)
    let log_fact: f64 = (1..s).map(|j| (j as f64).ln()).sum();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let coeff = 2.0 * sign * (s as f64 * (2.0 * PI).ln() - log_fact).exp();
    let constant = 2.0 * zeta_even(s);
    let mut sum = Complex64::new(0.0, 0.0);
    for r in 1..=10_000u32 {
        let xr = (x_log * r as f64).exp();
        let term = ((s - 1) as f64 * (r as f64).ln()).exp() * xr / (1.0 - xr);
        sum += term;
        let total = (constant + coeff * sum).norm().max(1e-300);
        if (coeff * term).norm() < SERIES_TOL * total && r as f64 > (s as f64) / (-x_log.re).max(1e-300) {
            return Ok(constant + coeff * sum);
        }
    }
    Err(Error::ConvergenceFailure { what: "Eisenstein q-series", terms: 10_000 })
}

/// ζ(s) for integer s ≥ 2 by Euler–Maclaurin with N = 10.
pub fn zeta_even(s: u32) -> f64 {
    const N: u32 = 10;
    // B₂ⱼ/(2j)!
    const B_OVER_FACT: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let sf = s as f64;
    let n = N as f64;
    let mut head = 0.0;
    for j in (1..N).rev() {
        head += (j as f64).powf(-sf);
    }
    let mut tail = n.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n.powf(-sf);
    // B₂ⱼ/(2j)! · s(s+1)…(s+2j−2) · N^(−s−2j+1)
    let mut rising = sf;
    for (j, b) in (1..).zip(B_OVER_FACT.iter()) {
        let j = j as f64;
        tail += b * rising * n.powf(-sf - 2.0 * j + 1.0);
        rising *= (sf + 2.0 * j - 1.0) * (sf + 2.0 * j);
    }
    head + tail
}
