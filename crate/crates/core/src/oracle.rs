//! Independent reference computations used by the self-test and the test
//! suites. None of these share code paths with the product evaluator.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Truncated Weierstrass sum
/// `ζ(z) ≈ 1/z + Σ' z³/(L²(z² − L²))` over `max(|m|,|n|) ≤ cutoff` in the
/// lattice's own basis.
pub fn zeta_lattice_sum(lat: &Lattice, z: Complex64, cutoff: u32) -> Result<Complex64> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be >= 1".into()));
    }
    let (w1, w2) = (2.0 * lat.omega1(), 2.0 * lat.omega2());
    let z2 = z * z;
    let z3 = z2 * z;
    let c = cutoff as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for m in -c..=c {
        for n in -c..=c {
            if m == 0 && n == 0 {
                continue;
            }
            let l = m as f64 * w1 + n as f64 * w2;
            let l2 = l * l;
            let d = z2 - l2;
            if d.norm() == 0.0 {
                return Err(Error::PoleAt { z, pole: l });
            }
            // Kahan summation; 640k terms at the default cutoff
            let y = z3 / (l2 * d) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    if z.norm() == 0.0 {
        return Err(Error::PoleAt { z, pole: z });
    }
    Ok(1.0 / z + sum)
}

/// ϑ₁'(0) and ϑ₁'''(0) from the Fourier series
/// `ϑ₁(u) = 2 Σ (−1)ⁿ q^((n+½)²) sin((2n+1)u)`.
pub fn theta1_odd_derivatives(tau: Complex64) -> (Complex64, Complex64) {
    let tau = if tau.im < 0.0 { -tau } else { tau };
    let mut d1 = Complex64::new(0.0, 0.0);
    let mut d3 = Complex64::new(0.0, 0.0);
    for n in 0..200 {
        let k = n as f64 + 0.5;
        let qk = (Complex64::new(0.0, PI) * tau * (k * k)).exp();
        if qk.norm() < 1e-40 {
            break;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let odd = 2.0 * n as f64 + 1.0;
        d1 += sign * qk * odd;
        d3 -= sign * qk * odd * odd * odd;
    }
    (2.0 * d1, 2.0 * d3)
}

/// η = ζ(ω₁) for the basis (ω₁, ω₂), from `η₁ = −(π²/12ω₁)·ϑ₁'''(0)/ϑ₁'(0)`.
pub fn eta_theta_series(omega1: Complex64, omega2: Complex64) -> Complex64 {
    let (d1, d3) = theta1_odd_derivatives(omega2 / omega1);
    -(PI * PI / (12.0 * omega1)) * d3 / d1
}

/// γ₂ from the ϑ-series η₁ of the reduced basis: `γ₂ = (η₁ − πω₁*/A)/ω₁`.
pub fn gamma2_theta_series(lat: &Lattice) -> Complex64 {
    let rb = lat.reduced();
    let eta = eta_theta_series(rb.omega1, rb.omega2);
    (eta - PI * rb.omega1.conj() / lat.area()) / rb.omega1
}

/// Σ' L^(−2k) over square shells `max(|m|,|n|) ≤ cutoff` of the reduced basis.
pub fn gamma2k_shell_sum(lat: &Lattice, k: u32, cutoff: u32) -> Complex64 {
    let rb = lat.reduced();
    let (w1, w2) = (2.0 * rb.omega1, 2.0 * rb.omega2);
    let p = -(2 * k as i32);
    let mut total = Complex64::new(0.0, 0.0);
    for s in 1..=cutoff as i64 {
        let mut shell = Complex64::new(0.0, 0.0);
        let mut add = |m: i64, n: i64| shell += (m as f64 * w1 + n as f64 * w2).powi(p);
        for j in -s..=s {
            add(s, j);
            add(-s, j);
        }
        for j in -(s - 1)..=(s - 1) {
            add(j, s);
            add(j, -s);
        }
        total += shell;
    }
    total
}
