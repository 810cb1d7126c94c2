//! Modified and original Weierstrass functions.
//!
//! Everything is built on the normalized theta product in the reduced basis:
//!
//! ```text
//! σ̃(z) = z · exp(η̃₁z²/2ω₁) · ϑ₁(u|τ)/(u·ϑ₁'(0|τ)),   u = πz/2ω₁,   η̃₁ = πω₁*/A
//! ```
//!
//! The product is only ever evaluated at the Voronoi-reduced argument; the
//! quasiperiodicity of σ̃ carries the value back to the original point (see
//! [`crate::reduce`]).

use crate::error::{Error, Result};
use crate::lattice::{HalfPeriodIndex, Lattice};
use crate::logval::LogComplex;
use crate::reduce::{self, Migration};
use crate::theta::ThetaContext;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Distance to a lattice point, in units of |ω₁|, below which ζ̃, ℘̃ and ζ̂
/// report a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Evaluator for σ̃ and the functions derived from it on one lattice.
#[derive(Debug, Clone)]
pub struct SigmaEvaluator {
    lattice: Lattice,
    theta: ThetaContext,
    /// reduced ω₁
    omega1: Complex64,
    /// η̃₁ = πω₁*/A for the reduced ω₁
    eta1: Complex64,
    /// π/2ω₁
    u_scale: Complex64,
}

impl SigmaEvaluator {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        let rb = lattice.reduced();
        let theta = ThetaContext::new(rb.tau())?;
        let omega1 = rb.omega1;
        Ok(SigmaEvaluator {
            lattice: lattice.clone(),
            theta,
            omega1,
            eta1: PI * omega1.conj() / lattice.area(),
            u_scale: PI / (2.0 * omega1),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn theta(&self) -> &ThetaContext {
        &self.theta
    }

    /// Product evaluation of ln σ̃ at `z` without argument reduction. Also
    /// returns the number of product factors used.
    pub fn sigma_direct_log(&self, z: Complex64) -> Result<(LogComplex, usize)> {
        if z == Complex64::new(0.0, 0.0) {
            return Ok((LogComplex::ZERO, 0));
        }
        let p = self.theta.ln_normalized(self.u_scale * z)?;
        let ln = z.ln() + self.eta1 * z * z / (2.0 * self.omega1) + p.ln_ratio;
        Ok((LogComplex::from_exponent(ln), p.terms))
    }

    /// ln σ̃(z) via reduction and migration, with the product term count.
    pub fn sigma_log_with_terms(&self, z: Complex64) -> Result<(LogComplex, usize)> {
        let mig = reduce::migrate_sigma(self, z);
        self.migrated(&mig)
    }

    pub(crate) fn migrated(&self, mig: &Migration) -> Result<(LogComplex, usize)> {
        let (base, terms) = self.sigma_direct_log(mig.z_red)?;
        Ok((mig.factor.apply(base), terms))
    }

    /// σ̃(z) in log-split form.
    pub fn sigma_log(&self, z: Complex64) -> Result<LogComplex> {
        Ok(self.sigma_log_with_terms(z)?.0)
    }

    /// σ̃(z). Overflows for |z| far beyond the cell; prefer [`Self::sigma_log`].
    pub fn sigma(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.sigma_log(z)?.to_complex())
    }

    /// Weierstrass σ(z) = e^{γ₂z²/2}·σ̃(z).
    pub fn sigma_original_log(&self, z: Complex64) -> Result<LogComplex> {
        let gauss = LogComplex::from_exponent(self.lattice.gamma2() * z * z / 2.0);
        Ok(self.sigma_log(z)? * gauss)
    }

    pub fn sigma_original(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.sigma_original_log(z)?.to_complex())
    }

    fn reduce_checked(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (z_red, m, n) = self.lattice.reduce_point_reduced(z);
        let l = self.lattice.reduced().point(m, n);
        if z_red.norm() < POLE_TOLERANCE * self.omega1.norm() {
            return Err(Error::PoleAt { z, pole: l });
        }
        Ok((z_red, l))
    }

    fn zeta_reduced(&self, z_red: Complex64) -> Result<Complex64> {
        let d = self.theta.dlog(self.u_scale * z_red)?;
        Ok(self.eta1 * z_red / self.omega1 + self.u_scale * d)
    }

    /// ζ̃(z) = σ̃'(z)/σ̃(z); ζ̃(z + L) = ζ̃(z) + πL*/A.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let (z_red, l) = self.reduce_checked(z)?;
        Ok(self.zeta_reduced(z_red)? + PI * l.conj() / self.lattice.area())
    }

    /// Weierstrass ζ(z) = ζ̃(z) + γ₂z.
    pub fn zeta_original(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.zeta(z)? + self.lattice.gamma2() * z)
    }

    /// ℘̃(z) = −ζ̃'(z) = ℘(z) + γ₂, doubly periodic.
    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        let (z_red, _) = self.reduce_checked(z)?;
        let d2 = self.theta.d2log(self.u_scale * z_red)?;
        Ok(-self.eta1 / self.omega1 - self.u_scale * self.u_scale * d2)
    }

    pub fn wp_original(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.wp(z)? - self.lattice.gamma2())
    }

    /// σ̃ᵢ(z) = e^{−η̃ᵢz}·σ̃(z + ωᵢ)/σ̃(ωᵢ), using the lattice's own ωᵢ.
    pub fn sigma_symmetric_log(&self, i: HalfPeriodIndex, z: Complex64) -> Result<LogComplex> {
        if z == Complex64::new(0.0, 0.0) {
            return Ok(LogComplex::ONE);
        }
        let w = self.lattice.half_period(i);
        let eta = self.lattice.eta_modified(i);
        let num = self.sigma_log(z + w)?;
        let den = self.sigma_log(w)?;
        Ok(num * den.recip() * LogComplex::from_exponent(-eta * z))
    }

    pub fn sigma_symmetric(&self, i: HalfPeriodIndex, z: Complex64) -> Result<Complex64> {
        Ok(self.sigma_symmetric_log(i, z)?.to_complex())
    }

    /// Eisenstein's periodic completion ζ̂(z, z*) = ζ̃(z) − πz*/A.
    pub fn completion(&self, z: Complex64) -> Result<Complex64> {
        let (z_red, _) = self.reduce_checked(z)?;
        Ok(self.zeta_reduced(z_red)? - PI * z_red.conj() / self.lattice.area())
    }

    /// 𝒵(z, z*) = σ̃(z)·e^{−πz*z/2A}; |𝒵| is lattice-periodic.
    pub fn z_function_log(&self, z: Complex64) -> Result<LogComplex> {
        let gauss = LogComplex::from_exponent(Complex64::new(-PI * z.norm_sqr() / (2.0 * self.lattice.area()), 0.0));
        Ok(self.sigma_log(z)? * gauss)
    }

    pub fn z_function(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.z_function_log(z)?.to_complex())
    }
}
