//! Identity suite run by `modsigma selftest` over seeded random lattices.

use crate::elliptic::SigmaEvaluator;
use crate::error::Result;
use crate::lattice::{HalfPeriodIndex, Lattice, LatticeVector};
use crate::lll::{boundary_residual, WavefunctionSpec};
use crate::logval::{wrap_phase, LogComplex};
use crate::oracle::eta_theta_series;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    pub seed: u64,
    pub lattices: usize,
    /// Added to γ₂ of every lattice; a negative control.
    pub perturb_gamma2: Option<f64>,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { seed: 42, lattices: 100, perturb_gamma2: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub checked: usize,
    pub failures: usize,
    pub max_error: f64,
    /// Basis of the first failing lattice, formatted.
    pub first_failure: Option<String>,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type Check = fn(&Lattice, &SigmaEvaluator, &mut ChaCha8Rng) -> Result<f64>;

const CHECKS: [(&str, f64, Check); 8] = [
    ("legendre", 1e-12, legendre),
    ("eta_modified", 1e-11, eta_modified),
    ("eta_weierstrass", 1e-10, eta_weierstrass),
    ("quasiperiodicity", 1e-11, quasiperiodicity),
    ("even_translation", 1e-10, even_translation),
    ("modular_invariance", 1e-10, modular_invariance),
    ("derivative_chain", 1e-6, derivative_chain),
    ("boundary_condition", 1e-9, boundary_condition),
];

/// A random lattice with |ω₁| ∈ [0.3, 1.5], |τ| ∈ [0.2, 5] and either
/// orientation.
pub fn random_lattice<R: Rng>(rng: &mut R) -> Lattice {
    loop {
        let w1 = Complex64::from_polar(rng.gen_range(0.3..1.5), rng.gen_range(-PI..PI));
        let modulus = 10f64.powf(rng.gen_range(0.2f64.log10()..5f64.log10()));
        let mut angle = rng.gen_range(0.15 * PI..0.85 * PI);
        if rng.gen_bool(0.5) {
            angle = -angle;
        }
        if let Ok(lat) = Lattice::from_basis(w1, w1 * Complex64::from_polar(modulus, angle)) {
            return lat;
        }
    }
}

/// A point uniform in the reduced cell scaled by `frac`.
fn random_point<R: Rng>(lat: &Lattice, frac: f64, rng: &mut R) -> Complex64 {
    let rb = lat.reduced();
    let (s, t): (f64, f64) = (rng.gen_range(-frac..frac), rng.gen_range(-frac..frac));
    s * rb.omega1 + t * rb.omega2
}

fn log_gap(a: Complex64, b: Complex64) -> f64 {
    Complex64::new(a.re - b.re, wrap_phase(a.im - b.im)).norm()
}

fn legendre(lat: &Lattice, _: &SigmaEvaluator, _: &mut ChaCha8Rng) -> Result<f64> {
    let e1 = lat.eta_modified(HalfPeriodIndex::One);
    let e2 = lat.eta_modified(HalfPeriodIndex::Two);
    let target = Complex64::new(0.0, lat.orientation() as f64 * PI / 2.0);
    Ok((e1 * lat.omega2() - e2 * lat.omega1() - target).norm())
}

fn eta_modified(lat: &Lattice, ev: &SigmaEvaluator, _: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in HalfPeriodIndex::ALL {
        let w = lat.half_period(i);
        worst = worst.max((ev.zeta(w)? - PI * w.conj() / lat.area()).norm());
    }
    Ok(worst)
}

fn eta_weierstrass(lat: &Lattice, ev: &SigmaEvaluator, _: &mut ChaCha8Rng) -> Result<f64> {
    let w1 = lat.omega1();
    let oracle = eta_theta_series(w1, lat.omega2());
    Ok((ev.zeta_original(w1)? - oracle).norm() / oracle.norm().max(1.0 / w1.norm()))
}

fn quasiperiodicity(lat: &Lattice, ev: &SigmaEvaluator, rng: &mut ChaCha8Rng) -> Result<f64> {
    let z = random_point(lat, 0.5, rng);
    let base = ev.sigma_log(z)?;
    let mut worst: f64 = 0.0;
    for m in -3..=3 {
        for n in -3..=3 {
            let v = LatticeVector::new(m, n);
            let l = lat.point(v);
            let predicted = base
                * LogComplex::from_sign(v.parity())
                * LogComplex::from_exponent(PI * l.conj() / lat.area() * (z + l / 2.0));
            worst = worst.max((ev.sigma_log(z + l)? - predicted).norm());
        }
    }
    Ok(worst)
}

fn even_translation(lat: &Lattice, ev: &SigmaEvaluator, rng: &mut ChaCha8Rng) -> Result<f64> {
    let z = random_point(lat, 0.5, rng);
    let mut worst: f64 = 0.0;
    for i in HalfPeriodIndex::ALL {
        for l in [2.0 * lat.omega1(), 2.0 * lat.omega2()] {
            let r = ev.sigma_symmetric_log(i, z + 2.0 * l)? - ev.sigma_symmetric_log(i, z)?;
            worst = worst.max(log_gap(r, 2.0 * PI * l.conj() / lat.area() * (z + l)));
        }
    }
    Ok(worst)
}

/// A product of up to 10 generators S, T, T⁻¹ as (a, b, c, d).
pub fn random_unimodular<R: Rng>(rng: &mut R) -> (i64, i64, i64, i64) {
    let mut m = (1i64, 0i64, 0i64, 1i64);
    for _ in 0..rng.gen_range(1..=10) {
        let g = match rng.gen_range(0..3) {
            0 => (0, -1, 1, 0),
            1 => (1, 1, 0, 1),
            _ => (1, -1, 0, 1),
        };
        m = (m.0 * g.0 + m.1 * g.2, m.0 * g.1 + m.1 * g.3, m.2 * g.0 + m.3 * g.2, m.2 * g.1 + m.3 * g.3);
    }
    m
}

fn modular_invariance(lat: &Lattice, ev: &SigmaEvaluator, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, b, c, d) = random_unimodular(rng);
    let other = SigmaEvaluator::new(&lat.modular_transform(a, b, c, d)?)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let z = random_point(lat, 1.5, rng);
        let rel = |x: Complex64, y: Complex64| (x - y).norm() / x.norm().max(1e-300);
        worst = worst.max(log_gap(ev.sigma_log(z)?.ln(), other.sigma_log(z)?.ln()));
        worst = worst.max(rel(ev.zeta(z)?, other.zeta(z)?));
        worst = worst.max(rel(ev.wp(z)?, other.wp(z)?));
    }
    Ok(worst)
}

/// A point of the cell at least a quarter of |ω₁| from every lattice point,
/// where central differences at a fixed step stay accurate.
pub fn point_off_poles<R: Rng>(lat: &Lattice, rng: &mut R) -> Complex64 {
    let min = 0.25 * lat.reduced().omega1.norm();
    loop {
        let z = random_point(lat, 1.0, rng);
        if lat.reduce_point(z).0.norm() >= min {
            return z;
        }
    }
}

fn derivative_chain(lat: &Lattice, ev: &SigmaEvaluator, rng: &mut ChaCha8Rng) -> Result<f64> {
    let h = 1e-5;
    let z = point_off_poles(lat, rng);
    let dlog = (ev.sigma_log(z + h)? - ev.sigma_log(z - h)?) / (2.0 * h);
    let zeta = ev.zeta(z)?;
    let dzeta = (ev.zeta(z + h)? - ev.zeta(z - h)?) / (2.0 * h);
    let wp = ev.wp(z)?;
    Ok(((dlog - zeta).norm() / zeta.norm()).max((dzeta + wp).norm() / wp.norm()))
}

fn boundary_condition(lat: &Lattice, _: &SigmaEvaluator, rng: &mut ChaCha8Rng) -> Result<f64> {
    let n_phi = rng.gen_range(1..=4);
    let zeros = (0..n_phi).map(|_| random_point(lat, 1.0, rng)).collect();
    let spec = WavefunctionSpec::from_zeros(lat, n_phi, zeros)?;
    let z = random_point(lat, 0.5, rng);
    let a = boundary_residual(&spec, z, LatticeVector::new(1, 0))?;
    let b = boundary_residual(&spec, z, LatticeVector::new(0, 1))?;
    Ok(a.max(b))
}

/// Runs every identity on `opts.lattices` random lattices.
pub fn run(opts: &SelftestOptions) -> Vec<IdentityResult> {
    // per-lattice errors, computed in parallel and merged in index order
    let rows: Vec<(Lattice, Vec<f64>)> = (0..opts.lattices)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(idx as u64);
            let mut lat = random_lattice(&mut rng);
            if let Some(d) = opts.perturb_gamma2 {
                lat = lat.with_gamma2_offset(Complex64::new(d, 0.0));
            }
            let errors = match SigmaEvaluator::new(&lat) {
                Ok(ev) => CHECKS.iter().map(|(_, _, f)| f(&lat, &ev, &mut rng).unwrap_or(f64::INFINITY)).collect(),
                Err(_) => vec![f64::INFINITY; CHECKS.len()],
            };
            (lat, errors)
        })
        .collect();
    CHECKS
        .iter()
        .enumerate()
        .map(|(k, &(name, tolerance, _))| {
            let mut r = IdentityResult {
                name,
                tolerance,
                checked: rows.len(),
                failures: 0,
                max_error: 0.0,
                first_failure: None,
            };
            for (lat, errors) in &rows {
                let e = errors[k];
                r.max_error = r.max_error.max(if e.is_nan() { f64::INFINITY } else { e });
                if e.is_nan() || e >= tolerance {
                    r.failures += 1;
                    r.first_failure.get_or_insert_with(|| {
                        format!(
                            "omega1={},{} omega2={},{}",
                            lat.omega1().re,
                            lat.omega1().im,
                            lat.omega2().re,
                            lat.omega2().im
                        )
                    });
                }
            }
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let results = run(&SelftestOptions { seed: 1, lattices: 8, perturb_gamma2: None });
        for r in &results {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn perturbed_gamma2_is_caught() {
        let results = run(&SelftestOptions { seed: 1, lattices: 4, perturb_gamma2: Some(1e-3) });
        let eta = results.iter().find(|r| r.name == "eta_weierstrass").unwrap();
        assert_eq!(eta.failures, 4);
    }

    #[test]
    fn unimodular_words_have_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (a, b, c, d) = random_unimodular(&mut rng);
            assert_eq!(a * d - b * c, 1);
        }
    }
}
