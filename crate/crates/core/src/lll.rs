//! Lowest-Landau-level wavefunctions on the torus.
//!
//! With N_Φ flux quanta through the cell, A = 2πN_Φℓ² and
//!
//! ```text
//! ψ(z, z*) = e^{K*z} Π σ̃(z − wᵢ) e^{−z*z/4ℓ²},   Σ wᵢ = KA/π,
//! ```
//!
//! which obeys
//! `ψ(z + L) = ξ(L)^{N_Φ} e^{K*L − KL*} e^{(L*z − Lz*)/4ℓ²} ψ(z)`.
//! All values are carried in the log domain.

use crate::analysis::{cell_corners, contour_winding};
use crate::elliptic::SigmaEvaluator;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector};
use crate::logval::LogComplex;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance on |Σwᵢ − KA/π| in units of |ω₁|.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-10;
/// ln(1e-300).
const LOG_FLOOR: f64 = -690.7755278982137;
/// Determinant magnitude (after row scaling) below which an orbital family
/// counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-250;

#[derive(Debug, Clone)]
pub struct WavefunctionSpec {
    lattice: Lattice,
    evaluator: SigmaEvaluator,
    n_phi: usize,
    ell: f64,
    zeros: Vec<Complex64>,
    k: Complex64,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    lattice: Lattice,
    #[serde(rename = "nPhi")]
    n_phi: usize,
    zeros: Vec<Complex64>,
    #[serde(rename = "K")]
    k: Complex64,
}

impl Serialize for WavefunctionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecJson { lattice: self.lattice.clone(), n_phi: self.n_phi, zeros: self.zeros.clone(), k: self.k }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WavefunctionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SpecJson::deserialize(d)?;
        WavefunctionSpec::with_boundary_k(&j.lattice, j.n_phi, j.zeros, j.k).map_err(serde::de::Error::custom)
    }
}

impl WavefunctionSpec {
    /// Builds a spec with K = πΣwᵢ/A.
    pub fn from_zeros(lattice: &Lattice, n_phi: usize, zeros: Vec<Complex64>) -> Result<Self> {
        check_counts(n_phi, &zeros)?;
        let k = PI * zeros.iter().sum::<Complex64>() / lattice.area();
        Self::new_unchecked(lattice, n_phi, zeros, k)
    }

    /// Builds a spec with an explicit K, which must satisfy Σwᵢ = KA/π.
    pub fn with_boundary_k(lattice: &Lattice, n_phi: usize, zeros: Vec<Complex64>, k: Complex64) -> Result<Self> {
        check_counts(n_phi, &zeros)?;
        let zero_sum: Complex64 = zeros.iter().sum();
        let expected = k * lattice.area() / PI;
        if (zero_sum - expected).norm() >= CONSTRAINT_TOLERANCE * lattice.omega1().norm() {
            return Err(Error::ConstraintViolation { zero_sum, expected });
        }
        Self::new_unchecked(lattice, n_phi, zeros, k)
    }

    /// No constraint check; meant for negative controls.
    pub fn new_unchecked(lattice: &Lattice, n_phi: usize, zeros: Vec<Complex64>, k: Complex64) -> Result<Self> {
        if n_phi == 0 {
            return Err(Error::InvalidArgument("nPhi must be >= 1".into()));
        }
        let ell = (lattice.area() / (2.0 * PI * n_phi as f64)).sqrt();
        Ok(WavefunctionSpec {
            lattice: lattice.clone(),
            evaluator: SigmaEvaluator::new(lattice)?,
            n_phi,
            ell,
            zeros,
            k,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn boundary_k(&self) -> Complex64 {
        self.k
    }

    /// 1/(4ℓ²) = πN_Φ/(2A).
    fn gauss(&self) -> f64 {
        PI * self.n_phi as f64 / (2.0 * self.lattice.area())
    }

    /// The holomorphic part f(z) = e^{K*z} Π σ̃(z − wᵢ).
    pub fn holomorphic_log(&self, z: Complex64) -> Result<LogComplex> {
        let mut acc = LogComplex::from_exponent(self.k.conj() * z);
        for &w in &self.zeros {
            match self.evaluator.sigma_log(z - w) {
                Ok(s) => acc = acc * s,
                Err(Error::PoleAt { .. }) => return Ok(LogComplex::ZERO),
                Err(e) => return Err(e),
            }
        }
        Ok(acc)
    }

    pub fn psi_log(&self, z: Complex64) -> Result<LogComplex> {
        let g = LogComplex::from_exponent(Complex64::new(-self.gauss() * z.norm_sqr(), 0.0));
        Ok(self.holomorphic_log(z)? * g)
    }

    /// ψ(z, z*) as a plain complex number; may underflow far from the origin.
    pub fn psi(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.psi_log(z)?.to_complex())
    }

    /// Predicted ψ(z + L)/ψ(z) from the boundary condition.
    pub fn boundary_factor(&self, z: Complex64, v: LatticeVector) -> LogComplex {
        let l = self.lattice.point(v);
        let xi = LogComplex::from_sign(v.parity()).powi(self.n_phi as i32);
        let w = self.k.conj() * l - self.k * l.conj() + self.gauss() * (l.conj() * z - l * z.conj());
        xi * LogComplex::from_exponent(w)
    }
}

fn check_counts(n_phi: usize, zeros: &[Complex64]) -> Result<()> {
    if zeros.len() != n_phi {
        return Err(Error::CountMismatch { expected: n_phi, got: zeros.len() });
    }
    Ok(())
}

/// ψ(z) for a spec.
pub fn single_particle_psi(spec: &WavefunctionSpec, z: Complex64) -> Result<Complex64> {
    spec.psi(z)
}

/// |measured/predicted − 1| for the translation by `v`.
pub fn boundary_residual(spec: &WavefunctionSpec, z: Complex64, v: LatticeVector) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    let here = spec.psi_log(z)?;
    if here.log_abs < LOG_FLOOR {
        return Err(Error::NearZeroDivision { z });
    }
    let there = spec.psi_log(z + spec.lattice.point(v))?;
    let predicted = spec.boundary_factor(z, v) * here;
    if there.is_zero() {
        return Ok(1.0);
    }
    Ok(((there - predicted).exp() - 1.0).norm())
}

/// Number of zeros of the holomorphic part inside one cell, from the
/// winding of arg f around the cell boundary.
pub fn zero_count(spec: &WavefunctionSpec) -> Result<i64> {
    let lat = spec.lattice();
    let rb = lat.reduced();
    let base = -(rb.omega1 + rb.omega2);
    let offsets = [0.0, 0.137, 0.291, 0.413, 0.577, 0.731, 0.859];
    let origin = offsets
        .iter()
        .flat_map(|&s| offsets.iter().map(move |&t| (s, t)))
        .map(|(s, t)| base + s * rb.omega1 + t * rb.omega2)
        .find(|&o| {
            spec.zeros.iter().all(|&w| {
                let (a, b) = rb.coordinates(w - o);
                let edge = |x: f64| {
                    let f = x - x.floor();
                    f.min(1.0 - f)
                };
                edge(a) > 0.02 && edge(b) > 0.02
            })
        })
        .ok_or_else(|| Error::InvalidArgument("no cell boundary clear of the zeros".into()))?;
    let arg = |z: Complex64| {
        let v = spec.holomorphic_log(z)?;
        if v.log_abs < LOG_FLOOR {
            return Err(Error::NearZeroDivision { z });
        }
        Ok(v.arg())
    };
    contour_winding(arg, &cell_corners(&spec.evaluator, origin), 64)
}

/// Particle positions zᵢ with their centre-of-mass coordinate Z = Σzᵢ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ManyBodyConfig {
    positions: Vec<Complex64>,
    center_of_mass: Complex64,
}

impl ManyBodyConfig {
    pub fn new(positions: Vec<Complex64>) -> Self {
        let center_of_mass = positions.iter().sum();
        ManyBodyConfig { positions, center_of_mass }
    }

    /// `n` positions uniform over the reduced cell centred on the origin.
    pub fn random<R: Rng>(lattice: &Lattice, n: usize, rng: &mut R) -> Self {
        let rb = lattice.reduced();
        let positions = (0..n)
            .map(|_| {
                let (s, t): (f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                2.0 * (s * rb.omega1 + t * rb.omega2)
            })
            .collect();
        Self::new(positions)
    }

    pub fn positions(&self) -> &[Complex64] {
        &self.positions
    }

    pub fn center_of_mass(&self) -> Complex64 {
        self.center_of_mass
    }

    /// The same configuration with particles `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut p = self.positions.clone();
        p.swap(i, j);
        Self::new(p)
    }
}

/// Ψ = e^{K*Z} σ̃(Z − W) Π_{i<j} σ̃(zᵢ − zⱼ) Π e^{−N_Φπ|zᵢ|²/2A}, W = KA/π.
pub fn filled_state_log(spec: &WavefunctionSpec, config: &ManyBodyConfig) -> Result<LogComplex> {
    let n = config.positions.len();
    if n != spec.n_phi {
        return Err(Error::ParticleCountMismatch { expected: spec.n_phi, got: n });
    }
    let ev = &spec.evaluator;
    let sigma = |z: Complex64| match ev.sigma_log(z) {
        Err(Error::PoleAt { .. }) => Ok(LogComplex::ZERO),
        other => other,
    };
    let big_z = config.center_of_mass;
    let w = spec.k * spec.lattice.area() / PI;
    let mut acc = LogComplex::from_exponent(spec.k.conj() * big_z) * sigma(big_z - w)?;
    for i in 0..n {
        for j in i + 1..n {
            acc = acc * sigma(config.positions[i] - config.positions[j])?;
        }
    }
    let gauss: f64 = config.positions.iter().map(|z| z.norm_sqr()).sum::<f64>() * spec.gauss();
    Ok(acc * LogComplex::from_exponent(Complex64::new(-gauss, 0.0)))
}

pub fn filled_state_psi(spec: &WavefunctionSpec, config: &ManyBodyConfig) -> Result<Complex64> {
    Ok(filled_state_log(spec, config)?.to_complex())
}

/// [`filled_state_log`] over many configurations, in parallel; results keep
/// the input order.
pub fn filled_state_batch(spec: &WavefunctionSpec, configs: &[ManyBodyConfig]) -> Vec<Result<LogComplex>> {
    configs.par_iter().map(|c| filled_state_log(spec, c)).collect()
}

/// The family with zero sets w⁰ + 2(k−1)ω₁/N_Φ, k = 1..N_Φ. All members
/// share the boundary condition of the first.
pub fn slater_family(lattice: &Lattice, base_zeros: &[Complex64]) -> Result<Vec<WavefunctionSpec>> {
    let n = base_zeros.len();
    let w1 = lattice.omega1();
    (0..n)
        .map(|k| {
            let shift = 2.0 * k as f64 * w1 / n as f64;
            WavefunctionSpec::from_zeros(lattice, n, base_zeros.iter().map(|w| w + shift).collect())
        })
        .collect()
}

/// det[ψ_k(z_j)], computed by LU on the row-scaled matrix.
pub fn slater_determinant_log(specs: &[WavefunctionSpec], config: &ManyBodyConfig) -> Result<LogComplex> {
    let n = check_family(specs)?;
    if config.positions.len() != n {
        return Err(Error::ParticleCountMismatch { expected: n, got: config.positions.len() });
    }
    let mut rows = Vec::with_capacity(n);
    for s in specs {
        let row: Vec<LogComplex> = config.positions.iter().map(|&z| s.psi_log(z)).collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok(log_determinant(&rows))
}

pub fn slater_determinant_oracle(specs: &[WavefunctionSpec], config: &ManyBodyConfig) -> Result<Complex64> {
    Ok(slater_determinant_log(specs, config)?.to_complex())
}

/// Rejects a family whose scaled determinant is below
/// [`SINGULAR_THRESHOLD`] at each of 10 random configurations.
pub fn check_independent<R: Rng>(specs: &[WavefunctionSpec], rng: &mut R) -> Result<()> {
    let n = check_family(specs)?;
    for _ in 0..10 {
        let config = ManyBodyConfig::random(specs[0].lattice(), n, rng);
        let mut rows = Vec::with_capacity(n);
        for s in specs {
            let row: Vec<LogComplex> = config.positions.iter().map(|&z| s.psi_log(z)).collect::<Result<_>>()?;
            rows.push(row);
        }
        if scaled_determinant(&rows).norm() >= SINGULAR_THRESHOLD {
            return Ok(());
        }
    }
    Err(Error::SingularBasis)
}

fn check_family(specs: &[WavefunctionSpec]) -> Result<usize> {
    let first = specs.first().ok_or_else(|| Error::InvalidArgument("empty orbital family".into()))?;
    let n = first.n_phi;
    if specs.len() != n {
        return Err(Error::CountMismatch { expected: n, got: specs.len() });
    }
    let rb = first.lattice.reduced();
    for s in specs {
        if s.n_phi != n || s.lattice != first.lattice {
            return Err(Error::InvalidArgument("orbital family must share lattice and nPhi".into()));
        }
        // e^{δK*L − δK L*} must be 1 for both generators
        let dk = s.k - first.k;
        for l in [rb.point(1, 0), rb.point(0, 1)] {
            let phase = (dk.conj() * l - dk * l.conj()).im / (2.0 * PI);
            if (phase - phase.round()).abs() > 1e-9 {
                return Err(Error::InvalidArgument("orbital family mixes boundary conditions".into()));
            }
        }
    }
    Ok(n)
}

/// Row-scaled matrix and the per-row log scales.
fn scale_rows(rows: &[Vec<LogComplex>]) -> (Vec<Vec<Complex64>>, f64) {
    let mut log_scale = 0.0;
    let m = rows
        .iter()
        .map(|row| {
            let s = row.iter().map(|v| v.log_abs).fold(f64::NEG_INFINITY, f64::max);
            if s == f64::NEG_INFINITY {
                return vec![Complex64::new(0.0, 0.0); row.len()];
            }
            log_scale += s;
            row.iter().map(|v| LogComplex { log_abs: v.log_abs - s, phase: v.phase }.to_complex()).collect()
        })
        .collect();
    (m, log_scale)
}

fn scaled_determinant(rows: &[Vec<LogComplex>]) -> Complex64 {
    let (m, _) = scale_rows(rows);
    lu_determinant(m).to_complex()
}

fn log_determinant(rows: &[Vec<LogComplex>]) -> LogComplex {
    let (m, log_scale) = scale_rows(rows);
    lu_determinant(m) * LogComplex::from_exponent(Complex64::new(log_scale, 0.0))
}

/// Determinant by LU with partial pivoting, accumulated in the log domain.
fn lu_determinant(mut a: Vec<Vec<Complex64>>) -> LogComplex {
    let n = a.len();
    let mut det = LogComplex::ONE;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).expect("non-empty");
        if a[pivot][col].norm() == 0.0 {
            return LogComplex::ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det = det * LogComplex::from_complex(p);
        for r in col + 1..n {
            let f = a[r][col] / p;
            let (upper, lower) = a.split_at_mut(r);
            for (x, &v) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn generic() -> Lattice {
        Lattice::from_basis(c(0.5, 0.0), c(0.3, 0.55)).unwrap()
    }

    #[test]
    fn spec_from_zeros_examples() {
        let sq = Lattice::square(1.0);
        let s = WavefunctionSpec::from_zeros(&sq, 1, vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(s.boundary_k(), c(0.0, 0.0));
        assert!((s.ell() - (2.0 * PI).powf(-0.5)).abs() < 1e-15);
        let w1 = sq.omega1();
        let s = WavefunctionSpec::from_zeros(&sq, 2, vec![w1, -w1]).unwrap();
        assert_eq!(s.boundary_k(), c(0.0, 0.0));
        assert!(matches!(
            WavefunctionSpec::from_zeros(&sq, 2, vec![w1]),
            Err(Error::CountMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn explicit_k_is_validated() {
        let lat = generic();
        let zeros = vec![c(0.1, 0.2), c(-0.3, 0.05)];
        let k = PI * (zeros[0] + zeros[1]) / lat.area();
        assert!(WavefunctionSpec::with_boundary_k(&lat, 2, zeros.clone(), k).is_ok());
        let r = WavefunctionSpec::with_boundary_k(&lat, 2, zeros, k + 1e-6);
        assert!(matches!(r, Err(Error::ConstraintViolation { .. })));
    }

    #[test]
    fn psi_vanishes_at_prescribed_zeros() {
        let lat = generic();
        let zeros = vec![c(0.1, 0.2), c(-0.3, 0.05), c(0.45, -0.2)];
        let s = WavefunctionSpec::from_zeros(&lat, 3, zeros.clone()).unwrap();
        for w in zeros {
            assert_eq!(s.psi(w).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn boundary_condition_holds() {
        let lat = generic();
        let s = WavefunctionSpec::from_zeros(&lat, 3, vec![c(0.1, 0.2), c(-0.3, 0.05), c(0.45, -0.2)]).unwrap();
        for v in [LatticeVector::new(1, 0), LatticeVector::new(0, 1), LatticeVector::new(-2, 3)] {
            let r = boundary_residual(&s, c(0.17, -0.11), v).unwrap();
            assert!(r < 1e-9, "{v:?}: {r}");
        }
        assert_eq!(boundary_residual(&s, c(0.17, -0.11), LatticeVector::ZERO).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_spec_breaks_boundary_condition() {
        let lat = generic();
        let good = WavefunctionSpec::from_zeros(&lat, 2, vec![c(0.1, 0.2), c(-0.3, 0.05)]).unwrap();
        let bad =
            WavefunctionSpec::new_unchecked(&lat, 2, vec![c(0.2, 0.2), c(-0.3, 0.05)], good.boundary_k()).unwrap();
        let r = boundary_residual(&bad, c(0.17, -0.11), LatticeVector::new(1, 0)).unwrap();
        assert!(r > 0.1, "{r}");
    }

    #[test]
    fn zero_count_equals_flux() {
        let lat = generic();
        let s = WavefunctionSpec::from_zeros(&lat, 3, vec![c(0.1, 0.2), c(-0.3, 0.05), c(0.45, -0.2)]).unwrap();
        assert_eq!(zero_count(&s).unwrap(), 3);
    }

    #[test]
    fn filled_state_antisymmetry_and_coincidence() {
        let lat = generic();
        let s = WavefunctionSpec::from_zeros(&lat, 3, vec![c(0.1, 0.2), c(-0.3, 0.05), c(0.45, -0.2)]).unwrap();
        let cfg = ManyBodyConfig::new(vec![c(0.1, 0.1), c(-0.2, 0.3), c(0.35, -0.25)]);
        let a = filled_state_log(&s, &cfg).unwrap();
        let b = filled_state_log(&s, &cfg.swapped(0, 2)).unwrap();
        assert!(((b - a).exp() + 1.0).norm() < 1e-12);
        let same = ManyBodyConfig::new(vec![c(0.1, 0.1), c(0.1, 0.1), c(0.35, -0.25)]);
        assert!(filled_state_log(&s, &same).unwrap().is_zero());
        let wrong = ManyBodyConfig::new(vec![c(0.1, 0.1)]);
        assert!(matches!(filled_state_log(&s, &wrong), Err(Error::ParticleCountMismatch { .. })));
    }

    #[test]
    fn filled_state_single_coordinate_boundary() {
        let lat = generic();
        let s = WavefunctionSpec::from_zeros(&lat, 2, vec![c(0.1, 0.2), c(-0.3, 0.05)]).unwrap();
        let z = vec![c(0.1, 0.1), c(-0.2, 0.3)];
        let v = LatticeVector::new(1, 0);
        let moved = ManyBodyConfig::new(vec![z[0] + lat.point(v), z[1]]);
        let ratio =
            filled_state_log(&s, &moved).unwrap() - filled_state_log(&s, &ManyBodyConfig::new(z.clone())).unwrap();
        let predicted = s.boundary_factor(z[0], v).ln();
        let d = Complex64::new(ratio.re - predicted.re, crate::logval::wrap_phase(ratio.im - predicted.im));
        assert!(d.norm() < 1e-9, "{d}");
    }

    #[test]
    fn slater_one_orbital_is_the_wavefunction() {
        let lat = generic();
        let fam = slater_family(&lat, &[c(0.1, 0.2)]).unwrap();
        let cfg = ManyBodyConfig::new(vec![c(0.3, -0.1)]);
        let d = slater_determinant_log(&fam, &cfg).unwrap() - fam[0].psi_log(c(0.3, -0.1)).unwrap();
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn filled_state_matches_slater_up_to_constant() {
        let lat = generic();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = slater_family(&lat, &[c(0.1, 0.2), c(-0.3, 0.05)]).unwrap();
        check_independent(&fam, &mut rng).unwrap();
        let ratios: Vec<Complex64> = (0..20)
            .map(|_| {
                let cfg = ManyBodyConfig::random(&lat, 2, &mut rng);
                (filled_state_log(&fam[0], &cfg).unwrap() - slater_determinant_log(&fam, &cfg).unwrap()).exp()
            })
            .collect();
        let mean = ratios.iter().sum::<Complex64>() / 20.0;
        let sd = (ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / 20.0).sqrt();
        assert!(sd / mean.norm() < 1e-8, "{}", sd / mean.norm());
    }

    #[test]
    fn duplicated_orbitals_are_singular() {
        let lat = generic();
        let s = WavefunctionSpec::from_zeros(&lat, 2, vec![c(0.1, 0.2), c(-0.3, 0.05)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(check_independent(&[s.clone(), s], &mut rng), Err(Error::SingularBasis));
    }

    #[test]
    fn json_round_trip() {
        let lat = generic();
        let s = WavefunctionSpec::from_zeros(&lat, 2, vec![c(0.1, 0.2), c(-0.3, 0.05)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"nPhi\":2") && text.contains("\"K\":"));
        let back: WavefunctionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.zeros(), s.zeros());
        assert_eq!(back.boundary_k(), s.boundary_k());
    }
}
