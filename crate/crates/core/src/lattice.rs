//! Complex lattices Λ = {2mω₁ + 2nω₂} described by a half-period basis.

use crate::error::{Error, Result};
use crate::invariants;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lattice vector `L = 2mω₁ + 2nω₂` in the coordinates of a particular basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LatticeVector {
    pub m: i64,
    pub n: i64,
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { m: 0, n: 0 };

    pub fn new(m: i64, n: i64) -> Self {
        LatticeVector { m, n }
    }

    /// ξ(L): +1 when L/2 is itself a lattice vector, −1 otherwise.
    pub fn parity(&self) -> i8 {
        if self.m % 2 == 0 && self.n % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0 && self.n == 0
    }
}

impl std::ops::Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        LatticeVector { m: self.m + rhs.m, n: self.n + rhs.n }
    }
}

/// Selects ω₁, ω₂ or ω₃ = −(ω₁ + ω₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfPeriodIndex {
    One,
    Two,
    Three,
}

impl HalfPeriodIndex {
    pub const ALL: [HalfPeriodIndex; 3] = [HalfPeriodIndex::One, HalfPeriodIndex::Two, HalfPeriodIndex::Three];

    pub fn from_number(i: u8) -> Option<Self> {
        match i {
            1 => Some(HalfPeriodIndex::One),
            2 => Some(HalfPeriodIndex::Two),
            3 => Some(HalfPeriodIndex::Three),
            _ => None,
        }
    }

    pub fn number(&self) -> u8 {
        match self {
            HalfPeriodIndex::One => 1,
            HalfPeriodIndex::Two => 2,
            HalfPeriodIndex::Three => 3,
        }
    }
}

/// A reduced basis together with the integer matrix expressing it in the
/// lattice's own basis: `reduced[i] = t[i][0]·ω₁ + t[i][1]·ω₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBasis {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub transform: [[i64; 2]; 2],
}

impl ReducedBasis {
    pub fn omega3(&self) -> Complex64 {
        -(self.omega1 + self.omega2)
    }

    pub fn tau(&self) -> Complex64 {
        self.omega2 / self.omega1
    }

    /// Maps reduced-basis coordinates to the original basis.
    pub fn to_original(&self, m: i64, n: i64) -> LatticeVector {
        let t = &self.transform;
        LatticeVector { m: m * t[0][0] + n * t[1][0], n: m * t[0][1] + n * t[1][1] }
    }

    pub fn point(&self, m: i64, n: i64) -> Complex64 {
        2.0 * (m as f64 * self.omega1 + n as f64 * self.omega2)
    }

    /// Real coordinates (α, β) with z = 2αω₁ + 2βω₂.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        lattice_coordinates(self.omega1, self.omega2, z)
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    omega1: Complex64,
    omega2: Complex64,
}

/// A complex Bravais lattice with a chosen half-period basis. Immutable once
/// built; area, τ, orientation, a reduced basis and the invariants γ₂, γ₄, γ₆
/// are computed up front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct Lattice {
    omega1: Complex64,
    omega2: Complex64,
    area: f64,
    tau: Complex64,
    orientation: i8,
    reduced: ReducedBasis,
    gamma2: Complex64,
    gamma4: Complex64,
    gamma6: Complex64,
}

impl TryFrom<LatticeJson> for Lattice {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<Lattice> {
        Lattice::from_basis(j.omega1, j.omega2)
    }
}

impl From<Lattice> for LatticeJson {
    fn from(l: Lattice) -> LatticeJson {
        LatticeJson { omega1: l.omega1, omega2: l.omega2 }
    }
}

impl Lattice {
    /// Builds the lattice generated by `2ω₁` and `2ω₂`. Either orientation is
    /// accepted.
    pub fn from_basis(omega1: Complex64, omega2: Complex64) -> Result<Lattice> {
        let degenerate = Error::DegenerateBasis { omega1, omega2 };
        let finite = |w: Complex64| w.re.is_finite() && w.im.is_finite();
        if !finite(omega1) || !finite(omega2) || omega1.norm() == 0.0 || omega2.norm() == 0.0 {
            return Err(degenerate);
        }
        let cross = (omega1.conj() * omega2).im;
        if cross.abs() <= 1e-14 * omega1.norm() * omega2.norm() {
            return Err(degenerate);
        }
        let area = 4.0 * cross.abs();
        let tau = omega2 / omega1;
        let orientation = if tau.im > 0.0 { 1 } else { -1 };
        let reduced = gauss_reduce(omega1, omega2);
        let gamma2 = invariants::eisenstein_gamma2(reduced.omega1, reduced.omega2, area, invariants::GAMMA2_TERM_CAP)?;
        let gamma4 = invariants::gamma2k_reduced(&reduced, 2)?;
        let gamma6 = invariants::gamma2k_reduced(&reduced, 3)?;
        Ok(Lattice { omega1, omega2, area, tau, orientation, reduced, gamma2, gamma4, gamma6 })
    }

    /// Square lattice with `2ω₁ = side`, `2ω₂ = i·side`.
    pub fn square(side: f64) -> Lattice {
        Lattice::from_basis(Complex64::new(side / 2.0, 0.0), Complex64::new(0.0, side / 2.0))
            .expect("square basis is non-degenerate")
    }

    /// Hexagonal lattice with `2ω₁ = side` and `ω₂ = ω₁·e^{iπ/3}`.
    pub fn hexagonal(side: f64) -> Lattice {
        let w1 = Complex64::new(side / 2.0, 0.0);
        Lattice::from_basis(w1, w1 * Complex64::from_polar(1.0, PI / 3.0)).expect("hexagonal basis is non-degenerate")
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn omega3(&self) -> Complex64 {
        -(self.omega1 + self.omega2)
    }

    pub fn half_period(&self, i: HalfPeriodIndex) -> Complex64 {
        match i {
            HalfPeriodIndex::One => self.omega1,
            HalfPeriodIndex::Two => self.omega2,
            HalfPeriodIndex::Three => self.omega3(),
        }
    }

    /// Primitive cell area `A = 2|ω₁*ω₂ − ω₂*ω₁|`.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// Sign of Im τ.
    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn reduced(&self) -> &ReducedBasis {
        &self.reduced
    }

    /// γ₂(Λ), the basis-independent remainder of the Eisenstein-summed
    /// weight-2 series.
    pub fn gamma2(&self) -> Complex64 {
        self.gamma2
    }

    pub fn gamma4(&self) -> Complex64 {
        self.gamma4
    }

    pub fn gamma6(&self) -> Complex64 {
        self.gamma6
    }

    /// γ₂ₖ(Λ) = Σ' L^(−2k) for k ≥ 2.
    pub fn gamma2k(&self, k: u32) -> Result<Complex64> {
        match k {
            2 => Ok(self.gamma4),
            3 => Ok(self.gamma6),
            _ => invariants::gamma2k_reduced(&self.reduced, k),
        }
    }

    /// Γ₂(ω₁, Λ) evaluated in this lattice's own basis (basis-dependent).
    pub fn eisenstein_gamma2_sum(&self) -> Result<Complex64> {
        invariants::eisenstein_big_gamma2(self.omega1, self.omega2, invariants::GAMMA2_TERM_CAP)
    }

    /// γ₂ recomputed in this lattice's own basis rather than the reduced one.
    pub fn gamma2_in_basis(&self) -> Result<Complex64> {
        invariants::eisenstein_gamma2(self.omega1, self.omega2, self.area, invariants::GAMMA2_TERM_CAP)
    }

    /// η̃ᵢ = πωᵢ*/A.
    pub fn eta_modified(&self, i: HalfPeriodIndex) -> Complex64 {
        PI * self.half_period(i).conj() / self.area
    }

    /// ηᵢ = ζ(ωᵢ) = γ₂ωᵢ + πωᵢ*/A.
    pub fn eta_original(&self, i: HalfPeriodIndex) -> Complex64 {
        self.gamma2 * self.half_period(i) + self.eta_modified(i)
    }

    /// `L = 2mω₁ + 2nω₂`.
    pub fn point(&self, v: LatticeVector) -> Complex64 {
        2.0 * (v.m as f64 * self.omega1 + v.n as f64 * self.omega2)
    }

    /// Changes basis to `ω₁' = aω₁ + bω₂`, `ω₂' = cω₁ + dω₂`.
    pub fn modular_transform(&self, a: i64, b: i64, c: i64, d: i64) -> Result<Lattice> {
        let det = a * d - b * c;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        let w1 = a as f64 * self.omega1 + b as f64 * self.omega2;
        let w2 = c as f64 * self.omega1 + d as f64 * self.omega2;
        Lattice::from_basis(w1, w2)
    }

    /// The same lattice expressed in its reduced basis.
    pub fn reduce_basis(&self) -> Lattice {
        let mut lat = Lattice::from_basis(self.reduced.omega1, self.reduced.omega2)
            .expect("reduced basis of a valid lattice is valid");
        // keep invariants bit-identical to the source lattice
        lat.gamma2 = self.gamma2;
        lat.gamma4 = self.gamma4;
        lat.gamma6 = self.gamma6;
        lat
    }

    /// Splits `z = z_red + L` with `z_red` in the Voronoi cell of the origin.
    /// The vector is given in this lattice's own basis.
    pub fn reduce_point(&self, z: Complex64) -> (Complex64, LatticeVector) {
        let (z_red, m, n) = self.reduce_point_reduced(z);
        (z_red, self.reduced.to_original(m, n))
    }

    /// As [`Lattice::reduce_point`] but returning reduced-basis coordinates.
    pub(crate) fn reduce_point_reduced(&self, z: Complex64) -> (Complex64, i64, i64) {
        let rb = &self.reduced;
        let (alpha, beta) = rb.coordinates(z);
        let (m0, n0) = (alpha.round() as i64, beta.round() as i64);
        let tol = 1e-13 * rb.omega1.norm_sqr().max(z.norm_sqr() * 1e-3);
        let mut best: Option<(Complex64, i64, i64)> = None;
        for dm in -2..=2 {
            for dn in -2..=2 {
                let (m, n) = (m0 + dm, n0 + dn);
                let cand = z - rb.point(m, n);
                let better = match best {
                    None => true,
                    Some((b, _, _)) => {
                        let (dc, db) = (cand.norm_sqr(), b.norm_sqr());
                        dc < db - tol || ((dc - db).abs() <= tol && lex_less(cand, b))
                    }
                };
                if better {
                    best = Some((cand, m, n));
                }
            }
        }
        best.expect("candidate set is non-empty")
    }

    /// Vertices of the Voronoi cell of the origin, counter-clockwise.
    pub fn voronoi_vertices(&self) -> Vec<Complex64> {
        let rb = &self.reduced;
        let mut relevant: Vec<Complex64> =
            [rb.omega1, rb.omega2, rb.omega3()].iter().flat_map(|w| [2.0 * w, -2.0 * w]).collect();
        relevant.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        let mut out: Vec<Complex64> = Vec::with_capacity(6);
        for k in 0..relevant.len() {
            let v = circumcenter(relevant[k], relevant[(k + 1) % relevant.len()]);
            if !out.iter().any(|w| (w - v).norm() < 1e-12 * rb.omega1.norm()) {
                out.push(v);
            }
        }
        out
    }

    #[doc(hidden)]
    pub fn with_gamma2_offset(&self, delta: Complex64) -> Lattice {
        let mut lat = self.clone();
        lat.gamma2 += delta;
        lat
    }
}

pub(crate) fn lex_less(a: Complex64, b: Complex64) -> bool {
    a.re < b.re || (a.re == b.re && a.im < b.im)
}

/// Circumcenter of the triangle (0, a, b).
fn circumcenter(a: Complex64, b: Complex64) -> Complex64 {
    let d = 2.0 * (a.conj() * b).im;
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    let i = Complex64::i();
    // solves |c|² = |c − a|² = |c − b|²
    -i * (na * b - nb * a) / d
}

/// Real coordinates (α, β) of z in the basis (2ω₁, 2ω₂).
pub fn lattice_coordinates(omega1: Complex64, omega2: Complex64, z: Complex64) -> (f64, f64) {
    let alpha = (omega2.conj() * z).im / (2.0 * (omega2.conj() * omega1).im);
    let beta = (omega1.conj() * z).im / (2.0 * (omega1.conj() * omega2).im);
    (alpha, beta)
}

/// Gauss pair reduction followed by an obtuse-superbase fix so that
/// |ω₁| ≤ |ω₂| ≤ |ω₃| with ±ω₁, ±ω₂, ±ω₃ on the Voronoi boundary.
fn gauss_reduce(w1: Complex64, w2: Complex64) -> ReducedBasis {
    let mut t = [[1i64, 0], [0, 1]];
    let basis = |t: &[[i64; 2]; 2], i: usize| t[i][0] as f64 * w1 + t[i][1] as f64 * w2;
    for _ in 0..10_000 {
        let (a, b) = (basis(&t, 0), basis(&t, 1));
        if b.norm_sqr() < a.norm_sqr() {
            t.swap(0, 1);
            continue;
        }
        let mu = (b * a.conj()).re / a.norm_sqr();
        if mu.abs() <= 0.5 * (1.0 + 1e-12) {
            break;
        }
        let k = mu.round() as i64;
        t[1][0] -= k * t[0][0];
        t[1][1] -= k * t[0][1];
    }
    let (a, b) = (basis(&t, 0), basis(&t, 1));
    if (b * a.conj()).re > 0.0 {
        t[1] = [-t[1][0], -t[1][1]];
    }
    ReducedBasis { omega1: basis(&t, 0), omega2: basis(&t, 1), transform: t }
}
