//! Argument reduction and migration for σ̃.
//!
//! `σ̃(z_red + L) = ξ(L)·exp((πL*/A)(z_red + L/2))·σ̃(z_red)`, applied in one
//! step with the exponent accumulated in double-double arithmetic when it is
//! large. A stepwise walk through the basis vectors is kept for
//! cross-checking.

use crate::compensated::{product, DoubleDouble, PI_DD};
use crate::elliptic::SigmaEvaluator;
use crate::error::{Error, Result};
use crate::lattice::{lex_less, LatticeVector};
use crate::logval::LogComplex;
use num_complex::Complex64;

/// Exponent magnitude above which the migration exponent is accumulated in
/// double-double arithmetic.
pub const COMPENSATION_THRESHOLD: f64 = 1e3;

/// Distance, in units of |ω₁|, allowed between p·z and the lattice.
pub const COMMENSURATE_TOLERANCE: f64 = 1e-9;

/// `value(z) = parity · e^exponent · value(z_red)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationFactor {
    pub parity: i8,
    pub exponent: Complex64,
    pub steps: u64,
}

impl MigrationFactor {
    pub const IDENTITY: MigrationFactor =
        MigrationFactor { parity: 1, exponent: Complex64 { re: 0.0, im: 0.0 }, steps: 0 };

    pub fn apply(&self, value: LogComplex) -> LogComplex {
        value * LogComplex::from_sign(self.parity) * LogComplex::from_exponent(self.exponent)
    }
}

/// A reduced argument with the lattice translation and factor that undo it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Migration {
    pub z_red: Complex64,
    /// L in the lattice's own basis.
    pub vector: LatticeVector,
    /// L as a complex number (as subtracted from z).
    pub translation: Complex64,
    pub factor: MigrationFactor,
}

/// (πL*/A)(z_red + L/2), compensated when large.
fn exponent(l: Complex64, z_red: Complex64, area: f64) -> Complex64 {
    let plain = l.conj() * (z_red + l / 2.0) * (std::f64::consts::PI / area);
    if plain.norm() <= COMPENSATION_THRESHOLD {
        return plain;
    }
    let c = PI_DD.div_f64(area);
    // Re: Lr·zr + Li·zi + (Lr² + Li²)/2,  Im: Lr·zi − Li·zr
    let re = product(l.re, z_red.re)
        .plus(product(l.im, z_red.im))
        .plus(product(l.re, l.re).mul_f64(0.5))
        .plus(product(l.im, l.im).mul_f64(0.5));
    let im = product(l.re, z_red.im).plus(product(l.im, z_red.re).negate());
    Complex64::new(re.times(c).value(), im.times(c).value())
}

/// Reduces `z` into the Voronoi cell of the origin and returns the factor
/// with `σ̃(z) = parity·e^exponent·σ̃(z_red)`.
pub fn migrate_sigma(ev: &SigmaEvaluator, z: Complex64) -> Migration {
    let lat = ev.lattice();
    let (z_red, m, n) = lat.reduce_point_reduced(z);
    finish(ev, z_red, m, n)
}

fn finish(ev: &SigmaEvaluator, z_red: Complex64, m: i64, n: i64) -> Migration {
    let lat = ev.lattice();
    let vector = lat.reduced().to_original(m, n);
    if m == 0 && n == 0 {
        return Migration { z_red, vector, translation: Complex64::new(0.0, 0.0), factor: MigrationFactor::IDENTITY };
    }
    let l = lat.reduced().point(m, n);
    let factor = MigrationFactor { parity: vector.parity(), exponent: exponent(l, z_red, lat.area()), steps: 1 };
    Migration { z_red, vector, translation: l, factor }
}

/// The same migration as [`migrate_sigma`] but walking one basis vector at
/// a time, accumulating each step's exponent.
pub fn migrate_stepwise(ev: &SigmaEvaluator, z: Complex64) -> Migration {
    let lat = ev.lattice();
    let rb = lat.reduced();
    let area = lat.area();
    let (z_red, m, n) = lat.reduce_point_reduced(z);
    let c = PI_DD.div_f64(area);
    let mut re = DoubleDouble::default();
    let mut im = DoubleDouble::default();
    let mut parity = 1i8;
    let mut steps = 0u64;
    let (mut pm, mut pn) = (0i64, 0i64);
    let mut step = |dm: i64, dn: i64, pm: &mut i64, pn: &mut i64| {
        let w = z_red + rb.point(*pm, *pn);
        let s = rb.point(dm, dn);
        // (πs*/A)(w + s/2)
        re = re
            .plus(product(s.re, w.re))
            .plus(product(s.im, w.im))
            .plus(product(s.re, s.re).mul_f64(0.5))
            .plus(product(s.im, s.im).mul_f64(0.5));
        im = im.plus(product(s.re, w.im)).plus(product(s.im, w.re).negate());
        parity = -parity;
        steps += 1;
        *pm += dm;
        *pn += dn;
    };
    for _ in 0..m.abs() {
        step(m.signum(), 0, &mut pm, &mut pn);
    }
    for _ in 0..n.abs() {
        step(0, n.signum(), &mut pm, &mut pn);
    }
    let vector = rb.to_original(m, n);
    let translation = rb.point(m, n);
    let exponent = Complex64::new(re.times(c).value(), im.times(c).value());
    Migration { z_red, vector, translation, factor: MigrationFactor { parity, exponent, steps } }
}

/// Migration for a point known to satisfy `p·z ∈ Λ`. The reduced argument
/// is rebuilt from the integer lattice coordinates of `p·z`, so it carries
/// no rounding from the subtraction `z − L`.
pub fn migrate_with_known_order(ev: &SigmaEvaluator, z: Complex64, p: u32) -> Result<Migration> {
    if p == 0 {
        return Err(Error::InvalidArgument("order p must be >= 1".into()));
    }
    let lat = ev.lattice();
    let rb = lat.reduced();
    let pz = z * p as f64;
    let (alpha, beta) = rb.coordinates(pz);
    let (big_m, big_n) = (alpha.round() as i64, beta.round() as i64);
    let distance = (pz - rb.point(big_m, big_n)).norm();
    if distance > COMMENSURATE_TOLERANCE * rb.omega1.norm() {
        return Err(Error::NotCommensurate { p, distance });
    }
    let pi = p as i64;
    let red = |m: i64, n: i64| rb.point(big_m - pi * m, big_n - pi * n) / p as f64;
    let (m0, n0) = ((big_m as f64 / p as f64).round() as i64, (big_n as f64 / p as f64).round() as i64);
    let tol = 1e-13 * rb.omega1.norm_sqr();
    let mut best = (red(m0, n0), m0, n0);
    for dm in -2..=2 {
        for dn in -2..=2 {
            let (m, n) = (m0 + dm, n0 + dn);
            let cand = red(m, n);
            let (dc, db) = (cand.norm_sqr(), best.0.norm_sqr());
            if dc < db - tol || ((dc - db).abs() <= tol && lex_less(cand, best.0)) {
                best = (cand, m, n);
            }
        }
    }
    Ok(finish(ev, best.0, best.1, best.2))
}
