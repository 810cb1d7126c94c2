//! Zeros of the periodic completion ζ̂(z, z*) = ζ̃(z) − πz*/A.
//!
//! ζ̂ is odd and doubly periodic, so it vanishes at every half period. Its
//! Wirtinger derivatives are ∂ζ̂/∂z = −℘̃(z) and ∂ζ̂/∂z* = −π/A, so a zero is
//! of holomorphic type (index +1) where |℘̃| > π/A and antiholomorphic
//! (index −1) where |℘̃| < π/A.

use crate::elliptic::SigmaEvaluator;
use crate::error::{Error, Result};
use crate::lattice::lex_less;
use crate::logval::wrap_phase;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const NEWTON_CAP: usize = 50;
/// Dedup radius, in units of |ω₁|.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Accepted |ζ̂|·|ω₁| at a converged zero.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// |ζ̂| below which a contour sample is treated as hitting a zero.
pub const CONTOUR_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKind {
    Holomorphic,
    Antiholomorphic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZeroRecord {
    /// Representative in the Voronoi cell of the origin.
    pub position: Complex64,
    pub winding: i64,
    pub kind: ZeroKind,
    pub residual_norm: f64,
    /// Number of simple zeros merged into this record (1 unless zeros
    /// collided within the dedup radius).
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Census {
    pub n_holo: usize,
    pub n_anti: usize,
    /// Σ windings of zeros plus −1 for the pole.
    pub winding_sum: i64,
}

impl Census {
    pub fn of(zeros: &[ZeroRecord]) -> Census {
        let n_holo = zeros.iter().filter(|z| z.kind == ZeroKind::Holomorphic).count();
        let n_anti = zeros.len() - n_holo;
        let winding_sum = zeros.iter().map(|z| z.winding).sum::<i64>() - 1;
        Census { n_holo, n_anti, winding_sum }
    }
}

/// Damped Newton on Re ζ̂ = Im ζ̂ = 0. Returns the converged point reduced
/// into the Voronoi cell, or `None` if the seed wandered into a pole or
/// failed to converge.
fn newton(ev: &SigmaEvaluator, seed: Complex64) -> Option<(Complex64, f64)> {
    let lat = ev.lattice();
    let scale = lat.reduced().omega1.norm();
    let b = -PI / lat.area();
    let mut z = seed;
    let mut f = ev.completion(z).ok()?;
    for _ in 0..NEWTON_CAP {
        if f.norm() * scale < 1e-15 {
            break;
        }
        let a = -ev.wp(z).ok()?;
        let det = a.norm_sqr() - b * b;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let delta = (-f * a.conj() + b * f.conj()) / det;
        let mut step = 1.0;
        let (z_new, f_new) = loop {
            let cand = z + delta * step;
            match ev.completion(cand) {
                Ok(fc) if fc.norm() <= f.norm() || step < 1e-3 => break (cand, fc),
                Ok(_) | Err(Error::PoleAt { .. }) => step *= 0.5,
                Err(_) => return None,
            }
            if step < 1e-3 {
                return None;
            }
        };
        z = lat.reduce_point(z_new).0;
        f = f_new;
        if (delta * step).norm() < 1e-15 * scale {
            break;
        }
    }
    let residual = f.norm();
    (residual * scale < RESIDUAL_TOLERANCE).then_some((z, residual))
}

/// Distance between `a` and `b` modulo the lattice.
pub fn distance_mod_lattice(ev: &SigmaEvaluator, a: Complex64, b: Complex64) -> f64 {
    ev.lattice().reduce_point(a - b).0.norm()
}

/// Index from the Jacobian sign |℘̃|² − (π/A)², or `None` when it is too
/// close to zero to trust.
fn jacobian_index(ev: &SigmaEvaluator, z: Complex64) -> Result<Option<i64>> {
    let a = ev.wp(z)?.norm();
    let b = PI / ev.lattice().area();
    Ok(((a - b).abs() > 1e-8 * b).then_some(if a > b { 1 } else { -1 }))
}

/// Winding around `z`, starting at `radius` and widening tenfold while the
/// circle grazes a zero, up to `limit`.
fn index_near(ev: &SigmaEvaluator, z: Complex64, radius: f64, limit: f64) -> Result<i64> {
    let mut r = radius;
    loop {
        match winding_number(ev, z, r, 512) {
            Err(Error::OnContour { .. }) if 10.0 * r <= limit => r *= 10.0,
            other => return other,
        }
    }
}

fn kind_of(winding: i64) -> ZeroKind {
    if winding > 0 {
        ZeroKind::Holomorphic
    } else {
        ZeroKind::Antiholomorphic
    }
}

/// Locates the zeros of ζ̂ in one primitive cell by Newton iteration from a
/// `grid_n × grid_n` grid of seeds.
pub fn find_completion_zeros(ev: &SigmaEvaluator, grid_n: usize) -> Result<Vec<ZeroRecord>> {
    if grid_n < 16 {
        return Err(Error::InvalidArgument(format!("grid_n must be >= 16, got {grid_n}")));
    }
    let lat = ev.lattice();
    let rb = lat.reduced();
    let scale = rb.omega1.norm();
    let (e1, e2) = (2.0 * rb.omega1, 2.0 * rb.omega2);
    let seeds: Vec<Complex64> = (0..grid_n * grid_n)
        .map(|k| {
            let (i, j) = (k / grid_n, k % grid_n);
            let s = (i as f64 + 0.5) / grid_n as f64 - 0.5;
            let t = (j as f64 + 0.5) / grid_n as f64 - 0.5;
            s * e1 + t * e2
        })
        .collect();
    let roots: Vec<(Complex64, f64)> = seeds.par_iter().filter_map(|&s| newton(ev, s)).collect();

    // clusters of roots that coincide mod Λ; members closer than this are
    // the same simple zero
    let same = 1e-10 * scale;
    let mut clusters: Vec<Vec<(Complex64, f64)>> = Vec::new();
    for (z, r) in roots {
        match clusters.iter_mut().find(|c| distance_mod_lattice(ev, c[0].0, z) < DEDUP_RADIUS * scale) {
            Some(c) => {
                if c.iter().all(|m| distance_mod_lattice(ev, m.0, z) > same) {
                    c.push((z, r));
                }
            }
            None => clusters.push(vec![(z, r)]),
        }
    }

    let best: Vec<(Complex64, f64)> = clusters
        .iter()
        .map(|c| {
            c.iter()
                .copied()
                .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_order(a.0, b.0)))
                .expect("clusters are non-empty")
        })
        .collect();
    let mut out = Vec::with_capacity(clusters.len());
    for (k, c) in clusters.iter().enumerate() {
        let (position, residual_norm) = best[k];
        // room for a contour that encloses this cluster alone
        let limit = best
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, o)| 0.5 * distance_mod_lattice(ev, o.0, position))
            .fold(0.1 * scale, f64::min);
        let jacobian = jacobian_index(ev, position)?;
        let (winding, multiplicity) = match (c.len(), jacobian) {
            (1, Some(j)) => (j, 1),
            (1, None) => (index_near(ev, position, 1e-4 * scale, limit)?, 1),
            (n, _) => {
                let w = index_near(ev, position, 10.0 * DEDUP_RADIUS * scale, limit)?;
                // scattered Newton endpoints of one simple zero
                if jacobian == Some(w) {
                    (w, 1)
                } else {
                    (w, n as u32)
                }
            }
        };
        out.push(ZeroRecord { position, winding, kind: kind_of(winding), residual_norm, multiplicity });
    }
    out.sort_by(|a, b| {
        (a.kind == ZeroKind::Antiholomorphic)
            .cmp(&(b.kind == ZeroKind::Antiholomorphic))
            .then_with(|| lex_order(a.position, b.position))
    });

    let census = Census::of(&out);
    if census.winding_sum != 0 {
        return Err(Error::IncompleteCensus {
            winding_sum: census.winding_sum,
            holomorphic: census.n_holo,
            antiholomorphic: census.n_anti,
        });
    }
    Ok(out)
}

fn lex_order(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    if lex_less(a, b) {
        std::cmp::Ordering::Less
    } else if lex_less(b, a) {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Winding of `arg f` along the closed polygon through `vertices`,
/// bisecting any step whose phase jump exceeds π/4.
pub fn contour_winding<F>(arg: F, vertices: &[Complex64], samples_per_edge: usize) -> Result<i64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let n = vertices.len();
    if n < 2 || samples_per_edge == 0 {
        return Err(Error::InvalidArgument("contour needs at least two vertices".into()));
    }
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = (vertices[k], vertices[(k + 1) % n]);
        let mut prev_z = a;
        let mut prev = arg(a)?;
        for s in 1..=samples_per_edge {
            let z = a + (b - a) * (s as f64 / samples_per_edge as f64);
            let cur = arg(z)?;
            total += refine(&arg, prev_z, prev, z, cur, 0)?;
            prev_z = z;
            prev = cur;
        }
    }
    let w = total / (2.0 * PI);
    let rounded = w.round();
    if (w - rounded).abs() > 1e-6 {
        return Err(Error::ConvergenceFailure { what: "contour winding", terms: samples_per_edge });
    }
    Ok(rounded as i64)
}

fn refine<F>(arg: &F, za: Complex64, pa: f64, zb: Complex64, pb: f64, depth: u32) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let d = wrap_phase(pb - pa);
    if d.abs() <= PI / 4.0 {
        return Ok(d);
    }
    if depth >= 40 {
        return Err(Error::ConvergenceFailure { what: "contour refinement", terms: depth as usize });
    }
    let zm = (za + zb) / 2.0;
    let pm = arg(zm)?;
    Ok(refine(arg, za, pa, zm, pm, depth + 1)? + refine(arg, zm, pm, zb, pb, depth + 1)?)
}

fn completion_arg(ev: &SigmaEvaluator, z: Complex64) -> Result<f64> {
    match ev.completion(z) {
        Ok(v) if v.norm() < CONTOUR_FLOOR => Err(Error::OnContour { z }),
        Ok(v) => Ok(v.arg()),
        Err(Error::PoleAt { .. }) => Err(Error::OnContour { z }),
        Err(e) => Err(e),
    }
}

/// Winding number of ζ̂ around the circle |z − center| = radius,
/// counter-clockwise.
pub fn winding_number(ev: &SigmaEvaluator, center: Complex64, radius: f64, samples: usize) -> Result<i64> {
    if samples < 64 {
        return Err(Error::InvalidArgument(format!("samples must be >= 64, got {samples}")));
    }
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let pts: Vec<Complex64> =
        (0..samples).map(|k| center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / samples as f64)).collect();
    contour_winding(|z| completion_arg(ev, z), &pts, 1)
}

/// Corners of the parallelogram cell `origin + s·2ω₁ + t·2ω₂` of the
/// reduced basis, counter-clockwise.
pub fn cell_corners(ev: &SigmaEvaluator, origin: Complex64) -> [Complex64; 4] {
    let rb = ev.lattice().reduced();
    let (e1, e2) = (2.0 * rb.omega1, 2.0 * rb.omega2);
    if (e2 / e1).im > 0.0 {
        [origin, origin + e1, origin + e1 + e2, origin + e2]
    } else {
        [origin, origin + e2, origin + e1 + e2, origin + e1]
    }
}

/// Winding of ζ̂ around the boundary of a whole cell; zero by periodicity.
pub fn cell_winding(ev: &SigmaEvaluator, origin: Complex64, samples_per_edge: usize) -> Result<i64> {
    contour_winding(|z| completion_arg(ev, z), &cell_corners(ev, origin), samples_per_edge)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VoronoiMatch {
    pub zero: Complex64,
    pub vertex: Complex64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VoronoiReport {
    pub vertices: Vec<Complex64>,
    pub matches: Vec<VoronoiMatch>,
    pub max_discrepancy: f64,
}

/// Distance from each antiholomorphic zero to its nearest Voronoi vertex,
/// modulo the lattice.
pub fn voronoi_comparison(ev: &SigmaEvaluator) -> Result<VoronoiReport> {
    let zeros = find_completion_zeros(ev, 24)?;
    let vertices = ev.lattice().voronoi_vertices();
    let mut matches = Vec::new();
    for z in zeros.iter().filter(|z| z.kind == ZeroKind::Antiholomorphic) {
        let (vertex, distance) = vertices
            .iter()
            .map(|&v| (v, distance_mod_lattice(ev, z.position, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("a Voronoi cell has vertices");
        matches.push(VoronoiMatch { zero: z.position, vertex, distance });
    }
    let max_discrepancy = matches.iter().map(|m| m.distance).fold(0.0, f64::max);
    Ok(VoronoiReport { vertices, matches, max_discrepancy })
}
