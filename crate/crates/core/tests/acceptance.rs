//! Acceptance gate. Runs the twelve criteria at their stated tolerances,
//! prints one line per criterion and exits non-zero if any fails.

use modsigma::analysis::{distance_mod_lattice, find_completion_zeros, voronoi_comparison, Census, ZeroKind};
use modsigma::lll::{
    boundary_residual, check_independent, filled_state_log, slater_determinant_log, slater_family, zero_count,
    ManyBodyConfig, WavefunctionSpec,
};
use modsigma::logval::wrap_phase;
use modsigma::oracle::zeta_lattice_sum;
use modsigma::reduce::{migrate_sigma, migrate_stepwise};
use modsigma::selftest::{point_off_poles, random_lattice, random_unimodular};
use modsigma::{Complex64, HalfPeriodIndex, Lattice, LatticeVector, LogComplex, SigmaEvaluator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn max_below(name: &str, worst: f64, tol: f64) -> Outcome {
        Outcome { pass: worst < tol, detail: format!("{name} max {worst:.3e} < {tol:.0e}") }
    }

    fn and(self, other: Outcome) -> Outcome {
        Outcome { pass: self.pass && other.pass, detail: format!("{}; {}", self.detail, other.detail) }
    }

    fn error(e: modsigma::Error) -> Outcome {
        Outcome { pass: false, detail: format!("error: {e}") }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn generic() -> Lattice {
    Lattice::from_basis(c(0.5, 0.0), c(0.3, 0.55)).unwrap()
}

/// The 100-lattice set shared by criteria 1, 2, 6 and 7.
fn lattice_set() -> Vec<Lattice> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..100).map(|_| random_lattice(&mut rng)).collect()
}

fn cell_point<R: Rng>(lat: &Lattice, frac: f64, rng: &mut R) -> Complex64 {
    let rb = lat.reduced();
    rng.gen_range(-frac..frac) * rb.omega1 + rng.gen_range(-frac..frac) * rb.omega2
}

fn log_gap(a: LogComplex, b: LogComplex) -> f64 {
    c(a.log_abs - b.log_abs, wrap_phase(a.phase - b.phase)).norm()
}

type Run = modsigma::Result<Outcome>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Run + 'a>);

fn legendre(set: &[Lattice]) -> Run {
    let worst = set
        .iter()
        .map(|lat| {
            let e1 = lat.eta_modified(HalfPeriodIndex::One);
            let e2 = lat.eta_modified(HalfPeriodIndex::Two);
            let s = lat.orientation() as f64;
            (e1 * lat.omega2() - e2 * lat.omega1() - c(0.0, s * PI / 2.0)).norm()
        })
        .fold(0.0, f64::max);
    Ok(Outcome::max_below("|η̃₁ω₂ − η̃₂ω₁ − s·iπ/2|", worst, 1e-12))
}

fn eta_formula(set: &[Lattice]) -> Run {
    let mut worst: f64 = 0.0;
    for lat in set {
        let ev = SigmaEvaluator::new(lat)?;
        for i in HalfPeriodIndex::ALL {
            let w = lat.half_period(i);
            worst = worst.max((ev.zeta(w)? - PI * w.conj() / lat.area()).norm());
        }
    }
    Ok(Outcome::max_below("|ζ̃(ωᵢ) − πωᵢ*/A|", worst, 1e-11))
}

fn degeneracy() -> Run {
    let square = Lattice::square(1.0);
    let hex = Lattice::hexagonal(1.0);
    let worst =
        [square.gamma2(), hex.gamma2(), hex.gamma4(), square.gamma6()].iter().map(|g| g.norm()).fold(0.0, f64::max);
    Ok(Outcome::max_below("|γ₂| sq/hex, |γ₄| hex, |γ₆| sq", worst, 1e-12))
}

fn oracle_equivalence() -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        // unit area, |τ| ∈ [1, 2]
        let tau = Complex64::from_polar(rng.gen_range(1.0..2.0), rng.gen_range(0.3 * PI..0.7 * PI));
        let w1 = Complex64::from_polar(1.0, rng.gen_range(-PI..PI));
        let raw = Lattice::from_basis(w1, w1 * tau)?;
        let scale = (1.0 / raw.area()).sqrt();
        let lat = Lattice::from_basis(w1 * scale, w1 * tau * scale)?;
        let ev = SigmaEvaluator::new(&lat)?;
        let r_max = 0.5 * lat.reduced().omega1.norm();
        for _ in 0..20 {
            let z = Complex64::from_polar(r_max * rng.gen_range(0.05f64..1.0).sqrt(), rng.gen_range(-PI..PI));
            let ours = ev.zeta(z)? + lat.gamma2() * z;
            let oracle = zeta_lattice_sum(&lat, z, 400)?;
            worst = worst.max((ours - oracle).norm());
        }
    }
    Ok(Outcome::max_below("|ζ̃ + γ₂z − lattice sum(400)|", worst, 1e-7))
}

fn modular_invariance(set: &[Lattice]) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst: f64 = 0.0;
    for lat in set.iter().take(10) {
        let ev = SigmaEvaluator::new(lat)?;
        for _ in 0..5 {
            let (a, b, cc, d) = random_unimodular(&mut rng);
            let other = SigmaEvaluator::new(&lat.modular_transform(a, b, cc, d)?)?;
            for _ in 0..50 {
                let z = cell_point(lat, 1.5, &mut rng);
                if distance_mod_lattice(&ev, z, c(0.0, 0.0)) < 1e-3 * lat.reduced().omega1.norm() {
                    continue;
                }
                let rel = |x: Complex64, y: Complex64| (x - y).norm() / x.norm();
                worst = worst.max(log_gap(ev.sigma_log(z)?, other.sigma_log(z)?));
                worst = worst.max(rel(ev.zeta(z)?, other.zeta(z)?));
                worst = worst.max(rel(ev.wp(z)?, other.wp(z)?));
            }
        }
    }
    Ok(Outcome::max_below("relative σ̃/ζ̃/℘̃ across bases", worst, 1e-10))
}

fn quasiperiodicity(set: &[Lattice]) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let (mut cocycle, mut even): (f64, f64) = (0.0, 0.0);
    for lat in set {
        let ev = SigmaEvaluator::new(lat)?;
        let z = cell_point(lat, 0.5, &mut rng);
        let base = ev.sigma_log(z)?;
        for m in -3..=3 {
            for n in -3..=3 {
                let v = LatticeVector::new(m, n);
                let l = lat.point(v);
                let factor = LogComplex::from_sign(v.parity())
                    * LogComplex::from_exponent(PI * l.conj() / lat.area() * (z + l / 2.0));
                cocycle = cocycle.max(log_gap(ev.sigma_log(z + l)?, base * factor));
            }
        }
        for i in HalfPeriodIndex::ALL {
            let si = ev.sigma_symmetric_log(i, z)?;
            for l in [2.0 * lat.omega1(), 2.0 * lat.omega2(), 2.0 * lat.omega3()] {
                let predicted = si * LogComplex::from_exponent(2.0 * PI * l.conj() / lat.area() * (z + l));
                even = even.max(log_gap(ev.sigma_symmetric_log(i, z + 2.0 * l)?, predicted));
            }
        }
    }
    Ok(Outcome::max_below("σ̃ cocycle", cocycle, 1e-11).and(Outcome::max_below("σ̃ᵢ even translation", even, 1e-10)))
}

fn derivative_chain(set: &[Lattice]) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for lat in set {
        let ev = SigmaEvaluator::new(lat)?;
        let z = point_off_poles(lat, &mut rng);
        let zeta = ev.zeta(z)?;
        let wp = ev.wp(z)?;
        let dlog = (ev.sigma_log(z + h)? - ev.sigma_log(z - h)?) / (2.0 * h);
        let dzeta = (ev.zeta(z + h)? - ev.zeta(z - h)?) / (2.0 * h);
        worst = worst.max((dlog - zeta).norm() / zeta.norm()).max((dzeta + wp).norm() / wp.norm());
    }
    Ok(Outcome::max_below("relative d log σ̃ − ζ̃, dζ̃ + ℘̃", worst, 1e-6))
}

fn zero_census() -> Run {
    let lat = generic();
    let ev = SigmaEvaluator::new(&lat)?;
    let zeros = find_completion_zeros(&ev, 32)?;
    let census = Census::of(&zeros);
    let counts = census.n_holo == 3 && census.n_anti == 2 && census.winding_sum == 0;
    let holo_worst = HalfPeriodIndex::ALL
        .iter()
        .map(|&i| {
            zeros
                .iter()
                .filter(|z| z.kind == ZeroKind::Holomorphic)
                .map(|z| distance_mod_lattice(&ev, z.position, lat.half_period(i)))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);

    let square = Lattice::square(1.0);
    let sq_ev = SigmaEvaluator::new(&square)?;
    let sq_zeros = find_completion_zeros(&sq_ev, 32)?;
    let corner = square.omega3();
    let anti: Vec<_> = sq_zeros.iter().filter(|z| z.kind == ZeroKind::Antiholomorphic).collect();
    let corner_worst = anti.iter().map(|z| distance_mod_lattice(&sq_ev, z.position, corner)).fold(0.0, f64::max);

    let head = Outcome {
        pass: counts && !anti.is_empty(),
        detail: format!(
            "generic {}H+{}A sum {}; square {} corner record(s)",
            census.n_holo,
            census.n_anti,
            census.winding_sum,
            anti.len()
        ),
    };
    Ok(head.and(Outcome::max_below("holo to ωᵢ", holo_worst, 1e-8)).and(Outcome::max_below(
        "square anti to corner",
        corner_worst,
        1e-6,
    )))
}

fn voronoi() -> Run {
    let g = voronoi_comparison(&SigmaEvaluator::new(&generic())?)?.max_discrepancy;
    let s = voronoi_comparison(&SigmaEvaluator::new(&Lattice::square(1.0))?)?.max_discrepancy;
    let h = voronoi_comparison(&SigmaEvaluator::new(&Lattice::hexagonal(1.0))?)?.max_discrepancy;
    Ok(Outcome { pass: g > 1e-4, detail: format!("generic {g:.3e} > 1e-4") }.and(Outcome::max_below(
        "square/hexagonal",
        s.max(h),
        1e-8,
    )))
}

fn lll_boundary() -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst: f64 = 0.0;
    let mut counts_ok = true;
    let mut seen = Vec::new();
    for k in 0..20 {
        let lat = random_lattice(&mut rng);
        let n_phi = 1 + k % 8;
        let zeros = (0..n_phi).map(|_| cell_point(&lat, 1.0, &mut rng)).collect();
        let spec = WavefunctionSpec::from_zeros(&lat, n_phi, zeros)?;
        for _ in 0..3 {
            let z = cell_point(&lat, 0.5, &mut rng);
            for v in [(1, 0), (0, 1), (1, 1), (-2, 1)] {
                worst = worst.max(boundary_residual(&spec, z, LatticeVector::new(v.0, v.1))?);
            }
        }
        let count = zero_count(&spec)?;
        counts_ok &= count == n_phi as i64;
        seen.push(count);
    }
    Ok(Outcome::max_below("boundary residual", worst, 1e-9)
        .and(Outcome { pass: counts_ok, detail: format!("zero counts {seen:?} = N_Φ") }))
}

fn filled_state() -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 11);
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        let lat = generic();
        let base: Vec<Complex64> = (0..n).map(|_| cell_point(&lat, 1.0, &mut rng)).collect();
        let family = slater_family(&lat, &base)?;
        check_independent(&family, &mut rng)?;
        let spec = &family[0];
        let mut logs = Vec::with_capacity(20);
        for _ in 0..20 {
            let config = ManyBodyConfig::random(&lat, n, &mut rng);
            logs.push(filled_state_log(spec, &config)?.ln() - slater_determinant_log(&family, &config)?.ln());
        }
        let ratios: Vec<Complex64> = logs.iter().map(|&l| (l - logs[0]).exp()).collect();
        let mean = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
        let var = ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / ratios.len() as f64;
        worst = worst.max(var.sqrt() / mean.norm());
    }
    Ok(Outcome::max_below("std/|mean| of Ψ/det, N ∈ {2,3}", worst, 1e-8))
}

fn reduction_cost() -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 12);
    let mut same_terms = true;
    let mut max_terms = 0usize;
    let mut round_trip: f64 = 0.0;
    for lat in [generic(), Lattice::square(1.0), Lattice::hexagonal(1.0)] {
        let ev = SigmaEvaluator::new(&lat)?;
        for _ in 0..20 {
            let z = 1e3 * lat.reduced().omega1.norm() * Complex64::from_polar(1.0, rng.gen_range(-PI..PI));
            let (far, far_terms) = ev.sigma_log_with_terms(z)?;
            let mig = migrate_sigma(&ev, z);
            let (near, near_terms) = ev.sigma_direct_log(mig.z_red)?;
            same_terms &= far_terms == near_terms;
            max_terms = max_terms.max(far_terms);
            // rebuild from the reduced value and compare with an independent walk
            let walked = migrate_stepwise(&ev, z);
            round_trip = round_trip
                .max((far.log_abs - mig.factor.exponent.re - near.log_abs).abs())
                .max(log_gap(far, walked.factor.apply(near)) / (1.0 + far.log_abs.abs()))
                .max((mig.z_red + mig.translation - z).norm() / z.norm());
        }
    }
    Ok(Outcome {
        pass: same_terms && max_terms <= 64,
        detail: format!("terms equal {same_terms}, max {max_terms} <= 64"),
    }
    .and(Outcome::max_below("round trip (log domain)", round_trip, 1e-9)))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let set = lattice_set();
    let criteria: Vec<Criterion> = vec![
        ("Legendre identity", Box::new(|| legendre(&set))),
        ("eta formula", Box::new(|| eta_formula(&set))),
        ("gamma degeneracy", Box::new(degeneracy)),
        ("lattice-sum oracle", Box::new(oracle_equivalence)),
        ("modular invariance", Box::new(|| modular_invariance(&set))),
        ("quasiperiodicity", Box::new(|| quasiperiodicity(&set))),
        ("derivative chain", Box::new(|| derivative_chain(&set))),
        ("zero census", Box::new(zero_census)),
        ("Voronoi discrepancy", Box::new(voronoi)),
        ("LLL boundary and zero count", Box::new(lll_boundary)),
        ("filled-state oracle", Box::new(filled_state)),
        ("reduction cost", Box::new(reduction_cost)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check().unwrap_or_else(Outcome::error);
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {} ({:.2?})", k + 1, outcome.detail, t.elapsed());
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.2?}", criteria.len() - failed, started.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
