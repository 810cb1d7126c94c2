//! Command-line front end. `main.rs` only forwards to [`run`].

use crate::analysis::{find_completion_zeros, voronoi_comparison, Census, ZeroRecord};
use crate::elliptic::SigmaEvaluator;
use crate::error::Error;
use crate::lattice::{HalfPeriodIndex, Lattice, LatticeVector};
use crate::lll::{boundary_residual, zero_count, WavefunctionSpec};
use crate::logval::LogComplex;
use crate::selftest::{self, SelftestOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Largest grid resolution per cell.
pub const MAX_GRID: usize = 4096;

#[derive(Parser, Debug)]
#[command(name = "modsigma", version, about = "Modified Weierstrass functions on complex lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one function at one point.
    Eval {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long = "fn", value_enum)]
        function: Function,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        /// Print {logAbs, arg} instead of {re, im}.
        #[arg(long)]
        log: bool,
    },
    /// Lattice invariants, η values and the Legendre check.
    Invariants {
        #[command(flatten)]
        lattice: LatticeArgs,
    },
    /// CSV samples over one or more primitive cells.
    Grid {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long = "fn", value_enum)]
        function: Function,
        /// Samples per cell along each basis direction.
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Cells along each basis direction.
        #[arg(long, default_value_t = 1)]
        cells: usize,
        #[arg(long)]
        log: bool,
    },
    /// Zeros of the periodic completion in one cell.
    Zeros {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Newton seed grid per side (>= 16).
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Also compare antiholomorphic zeros with Voronoi vertices.
        #[arg(long)]
        voronoi: bool,
    },
    /// Single-particle lowest-Landau-level wavefunction.
    Wavefunction {
        #[command(flatten)]
        lattice: OptionalLatticeArgs,
        #[arg(long)]
        nphi: Option<usize>,
        /// A prescribed zero; repeat once per flux quantum.
        #[arg(long = "w", value_parser = parse_complex, allow_hyphen_values = true)]
        zeros: Vec<Complex64>,
        /// Boundary parameter K; derived from the zeros when absent.
        #[arg(long = "k", value_parser = parse_complex, allow_hyphen_values = true)]
        k: Option<Complex64>,
        /// Read the spec from a JSON file instead.
        #[arg(long, conflicts_with_all = ["nphi", "zeros", "k", "omega1", "omega2"])]
        spec: Option<PathBuf>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Option<Complex64>,
        #[arg(long)]
        log: bool,
        /// Print the spec as JSON and exit.
        #[arg(long)]
        print_spec: bool,
        /// Also report boundary residuals and the zero count.
        #[arg(long)]
        check: bool,
    },
    /// Run the identity suite over random lattices.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        lattices: usize,
        #[arg(long, hide = true, allow_hyphen_values = true)]
        perturb_gamma2: Option<f64>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct LatticeArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega1: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega2: Complex64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct OptionalLatticeArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega1: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega2: Option<Complex64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sigma,
    #[value(name = "sigma_orig")]
    SigmaOrig,
    Zeta,
    #[value(name = "zeta_orig")]
    ZetaOrig,
    Wp,
    #[value(name = "wp_orig")]
    WpOrig,
    Sigma1,
    Sigma2,
    Sigma3,
    Completion,
    Zfun,
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im but got '{s}'"))?;
    let p = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    let z = Complex64::new(p(re)?, p(im)?);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite value '{s}'"));
    }
    Ok(z)
}

/// 17 significant digits; parses back to the same f64.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A JSON number written with [`format_number`]; non-finite values become null.
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(format_number(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

#[derive(Serialize)]
struct CNum {
    re: Num,
    im: Num,
}

impl From<Complex64> for CNum {
    fn from(z: Complex64) -> Self {
        CNum { re: Num(z.re), im: Num(z.im) }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LogNum {
    log_abs: Num,
    arg: Num,
}

impl From<LogComplex> for LogNum {
    fn from(v: LogComplex) -> Self {
        LogNum { log_abs: Num(v.log_abs), arg: Num(v.arg()) }
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum Value {
    Plain(CNum),
    Log(LogNum),
}

impl Value {
    fn new(v: LogComplex, log: bool) -> Value {
        if log {
            Value::Log(v.into())
        } else {
            Value::Plain(v.to_complex().into())
        }
    }
}

/// Failure of a subcommand with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PoleAt { .. } | Error::NearZeroDivision { .. } => EXIT_DOMAIN,
            Error::IncompleteCensus { .. } | Error::ConvergenceFailure { .. } | Error::OnContour { .. } => {
                EXIT_NUMERICAL
            }
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

fn io(e: std::io::Error) -> CliError {
    CliError { code: EXIT_USAGE, message: e.to_string() }
}

fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
    writeln!(out, "{text}").map_err(io)
}

fn lattice(args: &LatticeArgs) -> Result<Lattice, CliError> {
    Ok(Lattice::from_basis(args.omega1, args.omega2)?)
}

fn evaluate(ev: &SigmaEvaluator, f: Function, z: Complex64) -> crate::Result<LogComplex> {
    let plain = |v: Complex64| LogComplex::from_complex(v);
    Ok(match f {
        Function::Sigma => ev.sigma_log(z)?,
        Function::SigmaOrig => ev.sigma_original_log(z)?,
        Function::Zeta => plain(ev.zeta(z)?),
        Function::ZetaOrig => plain(ev.zeta_original(z)?),
        Function::Wp => plain(ev.wp(z)?),
        Function::WpOrig => plain(ev.wp_original(z)?),
        Function::Sigma1 => ev.sigma_symmetric_log(HalfPeriodIndex::One, z)?,
        Function::Sigma2 => ev.sigma_symmetric_log(HalfPeriodIndex::Two, z)?,
        Function::Sigma3 => ev.sigma_symmetric_log(HalfPeriodIndex::Three, z)?,
        Function::Completion => plain(ev.completion(z)?),
        Function::Zfun => ev.z_function_log(z)?,
    })
}

/// Caps the global thread pool from `SIGMA_LATTICE_THREADS`, if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("SIGMA_LATTICE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // a second call (e.g. from tests) finds the pool already built
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch<W: Write>(command: Command, out: &mut W) -> Result<i32, CliError> {
    match command {
        Command::Eval { lattice: l, function, z, log } => {
            let ev = SigmaEvaluator::new(&lattice(&l)?)?;
            write_json(out, &Value::new(evaluate(&ev, function, z)?, log))?;
        }
        Command::Invariants { lattice: l } => invariants(&lattice(&l)?, out)?,
        Command::Grid { lattice: l, function, n, cells, log } => grid(&lattice(&l)?, function, n, cells, log, out)?,
        Command::Zeros { lattice: l, grid, voronoi } => zeros(&lattice(&l)?, grid, voronoi, out)?,
        Command::Wavefunction { lattice: l, nphi, zeros, k, spec, z, log, print_spec, check } => {
            let spec = match spec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<WavefunctionSpec>(&text)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                None => {
                    let (Some(w1), Some(w2)) = (l.omega1, l.omega2) else {
                        return Err(usage("--omega1 and --omega2 are required without --spec"));
                    };
                    let lat = Lattice::from_basis(w1, w2)?;
                    let n_phi = nphi.unwrap_or(zeros.len());
                    match k {
                        Some(k) => WavefunctionSpec::with_boundary_k(&lat, n_phi, zeros, k)?,
                        None => WavefunctionSpec::from_zeros(&lat, n_phi, zeros)?,
                    }
                }
            };
            if print_spec {
                writeln!(out, "{}", serde_json::to_string_pretty(&spec).map_err(|e| usage(e.to_string()))?)
                    .map_err(io)?;
                return Ok(EXIT_OK);
            }
            let z = z.ok_or_else(|| usage("--z is required unless --print-spec is given"))?;
            wavefunction(&spec, z, log, check, out)?;
        }
        Command::Selftest { seed, lattices, perturb_gamma2 } => {
            return selftest_table(&SelftestOptions { seed, lattices, perturb_gamma2 }, out);
        }
    }
    Ok(EXIT_OK)
}

fn invariants<W: Write>(lat: &Lattice, out: &mut W) -> Result<(), CliError> {
    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct Report {
        area: Num,
        tau: CNum,
        orientation: i8,
        gamma2: CNum,
        gamma4: CNum,
        gamma6: CNum,
        eta: [CNum; 3],
        eta_modified: [CNum; 3],
        legendre_check: CNum,
    }
    let eta = |i| lat.eta_original(i).into();
    let eta_m = |i| lat.eta_modified(i).into();
    let [a, b, c] = HalfPeriodIndex::ALL;
    let legendre = lat.eta_modified(a) * lat.omega2() - lat.eta_modified(b) * lat.omega1();
    let report = Report {
        area: Num(lat.area()),
        tau: lat.tau().into(),
        orientation: lat.orientation(),
        gamma2: lat.gamma2().into(),
        gamma4: lat.gamma4().into(),
        gamma6: lat.gamma6().into(),
        eta: [eta(a), eta(b), eta(c)],
        eta_modified: [eta_m(a), eta_m(b), eta_m(c)],
        legendre_check: legendre.into(),
    };
    write_json(out, &report)
}

fn grid<W: Write>(lat: &Lattice, f: Function, n: usize, cells: usize, log: bool, out: &mut W) -> Result<(), CliError> {
    if n == 0 || n > MAX_GRID {
        return Err(usage(format!("--n must be in 1..={MAX_GRID}, got {n}")));
    }
    if cells == 0 || n * cells > MAX_GRID {
        return Err(usage(format!("--cells must be >= 1 with n·cells <= {MAX_GRID}")));
    }
    let ev = SigmaEvaluator::new(lat)?;
    let side = n * cells;
    let (e1, e2) = (2.0 * lat.omega1(), 2.0 * lat.omega2());
    // half-step offsets keep every sample off the lattice
    let rows: Vec<String> = (0..side)
        .into_par_iter()
        .map(|i| {
            let mut s = String::new();
            for j in 0..side {
                let z = ((j as f64 + 0.5) / n as f64) * e1 + ((i as f64 + 0.5) / n as f64) * e2;
                let v = evaluate(&ev, f, z)?;
                let (a, b) = if log { (v.log_abs, v.arg()) } else { (v.to_complex().re, v.to_complex().im) };
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    format_number(z.re),
                    format_number(z.im),
                    format_number(a),
                    format_number(b)
                ));
            }
            Ok(s)
        })
        .collect::<crate::Result<_>>()?;
    let header = if log { "x,y,logAbs,arg\n" } else { "x,y,re,im\n" };
    out.write_all(header.as_bytes()).map_err(io)?;
    for r in rows {
        out.write_all(r.as_bytes()).map_err(io)?;
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ZeroJson {
    position: CNum,
    winding: i64,
    kind: crate::analysis::ZeroKind,
    residual_norm: Num,
    multiplicity: u32,
}

impl From<&ZeroRecord> for ZeroJson {
    fn from(z: &ZeroRecord) -> Self {
        ZeroJson {
            position: z.position.into(),
            winding: z.winding,
            kind: z.kind,
            residual_norm: Num(z.residual_norm),
            multiplicity: z.multiplicity,
        }
    }
}

fn zeros<W: Write>(lat: &Lattice, grid: usize, voronoi: bool, out: &mut W) -> Result<(), CliError> {
    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct VoronoiJson {
        vertices: Vec<CNum>,
        max_discrepancy: Num,
    }
    #[derive(Serialize)]
    struct Report {
        zeros: Vec<ZeroJson>,
        census: Census,
        #[serde(skip_serializing_if = "Option::is_none")]
        voronoi: Option<VoronoiJson>,
    }
    let ev = SigmaEvaluator::new(lat)?;
    let found = find_completion_zeros(&ev, grid)?;
    let voronoi = if voronoi {
        let r = voronoi_comparison(&ev)?;
        Some(VoronoiJson {
            vertices: r.vertices.into_iter().map(Into::into).collect(),
            max_discrepancy: Num(r.max_discrepancy),
        })
    } else {
        None
    };
    let report = Report { zeros: found.iter().map(Into::into).collect(), census: Census::of(&found), voronoi };
    write_json(out, &report)
}

fn wavefunction<W: Write>(
    spec: &WavefunctionSpec,
    z: Complex64,
    log: bool,
    check: bool,
    out: &mut W,
) -> Result<(), CliError> {
    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct Report {
        n_phi: usize,
        ell: Num,
        #[serde(rename = "K")]
        k: CNum,
        z: CNum,
        psi: Value,
        #[serde(skip_serializing_if = "Option::is_none")]
        boundary_residual: Option<[Num; 2]>,
        #[serde(skip_serializing_if = "Option::is_none")]
        zero_count: Option<i64>,
    }
    let psi = spec.psi_log(z)?;
    let (boundary, count) = if check {
        let a = boundary_residual(spec, z, LatticeVector::new(1, 0))?;
        let b = boundary_residual(spec, z, LatticeVector::new(0, 1))?;
        (Some([Num(a), Num(b)]), Some(zero_count(spec)?))
    } else {
        (None, None)
    };
    let report = Report {
        n_phi: spec.n_phi(),
        ell: Num(spec.ell()),
        k: spec.boundary_k().into(),
        z: z.into(),
        psi: Value::new(psi, log),
        boundary_residual: boundary,
        zero_count: count,
    };
    write_json(out, &report)
}

fn selftest_table<W: Write>(opts: &SelftestOptions, out: &mut W) -> Result<i32, CliError> {
    let results = selftest::run(opts);
    writeln!(out, "seed {} lattices {}", opts.seed, opts.lattices).map_err(io)?;
    writeln!(
        out,
        "{:<20} {:>8} {:>8} {:>24} {:>10}  status",
        "identity", "checked", "failed", "max_error", "tolerance"
    )
    .map_err(io)?;
    for r in &results {
        writeln!(
            out,
            "{:<20} {:>8} {:>8} {:>24} {:>10.0e}  {}",
            r.name,
            r.checked,
            r.failures,
            format_number(r.max_error),
            r.tolerance,
            if r.passed() { "PASS" } else { "FAIL" }
        )
        .map_err(io)?;
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
    for r in &failed {
        writeln!(out, "FAILED {} on {}", r.name, r.first_failure.as_deref().unwrap_or("?")).map_err(io)?;
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_SELFTEST_FAILED })
}
