//! C ABI over `modsigma`.
//!
//! Every function returns an `MS_*` status code and writes results through
//! out-pointers. Objects are opaque handles released with the matching
//! `*_free`. After a failure, `ms_last_error_message` describes it on the
//! calling thread.

use modsigma::analysis::find_completion_zeros;
use modsigma::lll::{boundary_residual, WavefunctionSpec};
use modsigma::{Error, HalfPeriodIndex, Lattice, LatticeVector, LogComplex, SigmaEvaluator};
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

pub const MS_OK: i32 = 0;
pub const MS_ERR_NULL_POINTER: i32 = 1;
pub const MS_ERR_DEGENERATE_BASIS: i32 = 2;
pub const MS_ERR_CONVERGENCE: i32 = 3;
pub const MS_ERR_NOT_UNIMODULAR: i32 = 4;
pub const MS_ERR_POLE: i32 = 5;
pub const MS_ERR_NOT_COMMENSURATE: i32 = 6;
pub const MS_ERR_INCOMPLETE_CENSUS: i32 = 7;
pub const MS_ERR_ON_CONTOUR: i32 = 8;
pub const MS_ERR_COUNT_MISMATCH: i32 = 9;
pub const MS_ERR_PARTICLE_COUNT: i32 = 10;
pub const MS_ERR_NEAR_ZERO: i32 = 11;
pub const MS_ERR_SINGULAR_BASIS: i32 = 12;
pub const MS_ERR_CONSTRAINT: i32 = 13;
pub const MS_ERR_INVALID_ARGUMENT: i32 = 14;
pub const MS_ERR_BUFFER_TOO_SMALL: i32 = 15;
pub const MS_ERR_PANIC: i32 = 16;

pub const MS_FN_SIGMA: u32 = 0;
pub const MS_FN_SIGMA_ORIG: u32 = 1;
pub const MS_FN_ZETA: u32 = 2;
pub const MS_FN_ZETA_ORIG: u32 = 3;
pub const MS_FN_WP: u32 = 4;
pub const MS_FN_WP_ORIG: u32 = 5;
pub const MS_FN_SIGMA1: u32 = 6;
pub const MS_FN_SIGMA2: u32 = 7;
pub const MS_FN_SIGMA3: u32 = 8;
pub const MS_FN_COMPLETION: u32 = 9;
pub const MS_FN_ZFUN: u32 = 10;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MsComplex {
    pub re: f64,
    pub im: f64,
}

/// `exp(log_abs + i·phase)`; `log_abs = -inf` encodes zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MsLogComplex {
    pub log_abs: f64,
    pub phase: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MsZero {
    pub position: MsComplex,
    /// +1 holomorphic, −1 antiholomorphic (or the merged index).
    pub winding: i64,
    pub residual_norm: f64,
    pub multiplicity: u32,
}

pub struct MsLattice(Lattice);
pub struct MsEvaluator(SigmaEvaluator);
pub struct MsWavefunction(WavefunctionSpec);

impl From<MsComplex> for Complex64 {
    fn from(z: MsComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for MsComplex {
    fn from(z: Complex64) -> Self {
        MsComplex { re: z.re, im: z.im }
    }
}

impl From<LogComplex> for MsLogComplex {
    fn from(v: LogComplex) -> Self {
        MsLogComplex { log_abs: v.log_abs, phase: v.phase }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status(e: &Error) -> i32 {
    match e {
        Error::DegenerateBasis { .. } => MS_ERR_DEGENERATE_BASIS,
        Error::ConvergenceFailure { .. } => MS_ERR_CONVERGENCE,
        Error::NotUnimodular { .. } => MS_ERR_NOT_UNIMODULAR,
        Error::PoleAt { .. } => MS_ERR_POLE,
        Error::NotCommensurate { .. } => MS_ERR_NOT_COMMENSURATE,
        Error::IncompleteCensus { .. } => MS_ERR_INCOMPLETE_CENSUS,
        Error::OnContour { .. } => MS_ERR_ON_CONTOUR,
        Error::CountMismatch { .. } => MS_ERR_COUNT_MISMATCH,
        Error::ParticleCountMismatch { .. } => MS_ERR_PARTICLE_COUNT,
        Error::NearZeroDivision { .. } => MS_ERR_NEAR_ZERO,
        Error::SingularBasis => MS_ERR_SINGULAR_BASIS,
        Error::ConstraintViolation { .. } => MS_ERR_CONSTRAINT,
        Error::InvalidArgument(_) => MS_ERR_INVALID_ARGUMENT,
    }
}

enum Failure {
    Null,
    Code(i32, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MS_OK,
        Ok(Err(Failure::Null)) => {
            set_error("null pointer argument".into());
            MS_ERR_NULL_POINTER
        }
        Ok(Err(Failure::Code(code, message))) => {
            set_error(message);
            code
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MS_ERR_PANIC
        }
    }
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null)
}

unsafe fn put<T>(p: *mut T, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null);
    }
    p.write(value);
    Ok(())
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ms_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ms_lattice_new(omega1: MsComplex, omega2: MsComplex, out: *mut *mut MsLattice) -> i32 {
    guard(|| {
        let lat = Lattice::from_basis(omega1.into(), omega2.into())?;
        put(out, Box::into_raw(Box::new(MsLattice(lat))))
    })
}

/// # Safety
/// `lattice` must be null or a handle from `ms_lattice_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_lattice_free(lattice: *mut MsLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Area and the invariants γ₂, γ₄, γ₆. Any out-pointer may be null.
///
/// # Safety
/// `lattice` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_lattice_invariants(
    lattice: *const MsLattice,
    area: *mut f64,
    gamma2: *mut MsComplex,
    gamma4: *mut MsComplex,
    gamma6: *mut MsComplex,
) -> i32 {
    guard(|| {
        let lat = &get(lattice)?.0;
        if !area.is_null() {
            area.write(lat.area());
        }
        for (p, v) in [(gamma2, lat.gamma2()), (gamma4, lat.gamma4()), (gamma6, lat.gamma6())] {
            if !p.is_null() {
                p.write(v.into());
            }
        }
        Ok(())
    })
}

/// Splits `z = z_red + 2mω₁ + 2nω₂` with `z_red` in the Voronoi cell.
///
/// # Safety
/// `lattice` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_lattice_reduce_point(
    lattice: *const MsLattice,
    z: MsComplex,
    z_red: *mut MsComplex,
    m: *mut i64,
    n: *mut i64,
) -> i32 {
    guard(|| {
        let (r, v) = get(lattice)?.0.reduce_point(z.into());
        put(z_red, r.into())?;
        put(m, v.m)?;
        put(n, v.n)
    })
}

/// # Safety
/// `lattice` must be a live handle and `out` writable. The evaluator keeps
/// its own copy of the lattice.
#[no_mangle]
pub unsafe extern "C" fn ms_evaluator_new(lattice: *const MsLattice, out: *mut *mut MsEvaluator) -> i32 {
    guard(|| {
        let ev = SigmaEvaluator::new(&get(lattice)?.0)?;
        put(out, Box::into_raw(Box::new(MsEvaluator(ev))))
    })
}

/// # Safety
/// `ev` must be null or a handle from `ms_evaluator_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_evaluator_free(ev: *mut MsEvaluator) {
    if !ev.is_null() {
        drop(Box::from_raw(ev));
    }
}

fn evaluate(ev: &SigmaEvaluator, function: u32, z: Complex64) -> Result<LogComplex, Failure> {
    let plain = LogComplex::from_complex;
    Ok(match function {
        MS_FN_SIGMA => ev.sigma_log(z)?,
        MS_FN_SIGMA_ORIG => ev.sigma_original_log(z)?,
        MS_FN_ZETA => plain(ev.zeta(z)?),
        MS_FN_ZETA_ORIG => plain(ev.zeta_original(z)?),
        MS_FN_WP => plain(ev.wp(z)?),
        MS_FN_WP_ORIG => plain(ev.wp_original(z)?),
        MS_FN_SIGMA1 => ev.sigma_symmetric_log(HalfPeriodIndex::One, z)?,
        MS_FN_SIGMA2 => ev.sigma_symmetric_log(HalfPeriodIndex::Two, z)?,
        MS_FN_SIGMA3 => ev.sigma_symmetric_log(HalfPeriodIndex::Three, z)?,
        MS_FN_COMPLETION => plain(ev.completion(z)?),
        MS_FN_ZFUN => ev.z_function_log(z)?,
        other => return Err(Failure::Code(MS_ERR_INVALID_ARGUMENT, format!("unknown function selector {other}"))),
    })
}

/// Evaluates the `MS_FN_*` function at `z`.
///
/// # Safety
/// `ev` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_eval(ev: *const MsEvaluator, function: u32, z: MsComplex, out: *mut MsComplex) -> i32 {
    guard(|| {
        let v = evaluate(&get(ev)?.0, function, z.into())?;
        put(out, v.to_complex().into())
    })
}

/// As `ms_eval` but in log-split form, which never overflows.
///
/// # Safety
/// `ev` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_eval_log(
    ev: *const MsEvaluator,
    function: u32,
    z: MsComplex,
    out: *mut MsLogComplex,
) -> i32 {
    guard(|| {
        let v = evaluate(&get(ev)?.0, function, z.into())?;
        put(out, v.into())
    })
}

/// Zeros of the periodic completion in one cell. `count` receives the
/// number found; if it exceeds `capacity`, nothing is written to `zeros`
/// and `MS_ERR_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `ev` must be a live handle, `zeros` must hold `capacity` elements (or be
/// null with `capacity = 0`), and `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_find_zeros(
    ev: *const MsEvaluator,
    grid_n: u32,
    zeros: *mut MsZero,
    capacity: usize,
    count: *mut usize,
) -> i32 {
    guard(|| {
        let found = find_completion_zeros(&get(ev)?.0, grid_n as usize)?;
        put(count, found.len())?;
        if found.len() > capacity {
            return Err(Failure::Code(MS_ERR_BUFFER_TOO_SMALL, format!("{} zeros need a larger buffer", found.len())));
        }
        if zeros.is_null() && !found.is_empty() {
            return Err(Failure::Null);
        }
        for (k, z) in found.iter().enumerate() {
            zeros.add(k).write(MsZero {
                position: z.position.into(),
                winding: z.winding,
                residual_norm: z.residual_norm,
                multiplicity: z.multiplicity,
            });
        }
        Ok(())
    })
}

/// Builds a wavefunction with `n_zeros` prescribed zeros and N_Φ = `n_phi`;
/// K is derived from the zeros.
///
/// # Safety
/// `lattice` must be a live handle, `zeros` must point to `n_zeros`
/// elements, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_wavefunction_new(
    lattice: *const MsLattice,
    n_phi: usize,
    zeros: *const MsComplex,
    n_zeros: usize,
    out: *mut *mut MsWavefunction,
) -> i32 {
    guard(|| {
        let lat = &get(lattice)?.0;
        let w: Vec<Complex64> = if n_zeros == 0 {
            Vec::new()
        } else {
            if zeros.is_null() {
                return Err(Failure::Null);
            }
            std::slice::from_raw_parts(zeros, n_zeros).iter().map(|&z| z.into()).collect()
        };
        let spec = WavefunctionSpec::from_zeros(lat, n_phi, w)?;
        put(out, Box::into_raw(Box::new(MsWavefunction(spec))))
    })
}

/// Parses a spec from its JSON form `{lattice, nPhi, zeros, K}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_wavefunction_from_json(json: *const c_char, out: *mut *mut MsWavefunction) -> i32 {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null);
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure::Code(MS_ERR_INVALID_ARGUMENT, e.to_string()))?;
        let spec: WavefunctionSpec =
            serde_json::from_str(text).map_err(|e| Failure::Code(MS_ERR_INVALID_ARGUMENT, e.to_string()))?;
        put(out, Box::into_raw(Box::new(MsWavefunction(spec))))
    })
}

/// # Safety
/// `spec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_wavefunction_free(spec: *mut MsWavefunction) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Boundary parameter K.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_wavefunction_k(spec: *const MsWavefunction, out: *mut MsComplex) -> i32 {
    guard(|| put(out, get(spec)?.0.boundary_k().into()))
}

/// ψ(z, z*) in log-split form.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_wavefunction_psi_log(
    spec: *const MsWavefunction,
    z: MsComplex,
    out: *mut MsLogComplex,
) -> i32 {
    guard(|| put(out, get(spec)?.0.psi_log(z.into())?.into()))
}

/// |measured/predicted − 1| for the translation by 2mω₁ + 2nω₂.
///
/// # Safety
/// `spec` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_wavefunction_boundary_residual(
    spec: *const MsWavefunction,
    z: MsComplex,
    m: i64,
    n: i64,
    out: *mut f64,
) -> i32 {
    guard(|| put(out, boundary_residual(&get(spec)?.0, z.into(), LatticeVector::new(m, n))?))
}
