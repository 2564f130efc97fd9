//! C ABI over `ergodic-oprl`.
//!
//! Objects are opaque heap handles created by `eo_*_new`/`eo_model_*` and
//! released by the matching `eo_*_free`. Every fallible call returns an
//! [`EoStatus`]; on failure `eo_last_error_message` describes the error for
//! the calling thread. Panics are caught at the boundary and reported as
//! [`EoStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ergodic_oprl::boundary::cesaro_averages;
use ergodic_oprl::bounds::{check_cesaro_bound, check_sup_bound, BoundReport};
use ergodic_oprl::dos::dos_kotani;
use ergodic_oprl::kernel::{kernel, wiggle_deviation};
use ergodic_oprl::zeros::{all_zeros, eig_count};
use ergodic_oprl::{evaluate_polys, realize, ErgodicModel, Error, JacobiParams};
use num_complex::Complex64;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidParams = 3,
    ParameterExhaustion = 4,
    Numerical = 5,
    Domain = 6,
    Panic = 7,
}

impl From<&Error> for EoStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::InvalidPerturbation(_) => EoStatus::InvalidParams,
            Error::ParameterExhaustion { .. } | Error::OutOfRange { .. } => EoStatus::ParameterExhaustion,
            Error::CdMismatch { .. }
            | Error::DegenerateCenter(_)
            | Error::HerglotzViolation { .. }
            | Error::DegenerateNormalization
            | Error::InsufficientZeros { .. } => EoStatus::Numerical,
            Error::Domain(_) => EoStatus::Domain,
            Error::InvalidArgument(_)
            | Error::Index(_)
            | Error::SeedRequired
            | Error::UnsupportedModel(_)
            | Error::WindowTooLarge(_) => EoStatus::InvalidArgument,
        }
    }
}

/// Opaque Jacobi parameter sequence.
pub struct EoJacobiParams(JacobiParams);

/// Opaque ergodic family.
pub struct EoModel(ErgodicModel);

/// Outcome of a transfer-matrix bound check.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EoBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub constant_c: f64,
    pub margin: f64,
    pub holds: bool,
}

impl From<BoundReport> for EoBoundReport {
    fn from(r: BoundReport) -> Self {
        Self {
            lhs: r.lhs,
            rhs: r.rhs,
            log_lhs: r.log_lhs,
            log_rhs: r.log_rhs,
            constant_c: r.constant_c,
            margin: r.margin,
            holds: r.holds,
        }
    }
}

/// Cesàro averages along one orbit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EoCesaroAverages {
    pub avg_p2: f64,
    pub avg_q2: f64,
    pub avg_im_u2: f64,
    pub avg_u2_re: f64,
    pub avg_u2_im: f64,
    pub rho_l: f64,
    pub weight: f64,
    pub kernel_density: f64,
    pub ids_from_rotation: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), EoStatus>) -> EoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EoStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            EoStatus::Panic
        }
    }
}

fn fail(e: Error) -> EoStatus {
    set_error(&e.to_string());
    EoStatus::from(&e)
}

fn null(name: &str) -> EoStatus {
    set_error(&format!("{name} is null"));
    EoStatus::NullPointer
}

/// # Safety
/// `p` must be null or point to a live value of type `T`.
unsafe fn get<'a, T>(p: *const T, name: &str) -> Result<&'a T, EoStatus> {
    p.as_ref().ok_or_else(|| null(name))
}

/// # Safety
/// `p` must be null or valid for writing one `T`.
unsafe fn put<T>(p: *mut T, v: T, name: &str) -> Result<(), EoStatus> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(v);
    Ok(())
}

/// # Safety
/// `p` must be null or valid for reading `len` values.
unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], EoStatus> {
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on the
/// same thread.
#[no_mangle]
pub extern "C" fn eo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates parameters `a_1..a_len`, `b_1..b_len`.
///
/// # Safety
/// `a` and `b` must be valid for reading `len` values; `out` must be valid
/// for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn eo_params_new(
    a: *const f64,
    b: *const f64,
    len: usize,
    out: *mut *mut EoJacobiParams,
) -> EoStatus {
    guard(|| {
        let a = slice(a, len, "a")?.to_vec();
        let b = slice(b, len, "b")?.to_vec();
        let params = JacobiParams::new(a, b).map_err(fail)?;
        put(out, boxed(EoJacobiParams(params)), "out")
    })
}

/// Releases parameters; null is ignored.
///
/// # Safety
/// `params` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eo_params_free(params: *mut EoJacobiParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Number of stored `(a_j, b_j)` pairs, or 0 for null.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eo_params_len(params: *const EoJacobiParams) -> usize {
    params.as_ref().map_or(0, |p| p.0.len())
}

/// Free Jacobi parameters `a_n = 1`, `b_n = 0`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn eo_model_free_jacobi(out: *mut *mut EoModel) -> EoStatus {
    guard(|| put(out, boxed(EoModel(ErgodicModel::free())), "out"))
}

/// Almost Mathieu family `a_n = 1`, `b_n = 2λ cos(παn + θ)`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn eo_model_almost_mathieu(lambda: f64, alpha: f64, theta: f64, out: *mut *mut EoModel) -> EoStatus {
    guard(|| {
        let m = ErgodicModel::almost_mathieu(lambda, alpha, theta).map_err(fail)?;
        put(out, boxed(EoModel(m)), "out")
    })
}

/// Periodic family with one period `a[0..period]`, `b[0..period]`.
///
/// # Safety
/// `a` and `b` must be valid for reading `period` values; `out` must be
/// valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn eo_model_periodic(
    a: *const f64,
    b: *const f64,
    period: usize,
    out: *mut *mut EoModel,
) -> EoStatus {
    guard(|| {
        let a = slice(a, period, "a")?.to_vec();
        let b = slice(b, period, "b")?.to_vec();
        let m = ErgodicModel::periodic(a, b).map_err(fail)?;
        put(out, boxed(EoModel(m)), "out")
    })
}

/// Anderson family with i.i.d. `b_n` uniform in `coupling·[-1/2, 1/2]`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn eo_model_anderson(coupling: f64, seed: u64, out: *mut *mut EoModel) -> EoStatus {
    guard(|| {
        let m = ErgodicModel::anderson(coupling, seed).map_err(fail)?;
        put(out, boxed(EoModel(m)), "out")
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eo_model_free(model: *mut EoModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Parameters `a_j(S^shift ω)`, `b_j(S^shift ω)` for `j = 1..=n`.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn eo_model_realize(
    model: *const EoModel,
    shift: i64,
    n: usize,
    out: *mut *mut EoJacobiParams,
) -> EoStatus {
    guard(|| {
        let m = get(model, "model")?;
        let params = realize(&m.0, shift, n).map_err(fail)?;
        put(out, boxed(EoJacobiParams(params)), "out")
    })
}

/// Writes `p_0(x) .. p_n(x)` to `p_out`. Values beyond the `f64` range
/// come out infinite.
///
/// # Safety
/// `params` must be a live handle; `p_out` must be valid for writing
/// `n + 1` values.
#[no_mangle]
pub unsafe extern "C" fn eo_evaluate_polys(params: *const EoJacobiParams, x: f64, n: usize, p_out: *mut f64) -> EoStatus {
    guard(|| {
        let p = get(params, "params")?;
        if p_out.is_null() {
            return Err(null("p_out"));
        }
        let s = evaluate_polys(&p.0, x, n).map_err(fail)?;
        let scale = s.scale_log.exp();
        let out = std::slice::from_raw_parts_mut(p_out, n + 1);
        for (o, v) in out.iter_mut().zip(&s.p) {
            *o = v * scale;
        }
        Ok(())
    })
}

/// `K_n(x, y)`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writing one value.
#[no_mangle]
pub unsafe extern "C" fn eo_kernel(params: *const EoJacobiParams, x: f64, y: f64, n: usize, out: *mut f64) -> EoStatus {
    guard(|| {
        let p = get(params, "params")?;
        put(out, kernel(&p.0, x, y, n).map_err(fail)?, "out")
    })
}

/// Number of eigenvalues of the `n × n` truncation below `e`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writing one value.
#[no_mangle]
pub unsafe extern "C" fn eo_eig_count(params: *const EoJacobiParams, n: usize, e: f64, out: *mut usize) -> EoStatus {
    guard(|| {
        let p = get(params, "params")?;
        put(out, eig_count(&p.0, n, e).map_err(fail)?, "out")
    })
}

/// Writes the `n` zeros of `p_n`, ascending, to `zeros_out`.
///
/// # Safety
/// `params` must be a live handle; `zeros_out` must be valid for writing
/// `n` values.
#[no_mangle]
pub unsafe extern "C" fn eo_all_zeros(params: *const EoJacobiParams, n: usize, zeros_out: *mut f64) -> EoStatus {
    guard(|| {
        let p = get(params, "params")?;
        if zeros_out.is_null() {
            return Err(null("zeros_out"));
        }
        let zeros = all_zeros(&p.0, n).map_err(fail)?;
        ptr::copy_nonoverlapping(zeros.as_ptr(), zeros_out, zeros.len());
        Ok(())
    })
}

/// `max_{|a| <= A} |K_n(x0 + a/n, x0 + a/n)/K_n(x0, x0) - 1|`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writing one value.
#[no_mangle]
pub unsafe extern "C" fn eo_wiggle_deviation(
    params: *const EoJacobiParams,
    x0: f64,
    n: usize,
    big_a: f64,
    out: *mut f64,
) -> EoStatus {
    guard(|| {
        let p = get(params, "params")?;
        put(out, wiggle_deviation(&p.0, x0, n, big_a).map_err(fail)?, "out")
    })
}

/// Cesàro-form bound at `x0 + z/(n+1)`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writing one report.
#[no_mangle]
pub unsafe extern "C" fn eo_check_cesaro_bound(
    params: *const EoJacobiParams,
    x0: f64,
    z_re: f64,
    z_im: f64,
    n: usize,
    out: *mut EoBoundReport,
) -> EoStatus {
    guard(|| {
        let p = get(params, "params")?;
        let r = check_cesaro_bound(&p.0, x0, Complex64::new(z_re, z_im), n).map_err(fail)?;
        put(out, r.into(), "out")
    })
}

/// Pointwise bound at `x0 + z/(n+1)`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writing one report.
#[no_mangle]
pub unsafe extern "C" fn eo_check_sup_bound(
    params: *const EoJacobiParams,
    x0: f64,
    z_re: f64,
    z_im: f64,
    n: usize,
    out: *mut EoBoundReport,
) -> EoStatus {
    guard(|| {
        let p = get(params, "params")?;
        let r = check_sup_bound(&p.0, x0, Complex64::new(z_re, z_im), n).map_err(fail)?;
        put(out, r.into(), "out")
    })
}

/// Phase-averaged density of states at `x` with its standard error.
///
/// # Safety
/// `model` must be a live handle; `rho_out` and `stderr_out` must be valid
/// for writing one value each.
#[no_mangle]
pub unsafe extern "C" fn eo_dos_kotani(
    model: *const EoModel,
    x: f64,
    epsilon: f64,
    phase_samples: usize,
    seed: u64,
    rho_out: *mut f64,
    stderr_out: *mut f64,
) -> EoStatus {
    guard(|| {
        let m = get(model, "model")?;
        if stderr_out.is_null() {
            return Err(null("stderr_out"));
        }
        let k = dos_kotani(&m.0, x, epsilon, phase_samples, seed).map_err(fail)?;
        put(rho_out, k.rho, "rho_out")?;
        put(stderr_out, k.stderr, "stderr_out")
    })
}

/// Cesàro averages of `p_j²`, `q_j²` and the Deift–Simon wave at real `x`.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writing one record.
#[no_mangle]
pub unsafe extern "C" fn eo_cesaro_averages(
    model: *const EoModel,
    shift: i64,
    x: f64,
    epsilon: f64,
    n: usize,
    out: *mut EoCesaroAverages,
) -> EoStatus {
    guard(|| {
        let m = get(model, "model")?;
        let a = cesaro_averages(&m.0, shift, x, epsilon, n).map_err(fail)?;
        let rec = EoCesaroAverages {
            avg_p2: a.avg_p2,
            avg_q2: a.avg_q2,
            avg_im_u2: a.avg_im_u2,
            avg_u2_re: a.avg_u2.re,
            avg_u2_im: a.avg_u2.im,
            rho_l: a.rho_l,
            weight: a.weight,
            kernel_density: a.kernel_density(),
            ids_from_rotation: a.ids_from_rotation,
        };
        put(out, rec, "out")
    })
}
