//! C interface to `qbm-core`.
//!
//! Every fallible function returns a [`QbmStatus`] and writes its result
//! through an out pointer. On failure the message is kept per thread and
//! can be copied out with [`qbm_last_error_message`]. Panics never cross
//! the boundary; they are reported as `QBM_STATUS_PANIC`.
//!
//! Parameters and states are opaque handles owned by the caller and
//! released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qbm_core::fluctuations::{equilibrium_moments, gamma_for_ground_energy, mean_energy};
use qbm_core::landauer::landauer_ratio;
use qbm_core::thermo::{entropy, free_energy};
use qbm_core::{BathParams, Error, GaussianState, QuadratureSpec};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Numerical = 4,
    Internal = 5,
    Panic = 6,
}

/// Oscillator and Drude bath parameters.
pub struct QbmParams(BathParams);

/// Zero-mean Gaussian reduced state.
pub struct QbmState(GaussianState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QbmStatus {
    match e {
        Error::InvalidParameter(_) => QbmStatus::InvalidParameter,
        Error::Domain(_) | Error::DegenerateVariation(_) => QbmStatus::Domain,
        Error::InternalConsistency(_) => QbmStatus::Internal,
        Error::Quadrature { .. } | Error::ModelConstruction(_) | Error::RootFinding(_) => QbmStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> QbmStatus
where
    F: FnOnce() -> Result<(), QbmStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QbmStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            QbmStatus::Panic
        }
    }
}

fn model<T>(r: qbm_core::Result<T>) -> Result<T, QbmStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, QbmStatus> {
    p.as_ref().ok_or_else(|| {
        set_error(format!("{what} is null"));
        QbmStatus::NullPointer
    })
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), QbmStatus> {
    if out.is_null() {
        set_error("output pointer is null".into());
        return Err(QbmStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// without the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qbm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qbm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a parameter handle.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qbm_params_new(
    mass: f64,
    omega0: f64,
    gamma: f64,
    cutoff: f64,
    out: *mut *mut QbmParams,
) -> QbmStatus {
    guard(|| {
        let p = model(BathParams::new(mass, omega0, gamma, cutoff))?;
        write(out, Box::into_raw(Box::new(QbmParams(p))))
    })
}

/// # Safety
/// `params` must be null or a handle from [`qbm_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qbm_params_free(params: *mut QbmParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Position and momentum variances at temperature `t >= 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_moments(params: *const QbmParams, t: f64, q2: *mut f64, p2: *mut f64) -> QbmStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let m = model(equilibrium_moments(t, &p.0, &quad()))?;
        write(q2, m.q2)?;
        write(p2, m.p2)
    })
}

/// Free energy `F(T)`, `T >= 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_free_energy(params: *const QbmParams, t: f64, out: *mut f64) -> QbmStatus {
    guard(|| write(out, model(free_energy(t, &deref(params, "params")?.0, &quad()))?))
}

/// Thermodynamic entropy `S(T)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_entropy(params: *const QbmParams, t: f64, out: *mut f64) -> QbmStatus {
    guard(|| write(out, model(entropy(t, &deref(params, "params")?.0, &quad()))?))
}

/// Mean oscillator energy `<H_s>`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_mean_energy(params: *const QbmParams, t: f64, out: *mut f64) -> QbmStatus {
    guard(|| write(out, model(mean_energy(t, &deref(params, "params")?.0, &quad()))?))
}

/// Coupling for which the zero-temperature mean energy equals `target`,
/// other parameters from `params`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_gamma_for_ground_energy(
    params: *const QbmParams,
    target: f64,
    out: *mut f64,
) -> QbmStatus {
    guard(|| write(out, model(gamma_for_ground_energy(target, &deref(params, "params")?.0, &quad()))?))
}

/// Heat per bit of von Neumann entropy for a relative frequency step
/// `delta`; compare with `t ln 2`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_landauer_ratio(params: *const QbmParams, t: f64, delta: f64, out: *mut f64) -> QbmStatus {
    guard(|| {
        let pt = model(landauer_ratio(t, &deref(params, "params")?.0, delta, &quad()))?;
        write(out, pt.ratio)
    })
}

/// Equilibrium reduced state at temperature `t`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_state_from_bath(params: *const QbmParams, t: f64, out: *mut *mut QbmState) -> QbmStatus {
    guard(|| {
        let s = model(GaussianState::from_bath(t, &deref(params, "params")?.0, &quad()))?;
        write(out, Box::into_raw(Box::new(QbmState(s))))
    })
}

/// State with the given variances; the oscillator scale comes from `params`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_state_new(
    params: *const QbmParams,
    q2: f64,
    p2: f64,
    out: *mut *mut QbmState,
) -> QbmStatus {
    guard(|| {
        let s = model(GaussianState::new(q2, p2, &deref(params, "params")?.0))?;
        write(out, Box::into_raw(Box::new(QbmState(s))))
    })
}

/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qbm_state_free(state: *mut QbmState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_state_purity(state: *const QbmState, out: *mut f64) -> QbmStatus {
    guard(|| write(out, deref(state, "state")?.0.purity()))
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_state_von_neumann_entropy(state: *const QbmState, out: *mut f64) -> QbmStatus {
    guard(|| write(out, deref(state, "state")?.0.von_neumann_entropy()))
}

/// Mean occupation and its variance in the uncoupled oscillator basis.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_state_occupation(state: *const QbmState, mean: *mut f64, variance: *mut f64) -> QbmStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        write(mean, s.mean_occupation())?;
        write(variance, s.occupation_variance())
    })
}

/// Population `rho_nn` of level `n`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qbm_state_population(state: *const QbmState, n: usize, out: *mut f64) -> QbmStatus {
    guard(|| write(out, model(deref(state, "state")?.0.number_basis_diagonal(n))?))
}
