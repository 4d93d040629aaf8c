//! C ABI over the `cwgabor` core.
//!
//! Every function returns a [`CwgStatus`]; on failure the message is kept per
//! thread and read back with [`cwg_last_error_message`]. Handles are opaque
//! and owned by the caller until passed to the matching `_free`. Complex
//! buffers are interleaved `(re, im)` pairs of `f64`, row-major with one row
//! per dictionary row or column and `t` entries per row.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use cwgabor::cwcode::ConstantWeightCode;
use cwgabor::gabor::{Dictionary, GaborDictionary, GaussianDictionary};
use cwgabor::harness::{verify_example, Experiment, ExperimentConfig};
use cwgabor::{Error, C64};
use ndarray::Array2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Divergence = 3,
    BudgetExceeded = 4,
    Unsupported = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CwgStatus, msg: impl Into<String>) -> CwgStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> CwgStatus {
    let status = match &e {
        Error::InvalidInput(_) => CwgStatus::InvalidInput,
        Error::Divergence { .. } => CwgStatus::Divergence,
        Error::BudgetExceeded { .. } => CwgStatus::BudgetExceeded,
        Error::Unsupported(_) => CwgStatus::Unsupported,
        Error::Config(_) => CwgStatus::Config,
        Error::Io(_) => CwgStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `f`, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), CwgStatus>) -> CwgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CwgStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CwgStatus::Panic, msg)
        }
    }
}

fn nonnull<T>(p: *const T, what: &str) -> Result<(), CwgStatus> {
    if p.is_null() {
        Err(fail(CwgStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cwg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Opaque PPM(q) over RS(n', k') code.
pub struct CwgCode(ConstantWeightCode);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CwgCodeParams {
    /// Binary length n' q.
    pub n: u64,
    /// Weight n'.
    pub w: u64,
    /// Maximum pairwise overlap.
    pub d: u64,
    /// Disjunctive order, 0 when the code has no redundancy bound.
    pub p: u64,
    /// Information bits k' log2 q.
    pub b: u64,
    pub q: u64,
    pub sections: u64,
    pub info_sections: u64,
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cwg_code_new(q: usize, n_prime: usize, k_prime: usize, out: *mut *mut CwgCode) -> CwgStatus {
    guard(|| {
        nonnull(out, "out")?;
        let code = ConstantWeightCode::new(q, n_prime, k_prime).map_err(from_error)?;
        unsafe { *out = Box::into_raw(Box::new(CwgCode(code))) };
        Ok(())
    })
}

/// # Safety
/// `code` must come from [`cwg_code_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cwg_code_free(code: *mut CwgCode) {
    if !code.is_null() {
        drop(unsafe { Box::from_raw(code) });
    }
}

/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cwg_code_params(code: *const CwgCode, out: *mut CwgCodeParams) -> CwgStatus {
    guard(|| {
        nonnull(code, "code")?;
        nonnull(out, "out")?;
        let c = unsafe { &(*code).0 };
        let p = c.params();
        unsafe {
            *out = CwgCodeParams {
                n: p.n as u64,
                w: p.w as u64,
                d: p.d as u64,
                p: p.p.unwrap_or(0) as u64,
                b: p.b as u64,
                q: c.q() as u64,
                sections: c.sections() as u64,
                info_sections: c.info_sections() as u64,
            }
        };
        Ok(())
    })
}

/// Encodes `info_sections` symbols into `sections` PPM positions.
///
/// # Safety
/// `message` must hold `message_len` symbols and `positions` room for
/// `positions_len` symbols.
#[no_mangle]
pub unsafe extern "C" fn cwg_code_encode(
    code: *const CwgCode,
    message: *const u16,
    message_len: usize,
    positions: *mut u16,
    positions_len: usize,
) -> CwgStatus {
    guard(|| {
        nonnull(code, "code")?;
        nonnull(message, "message")?;
        nonnull(positions, "positions")?;
        let c = unsafe { &(*code).0 };
        if positions_len != c.sections() {
            return Err(fail(CwgStatus::InvalidInput, format!("positions buffer {positions_len}, need {}", c.sections())));
        }
        let msg = unsafe { std::slice::from_raw_parts(message, message_len) };
        let cw = c.encode_symbols(msg).map_err(from_error)?;
        unsafe { std::slice::from_raw_parts_mut(positions, positions_len) }.copy_from_slice(&cw.positions);
        Ok(())
    })
}

/// Opaque dictionary (Gabor or Gaussian).
pub struct CwgDictionary(Arc<dyn Dictionary>);

fn store_dict(out: *mut *mut CwgDictionary, d: Arc<dyn Dictionary>) {
    unsafe { *out = Box::into_raw(Box::new(CwgDictionary(d))) };
}

/// Truncated Alltop-Gabor frame with `n` rows (prime) and `m` columns.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cwg_dictionary_gabor_new(n: usize, m: usize, stride: usize, out: *mut *mut CwgDictionary) -> CwgStatus {
    guard(|| {
        nonnull(out, "out")?;
        store_dict(out, Arc::new(GaborDictionary::new(n, m, stride).map_err(from_error)?));
        Ok(())
    })
}

/// I.i.d. complex Gaussian dictionary with unit-norm columns.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cwg_dictionary_gaussian_new(n: usize, m: usize, seed: u64, out: *mut *mut CwgDictionary) -> CwgStatus {
    guard(|| {
        nonnull(out, "out")?;
        store_dict(out, Arc::new(GaussianDictionary::new(n, m, seed).map_err(from_error)?));
        Ok(())
    })
}

/// # Safety
/// `dict` must come from a `cwg_dictionary_*_new` call. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cwg_dictionary_free(dict: *mut CwgDictionary) {
    if !dict.is_null() {
        drop(unsafe { Box::from_raw(dict) });
    }
}

/// # Safety
/// `dict` must be live and both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cwg_dictionary_shape(dict: *const CwgDictionary, rows: *mut usize, cols: *mut usize) -> CwgStatus {
    guard(|| {
        nonnull(dict, "dict")?;
        nonnull(rows, "rows")?;
        nonnull(cols, "cols")?;
        let d = unsafe { &(*dict).0 };
        unsafe {
            *rows = d.rows();
            *cols = d.cols();
        }
        Ok(())
    })
}

fn read_complex(buf: &[f64], rows: usize, t: usize) -> Array2<C64> {
    Array2::from_shape_fn((rows, t), |(i, j)| {
        let k = 2 * (i * t + j);
        C64::new(buf[k], buf[k + 1])
    })
}

fn write_complex(a: &Array2<C64>, out: &mut [f64]) {
    for (k, v) in a.iter().enumerate() {
        out[2 * k] = v.re;
        out[2 * k + 1] = v.im;
    }
}

unsafe fn linear_map(dict: *const CwgDictionary, input: *const f64, t: usize, output: *mut f64, adjoint: bool) -> CwgStatus {
    guard(|| {
        nonnull(dict, "dict")?;
        nonnull(input, "input")?;
        nonnull(output, "output")?;
        let d = unsafe { &(*dict).0 };
        let (r_in, r_out) = if adjoint { (d.rows(), d.cols()) } else { (d.cols(), d.rows()) };
        let x = read_complex(unsafe { std::slice::from_raw_parts(input, 2 * r_in * t) }, r_in, t);
        let y = if adjoint { d.adjoint(x.view()) } else { d.apply(x.view()) }.map_err(from_error)?;
        write_complex(&y, unsafe { std::slice::from_raw_parts_mut(output, 2 * r_out * t) });
        Ok(())
    })
}

/// `y = A x` for `x` of shape `cols x t` and `y` of shape `rows x t`.
///
/// # Safety
/// `x` must hold `2 * cols * t` doubles and `y` room for `2 * rows * t`.
#[no_mangle]
pub unsafe extern "C" fn cwg_dictionary_apply(dict: *const CwgDictionary, x: *const f64, t: usize, y: *mut f64) -> CwgStatus {
    unsafe { linear_map(dict, x, t, y, false) }
}

/// `x = A^H y` for `y` of shape `rows x t` and `x` of shape `cols x t`.
///
/// # Safety
/// `y` must hold `2 * rows * t` doubles and `x` room for `2 * cols * t`.
#[no_mangle]
pub unsafe extern "C" fn cwg_dictionary_adjoint(dict: *const CwgDictionary, y: *const f64, t: usize, x: *mut f64) -> CwgStatus {
    unsafe { linear_map(dict, y, t, x, true) }
}

/// Opaque Monte-Carlo experiment built from a JSON configuration.
pub struct CwgExperiment(Experiment);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CwgPointResult {
    pub ebn0_db: f64,
    pub trials: u64,
    /// Active users summed over trials.
    pub events: u64,
    pub missed: u64,
    pub false_alarms: u64,
    pub pe: f64,
}

/// # Safety
/// `json` must be a nul-terminated UTF-8 string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cwg_experiment_from_json(json: *const c_char, out: *mut *mut CwgExperiment) -> CwgStatus {
    guard(|| {
        nonnull(json, "json")?;
        nonnull(out, "out")?;
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| fail(CwgStatus::InvalidInput, format!("config is not UTF-8: {e}")))?;
        let cfg = ExperimentConfig::from_json(text).map_err(from_error)?;
        let exp = Experiment::new(cfg).map_err(from_error)?;
        unsafe { *out = Box::into_raw(Box::new(CwgExperiment(exp))) };
        Ok(())
    })
}

/// # Safety
/// `exp` must come from [`cwg_experiment_from_json`]. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cwg_experiment_free(exp: *mut CwgExperiment) {
    if !exp.is_null() {
        drop(unsafe { Box::from_raw(exp) });
    }
}

/// Runs every trial at one Eb/N0 on `threads` workers (0 means one).
///
/// # Safety
/// `exp` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cwg_experiment_run(exp: *const CwgExperiment, ebn0_db: f64, threads: usize, out: *mut CwgPointResult) -> CwgStatus {
    guard(|| {
        nonnull(exp, "exp")?;
        nonnull(out, "out")?;
        let r = unsafe { &(*exp).0 }.run_point(ebn0_db, threads.max(1)).map_err(from_error)?;
        unsafe {
            *out = CwgPointResult {
                ebn0_db,
                trials: r.trials() as u64,
                events: r.events() as u64,
                missed: r.missed() as u64,
                false_alarms: r.false_alarms() as u64,
                pe: r.pe(),
            }
        };
        Ok(())
    })
}

/// Runs the built-in PPM(8) over RS(6,2) example and stores whether every step matched.
///
/// # Safety
/// `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cwg_verify_example(passed: *mut bool) -> CwgStatus {
    guard(|| {
        nonnull(passed, "passed")?;
        let r = verify_example().map_err(from_error)?;
        unsafe { *passed = r.passed() };
        Ok(())
    })
}
