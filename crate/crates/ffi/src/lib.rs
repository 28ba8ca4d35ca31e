//! C ABI over the quasiconv library.
//!
//! Fields are opaque `QcField` handles owned by the caller and released
//! with `qc_field_free`. Every fallible call returns a `QcStatus`; on
//! failure `qc_last_error` holds a message for the calling thread. Strings
//! returned by the library are freed with `qc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use quasiconv::conditions::{self, dyadic_grid, sigma_star_estimate, CheckConfig, Verdict, VerdictStatus};
use quasiconv::field::{lookup, DomainBox, ScalarField};
use quasiconv::search::{Sampler, Strategy};
use quasiconv::{Error, Norm};

/// Opaque field handle.
pub struct QcField(ScalarField);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Usage = 3,
    Parse = 4,
    Eval = 5,
    NoValidSamples = 6,
    Sampling = 7,
    Io = 8,
    Config = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcNorm {
    L1 = 1,
    L2 = 2,
    Inf = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcCheckConfig {
    pub sigma: f64,
    pub tol: f64,
    pub min_sep: f64,
    /// Size of the dyadic λ grid k/(m+1).
    pub lambda_points: usize,
    pub norm: QcNorm,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcVerdictStatus {
    Holds = 0,
    Violated = 1,
    Vacuous = 2,
    Skipped = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcVerdict {
    pub status: QcVerdictStatus,
    /// Zero when the verdict carries no margin (vacuous or skipped).
    pub has_margin: i32,
    pub margin: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QcStatus {
    match e {
        Error::Usage(_) => QcStatus::Usage,
        Error::Parse(_) => QcStatus::Parse,
        Error::Eval(_) => QcStatus::Eval,
        Error::NoValidSamples(_) => QcStatus::NoValidSamples,
        Error::Sampling(_) => QcStatus::Sampling,
        Error::Io(_) => QcStatus::Io,
        Error::Config(_) => QcStatus::Config,
    }
}

/// Runs `body`, turning errors and panics into a status plus last-error text.
fn guard(body: impl FnOnce() -> Result<(), (QcStatus, String)>) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QcStatus::Panic
        }
    }
}

fn lib(e: impl Into<Error>) -> (QcStatus, String) {
    let e = e.into();
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QcStatus, String) {
    (QcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (QcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (QcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn field_arg<'a>(f: *const QcField, n: usize) -> Result<&'a ScalarField, (QcStatus, String)> {
    let f = f.as_ref().ok_or_else(|| null("field"))?;
    if f.0.dim() != n {
        return Err((QcStatus::Usage, format!("length {n} does not match field dimension {}", f.0.dim())));
    }
    Ok(&f.0)
}

fn check_config(c: *const QcCheckConfig) -> Result<CheckConfig, (QcStatus, String)> {
    let c = unsafe { c.as_ref() }.ok_or_else(|| null("config"))?;
    if c.lambda_points == 0 {
        return Err((QcStatus::Usage, "lambda_points must be at least 1".into()));
    }
    let cfg = CheckConfig {
        sigma: c.sigma,
        tol: c.tol,
        min_sep: c.min_sep,
        lambda_grid: dyadic_grid(c.lambda_points),
        penalty_norm: match c.norm {
            QcNorm::L1 => Norm::L1,
            QcNorm::L2 => Norm::L2,
            QcNorm::Inf => Norm::Inf,
        },
    };
    cfg.validate().map_err(lib)?;
    Ok(cfg)
}

fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (QcStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    unsafe { out.write(v) };
    Ok(())
}

/// Library defaults: σ = 0, tol 1e-9, min_sep 1e-6, 63 λ points, L2.
#[no_mangle]
pub extern "C" fn qc_check_config_default() -> QcCheckConfig {
    QcCheckConfig { sigma: 0.0, tol: 1e-9, min_sep: 1e-6, lambda_points: 63, norm: QcNorm::L2 }
}

/// Version string; static, do not free.
#[no_mangle]
pub extern "C" fn qc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Catalog field `name` in dimension `dim` (0 for its default dimension).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_field_from_catalog(name: *const c_char, dim: usize, out: *mut *mut QcField) -> QcStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let dim = if dim == 0 { quasiconv::field::entry(name).map_err(lib)?.default_dim } else { dim };
        let f = lookup(name, dim).map_err(lib)?;
        put(out, Box::into_raw(Box::new(QcField(f))), "out")
    })
}

/// Field given by an expression in `x1..x{dim}` on the box `[lower, upper]`
/// (each of length `dim`).
///
/// # Safety
/// `expr` must be NUL-terminated, `lower`/`upper` must point to `dim`
/// doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_field_from_expr(
    expr: *const c_char,
    dim: usize,
    lower: *const f64,
    upper: *const f64,
    out: *mut *mut QcField,
) -> QcStatus {
    guard(|| {
        let text = str_arg(expr, "expr")?;
        if dim == 0 {
            return Err((QcStatus::Usage, "dimension must be >= 1".into()));
        }
        let lo = slice_arg(lower, dim, "lower")?.to_vec();
        let hi = slice_arg(upper, dim, "upper")?.to_vec();
        let e = quasiconv::expr::parse(text, dim).map_err(lib)?;
        let f = ScalarField::from_expr(e, DomainBox::new(lo, hi).map_err(lib)?).map_err(lib)?;
        put(out, Box::into_raw(Box::new(QcField(f))), "out")
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_field_free(f: *mut QcField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Dimension of the field, or 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_field_dim(f: *const QcField) -> usize {
    f.as_ref().map_or(0, |f| f.0.dim())
}

/// # Safety
/// `x` must point to `n` doubles, `out` to one.
#[no_mangle]
pub unsafe extern "C" fn qc_field_eval(f: *const QcField, x: *const f64, n: usize, out: *mut f64) -> QcStatus {
    guard(|| {
        let field = field_arg(f, n)?;
        let v = field.value(slice_arg(x, n, "x")?).map_err(lib)?;
        put(out, v, "out")
    })
}

/// Writes the `n` gradient components to `out`.
///
/// # Safety
/// `x` and `out` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_field_gradient(f: *const QcField, x: *const f64, n: usize, out: *mut f64) -> QcStatus {
    guard(|| {
        let field = field_arg(f, n)?;
        let g = field.gradient(slice_arg(x, n, "x")?).map_err(lib)?;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(g.as_ptr(), out, n);
        Ok(())
    })
}

/// Segment-inequality margin at a single λ.
///
/// # Safety
/// `x`, `y` must point to `n` doubles; `cfg` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_margin_a(
    f: *const QcField,
    x: *const f64,
    y: *const f64,
    n: usize,
    lambda: f64,
    cfg: *const QcCheckConfig,
    out: *mut f64,
) -> QcStatus {
    guard(|| {
        let field = field_arg(f, n)?;
        let cfg = check_config(cfg)?;
        let m = conditions::margin_a(field, slice_arg(x, n, "x")?, slice_arg(y, n, "y")?, lambda, &cfg).map_err(lib)?;
        put(out, m, "out")
    })
}

fn to_c(v: &Verdict) -> QcVerdict {
    QcVerdict {
        status: match v.status {
            VerdictStatus::Holds => QcVerdictStatus::Holds,
            VerdictStatus::Violated => QcVerdictStatus::Violated,
            VerdictStatus::Vacuous => QcVerdictStatus::Vacuous,
            VerdictStatus::Skipped => QcVerdictStatus::Skipped,
        },
        has_margin: v.margin.is_some() as i32,
        margin: v.margin.unwrap_or(f64::NAN),
    }
}

unsafe fn verdict_call(
    check: fn(&ScalarField, &[f64], &[f64], &CheckConfig) -> Verdict,
    f: *const QcField,
    x: *const f64,
    y: *const f64,
    n: usize,
    cfg: *const QcCheckConfig,
    out: *mut QcVerdict,
) -> QcStatus {
    guard(|| {
        let field = field_arg(f, n)?;
        let cfg = check_config(cfg)?;
        let v = check(field, slice_arg(x, n, "x")?, slice_arg(y, n, "y")?, &cfg);
        put(out, to_c(&v), "out")
    })
}

/// Condition (a) over the configured λ grid.
///
/// # Safety
/// `x`, `y` must point to `n` doubles; `cfg` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_check_a(
    f: *const QcField,
    x: *const f64,
    y: *const f64,
    n: usize,
    cfg: *const QcCheckConfig,
    out: *mut QcVerdict,
) -> QcStatus {
    verdict_call(conditions::check_a, f, x, y, n, cfg, out)
}

/// # Safety
/// As for [`qc_check_a`].
#[no_mangle]
pub unsafe extern "C" fn qc_check_b(
    f: *const QcField,
    x: *const f64,
    y: *const f64,
    n: usize,
    cfg: *const QcCheckConfig,
    out: *mut QcVerdict,
) -> QcStatus {
    verdict_call(conditions::check_b, f, x, y, n, cfg, out)
}

/// # Safety
/// As for [`qc_check_a`].
#[no_mangle]
pub unsafe extern "C" fn qc_check_c(
    f: *const QcField,
    x: *const f64,
    y: *const f64,
    n: usize,
    cfg: *const QcCheckConfig,
    out: *mut QcVerdict,
) -> QcStatus {
    verdict_call(conditions::check_c, f, x, y, n, cfg, out)
}

/// σ* estimate from `pairs` uniformly sampled pairs on the field's box.
///
/// # Safety
/// `cfg` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_sigma_star_estimate(
    f: *const QcField,
    seed: u64,
    pairs: usize,
    cfg: *const QcCheckConfig,
    out: *mut f64,
) -> QcStatus {
    guard(|| {
        let field = &f.as_ref().ok_or_else(|| null("field"))?.0;
        let cfg = check_config(cfg)?;
        let s = Sampler::new(Strategy::UniformBox, seed, pairs, field.domain().clone());
        let est = sigma_star_estimate(field, &s, &cfg).map_err(lib)?;
        put(out, est.raw, "out")
    })
}

/// Runs a CLI command (`check`, `sigma`, ...) with a JSON run config and
/// returns the JSON report in `*out_json` and its exit code in
/// `*exit_code`. Free the string with `qc_string_free`.
///
/// # Safety
/// Strings must be NUL-terminated; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_run_json(
    command: *const c_char,
    config_json: *const c_char,
    out_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> QcStatus {
    guard(|| {
        use quasiconv::cli::{run, Command, RunConfig};
        let cmd = str_arg(command, "command")?;
        let cfg_text = str_arg(config_json, "config_json")?;
        let command: Command = serde_json::from_value(serde_json::Value::String(cmd.to_string()))
            .map_err(|_| (QcStatus::Usage, format!("unknown command '{cmd}'")))?;
        let cfg: RunConfig = serde_json::from_str(cfg_text).map_err(|e| (QcStatus::Config, e.to_string()))?;
        let report = run(command, &cfg).map_err(lib)?;
        let text = CString::new(report.to_json()).map_err(|_| (QcStatus::Panic, "report has a NUL byte".into()))?;
        if out_json.is_null() || exit_code.is_null() {
            return Err(null("output pointer"));
        }
        exit_code.write(report.exit_code);
        out_json.write(text.into_raw());
        Ok(())
    })
}

/// Frees a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
