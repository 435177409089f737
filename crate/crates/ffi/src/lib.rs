//! C ABI for the toricq toolkit.
//!
//! Handles are opaque pointers created by `toricq_fan_from_json` or
//! `toricq_fan_builtin` and released with `toricq_fan_free`. Every
//! payload-producing call writes a heap-allocated, NUL-terminated JSON
//! string through its `out_json` parameter; release it with
//! `toricq_string_free`. Status codes mirror the `toricq` CLI exit
//! codes (0 ok, 1 parse, 2 invalid fan, 3 out of regime, 4 mismatch)
//! plus FFI-only codes for null arguments, invalid UTF-8, and caught
//! panics. After any non-OK status, `toricq_last_error` returns a
//! thread-local message describing the failure.
//!
//! Payloads are byte-identical to the JSON the CLI prints for the same
//! fan and options: both go through the same payload builders.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use toricq::cli::{
    compare_pn_payload, fan_error_label, ifun_payload, info_payload, mirror_payload,
    validate_payload, Failure, FormatArg, PartArg, RunConfig, DEFAULT_DEGREE_BOUND,
    DEFAULT_T_TRUNC, EXIT_INVALID_FAN, EXIT_IO_PARSE, EXIT_MISMATCH, EXIT_OK,
    EXIT_OUT_OF_REGIME,
};
use toricq::fan::Fan;
use toricq::jsonio::{builtin_fan, builtin_names, parse_fan_json, ReadFanError};

/// Result of every fallible call. The first five values match the
/// `toricq` CLI exit codes; the rest are FFI-specific.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToricqStatus {
    Ok = 0,
    ParseError = 1,
    InvalidFan = 2,
    OutOfRegime = 3,
    Mismatch = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    Panicked = 7,
}

/// Opaque handle to a validated complete nonsingular fan.
pub struct ToricqFan {
    inner: Fan,
}

/// Options shared by the payload-producing calls. Obtain defaults from
/// `toricq_options_default` and override fields as needed; passing a
/// NULL options pointer is equivalent to the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ToricqOptions {
    /// Maximal-cone index (0-based) whose complement rays give the
    /// Picard basis; negative means the default cone 0.
    pub basis_cone: i32,
    /// Polarization spec "pic:c1,..,cr" or "ray:a1,..,al"; NULL means
    /// the anticanonical class, which must then be ample.
    pub polarization: *const c_char,
    /// Largest polarization degree of enumerated curve classes.
    pub degree_bound: i64,
    /// Total-degree cap on the deformation parameters t_0..t_r.
    pub t_trunc: u32,
    /// Lowest retained z exponent; read only when has_z_floor is nonzero,
    /// otherwise the documented default formula applies.
    pub z_floor: i64,
    pub has_z_floor: u8,
    /// Nonzero selects the big_I_k0 series for `toricq_ifun_json`;
    /// zero selects small_I.
    pub big_i_k0: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_from_exit_code(code: i32) -> ToricqStatus {
    match code {
        EXIT_OK => ToricqStatus::Ok,
        EXIT_IO_PARSE => ToricqStatus::ParseError,
        EXIT_INVALID_FAN => ToricqStatus::InvalidFan,
        EXIT_OUT_OF_REGIME => ToricqStatus::OutOfRegime,
        EXIT_MISMATCH => ToricqStatus::Mismatch,
        _ => ToricqStatus::Panicked,
    }
}

fn failure_status(f: &Failure) -> ToricqStatus {
    set_error(&f.message);
    status_from_exit_code(f.code)
}

/// Reads a NUL-terminated UTF-8 string; the caller guarantees the
/// pointer is either null or valid.
unsafe fn read_c_str(ptr: *const c_char) -> Result<Option<&'static str>, ToricqStatus> {
    if ptr.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Some(s)),
        Err(_) => {
            set_error("argument is not valid UTF-8");
            Err(ToricqStatus::InvalidUtf8)
        }
    }
}

fn null_argument(name: &str) -> ToricqStatus {
    set_error(&format!("{name} must not be null"));
    ToricqStatus::NullArgument
}

/// Writes `payload` through `out_json` as a heap CString the caller
/// frees with `toricq_string_free`. `out_json` must be non-null.
unsafe fn write_out(payload: String, out_json: *mut *mut c_char) {
    let c = CString::new(payload.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("{}").unwrap());
    *out_json = c.into_raw();
}

fn config_from_options(options: Option<&ToricqOptions>) -> Result<RunConfig, ToricqStatus> {
    let mut config = RunConfig::new("");
    let Some(opts) = options else {
        return Ok(config);
    };
    if opts.basis_cone >= 0 {
        config.basis_cone = Some(opts.basis_cone as usize);
    }
    if !opts.polarization.is_null() {
        let spec = unsafe { read_c_str(opts.polarization) }?;
        config.polarization = spec.map(str::to_owned);
    }
    config.degree_bound = opts.degree_bound;
    config.t_trunc = opts.t_trunc;
    if opts.has_z_floor != 0 {
        config.z_floor = Some(opts.z_floor);
    }
    config.part = if opts.big_i_k0 != 0 { PartArg::BigIK0 } else { PartArg::SmallI };
    config.format = FormatArg::Json;
    Ok(config)
}

/// Runs `body` with panics converted to `ToricqStatus::Panicked`.
fn guarded(body: impl FnOnce() -> ToricqStatus) -> ToricqStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".to_string());
            set_error(&format!("internal panic: {msg}"));
            ToricqStatus::Panicked
        }
    }
}

/// The options used when a payload call receives a NULL options pointer.
#[no_mangle]
pub extern "C" fn toricq_options_default() -> ToricqOptions {
    ToricqOptions {
        basis_cone: -1,
        polarization: std::ptr::null(),
        degree_bound: DEFAULT_DEGREE_BOUND,
        t_trunc: DEFAULT_T_TRUNC,
        z_floor: 0,
        has_z_floor: 0,
        big_i_k0: 0,
    }
}

/// Parses and validates a fan from JSON (1-based cone indices, same
/// schema as the CLI's fan files). On success writes a new handle
/// through `out_fan`.
///
/// # Safety
/// `json` and `name` must be null or NUL-terminated strings; `out_fan`
/// must be a valid, non-null pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn toricq_fan_from_json(
    json: *const c_char,
    name: *const c_char,
    out_fan: *mut *mut ToricqFan,
) -> ToricqStatus {
    guarded(|| {
        clear_error();
        if out_fan.is_null() {
            return null_argument("out_fan");
        }
        let Some(text) = (match read_c_str(json) {
            Ok(v) => v,
            Err(status) => return status,
        }) else {
            return null_argument("json");
        };
        let fallback = match read_c_str(name) {
            Ok(v) => v,
            Err(status) => return status,
        };
        match parse_fan_json(text, fallback) {
            Ok(fan) => {
                *out_fan = Box::into_raw(Box::new(ToricqFan { inner: fan }));
                ToricqStatus::Ok
            }
            Err(ReadFanError::Parse(msg)) => {
                set_error(&format!("cannot parse fan JSON: {msg}"));
                ToricqStatus::ParseError
            }
            Err(ReadFanError::Invalid(e)) => {
                set_error(&format!("invalid fan [{}]: {e}", fan_error_label(&e)));
                ToricqStatus::InvalidFan
            }
        }
    })
}

/// Loads one of the built-in fans (p1, p2, p3, p4, p1xp1, f2).
///
/// # Safety
/// `name` must be null or a NUL-terminated string; `out_fan` must be a
/// valid, non-null pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn toricq_fan_builtin(
    name: *const c_char,
    out_fan: *mut *mut ToricqFan,
) -> ToricqStatus {
    guarded(|| {
        clear_error();
        if out_fan.is_null() {
            return null_argument("out_fan");
        }
        let Some(text) = (match read_c_str(name) {
            Ok(v) => v,
            Err(status) => return status,
        }) else {
            return null_argument("name");
        };
        match builtin_fan(text) {
            Some(fan) => {
                *out_fan = Box::into_raw(Box::new(ToricqFan { inner: fan }));
                ToricqStatus::Ok
            }
            None => {
                set_error(&format!(
                    "unknown fan '{text}'; built-ins: {}",
                    builtin_names().join(", ")
                ));
                ToricqStatus::ParseError
            }
        }
    })
}

/// Releases a fan handle; a null pointer is ignored.
///
/// # Safety
/// `fan` must be null or a pointer previously returned through
/// `toricq_fan_from_json` or `toricq_fan_builtin`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn toricq_fan_free(fan: *mut ToricqFan) {
    if !fan.is_null() {
        drop(Box::from_raw(fan));
    }
}

/// Ambient lattice dimension, or -1 for a null handle.
///
/// # Safety
/// `fan` must be null or a live fan handle.
#[no_mangle]
pub unsafe extern "C" fn toricq_fan_dim(fan: *const ToricqFan) -> i32 {
    match fan.as_ref() {
        Some(f) => f.inner.dim() as i32,
        None => -1,
    }
}

/// Number of rays, or -1 for a null handle.
///
/// # Safety
/// `fan` must be null or a live fan handle.
#[no_mangle]
pub unsafe extern "C" fn toricq_fan_n_rays(fan: *const ToricqFan) -> i32 {
    match fan.as_ref() {
        Some(f) => f.inner.n_rays() as i32,
        None => -1,
    }
}

/// Picard rank (rays minus dimension), or -1 for a null handle.
///
/// # Safety
/// `fan` must be null or a live fan handle.
#[no_mangle]
pub unsafe extern "C" fn toricq_fan_picard_rank(fan: *const ToricqFan) -> i32 {
    match fan.as_ref() {
        Some(f) => (f.inner.n_rays() - f.inner.dim()) as i32,
        None => -1,
    }
}

unsafe fn payload_entry(
    fan: *const ToricqFan,
    options: *const ToricqOptions,
    out_json: *mut *mut c_char,
    build: impl FnOnce(&Fan, &RunConfig) -> Result<(String, i32), Failure>,
) -> ToricqStatus {
    guarded(|| {
        clear_error();
        if out_json.is_null() {
            return null_argument("out_json");
        }
        let Some(handle) = fan.as_ref() else {
            return null_argument("fan");
        };
        let config = match config_from_options(options.as_ref()) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match build(&handle.inner, &config) {
            Ok((payload, code)) => {
                write_out(payload, out_json);
                status_from_exit_code(code)
            }
            Err(f) => failure_status(&f),
        }
    })
}

/// Validation report for the fan, as the CLI's `validate` JSON payload.
/// Options are ignored; a NULL options pointer is fine.
///
/// # Safety
/// `fan` must be a live fan handle; `options` must be null or valid;
/// `out_json` must be a valid, non-null pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn toricq_validate_json(
    fan: *const ToricqFan,
    options: *const ToricqOptions,
    out_json: *mut *mut c_char,
) -> ToricqStatus {
    payload_entry(fan, options, out_json, |f, _| {
        Ok((validate_payload(f, FormatArg::Json), 0))
    })
}

/// Geometry report (weight matrix, wall curves, positivity verdicts,
/// Betti numbers), as the CLI's `info` JSON payload.
///
/// # Safety
/// `fan` must be a live fan handle; `options` must be null or valid;
/// `out_json` must be a valid, non-null pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn toricq_info_json(
    fan: *const ToricqFan,
    options: *const ToricqOptions,
    out_json: *mut *mut c_char,
) -> ToricqStatus {
    payload_entry(fan, options, out_json, |f, c| info_payload(f, c).map(|p| (p, 0)))
}

/// Truncated series (small_I, or big_I_k0 when options select it), as
/// the CLI's `ifun` JSON payload.
///
/// # Safety
/// `fan` must be a live fan handle; `options` must be null or valid;
/// `out_json` must be a valid, non-null pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn toricq_ifun_json(
    fan: *const ToricqFan,
    options: *const ToricqOptions,
    out_json: *mut *mut c_char,
) -> ToricqStatus {
    payload_entry(fan, options, out_json, |f, c| ifun_payload(f, c).map(|p| (p, 0)))
}

/// Mirror map, its inverse, the round-trip check, and the substituted
/// series, as the CLI's `mirror` JSON payload.
///
/// # Safety
/// `fan` must be a live fan handle; `options` must be null or valid;
/// `out_json` must be a valid, non-null pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn toricq_mirror_json(
    fan: *const ToricqFan,
    options: *const ToricqOptions,
    out_json: *mut *mut c_char,
) -> ToricqStatus {
    payload_entry(fan, options, out_json, |f, c| mirror_payload(f, c).map(|p| (p, 0)))
}

/// Coefficient-by-coefficient comparison against the closed-form
/// projective-space series, as the CLI's `compare-pn` JSON payload.
/// Returns Ok when identical and Mismatch when any coefficient
/// differs; both outcomes write the payload. The polarization option
/// must stay NULL, matching the CLI contract.
///
/// # Safety
/// `fan` must be a live fan handle; `options` must be null or valid;
/// `out_json` must be a valid, non-null pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn toricq_compare_pn_json(
    fan: *const ToricqFan,
    options: *const ToricqOptions,
    out_json: *mut *mut c_char,
) -> ToricqStatus {
    payload_entry(fan, options, out_json, compare_pn_payload)
}

/// Message for the most recent non-OK status on this thread, or null
/// if none. The pointer stays valid until the next toricq call on the
/// same thread; do not free it.
#[no_mangle]
pub extern "C" fn toricq_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(c) => c.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Releases a string written through an `out_json` parameter; a null
/// pointer is ignored.
///
/// # Safety
/// `s` must be null or a pointer previously written by a toricq call,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn toricq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
