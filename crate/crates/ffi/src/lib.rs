//! C interface to `ifslab`.
//!
//! Systems and point clouds are opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`IfslabStatus`]; on failure `ifslab_last_error_message` holds
//! a description for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ifslab::codespace::{AddressSpec, Word};
use ifslab::config::IfsConfig;
use ifslab::ifscore::IfsInstance;
use ifslab::metricsets::{self, PointCloud};
use ifslab::verifier::{CheckId, Verifier, VerifyOptions};
use ifslab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IfslabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    DimensionMismatch = 4,
    NotConverged = 5,
    BufferTooSmall = 6,
    CheckFailed = 7,
    Internal = 8,
}

/// An iterated function system parsed from a TOML description.
pub struct IfslabIfs {
    config: IfsConfig,
    instance: IfsInstance,
}

/// A finite set of points in R^m, stored row-major.
pub struct IfslabCloud {
    cloud: PointCloud,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> IfslabStatus {
    match err {
        Error::Parse(_) | Error::UnknownCheck(_) | Error::LetterOutOfRange { .. } | Error::Csv(_) => {
            IfslabStatus::Parse
        }
        Error::DimensionMismatch { .. } => IfslabStatus::DimensionMismatch,
        Error::NotConverged { .. } | Error::AttractorNotConverged | Error::InvarianceViolated { .. } => {
            IfslabStatus::NotConverged
        }
        _ => IfslabStatus::InvalidArgument,
    }
}

struct Failure(IfslabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> IfslabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IfslabStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            IfslabStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(IfslabStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IfslabStatus::InvalidArgument, format!("`{what}` is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn copy_point(p: &[f64], out: *mut f64, out_len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    if out_len < p.len() {
        return Err(Failure(IfslabStatus::BufferTooSmall, format!("need {} values, got room for {out_len}", p.len())));
    }
    ptr::copy_nonoverlapping(p.as_ptr(), out, p.len());
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Description of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ifslab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn ifslab_status_name(status: IfslabStatus) -> *const c_char {
    let s: &'static CStr = match status {
        IfslabStatus::Ok => c"ok",
        IfslabStatus::NullPointer => c"null pointer",
        IfslabStatus::InvalidArgument => c"invalid argument",
        IfslabStatus::Parse => c"parse error",
        IfslabStatus::DimensionMismatch => c"dimension mismatch",
        IfslabStatus::NotConverged => c"not converged",
        IfslabStatus::BufferTooSmall => c"buffer too small",
        IfslabStatus::CheckFailed => c"check failed",
        IfslabStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ifslab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a TOML system description.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_from_toml(toml: *const c_char, out: *mut *mut IfslabIfs) -> IfslabStatus {
    guard(|| {
        let text = str_arg(toml, "toml")?;
        let config = IfsConfig::parse(text)?;
        let instance = config.instance()?;
        put(out, IfslabIfs { config, instance })
    })
}

/// # Safety
/// `ifs` must come from `ifslab_ifs_from_toml` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_free(ifs: *mut IfslabIfs) {
    if !ifs.is_null() {
        drop(Box::from_raw(ifs));
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `ifs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_dimension(ifs: *const IfslabIfs) -> usize {
    ifs.as_ref().map_or(0, |s| s.instance.dim())
}

/// Number of maps, or 0 for a null handle.
///
/// # Safety
/// `ifs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_map_count(ifs: *const IfslabIfs) -> usize {
    ifs.as_ref().map_or(0, |s| s.instance.maps().len())
}

/// Iterates from the configured seed. A cloud is returned even when the
/// iteration did not converge; `converged` reports which.
///
/// # Safety
/// `ifs` must be a live handle; `out` and `converged` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_attractor(
    ifs: *const IfslabIfs,
    out: *mut *mut IfslabCloud,
    converged: *mut bool,
) -> IfslabStatus {
    guard(|| {
        let s = ref_arg(ifs, "ifs")?;
        if converged.is_null() {
            return Err(null("converged"));
        }
        let res = s.instance.attractor(&s.config.seed_cloud()?)?;
        *converged = res.converged;
        put(out, IfslabCloud { cloud: res.cloud })
    })
}

/// Writes the point coded by an address such as `"0|1"` into `out`.
///
/// # Safety
/// `ifs` must be a live handle, `address` NUL-terminated, `out` writable for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_address_point(
    ifs: *const IfslabIfs,
    address: *const c_char,
    out: *mut f64,
    out_len: usize,
) -> IfslabStatus {
    guard(|| {
        let s = ref_arg(ifs, "ifs")?;
        let text = str_arg(address, "address")?;
        let a = AddressSpec::parse_with(text, s.instance.alphabet(), |t| s.config.resolve_letter(t))?;
        copy_point(&s.instance.coding_map(&a)?, out, out_len)
    })
}

/// Writes the fixed point of the composition along a word such as `"0.1"` into `out`.
///
/// # Safety
/// `ifs` must be a live handle, `word` NUL-terminated, `out` writable for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_fixed_point(
    ifs: *const IfslabIfs,
    word: *const c_char,
    out: *mut f64,
    out_len: usize,
) -> IfslabStatus {
    guard(|| {
        let s = ref_arg(ifs, "ifs")?;
        let text = str_arg(word, "word")?;
        let w = Word::parse_with(text, s.instance.alphabet(), |t| s.config.resolve_letter(t))?;
        copy_point(&s.instance.word_fixed_point(&w)?, out, out_len)
    })
}

/// Random-iteration orbit from the origin, deterministic in `seed`.
///
/// # Safety
/// `ifs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_chaos_game(
    ifs: *const IfslabIfs,
    steps: usize,
    burn_in: usize,
    seed: u64,
    out: *mut *mut IfslabCloud,
) -> IfslabStatus {
    guard(|| {
        let s = ref_arg(ifs, "ifs")?;
        let cloud = s.instance.chaos_game(steps, burn_in, seed)?;
        put(out, IfslabCloud { cloud })
    })
}

/// Runs the comma-separated checks (or `"all"`). `report` receives one
/// `CHECK ...` line per result, to be released with `ifslab_string_free`.
/// Returns `CheckFailed` when any check fails.
///
/// # Safety
/// `ifs` must be a live handle, `checks` NUL-terminated, `report` writable.
#[no_mangle]
pub unsafe extern "C" fn ifslab_ifs_verify(
    ifs: *const IfslabIfs,
    checks: *const c_char,
    seed: u64,
    report: *mut *mut c_char,
) -> IfslabStatus {
    guard(|| {
        let s = ref_arg(ifs, "ifs")?;
        if report.is_null() {
            return Err(null("report"));
        }
        let ids = CheckId::parse_list(str_arg(checks, "checks")?)?;
        let opts = VerifyOptions { seed, seed_cloud: Some(s.config.seed_cloud()?), ..VerifyOptions::default() };
        let reports = Verifier::new(&s.instance, opts)?.run_all(&ids);
        let text: String = reports.iter().map(|r| format!("{r}\n")).collect();
        *report = CString::new(text).unwrap_or_default().into_raw();
        match reports.iter().find(|r| !r.passed) {
            None => Ok(()),
            Some(r) => Err(Failure(IfslabStatus::CheckFailed, format!("check {} failed", r.id))),
        }
    })
}

/// Copies `n_points × dimension` row-major coordinates into a new cloud.
///
/// # Safety
/// `coords` must be readable for `n_points * dimension` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ifslab_cloud_new(
    dimension: usize,
    coords: *const f64,
    n_points: usize,
    out: *mut *mut IfslabCloud,
) -> IfslabStatus {
    guard(|| {
        if coords.is_null() {
            return Err(null("coords"));
        }
        let len = n_points
            .checked_mul(dimension)
            .ok_or_else(|| Failure(IfslabStatus::InvalidArgument, "size overflow".into()))?;
        let data = std::slice::from_raw_parts(coords, len).to_vec();
        put(out, IfslabCloud { cloud: PointCloud::new(dimension, data)? })
    })
}

/// # Safety
/// `cloud` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ifslab_cloud_free(cloud: *mut IfslabCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `cloud` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ifslab_cloud_len(cloud: *const IfslabCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.cloud.len())
}

/// # Safety
/// `cloud` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ifslab_cloud_dimension(cloud: *const IfslabCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.cloud.dim())
}

/// Row-major coordinates, valid while the cloud lives.
///
/// # Safety
/// `cloud` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ifslab_cloud_data(cloud: *const IfslabCloud) -> *const f64 {
    cloud.as_ref().map_or(ptr::null(), |c| c.cloud.coords().as_ptr())
}

/// Hausdorff distance between two clouds of equal dimension.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ifslab_hausdorff(a: *const IfslabCloud, b: *const IfslabCloud, out: *mut f64) -> IfslabStatus {
    guard(|| {
        let a = ref_arg(a, "a")?;
        let b = ref_arg(b, "b")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = metricsets::hausdorff(&a.cloud, &b.cloud)?;
        Ok(())
    })
}
