//! C ABI for the digit-statistics and prime-interpolant library.
//!
//! Conventions:
//!
//! * Handles ([`NlabTables`], [`NlabSvFunction`]) are opaque; create them
//!   with the `*_build`/`*_new` functions and release them with the
//!   matching `*_free`. A handle is never invalidated by a failed call.
//! * Every fallible function returns an [`NlabStatus`]; outputs are
//!   written through pointers only on `Ok`. [`nlab_last_error_message`]
//!   describes the most recent failure on the calling thread.
//! * Strings returned through `char **` are NUL-terminated, heap
//!   allocated, and must be released with [`nlab_string_free`].
//! * Panics never unwind across the boundary; they surface as
//!   [`NlabStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use nlab::blocks;
use nlab::digits::{self, Block, SeqKind, StreamSpec};
use nlab::error::NlabError;
use nlab::eta;
use nlab::primes::{self, PrimeTables};
use nlab::svfun::{parse_rational, SvFunction, SvParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlabStatus {
    /// The call succeeded and outputs are valid.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Arguments violate a documented precondition.
    Usage = 2,
    /// A query reached past the sieved range or a function's domain.
    OutOfRange = 3,
    /// An asymptotic bound was requested below its validity threshold.
    Threshold = 4,
    /// A certified invariant failed; results must not be trusted.
    InvariantViolation = 5,
    /// Internal cross-check failure (a bug in the library).
    Internal = 6,
    /// File or cache problem.
    Io = 7,
    /// A string argument was not valid UTF-8.
    InvalidString = 8,
}

/// Opaque prime tables handle.
pub struct NlabTables(Arc<PrimeTables>);

/// Opaque interpolant handle.
pub struct NlabSvFunction(SvFunction);

/// One log-ratio sample with its two-sided bounds.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NlabEtaSample {
    /// Sample point.
    pub x: f64,
    /// Sampled log-ratio.
    pub value: f64,
    /// Lower bound at `x`.
    pub lower: f64,
    /// Upper bound at `x`.
    pub upper: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn record_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn fail(e: &NlabError) -> NlabStatus {
    record_error(&e.to_string());
    match e {
        NlabError::Usage(_) => NlabStatus::Usage,
        NlabError::OutOfRange(_) => NlabStatus::OutOfRange,
        NlabError::Threshold(_) => NlabStatus::Threshold,
        NlabError::InvariantViolation(_) => NlabStatus::InvariantViolation,
        NlabError::Internal(_) => NlabStatus::Internal,
        NlabError::Cache(_) | NlabError::Io(_) => NlabStatus::Io,
    }
}

fn null_pointer(what: &str) -> NlabStatus {
    record_error(&format!("{what} must not be NULL"));
    NlabStatus::NullPointer
}

fn guarded(f: impl FnOnce() -> NlabStatus) -> NlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            record_error("internal panic crossed the C boundary");
            NlabStatus::Internal
        }
    }
}

/// # Safety
/// `p` must be NULL or a NUL-terminated string valid for the call.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, NlabStatus> {
    if p.is_null() {
        return Err(null_pointer(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        record_error(&format!("{what} is not valid UTF-8"));
        NlabStatus::InvalidString
    })
}

unsafe fn tables_arg<'a>(p: *const NlabTables) -> Result<&'a Arc<PrimeTables>, NlabStatus> {
    if p.is_null() {
        return Err(null_pointer("tables handle"));
    }
    Ok(&(*p).0)
}

unsafe fn svfun_arg<'a>(p: *const NlabSvFunction) -> Result<&'a SvFunction, NlabStatus> {
    if p.is_null() {
        return Err(null_pointer("interpolant handle"));
    }
    Ok(&(*p).0)
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> NlabStatus {
    if out.is_null() {
        return null_pointer(what);
    }
    out.write(value);
    NlabStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn nlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer previously returned through a `char **`
/// output of this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- prime tables --------------------------------------------------------

/// Sieve all primes up to `limit` (inclusive) and return a handle.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn nlab_tables_build(limit: u64, out: *mut *mut NlabTables) -> NlabStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("output handle");
        }
        match primes::build_tables(limit) {
            Ok(t) => write_out(
                out,
                Box::into_raw(Box::new(NlabTables(Arc::new(t)))),
                "output handle",
            ),
            Err(e) => fail(&e),
        }
    })
}

/// Load tables from a cache file written by [`nlab_tables_save`].
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_tables_load(
    path: *const c_char,
    out: *mut *mut NlabTables,
) -> NlabStatus {
    guarded(|| {
        let path = match str_arg(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if out.is_null() {
            return null_pointer("output handle");
        }
        match PrimeTables::load_cache(Path::new(path)) {
            Ok(t) => write_out(
                out,
                Box::into_raw(Box::new(NlabTables(Arc::new(t)))),
                "output handle",
            ),
            Err(e) => fail(&e),
        }
    })
}

/// Write the tables to a cache file.
///
/// # Safety
/// `tables` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nlab_tables_save(
    tables: *const NlabTables,
    path: *const c_char,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let path = match str_arg(path, "path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match t.save_cache(Path::new(path)) {
            Ok(()) => NlabStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Release a tables handle.
///
/// # Safety
/// `tables` must be NULL or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nlab_tables_free(tables: *mut NlabTables) {
    if !tables.is_null() {
        drop(Box::from_raw(tables));
    }
}

/// Sieve limit of the handle.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_tables_limit(tables: *const NlabTables, out: *mut u64) -> NlabStatus {
    guarded(|| match tables_arg(tables) {
        Ok(t) => write_out(out, t.limit(), "output"),
        Err(status) => status,
    })
}

/// Number of sieved primes.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_tables_prime_count(
    tables: *const NlabTables,
    out: *mut u64,
) -> NlabStatus {
    guarded(|| match tables_arg(tables) {
        Ok(t) => write_out(out, t.prime_count(), "output"),
        Err(status) => status,
    })
}

/// Number of primes `<= x`.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_pi(tables: *const NlabTables, x: u64, out: *mut u64) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match t.pi(x) {
            Ok(v) => write_out(out, v, "output"),
            Err(e) => fail(&e),
        }
    })
}

/// The m-th prime, 1-indexed.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_nth_prime(
    tables: *const NlabTables,
    m: u64,
    out: *mut u64,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match t.nth_prime(m) {
            Ok(v) => write_out(out, v, "output"),
            Err(e) => fail(&e),
        }
    })
}

/// The m-th prime gap `p_{m+1} - p_m`.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_gap(tables: *const NlabTables, m: u64, out: *mut u64) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match t.gap(m) {
            Ok(v) => write_out(out, v, "output"),
            Err(e) => fail(&e),
        }
    })
}

/// Whether `x` is prime.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_is_prime(
    tables: *const NlabTables,
    x: u64,
    out: *mut bool,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match t.is_prime(x) {
            Ok(v) => write_out(out, v, "output"),
            Err(e) => fail(&e),
        }
    })
}

/// Maximum of `gap / ln^2(p)` over all sieved gaps, and where it occurs.
///
/// # Safety
/// `tables` must be a live handle; outputs writable or NULL to skip.
#[no_mangle]
pub unsafe extern "C" fn nlab_cramer_max_ratio(
    tables: *const NlabTables,
    ratio_out: *mut f64,
    argmax_out: *mut u64,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match t.cramer_stats() {
            Ok(stats) => {
                if !ratio_out.is_null() {
                    ratio_out.write(stats.max_ratio);
                }
                if !argmax_out.is_null() {
                    argmax_out.write(stats.argmax_m);
                }
                NlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

// ---- digit streams and block counts --------------------------------------

fn stream_spec(seq: &str, base: u32, start: u64) -> Result<StreamSpec, NlabStatus> {
    let kind = SeqKind::from_token(seq).map_err(|e| fail(&e))?;
    StreamSpec::new(kind, base, start).map_err(|e| fail(&e))
}

/// First `n_digits` digits of the concatenated sequence, as ASCII
/// (0-9, then a-z for bases above 10). `seq` is one of "natural",
/// "square", "floor-sqrt", "primes", "prime-count".
///
/// # Safety
/// `tables` must be a live handle; `seq` a NUL-terminated string; `out`
/// writable. The result must be freed with [`nlab_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nlab_prefix_ascii(
    tables: *const NlabTables,
    seq: *const c_char,
    base: u32,
    start: u64,
    n_digits: u64,
    out: *mut *mut c_char,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let seq = match str_arg(seq, "sequence name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if out.is_null() {
            return null_pointer("output string");
        }
        let spec = match stream_spec(seq, base, start) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match digits::prefix(&spec, n_digits, t) {
            Ok(block) => {
                let text = CString::new(block.to_ascii()).expect("ASCII digits have no NUL");
                write_out(out, text.into_raw(), "output string")
            }
            Err(e) => fail(&e),
        }
    })
}

/// Occurrences of `needle` in `haystack` (digit strings in `base`),
/// counting overlapping matches.
///
/// # Safety
/// `haystack` and `needle` must be NUL-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_count_overlapping(
    haystack: *const c_char,
    needle: *const c_char,
    base: u32,
    out: *mut u64,
) -> NlabStatus {
    guarded(|| {
        let hay = match str_arg(haystack, "haystack") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let needle = match str_arg(needle, "needle") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let hay = match Block::parse(hay, base) {
            Ok(b) => b,
            Err(e) => return fail(&e),
        };
        let needle = match Block::parse(needle, base) {
            Ok(b) => b,
            Err(e) => return fail(&e),
        };
        match blocks::count_overlapping(&hay, &needle) {
            Ok(v) => write_out(out, v, "output"),
            Err(e) => fail(&e),
        }
    })
}

/// Digit frequencies over the concatenation of `entries` entries:
/// `counts_out` must hold `base` slots; slot d receives the count of
/// digit d. `denominator_out` (optional) receives the total digit count.
///
/// # Safety
/// `tables` must be a live handle; `seq` a NUL-terminated string;
/// `counts_out` an array of at least `base` u64 slots.
#[no_mangle]
pub unsafe extern "C" fn nlab_digit_frequencies(
    tables: *const NlabTables,
    seq: *const c_char,
    base: u32,
    start: u64,
    entries: u64,
    counts_out: *mut u64,
    denominator_out: *mut u64,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let seq = match str_arg(seq, "sequence name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if counts_out.is_null() {
            return null_pointer("counts array");
        }
        let spec = match stream_spec(seq, base, start) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match blocks::census(&spec, 1, blocks::CensusScope::Entries(entries), t) {
            Ok(census) => {
                for d in 0..base {
                    counts_out.add(d as usize).write(census.get(&[d as u8]));
                }
                if !denominator_out.is_null() {
                    denominator_out.write(census.n_digits());
                }
                NlabStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

// ---- interpolant ---------------------------------------------------------

/// Build the interpolant over `tables`. `eps` and `delta` are rationals
/// in (0, 1) like "1/25" or "0.04"; NULL selects the default 1/25.
///
/// # Safety
/// `tables` must be a live handle; `eps`/`delta` NULL or NUL-terminated;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_svfun_new(
    tables: *const NlabTables,
    eps: *const c_char,
    delta: *const c_char,
    out: *mut *mut NlabSvFunction,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        if out.is_null() {
            return null_pointer("output handle");
        }
        let default = SvParams::default();
        let eps_val = if eps.is_null() {
            default.eps().clone()
        } else {
            match str_arg(eps, "eps").and_then(|s| parse_rational(s).map_err(|e| fail(&e))) {
                Ok(v) => v,
                Err(status) => return status,
            }
        };
        let delta_val = if delta.is_null() {
            default.delta().clone()
        } else {
            match str_arg(delta, "delta").and_then(|s| parse_rational(s).map_err(|e| fail(&e))) {
                Ok(v) => v,
                Err(status) => return status,
            }
        };
        let params = match SvParams::new(eps_val, delta_val) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        };
        let f = SvFunction::new(Arc::clone(t), params);
        write_out(out, Box::into_raw(Box::new(NlabSvFunction(f))), "output handle")
    })
}

/// Release an interpolant handle.
///
/// # Safety
/// `f` must be NULL or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nlab_svfun_free(f: *mut NlabSvFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

fn rational_point(x: f64) -> Result<BigRational, NlabStatus> {
    BigRational::from_float(x).ok_or_else(|| {
        record_error(&format!("x = {x} is not a finite number"));
        NlabStatus::Usage
    })
}

/// Evaluate the interpolant at `x` (exact internally, rounded to f64).
///
/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_svfun_value(
    f: *const NlabSvFunction,
    x: f64,
    out: *mut f64,
) -> NlabStatus {
    guarded(|| {
        let f = match svfun_arg(f) {
            Ok(f) => f,
            Err(status) => return status,
        };
        let x = match rational_point(x) {
            Ok(x) => x,
            Err(status) => return status,
        };
        match f.f_eval(&x) {
            Ok(v) => write_out(out, v.to_f64().unwrap_or(f64::INFINITY), "output"),
            Err(e) => fail(&e),
        }
    })
}

/// Evaluate the interpolant's derivative at `x`.
///
/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_svfun_derivative(
    f: *const NlabSvFunction,
    x: f64,
    out: *mut f64,
) -> NlabStatus {
    guarded(|| {
        let f = match svfun_arg(f) {
            Ok(f) => f,
            Err(status) => return status,
        };
        let x = match rational_point(x) {
            Ok(x) => x,
            Err(status) => return status,
        };
        match f.f_prime_eval(&x) {
            Ok(v) => write_out(out, v.to_f64().unwrap_or(f64::INFINITY), "output"),
            Err(e) => fail(&e),
        }
    })
}

/// Run the construction checks over intervals `2..=m_max` with `samples`
/// random points from `seed`. `passed_out` receives the overall verdict;
/// the call itself fails only if the checks cannot run.
///
/// # Safety
/// `f` must be a live handle; `passed_out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_svfun_check(
    f: *const NlabSvFunction,
    m_max: u64,
    samples: u64,
    seed: u64,
    passed_out: *mut bool,
) -> NlabStatus {
    guarded(|| {
        let f = match svfun_arg(f) {
            Ok(f) => f,
            Err(status) => return status,
        };
        match f.check_construction(m_max, samples, seed) {
            Ok(report) => write_out(passed_out, report.passed, "output"),
            Err(e) => fail(&e),
        }
    })
}

// ---- log-ratio samples ---------------------------------------------------

fn eta_out(sample: eta::EtaSample) -> NlabEtaSample {
    NlabEtaSample {
        x: sample.x,
        value: sample.value,
        lower: sample.lower_bound,
        upper: sample.upper_bound,
    }
}

/// Sample `ln f(x) / ln x` with its sandwich bounds (x >= 60184).
///
/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_eta_value_sample(
    f: *const NlabSvFunction,
    x: f64,
    out: *mut NlabEtaSample,
) -> NlabStatus {
    guarded(|| {
        let f = match svfun_arg(f) {
            Ok(f) => f,
            Err(status) => return status,
        };
        match eta::eta_f_sample(f, x) {
            Ok(s) => write_out(out, eta_out(s), "output"),
            Err(e) => fail(&e),
        }
    })
}

/// Sample `ln f'(x) / ln x` with its bounds (x >= 5). `big_m` must
/// dominate every sieved gap ratio; see [`nlab_auto_big_m`].
///
/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_eta_derivative_sample(
    f: *const NlabSvFunction,
    x: f64,
    big_m: f64,
    out: *mut NlabEtaSample,
) -> NlabStatus {
    guarded(|| {
        let f = match svfun_arg(f) {
            Ok(f) => f,
            Err(status) => return status,
        };
        match eta::eta_fprime_sample(f, x, big_m) {
            Ok(s) => write_out(out, eta_out(s), "output"),
            Err(e) => fail(&e),
        }
    })
}

/// Sample the square-root-premise lower-bound log ratio (x >= 3). This
/// bound sinks to -1/2 instead of pinching; it exists to demonstrate that.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_eta_sqrt_premise_sample(
    tables: *const NlabTables,
    x: f64,
    big_m: f64,
    out: *mut NlabEtaSample,
) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match eta::rh_lower_sample(t, x, big_m) {
            Ok(s) => write_out(out, eta_out(s), "output"),
            Err(e) => fail(&e),
        }
    })
}

/// A constant dominating every sieved gap ratio, for derivative bounds.
///
/// # Safety
/// `tables` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlab_auto_big_m(tables: *const NlabTables, out: *mut f64) -> NlabStatus {
    guarded(|| {
        let t = match tables_arg(tables) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match eta::auto_big_m(t) {
            Ok(v) => write_out(out, v, "output"),
            Err(e) => fail(&e),
        }
    })
}
