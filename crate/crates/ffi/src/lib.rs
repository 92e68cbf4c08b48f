//! C ABI over the `qtorus` engine.
//!
//! Handles are opaque and owned by the caller: every `*_new` has a matching
//! `*_free`, and strings returned through `char **` must be released with
//! `qt_string_free`. Functions return a `QtStatus`; on failure the message of
//! the most recent error on the calling thread is available from
//! `qt_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qtorus::cli::{run, Task};
use qtorus::forms::{quad_from_bilinear, BilinearData, QuadraticForm};
use qtorus::lattice::IntMatrix;
use qtorus::localcat::{standard_refinement, BraidedData};
use qtorus::surface::{twisted_cohomology, LatticeLocalSystem};
use qtorus::{Error, Frac1};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    NonUnimodular = 4,
    RelationViolated = 5,
    NotInvariant = 6,
    MalformedFraction = 7,
    Internal = 8,
    Panic = 9,
}

impl From<&Error> for QtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonUnimodular { .. } | Error::NonInvertibleMonodromy { .. } => QtStatus::NonUnimodular,
            Error::RelationViolated => QtStatus::RelationViolated,
            Error::NotInvariant { .. } => QtStatus::NotInvariant,
            Error::MalformedFraction(_) => QtStatus::MalformedFraction,
            e if e.is_internal() => QtStatus::Internal,
            _ => QtStatus::InvalidArgument,
        }
    }
}

/// A lattice local system on a closed oriented surface.
pub struct QtLocalSystem {
    inner: LatticeLocalSystem,
}

/// A level `Q(x) = zeta * x^T C x` with its standard braiding refinement.
pub struct QtLevel {
    quadratic: QuadraticForm,
    braided: BraidedData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QtStatus, message: &str) -> QtStatus {
    set_error(message);
    status
}

fn fail_with(e: Error) -> QtStatus {
    fail(QtStatus::from(&e), &e.to_string())
}

fn guard(f: impl FnOnce() -> QtStatus) -> QtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(QtStatus::Panic, "panic inside qtorus"),
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn write_frac(x: Frac1, num: *mut u64, den: *mut u64) -> QtStatus {
    // SAFETY: callers check both pointers for null first.
    unsafe {
        *num = x.num();
        *den = x.den();
    }
    QtStatus::Ok
}

fn write_string(s: String, out: *mut *mut c_char) -> QtStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: `out` was checked for null by the caller.
            unsafe { *out = c.into_raw() };
            QtStatus::Ok
        }
        Err(_) => fail(QtStatus::Internal, "output contains a NUL byte"),
    }
}

/// Message for the most recent failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a local system from `2 * genus` row-major `rank x rank` matrices laid
/// out consecutively in `monodromy` (`len = 2 * genus * rank * rank`). Passing
/// `len = 0` gives the trivial system.
///
/// # Safety
/// `monodromy` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_local_system_new(
    genus: usize,
    rank: usize,
    monodromy: *const i64,
    len: usize,
    out: *mut *mut QtLocalSystem,
) -> QtStatus {
    guard(|| {
        if out.is_null() {
            return fail(QtStatus::NullPointer, "out is null");
        }
        let Some(data) = slice(monodromy, len) else {
            return fail(QtStatus::NullPointer, "monodromy is null");
        };
        let inner = if len == 0 {
            LatticeLocalSystem::trivial(genus, rank)
        } else {
            let block = rank * rank;
            if block == 0 || len != 2 * genus * block {
                return fail(
                    QtStatus::InvalidArgument,
                    &format!("expected {} monodromy entries, found {len}", 2 * genus * block),
                );
            }
            let mats = data
                .chunks(block)
                .map(|m| IntMatrix::from_i64(rank, rank, m))
                .collect();
            match LatticeLocalSystem::new(genus, rank, mats) {
                Ok(s) => s,
                Err(e) => return fail_with(e),
            }
        };
        *out = Box::into_raw(Box::new(QtLocalSystem { inner }));
        QtStatus::Ok
    })
}

/// # Safety
/// `system` must be null or come from `qt_local_system_new`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qt_local_system_free(system: *mut QtLocalSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Free ranks of `H^0`, `H^1`, `H^2` written to `out[0..3]`.
///
/// # Safety
/// `system` must be a live handle and `out` must point to three writable values.
#[no_mangle]
pub unsafe extern "C" fn qt_cohomology_ranks(system: *const QtLocalSystem, out: *mut usize) -> QtStatus {
    guard(|| {
        if system.is_null() || out.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        match twisted_cohomology(&(*system).inner) {
            Ok(c) => {
                let ranks = [c.h0.free_rank, c.h1.free_rank, c.h2.free_rank];
                ptr::copy_nonoverlapping(ranks.as_ptr(), out, 3);
                QtStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// `H^0`, `H^1`, `H^2` as JSON `{"h0": {"free_rank", "torsion"}, ...}`.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable. Free the result with
/// `qt_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qt_cohomology_json(system: *const QtLocalSystem, out: *mut *mut c_char) -> QtStatus {
    guard(|| {
        if system.is_null() || out.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        match twisted_cohomology(&(*system).inner) {
            Ok(c) => {
                let v = serde_json::json!({"h0": c.h0, "h1": c.h1, "h2": c.h2});
                write_string(v.to_string(), out)
            }
            Err(e) => fail_with(e),
        }
    })
}

/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qt_euler_characteristic(system: *const QtLocalSystem, out: *mut i64) -> QtStatus {
    guard(|| {
        if system.is_null() || out.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        match twisted_cohomology(&(*system).inner) {
            Ok(c) => {
                *out = c.euler_characteristic();
                QtStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Builds the level `zeta * x^T C x` from a row-major `rank x rank` matrix and a
/// reduced fraction string such as `"1/4"`.
///
/// # Safety
/// `c_matrix` must point to `rank * rank` values, `zeta` must be a NUL-terminated
/// string, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qt_level_new(
    rank: usize,
    c_matrix: *const i64,
    zeta: *const c_char,
    out: *mut *mut QtLevel,
) -> QtStatus {
    guard(|| {
        if out.is_null() || zeta.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        let Some(c) = slice(c_matrix, rank * rank) else {
            return fail(QtStatus::NullPointer, "c_matrix is null");
        };
        let Ok(z) = CStr::from_ptr(zeta).to_str() else {
            return fail(QtStatus::InvalidUtf8, "zeta is not UTF-8");
        };
        let built = z.parse::<Frac1>().and_then(|z| {
            let b = BilinearData::new(IntMatrix::from_i64(rank, rank, c), z)?;
            quad_from_bilinear(&b)
        });
        match built {
            Ok(quadratic) => {
                let braided = standard_refinement(&quadratic);
                *out = Box::into_raw(Box::new(QtLevel { quadratic, braided }));
                QtStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// # Safety
/// `level` must be null or come from `qt_level_new`, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qt_level_free(level: *mut QtLevel) {
    if !level.is_null() {
        drop(Box::from_raw(level));
    }
}

/// Whether the level is invariant under every monodromy matrix of `system`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qt_level_is_invariant(
    level: *const QtLevel,
    system: *const QtLocalSystem,
    out: *mut bool,
) -> QtStatus {
    guard(|| {
        if level.is_null() || system.is_null() || out.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        let (q, rho) = (&(*level).quadratic, &(*system).inner);
        if q.rank() != rho.rank() {
            return fail_with(Error::DimensionMismatch {
                expected: rho.rank(),
                found: q.rank(),
            });
        }
        match q.first_non_invariant(rho.monodromy()) {
            Ok(i) => {
                *out = i.is_none();
                QtStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Ribbon twist on the grade `lambda`, as the reduced fraction `num/den` in `[0, 1)`.
///
/// # Safety
/// `level` must be live, `lambda` must point to `len` values, `num`/`den` writable.
#[no_mangle]
pub unsafe extern "C" fn qt_twist(
    level: *const QtLevel,
    lambda: *const i64,
    len: usize,
    num: *mut u64,
    den: *mut u64,
) -> QtStatus {
    guard(|| {
        if level.is_null() || num.is_null() || den.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        let Some(l) = slice(lambda, len) else {
            return fail(QtStatus::NullPointer, "lambda is null");
        };
        match (*level).braided.twist(l) {
            Ok(x) => write_frac(x, num, den),
            Err(e) => fail_with(e),
        }
    })
}

/// Double braiding `c(l1, l2) c(l2, l1)` as `num/den` in `[0, 1)`.
///
/// # Safety
/// `level` must be live, `l1` and `l2` must point to `len` values, `num`/`den` writable.
#[no_mangle]
pub unsafe extern "C" fn qt_double_braiding(
    level: *const QtLevel,
    l1: *const i64,
    l2: *const i64,
    len: usize,
    num: *mut u64,
    den: *mut u64,
) -> QtStatus {
    guard(|| {
        if level.is_null() || num.is_null() || den.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        let (Some(a), Some(b)) = (slice(l1, len), slice(l2, len)) else {
            return fail(QtStatus::NullPointer, "grade is null");
        };
        match (*level).braided.double_braiding(a, b) {
            Ok(x) => write_frac(x, num, den),
            Err(e) => fail_with(e),
        }
    })
}

/// Runs a CLI task (`"local"`, `"surface"`, `"global"`, `"bunt"`, `"selfcheck"`)
/// on a JSON job spec. `spec_json` may be null for `selfcheck`. The report (or
/// error object) is written to `out` and the CLI exit status to `exit_code`; the
/// return value is `QT_STATUS_OK` whenever a report was produced.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` and `exit_code` writable.
#[no_mangle]
pub unsafe extern "C" fn qt_run_job(
    task: *const c_char,
    spec_json: *const c_char,
    out: *mut *mut c_char,
    exit_code: *mut i32,
) -> QtStatus {
    guard(|| {
        if task.is_null() || out.is_null() || exit_code.is_null() {
            return fail(QtStatus::NullPointer, "null argument");
        }
        let Ok(name) = CStr::from_ptr(task).to_str() else {
            return fail(QtStatus::InvalidUtf8, "task is not UTF-8");
        };
        let task = match name {
            "local" => Task::Local,
            "surface" => Task::Surface,
            "global" => Task::Global,
            "bunt" => Task::Bunt,
            "selfcheck" => Task::Selfcheck,
            other => return fail(QtStatus::InvalidArgument, &format!("unknown task {other:?}")),
        };
        let spec = if spec_json.is_null() {
            None
        } else {
            match CStr::from_ptr(spec_json).to_str() {
                Ok(s) => Some(s),
                Err(_) => return fail(QtStatus::InvalidUtf8, "spec is not UTF-8"),
            }
        };
        let outcome = run(task, spec, None, None);
        *exit_code = outcome.exit_code;
        match String::from_utf8(outcome.bytes) {
            Ok(s) => write_string(s, out),
            Err(_) => fail(QtStatus::Internal, "report is not UTF-8"),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn qt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
