//! C ABI over the `quasiquad` library.
//!
//! Conventions:
//!
//! * every fallible function returns a [`QqStatus`] and writes results
//!   through out-pointers;
//! * on failure, [`qq_last_error_message`] describes the most recent error on
//!   the calling thread;
//! * functions and certified results are opaque handles released with their
//!   matching `*_free` function; strings returned by the library are
//!   released with [`qq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quasiquad::bounds::{self, BoundKind, Interval, SecondDerivEndpoints, V2Exponent};
use quasiquad::corpus::{default_corpus, parse_manifest};
use quasiquad::means::{check_means_proposition, Proposition};
use quasiquad::quadrature::{self, CertifiedResult, Partition};
use quasiquad::verify::run_verification;
use quasiquad::{Error, FunctionSpec};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QqStatus {
    Ok = 0,
    Domain = 1,
    Validity = 2,
    Inconsistent = 3,
    Evaluation = 4,
    UnsupportedOrder = 5,
    OracleFailure = 6,
    BudgetExhausted = 7,
    Parse = 8,
    NullPointer = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

impl From<&Error> for QqStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => QqStatus::Domain,
            Error::Validity(_) => QqStatus::Validity,
            Error::Inconsistent(_) => QqStatus::Inconsistent,
            Error::Evaluation(_) => QqStatus::Evaluation,
            Error::UnsupportedOrder { .. } => QqStatus::UnsupportedOrder,
            Error::OracleFailure(_) => QqStatus::OracleFailure,
            Error::BudgetExhausted { .. } => QqStatus::BudgetExhausted,
            Error::Parse(_) => QqStatus::Parse,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QqBoundKind {
    V1 = 1,
    V2 = 2,
    V3 = 3,
}

impl From<BoundKind> for QqBoundKind {
    fn from(k: BoundKind) -> Self {
        match k {
            BoundKind::V1 => QqBoundKind::V1,
            BoundKind::V2 => QqBoundKind::V2,
            BoundKind::V3 => QqBoundKind::V3,
        }
    }
}

/// The three bounds and their minimum. `v1`/`v3` are meaningful only when
/// the matching `has_` flag is set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqBoundBreakdown {
    pub has_v1: bool,
    pub v1: f64,
    pub v2: f64,
    pub has_v3: bool,
    pub v3: f64,
    pub best: f64,
    pub winner: QqBoundKind,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqLocalBound {
    pub index: usize,
    pub left: f64,
    pub right: f64,
    pub local_bound: f64,
    pub winner: QqBoundKind,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqMeansRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    pub quasiconvex: bool,
}

/// Opaque test function.
pub struct QqFunction {
    inner: FunctionSpec,
}

/// Opaque certified quadrature result.
pub struct QqCertifiedResult {
    inner: CertifiedResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: QqStatus, msg: impl Into<String>) -> QqStatus {
    set_last_error(msg.into());
    status
}

/// Runs `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (QqStatus, String)>) -> QqStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QqStatus::Ok,
        Ok(Err((status, msg))) => fail(status, msg),
        Err(_) => fail(QqStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: quasiquad::Result<T>) -> Result<T, (QqStatus, String)> {
    r.map_err(|e| (QqStatus::from(&e), e.to_string()))
}

fn null() -> (QqStatus, String) {
    (QqStatus::NullPointer, "null pointer argument".into())
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (QqStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (QqStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (QqStatus::InvalidUtf8, "string is not valid UTF-8".into()))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Euler Beta function.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_beta(x: f64, y: f64, out: *mut f64) -> QqStatus {
    guard(|| write(out, lift(quasiquad::beta(x, y))?))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_conjugate_exponent(q: f64, out: *mut f64) -> QqStatus {
    guard(|| write(out, lift(bounds::conjugate_exponent(q))?))
}

/// Smallest defined bound on the trapezoid defect over `[a, b]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_best_bound(
    a: f64,
    b: f64,
    q: f64,
    d2a: f64,
    d2b: f64,
    out: *mut QqBoundBreakdown,
) -> QqStatus {
    guard(|| {
        let iv = lift(Interval::new(a, b))?;
        let d2 = lift(SecondDerivEndpoints::new(d2a, d2b))?;
        let br = lift(bounds::best_bound(iv, q, d2))?;
        write(
            out,
            QqBoundBreakdown {
                has_v1: br.v1.is_some(),
                v1: br.v1.unwrap_or(f64::NAN),
                v2: br.v2,
                has_v3: br.v3.is_some(),
                v3: br.v3.unwrap_or(f64::NAN),
                best: br.best,
                winner: br.winner.into(),
            },
        )
    })
}

/// Power-mean bound; `statement_exponent` selects `(q-1)/q` instead of `1/q`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_bound_v2(
    a: f64,
    b: f64,
    q: f64,
    d2a: f64,
    d2b: f64,
    statement_exponent: bool,
    out: *mut f64,
) -> QqStatus {
    guard(|| {
        let iv = lift(Interval::new(a, b))?;
        let d2 = lift(SecondDerivEndpoints::new(d2a, d2b))?;
        let variant = if statement_exponent {
            V2Exponent::StatementExponent
        } else {
            V2Exponent::ProofExponent
        };
        write(out, lift(bounds::bound_v2(iv, q, d2, variant))?)
    })
}

/// Parses `poly:c0,c1,...`, `exp:c,k`, `recip:s` or `g`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_function_parse(
    spec: *const c_char,
    out: *mut *mut QqFunction,
) -> QqStatus {
    guard(|| {
        let f: FunctionSpec = lift(read_str(spec)?.parse())?;
        write(out, Box::into_raw(Box::new(QqFunction { inner: f })))
    })
}

/// # Safety
/// `f` must be null or a handle from [`qq_function_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qq_function_free(f: *mut QqFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_function_evaluate(
    f: *const QqFunction,
    x: f64,
    order: u8,
    out: *mut f64,
) -> QqStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        write(out, lift(f.inner.evaluate(x, order))?)
    })
}

/// # Safety
/// `f` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_reference_integral(
    f: *const QqFunction,
    a: f64,
    b: f64,
    out: *mut f64,
) -> QqStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        let iv = lift(Interval::new(a, b))?;
        write(out, lift(f.inner.reference_integral(iv))?)
    })
}

/// Composite trapezoid sum on `n` uniform subintervals.
///
/// # Safety
/// `f` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_trapezoid_sum(
    f: *const QqFunction,
    a: f64,
    b: f64,
    n: usize,
    out: *mut f64,
) -> QqStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        let d = lift(Partition::uniform(lift(Interval::new(a, b))?, n))?;
        write(out, lift(quadrature::trapezoid_sum(&f.inner, &d))?)
    })
}

/// Certified trapezoid integration. On `BudgetExhausted` a handle to the
/// best attempt is still written to `out`; free it either way.
///
/// # Safety
/// `f` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_integrate_certified(
    f: *const QqFunction,
    a: f64,
    b: f64,
    q: f64,
    eps: f64,
    max_n: usize,
    out: *mut *mut QqCertifiedResult,
) -> QqStatus {
    let mut budget_msg = None;
    let status = guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let iv = lift(Interval::new(a, b))?;
        let result = match quadrature::integrate_certified(&f.inner, iv, q, eps, max_n) {
            Ok(r) => r,
            Err(Error::BudgetExhausted { best }) => {
                budget_msg = Some(format!(
                    "refinement budget exhausted at certificate {:e}",
                    best.certificate.total
                ));
                *best
            }
            Err(e) => return Err((QqStatus::from(&e), e.to_string())),
        };
        write(
            out,
            Box::into_raw(Box::new(QqCertifiedResult { inner: result })),
        )
    });
    match (status, budget_msg) {
        (QqStatus::Ok, Some(msg)) => fail(QqStatus::BudgetExhausted, msg),
        (s, _) => s,
    }
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn qq_result_free(r: *mut QqCertifiedResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Trapezoid value, or NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn qq_result_value(r: *const QqCertifiedResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.inner.value)
}

/// Certificate total, or NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn qq_result_certificate(r: *const QqCertifiedResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.inner.certificate.total)
}

/// Number of subintervals, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn qq_result_subintervals(r: *const QqCertifiedResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.partition.len())
}

/// Whether `|f''|` passed the grid quasi-convexity test.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn qq_result_quasiconvex(r: *const QqCertifiedResult) -> bool {
    r.as_ref().is_some_and(|r| r.inner.quasiconvex.holds)
}

/// # Safety
/// `r` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_result_local_bound(
    r: *const QqCertifiedResult,
    index: usize,
    out: *mut QqLocalBound,
) -> QqStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(null)?.inner;
        let l = r.certificate.per_interval.get(index).ok_or_else(|| {
            (
                QqStatus::Domain,
                format!("subinterval {index} out of range"),
            )
        })?;
        let nodes = r.partition.nodes();
        write(
            out,
            QqLocalBound {
                index: l.index,
                left: nodes[l.index],
                right: nodes[l.index + 1],
                local_bound: l.local_bound,
                winner: l.winner.into(),
            },
        )
    })
}

/// Special-means check for `xⁿ`; `proposition` is 5, 6 or 7.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qq_check_means(
    proposition: u32,
    a: f64,
    b: f64,
    n: u32,
    q: f64,
    out: *mut QqMeansRecord,
) -> QqStatus {
    guard(|| {
        let which = match proposition {
            5 => Proposition::P5,
            6 => Proposition::P6,
            7 => Proposition::P7,
            other => return Err((QqStatus::Parse, format!("unknown proposition {other}"))),
        };
        let r = lift(check_means_proposition(which, a, b, n, q))?;
        write(
            out,
            QqMeansRecord {
                lhs: r.lhs,
                rhs: r.rhs,
                margin: r.margin,
                holds: r.holds,
                quasiconvex: r.quasiconvex,
            },
        )
    })
}

/// Runs the verification harness and writes the JSON report to `out`.
/// `manifest` is corpus manifest text, or null for the shipped corpus.
/// `passed` (nullable) receives whether the run had no violations or failed
/// checks.
///
/// # Safety
/// `manifest` must be null or NUL-terminated; `q_grid` must point to
/// `q_len` doubles; `out` must be valid for writes. Free the string with
/// [`qq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn qq_verify_json(
    manifest: *const c_char,
    q_grid: *const f64,
    q_len: usize,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> QqStatus {
    guard(|| {
        let corpus = if manifest.is_null() {
            default_corpus()
        } else {
            lift(parse_manifest(read_str(manifest)?))?
        };
        if q_grid.is_null() || q_len == 0 {
            return Err(null());
        }
        let grid = std::slice::from_raw_parts(q_grid, q_len);
        let report = lift(run_verification(&corpus, grid))?;
        let json = serde_json_string(&report)?;
        if !passed.is_null() {
            passed.write(report.passed());
        }
        write(out, json.into_raw())
    })
}

fn serde_json_string(
    report: &quasiquad::verify::VerifyReport,
) -> Result<CString, (QqStatus, String)> {
    let text = serde_json::to_string(report).map_err(|e| (QqStatus::Evaluation, e.to_string()))?;
    CString::new(text).map_err(|e| (QqStatus::Evaluation, e.to_string()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
