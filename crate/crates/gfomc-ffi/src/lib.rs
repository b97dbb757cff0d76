//! C interface to `gfomc`.
//!
//! Queries and databases are opaque handles created by `*_parse` and
//! released by `*_free`. Every fallible call returns a [`GfomcStatus`];
//! results come back through out-pointers, and strings returned to the
//! caller must be released with [`gfomc_string_free`]. The message of the
//! last failure on the calling thread is available from
//! [`gfomc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gfomc::exactla::{fmt_rational, parse_rational};
use gfomc::lineage::{count_worlds, pr_exact, PendantMode};
use gfomc::query::{classify, minimize_query, parse_query, Query, SideType};
use gfomc::reduction::{type1_pipeline, P2cnf};
use gfomc::tid::{parse_tid, Tid};
use gfomc::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfomcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    VarCap = 5,
    Singular = 6,
    Inapplicable = 7,
    SearchFailed = 8,
    Internal = 9,
    Io = 10,
    Panic = 11,
}

impl From<&Error> for GfomcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) | Error::Syntax { .. } => GfomcStatus::Parse,
            Error::Dimension(_) | Error::Domain(_) => GfomcStatus::Domain,
            Error::VarCap { .. } => GfomcStatus::VarCap,
            Error::Singular { .. } => GfomcStatus::Singular,
            Error::Inapplicable(_) => GfomcStatus::Inapplicable,
            Error::SearchFailed(_) => GfomcStatus::SearchFailed,
            Error::Internal(_) => GfomcStatus::Internal,
            Error::Io(_) => GfomcStatus::Io,
        }
    }
}

/// Side type codes used in [`GfomcClassification`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfomcSideType {
    None = 0,
    TypeI = 1,
    TypeII = 2,
    Mixed = 3,
}

impl From<SideType> for GfomcSideType {
    fn from(t: SideType) -> Self {
        match t {
            SideType::None => GfomcSideType::None,
            SideType::I => GfomcSideType::TypeI,
            SideType::II => GfomcSideType::TypeII,
            SideType::Mixed => GfomcSideType::Mixed,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GfomcClassification {
    pub bipartite: bool,
    pub is_unsafe: bool,
    /// Length of the shortest left-right path, or -1 for safe queries.
    pub length: i32,
    pub is_final: bool,
    pub forbidden: bool,
    pub left_type: GfomcSideType,
    pub right_type: GfomcSideType,
}

/// Opaque parsed query.
pub struct GfomcQuery(Query);

/// Opaque tuple-independent database.
pub struct GfomcTid(Tid);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Status(GfomcStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GfomcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GfomcStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            GfomcStatus::from(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("panic inside gfomc");
            GfomcStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(GfomcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Status(GfomcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::Status(GfomcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(GfomcStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Status(GfomcStatus::Internal, "interior NUL in result".into()))?;
    put(out, c.into_raw())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gfomc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn gfomc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gfomc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a query in the `forall x forall y (...) & ...` syntax.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gfomc_query_parse(src: *const c_char, out: *mut *mut GfomcQuery) -> GfomcStatus {
    guard(|| {
        let q = parse_query(text(src, "query text")?)?;
        put(out, Box::into_raw(Box::new(GfomcQuery(q))))
    })
}

/// # Safety
/// `q` must come from [`gfomc_query_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gfomc_query_free(q: *mut GfomcQuery) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// # Safety
/// `q` must be a live query handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gfomc_query_classify(q: *const GfomcQuery, out: *mut GfomcClassification) -> GfomcStatus {
    guard(|| {
        let r = classify(&handle(q, "query")?.0);
        put(
            out,
            GfomcClassification {
                bipartite: r.bipartite,
                is_unsafe: r.is_unsafe,
                length: r.length.map_or(-1, |k| k as i32),
                is_final: r.is_final,
                forbidden: r.forbidden,
                left_type: r.left_type.into(),
                right_type: r.right_type.into(),
            },
        )
    })
}

/// Minimized query as text.
///
/// # Safety
/// `q` must be a live query handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gfomc_query_minimize(q: *const GfomcQuery, out: *mut *mut c_char) -> GfomcStatus {
    guard(|| put_string(out, minimize_query(&handle(q, "query")?.0).to_string()))
}

/// Parses a database in the line format (`domain left: ...`, `tuple S(a,b) 1/2`).
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gfomc_tid_parse(src: *const c_char, out: *mut *mut GfomcTid) -> GfomcStatus {
    guard(|| {
        let t = parse_tid(text(src, "database text")?)?;
        put(out, Box::into_raw(Box::new(GfomcTid(t))))
    })
}

/// # Safety
/// `t` must come from [`gfomc_tid_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gfomc_tid_free(t: *mut GfomcTid) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Exact probability of `q` over `t` as `num/den`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gfomc_probability(q: *const GfomcQuery, t: *const GfomcTid, out: *mut *mut c_char) -> GfomcStatus {
    guard(|| {
        let p = pr_exact(&handle(q, "query")?.0, &handle(t, "database")?.0)?;
        put_string(out, fmt_rational(&p))
    })
}

/// Number of satisfying worlds over the uncertain tuples, in decimal.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gfomc_count_worlds(q: *const GfomcQuery, t: *const GfomcTid, out: *mut *mut c_char) -> GfomcStatus {
    guard(|| {
        let n = count_worlds(&handle(q, "query")?.0, &handle(t, "database")?.0)?;
        put_string(out, n.to_string())
    })
}

/// `#Φ` for a `p2cnf` text recovered through probabilities of the type-I
/// query `q` with block probability `c` (`num/den`), in decimal.
///
/// # Safety
/// `q` must be live, the strings NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gfomc_reduce_p2cnf(
    q: *const GfomcQuery,
    p2cnf: *const c_char,
    c: *const c_char,
    out: *mut *mut c_char,
) -> GfomcStatus {
    guard(|| {
        let phi: P2cnf = text(p2cnf, "p2cnf text")?.parse()?;
        let c = parse_rational(text(c, "block probability")?)?;
        let r = type1_pipeline(&handle(q, "query")?.0, &phi, &c, PendantMode::Semantic)?;
        put_string(out, r.phi_count.to_string())
    })
}

/// Null-safe helper for callers that want to reset an out-pointer.
#[no_mangle]
pub extern "C" fn gfomc_null_query() -> *mut GfomcQuery {
    ptr::null_mut()
}
