//! C interface to `finalg`.
//!
//! Objects are opaque handles created by `finalg_*` constructors and released
//! with the matching `_free` function. Every fallible call returns a
//! [`FinalgStatus`]; on failure [`finalg_last_error`] describes the problem.
//! Strings handed out by the library are released with [`finalg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use finalg::algebra::FinAlgebra;
use finalg::cli::{run_document, RunOptions};
use finalg::dsl::{parse, WorkspaceDoc};
use finalg::exactmat::IntMatrix;
use finalg::families::{green, kronecker, r_family, random_family};
use finalg::ktheory::{chi_matrix, realize_green};
use finalg::quadform::{represents_one, Bqf};
use finalg::repmod::{global_dimension, ModuleContext, Verdict};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinalgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ComputationError = 4,
    OutOfRange = 5,
    Panic = 6,
}

/// A finite-dimensional algebra with structure constants over the rationals.
pub struct FinalgAlgebra {
    inner: FinAlgebra,
}

/// A parsed workspace document.
pub struct FinalgWorkspace {
    doc: WorkspaceDoc,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type Failure = (FinalgStatus, String);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FinalgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FinalgStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FinalgStatus::Panic
        }
    }
}

fn compute<T>(r: finalg::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| (FinalgStatus::ComputationError, e.to_string()))
}

fn null(what: &str) -> Failure {
    (FinalgStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (FinalgStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn algebra<'a>(h: *const FinalgAlgebra) -> Result<&'a FinAlgebra, Failure> {
    h.as_ref().map(|a| &a.inner).ok_or_else(|| null("algebra"))
}

unsafe fn emit_algebra(out: *mut *mut FinalgAlgebra, a: FinAlgebra) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(FinalgAlgebra { inner: a }));
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).map_err(|_| (FinalgStatus::ComputationError, "string contains nul".into()))?.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn finalg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn finalg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn finalg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The Green algebra `G_k`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_green(k: usize, out: *mut *mut FinalgAlgebra) -> FinalgStatus {
    guard(|| emit_algebra(out, compute(green(k))?.into_algebra()))
}

/// The Kronecker algebra with `n` arrows in degree 0.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_kronecker(n: usize, out: *mut *mut FinalgAlgebra) -> FinalgStatus {
    guard(|| emit_algebra(out, compute(kronecker(n, &[]))?.into_algebra()))
}

/// `R_F` for a seeded family of `m` subspace pairs of dimension `k` and `n - k` in `Q^n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_rfamily(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
    out: *mut *mut FinalgAlgebra,
) -> FinalgStatus {
    guard(|| {
        let f = compute(random_family(n, m, k, seed))?;
        emit_algebra(out, compute(r_family(&f))?.into_algebra())
    })
}

/// A DG algebra whose Euler matrix is the given `n x n` matrix in `SL(n, Z)`,
/// read row-major from `entries`.
///
/// # Safety
/// `entries` must point to `n * n` readable values and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_realize(
    entries: *const i64,
    n: usize,
    out: *mut *mut FinalgAlgebra,
) -> FinalgStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        let len = n.checked_mul(n).ok_or((FinalgStatus::OutOfRange, "matrix too large".into()))?;
        let flat = std::slice::from_raw_parts(entries, len);
        let rows: Vec<&[i64]> = flat.chunks(n.max(1)).collect();
        let m = IntMatrix::from_i64(&rows);
        emit_algebra(out, compute(realize_green(&m))?.into_algebra())
    })
}

/// Reads an algebra from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_from_json(json: *const c_char, out: *mut *mut FinalgAlgebra) -> FinalgStatus {
    guard(|| {
        let s = text(json, "json")?;
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| (FinalgStatus::ParseError, e.to_string()))?;
        emit_algebra(out, compute(FinAlgebra::from_json(&v))?)
    })
}

/// Writes the JSON form of an algebra to `*out`; release it with [`finalg_string_free`].
///
/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_to_json(a: *const FinalgAlgebra, out: *mut *mut c_char) -> FinalgStatus {
    guard(|| emit_string(out, algebra(a)?.to_json().to_string()))
}

/// Releases an algebra. Null is ignored.
///
/// # Safety
/// `a` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_free(a: *mut FinalgAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Dimension over the rationals.
///
/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_dim(a: *const FinalgAlgebra, out: *mut usize) -> FinalgStatus {
    guard(|| write(out, algebra(a)?.dim(), "out"))
}

/// Number of vertex idempotents.
///
/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_vertex_count(a: *const FinalgAlgebra, out: *mut usize) -> FinalgStatus {
    guard(|| write(out, algebra(a)?.vertex_count(), "out"))
}

/// Global dimension by minimal resolutions of the simples, truncated at `bound`.
/// `*finite` is false when some resolution reached the bound; `*dim` is then the bound.
///
/// # Safety
/// `a` must be a live handle; `dim` and `finite` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_gldim(
    a: *const FinalgAlgebra,
    bound: usize,
    dim: *mut usize,
    finite: *mut bool,
) -> FinalgStatus {
    guard(|| {
        let ctx = compute(ModuleContext::new(algebra(a)?.clone()))?;
        let g = compute(global_dimension(&ctx, bound))?;
        let (d, f) = match g.verdict {
            Verdict::Finite(d) => (d, true),
            Verdict::ExceedsBound(b) => (b, false),
        };
        write(dim, d, "dim")?;
        write(finite, f, "finite")
    })
}

/// Writes the Euler matrix row-major into `out`, which holds `len` entries.
/// Fails with `OUT_OF_RANGE` when `len` is smaller than N*N or an entry does not fit.
///
/// # Safety
/// `a` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_algebra_chi(a: *const FinalgAlgebra, out: *mut i64, len: usize) -> FinalgStatus {
    guard(|| {
        let chi = compute(chi_matrix(algebra(a)?))?;
        let flat: Vec<_> = chi.to_rows().into_iter().flatten().collect();
        if out.is_null() {
            return Err(null("out"));
        }
        if len < flat.len() {
            return Err((FinalgStatus::OutOfRange, format!("buffer holds {len} entries, {} needed", flat.len())));
        }
        for (i, x) in flat.iter().enumerate() {
            let v = i64::try_from(x).map_err(|_| (FinalgStatus::OutOfRange, format!("entry {x} does not fit in 64 bits")))?;
            out.add(i).write(v);
        }
        Ok(())
    })
}

/// Whether the form `a x^2 + b xy + c y^2` takes the value 1 on integers.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_represents_one(a: i64, b: i64, c: i64, out: *mut bool) -> FinalgStatus {
    guard(|| write(out, compute(represents_one(&Bqf::new(a, b, c)))?, "out"))
}

/// Parses a workspace document. On `PARSE_ERROR` the message starts with `line:col:`.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_workspace_parse(src: *const c_char, out: *mut *mut FinalgWorkspace) -> FinalgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let doc = parse(text(src, "src")?).map_err(|e| (FinalgStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(FinalgWorkspace { doc }));
        Ok(())
    })
}

/// Runs a workspace and writes the JSON report to `*out`. `command` may be null
/// to run the document's own commands. The report is written also when a
/// command fails, in which case the status is `COMPUTATION_ERROR`.
///
/// # Safety
/// `ws` must be a live handle, `command` null or a nul-terminated string, and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn finalg_workspace_run(
    ws: *const FinalgWorkspace,
    command: *const c_char,
    out: *mut *mut c_char,
) -> FinalgStatus {
    guard(|| {
        let ws = ws.as_ref().ok_or_else(|| null("workspace"))?;
        let only = if command.is_null() { None } else { Some(text(command, "command")?.to_string()) };
        let report = run_document(&ws.doc, &RunOptions { only, ..RunOptions::default() });
        emit_string(out, report.to_json())?;
        match report.results.iter().find(|r| !r.ok) {
            None => Ok(()),
            Some(r) => Err((FinalgStatus::ComputationError, r.error.clone().unwrap_or_default())),
        }
    })
}

/// Releases a workspace. Null is ignored.
///
/// # Safety
/// `ws` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn finalg_workspace_free(ws: *mut FinalgWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}
