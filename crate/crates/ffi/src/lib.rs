//! C interface to flopcalc.
//!
//! Every function returns a [`FlopStatus`]. On failure the message is kept in a
//! thread-local slot readable through [`flop_last_error`]. Handles are opaque and
//! owned by the caller; release them with the matching `_free` function. Strings
//! returned through `char **` must be released with [`flop_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use flopcalc::enumerative::{dim_after_mutation, dim_contraction, quantum_potential, transform_gv, GVTable};
use flopcalc::oracle::{verify_chamber_count, verify_restriction_lemma};
use flopcalc::rational::parse_rational_list;
use flopcalc::wallcross::{enumerate_chambers, flop_at};
use flopcalc::{parse_diagram, DynkinDiagram, FlopError, NodeSubset};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlopStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed diagram, subset, rational or table JSON.
    Parse = 3,
    /// Well-formed input outside the domain of the operation.
    Domain = 4,
    /// The Novikov point is a pole of the quantum potential.
    Pole = 5,
    /// Chamber enumeration hit its limit.
    Limit = 6,
    /// An oracle check failed.
    Verification = 7,
    /// The output buffer is too small; the required length was written.
    BufferTooSmall = 8,
    Panic = 9,
}

/// A parsed Dynkin diagram.
pub struct FlopDiagram(DynkinDiagram);

/// A Gopakumar-Vafa table.
pub struct FlopTable(GVTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(FlopStatus, String);

impl From<FlopError> for Fail {
    fn from(e: FlopError) -> Self {
        let status = match e {
            FlopError::Parse { .. } | FlopError::InvalidTable(_) => FlopStatus::Parse,
            FlopError::Pole { .. } => FlopStatus::Pole,
            FlopError::ChamberLimit { .. } => FlopStatus::Limit,
            _ => FlopStatus::Domain,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FlopStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FlopStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FlopStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(FlopStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FlopStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn subset(d: &DynkinDiagram, s: &str) -> Result<NodeSubset, Fail> {
    let s = NodeSubset::parse(s).map_err(|e| Fail(FlopStatus::Parse, e.to_string()))?;
    d.check_subset(&s)?;
    Ok(s)
}

fn rationals(s: &str) -> Result<Vec<flopcalc::num_rational::BigRational>, Fail> {
    parse_rational_list(s).map_err(|e| Fail(FlopStatus::Parse, e.to_string()))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("library output has no nul bytes").into_raw()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn flop_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn flop_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a diagram such as `"E8"`.
///
/// # Safety
/// `spec` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn flop_diagram_parse(spec: *const c_char, out_diagram: *mut *mut FlopDiagram) -> FlopStatus {
    guard(|| {
        let slot = out(out_diagram, "out_diagram")?;
        let d = parse_diagram(text(spec, "spec")?)?;
        *slot = Box::into_raw(Box::new(FlopDiagram(d)));
        Ok(())
    })
}

/// # Safety
/// `d` must come from [`flop_diagram_parse`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn flop_diagram_free(d: *mut FlopDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_diagram_rank(d: *const FlopDiagram, out_rank: *mut usize) -> FlopStatus {
    guard(|| {
        *out(out_rank, "out_rank")? = handle(d, "diagram")?.0.rank();
        Ok(())
    })
}

/// Number of positive roots.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_positive_root_count(d: *const FlopDiagram, out_count: *mut usize) -> FlopStatus {
    guard(|| {
        *out(out_count, "out_count")? = handle(d, "diagram")?.0.positive_roots().len();
        Ok(())
    })
}

/// Size of `Cham(Δ, I)`, with `subset` written like `"1,2,4"`. A `limit` of zero
/// uses the library default.
///
/// # Safety
/// Pointers must be valid, `subset` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn flop_chamber_count(
    d: *const FlopDiagram,
    subset_spec: *const c_char,
    limit: usize,
    out_count: *mut usize,
) -> FlopStatus {
    guard(|| {
        let slot = out(out_count, "out_count")?;
        let d = &handle(d, "diagram")?.0;
        let s = subset(d, text(subset_spec, "subset")?)?;
        let limit = if limit == 0 {
            flopcalc::wallcross::DEFAULT_CHAMBER_LIMIT
        } else {
            limit
        };
        *slot = enumerate_chambers(d, &s, limit)?.len();
        Ok(())
    })
}

/// Row-major `M_i` for the flop at node `i`. `out_n` receives the matrix size `n`;
/// `buf` must hold `n * n` entries, otherwise `BufferTooSmall` is returned.
///
/// # Safety
/// Pointers must be valid and `buf` must hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn flop_flop_matrix(
    d: *const FlopDiagram,
    subset_spec: *const c_char,
    node: usize,
    buf: *mut i64,
    cap: usize,
    out_n: *mut usize,
) -> FlopStatus {
    guard(|| {
        let n_slot = out(out_n, "out_n")?;
        let d = &handle(d, "diagram")?.0;
        let s = subset(d, text(subset_spec, "subset")?)?;
        let m = flop_at(d, &s, node)?.matrix.forward;
        let n = m.rows();
        *n_slot = n;
        if cap < n * n {
            return Err(Fail(FlopStatus::BufferTooSmall, format!("need {} entries", n * n)));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, n * n);
        for (k, v) in m.to_rows().into_iter().flatten().enumerate() {
            dst[k] = v;
        }
        Ok(())
    })
}

/// The full flop step (charts, `ω_i(I)`, `M_i`, `M_i^{-1}`, `N_i`) as JSON.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_flop_json(
    d: *const FlopDiagram,
    subset_spec: *const c_char,
    node: usize,
    out_json: *mut *mut c_char,
) -> FlopStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let d = &handle(d, "diagram")?.0;
        let s = subset(d, text(subset_spec, "subset")?)?;
        let step = flop_at(d, &s, node)?;
        *slot = c_string(serde_json::to_string(&step).expect("flop steps serialize"));
        Ok(())
    })
}

/// Returns `Verification` when the restriction lemma check finds a violation.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_verify_lemma(d: *const FlopDiagram, subset_spec: *const c_char) -> FlopStatus {
    guard(|| {
        let d = &handle(d, "diagram")?.0;
        let s = subset(d, text(subset_spec, "subset")?)?;
        let r = verify_restriction_lemma(d, &s)?;
        if r.passed {
            Ok(())
        } else {
            Err(Fail(
                FlopStatus::Verification,
                format!("{} violations", r.violations.len()),
            ))
        }
    })
}

/// Returns `Verification` when the chamber count disagrees with its oracle.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_verify_chambers(
    d: *const FlopDiagram,
    subset_spec: *const c_char,
    limit: usize,
) -> FlopStatus {
    guard(|| {
        let d = &handle(d, "diagram")?.0;
        let s = subset(d, text(subset_spec, "subset")?)?;
        let limit = if limit == 0 {
            flopcalc::wallcross::DEFAULT_CHAMBER_LIMIT
        } else {
            limit
        };
        let r = verify_chamber_count(d, &s, limit)?;
        if r.passed {
            Ok(())
        } else {
            Err(Fail(
                FlopStatus::Verification,
                format!("count {} expected {:?}", r.count, r.expected),
            ))
        }
    })
}

/// Reads a GV table from its JSON form.
///
/// # Safety
/// `json` must be nul-terminated and `out_table` writable.
#[no_mangle]
pub unsafe extern "C" fn flop_table_from_json(json: *const c_char, out_table: *mut *mut FlopTable) -> FlopStatus {
    guard(|| {
        let slot = out(out_table, "out_table")?;
        let t = GVTable::from_json_str(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(FlopTable(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn flop_table_free(t: *mut FlopTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Canonical JSON of a table.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_table_to_json(t: *const FlopTable, out_json: *mut *mut c_char) -> FlopStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = c_string(handle(t, "table")?.0.to_json_string());
        Ok(())
    })
}

/// The table after flopping the curve with the given label.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_table_transform(
    t: *const FlopTable,
    label: usize,
    out_table: *mut *mut FlopTable,
) -> FlopStatus {
    guard(|| {
        let slot = out(out_table, "out_table")?;
        let next = transform_gv(&handle(t, "table")?.0, label)?;
        *slot = Box::into_raw(Box::new(FlopTable(next)));
        Ok(())
    })
}

/// Contraction algebra dimension as a decimal string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_table_dim(t: *const FlopTable, out_dim: *mut *mut c_char) -> FlopStatus {
    guard(|| {
        let slot = out(out_dim, "out_dim")?;
        *slot = c_string(dim_contraction(&handle(t, "table")?.0).to_string());
        Ok(())
    })
}

/// Dimension after mutation at the given curve, as a decimal string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn flop_table_dim_after_mutation(
    t: *const FlopTable,
    label: usize,
    out_dim: *mut *mut c_char,
) -> FlopStatus {
    guard(|| {
        let slot = out(out_dim, "out_dim")?;
        *slot = c_string(dim_after_mutation(&handle(t, "table")?.0, label)?.to_string());
        Ok(())
    })
}

/// Exact quantum potential. Each of `gamma1..3` and `q` is a comma separated list
/// of rationals such as `"1/2,-3"`; the result is written as `"p/q"`.
///
/// # Safety
/// Pointers must be valid and strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn flop_quantum_potential(
    t: *const FlopTable,
    gamma1: *const c_char,
    gamma2: *const c_char,
    gamma3: *const c_char,
    q: *const c_char,
    out_value: *mut *mut c_char,
) -> FlopStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        let t = &handle(t, "table")?.0;
        let g1 = rationals(text(gamma1, "gamma1")?)?;
        let g2 = rationals(text(gamma2, "gamma2")?)?;
        let g3 = rationals(text(gamma3, "gamma3")?)?;
        let q = rationals(text(q, "q")?)?;
        let v = quantum_potential(t, [&g1, &g2, &g3], &q)?;
        *slot = c_string(v.to_string());
        Ok(())
    })
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn flop_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
