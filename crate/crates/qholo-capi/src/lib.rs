//! C ABI for the qholo engine: opaque handles, integer status codes, and
//! string-based exchange of values and operators.
//!
//! Every function returns a `QholoStatus`; results come back through out
//! pointers. Handles are created and destroyed only through this API.
//! Strings returned by the library must be released with
//! `qholo_string_free`. On any non-`Ok` status the thread-local message
//! retrieved by `qholo_last_error` describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qholo::holonomy::{build_table, guess_recursion, RecursionAnsatz, SequenceTable};
use qholo::link::{colored_homfly, parse_braid, ColorSpec, ColoredBraid};
use qholo::poly::RationalFn;
use qholo::qweyl::{OperatorRepr, OreOperator};
use qholo::web::evaluate::{Evaluator, Mode};
use qholo::web::WebRepr;

/// Status codes returned by every API function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QholoStatus {
    /// Success.
    QholoOk = 0,
    /// A required pointer argument was null.
    QholoNullPointer = 1,
    /// A string argument was not valid UTF-8.
    QholoInvalidUtf8 = 2,
    /// Input text or JSON could not be parsed.
    QholoParseError = 3,
    /// The computation failed (invalid web, step limit, arithmetic error).
    QholoComputeError = 4,
    /// Recursion guessing finished without finding an annihilator.
    QholoNoRecursion = 5,
    /// An argument was out of range for the handle it addresses.
    QholoOutOfRange = 6,
    /// A panic was caught at the boundary; the handle state is unchanged.
    QholoInternalError = 7,
}

use QholoStatus::*;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: QholoStatus, msg: impl Into<Vec<u8>>) -> QholoStatus {
    let c = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
    status
}

/// Message describing the most recent failure on this thread. The pointer
/// is owned by the library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn qholo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library.
#[no_mangle]
pub extern "C" fn qholo_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe { drop(CString::from_raw(s)) };
    }
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s).unwrap_or_default().into_raw()
}

fn guarded<F: FnOnce() -> QholoStatus>(f: F) -> QholoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(QholoInternalError, "internal panic caught at the C boundary"),
    }
}

unsafe fn utf8_arg<'a>(p: *const c_char) -> Result<&'a str, QholoStatus> {
    if p.is_null() {
        return Err(fail(QholoNullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(QholoInvalidUtf8, "argument is not valid UTF-8"))
}

/// Opaque colored braid handle.
pub struct QholoBraid(ColoredBraid);
/// Opaque evaluator handle (owns the reduction memo; reusable).
pub struct QholoEvaluator(Evaluator);
/// Opaque exact value handle (a rational function in a and q).
pub struct QholoValue(RationalFn);
/// Opaque table handle (values indexed by the running color).
pub struct QholoTable(SequenceTable);
/// Opaque recursion operator handle.
pub struct QholoOperator(OreOperator);

macro_rules! free_fn {
    ($(#[$doc:meta])* $name:ident, $ty:ty) => {
        $(#[$doc])*
        #[no_mangle]
        pub extern "C" fn $name(h: *mut $ty) {
            if !h.is_null() {
                unsafe { drop(Box::from_raw(h)) };
            }
        }
    };
}

free_fn!(
    /// Release a braid handle.
    qholo_braid_free,
    QholoBraid
);
free_fn!(
    /// Release an evaluator handle.
    qholo_evaluator_free,
    QholoEvaluator
);
free_fn!(
    /// Release a value handle.
    qholo_value_free,
    QholoValue
);
free_fn!(
    /// Release a table handle.
    qholo_table_free,
    QholoTable
);
free_fn!(
    /// Release an operator handle.
    qholo_operator_free,
    QholoOperator
);

/// Parse a braid from `s=...; w=[...]; colors=[...]` text or JSON.
#[no_mangle]
pub extern "C" fn qholo_braid_parse(
    text: *const c_char,
    out: *mut *mut QholoBraid,
) -> QholoStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QholoNullPointer, "null out pointer");
        }
        let text = match unsafe { utf8_arg(text) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_braid(text) {
            Ok(b) => {
                unsafe { *out = Box::into_raw(Box::new(QholoBraid(b))) };
                QholoOk
            }
            Err(e) => fail(QholoParseError, e.to_string()),
        }
    })
}

/// Create an evaluator with the default step budget (the QHOLO_STEP_LIMIT
/// environment variable overrides it).
#[no_mangle]
pub extern "C" fn qholo_evaluator_new() -> *mut QholoEvaluator {
    Box::into_raw(Box::new(QholoEvaluator(Evaluator::new())))
}

/// Create an evaluator with an explicit reduction step budget.
#[no_mangle]
pub extern "C" fn qholo_evaluator_with_step_limit(limit: usize) -> *mut QholoEvaluator {
    Box::into_raw(Box::new(QholoEvaluator(Evaluator::with_step_limit(limit))))
}

/// Framed colored HOMFLY of the braid closure, every component colored by
/// the column of its braid color.
#[no_mangle]
pub extern "C" fn qholo_homfly(
    ev: *const QholoEvaluator,
    braid: *const QholoBraid,
    out: *mut *mut QholoValue,
) -> QholoStatus {
    guarded(|| {
        if ev.is_null() || braid.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        let ev = unsafe { &(*ev).0 };
        let b = unsafe { &(*braid).0 };
        let ns: Vec<u32> = b.components().iter().map(|c| b.colors()[c[0]]).collect();
        match colored_homfly(b, &ColorSpec::columns(&ns), ev) {
            Ok(v) => {
                unsafe { *out = Box::into_raw(Box::new(QholoValue(v))) };
                QholoOk
            }
            Err(e) => fail(QholoComputeError, e.to_string()),
        }
    })
}

/// Evaluate a closed web given as JSON (`{vertices, edges, loops}`).
#[no_mangle]
pub extern "C" fn qholo_web_eval(
    ev: *const QholoEvaluator,
    web_json: *const c_char,
    out: *mut *mut QholoValue,
) -> QholoStatus {
    guarded(|| {
        if ev.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        let text = match unsafe { utf8_arg(web_json) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        let repr: WebRepr = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => return fail(QholoParseError, e.to_string()),
        };
        let w = match repr.to_web() {
            Ok(w) => w,
            Err(e) => return fail(QholoParseError, e.to_string()),
        };
        match unsafe { &(*ev).0 }.evaluate(&w, Mode::Symbolic) {
            Ok(v) => {
                unsafe { *out = Box::into_raw(Box::new(QholoValue(v))) };
                QholoOk
            }
            Err(e) => fail(QholoComputeError, e.to_string()),
        }
    })
}

/// Human-readable form of a value; release with qholo_string_free.
#[no_mangle]
pub extern "C" fn qholo_value_display(
    v: *const QholoValue,
    out: *mut *mut c_char,
) -> QholoStatus {
    guarded(|| {
        if v.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        unsafe { *out = export_string(format!("{}", (*v).0)) };
        QholoOk
    })
}

/// Exact equality of two values (1 = equal, 0 = different).
#[no_mangle]
pub extern "C" fn qholo_value_equals(a: *const QholoValue, b: *const QholoValue) -> c_int {
    if a.is_null() || b.is_null() {
        return 0;
    }
    (unsafe { (*a).0 == (*b).0 }) as c_int
}

/// Build the table f_0..f_nmax of invariants with the axis component's
/// column color running over n.
#[no_mangle]
pub extern "C" fn qholo_table_build(
    ev: *const QholoEvaluator,
    braid: *const QholoBraid,
    axis: usize,
    nmax: usize,
    out: *mut *mut QholoTable,
) -> QholoStatus {
    guarded(|| {
        if ev.is_null() || braid.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        match build_table(unsafe { &(*braid).0 }, axis, nmax, unsafe { &(*ev).0 }) {
            Ok(t) => {
                unsafe { *out = Box::into_raw(Box::new(QholoTable(t))) };
                QholoOk
            }
            Err(e) => fail(QholoComputeError, e.to_string()),
        }
    })
}

/// Number of entries in the table.
#[no_mangle]
pub extern "C" fn qholo_table_len(t: *const QholoTable) -> usize {
    if t.is_null() {
        return 0;
    }
    unsafe { (*t).0.values.len() }
}

/// Copy out entry n of the table as a fresh value handle.
#[no_mangle]
pub extern "C" fn qholo_table_value(
    t: *const QholoTable,
    n: usize,
    out: *mut *mut QholoValue,
) -> QholoStatus {
    guarded(|| {
        if t.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        let t = unsafe { &(*t).0 };
        match t.values.get(n) {
            Some(v) => {
                unsafe { *out = Box::into_raw(Box::new(QholoValue(v.clone()))) };
                QholoOk
            }
            None => fail(
                QholoOutOfRange,
                format!("index {n} out of range for table of {}", t.values.len()),
            ),
        }
    })
}

/// Guess an annihilating operator for the table within the ansatz bounds.
/// Returns QholoNoRecursion when the search is exhaustive but empty.
#[no_mangle]
pub extern "C" fn qholo_guess_recursion(
    t: *const QholoTable,
    order: usize,
    mdeg: u32,
    adeg: u32,
    qdeg: u32,
    out: *mut *mut QholoOperator,
) -> QholoStatus {
    guarded(|| {
        if t.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        let ansatz = RecursionAnsatz::new(order, mdeg, adeg, qdeg);
        match guess_recursion(unsafe { &(*t).0 }, &ansatz) {
            Ok(Some(op)) => {
                unsafe { *out = Box::into_raw(Box::new(QholoOperator(op))) };
                QholoOk
            }
            Ok(None) => fail(QholoNoRecursion, "no recursion found within ansatz"),
            Err(e) => fail(QholoComputeError, e.to_string()),
        }
    })
}

/// Order of the operator, or -1 for the zero operator.
#[no_mangle]
pub extern "C" fn qholo_operator_order(p: *const QholoOperator) -> c_int {
    if p.is_null() {
        return -1;
    }
    unsafe { (*p).0.order() }.map_or(-1, |d| d as c_int)
}

/// Human-readable form of an operator; release with qholo_string_free.
#[no_mangle]
pub extern "C" fn qholo_operator_display(
    p: *const QholoOperator,
    out: *mut *mut c_char,
) -> QholoStatus {
    guarded(|| {
        if p.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        unsafe { *out = export_string(format!("{}", (*p).0)) };
        QholoOk
    })
}

/// JSON serialization of an operator; release with qholo_string_free.
#[no_mangle]
pub extern "C" fn qholo_operator_to_json(
    p: *const QholoOperator,
    out: *mut *mut c_char,
) -> QholoStatus {
    guarded(|| {
        if p.is_null() || out.is_null() {
            return fail(QholoNullPointer, "null handle argument");
        }
        let repr = OperatorRepr::from_op(unsafe { &(*p).0 });
        let json = serde_json::to_string(&repr).expect("operator serializes");
        unsafe { *out = export_string(json) };
        QholoOk
    })
}

/// Parse an operator from its JSON serialization.
#[no_mangle]
pub extern "C" fn qholo_operator_from_json(
    json: *const c_char,
    out: *mut *mut QholoOperator,
) -> QholoStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QholoNullPointer, "null out pointer");
        }
        let text = match unsafe { utf8_arg(json) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        let repr: OperatorRepr = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => return fail(QholoParseError, e.to_string()),
        };
        match repr.to_op() {
            Ok(op) => {
                unsafe { *out = Box::into_raw(Box::new(QholoOperator(op))) };
                QholoOk
            }
            Err(e) => fail(QholoParseError, e.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn display(v: *const QholoValue) -> String {
        let mut p: *mut c_char = ptr::null_mut();
        assert_eq!(qholo_value_display(v, &mut p), QholoOk);
        let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
        qholo_string_free(p);
        s
    }

    #[test]
    fn braid_parse_and_homfly_roundtrip() {
        let mut b: *mut QholoBraid = ptr::null_mut();
        let text = cstr("s=2; w=[1,1,1]; colors=[1,1]");
        assert_eq!(qholo_braid_parse(text.as_ptr(), &mut b), QholoOk);
        let ev = qholo_evaluator_new();
        let mut v: *mut QholoValue = ptr::null_mut();
        assert_eq!(qholo_homfly(ev, b, &mut v), QholoOk);
        let shown = display(v);
        assert!(shown.contains('a') && shown.contains('q'));
        assert_eq!(qholo_value_equals(v, v), 1);
        qholo_value_free(v);
        qholo_braid_free(b);
        qholo_evaluator_free(ev);
    }

    #[test]
    fn parse_failure_sets_message() {
        let mut b: *mut QholoBraid = ptr::null_mut();
        let text = cstr("not a braid");
        assert_eq!(qholo_braid_parse(text.as_ptr(), &mut b), QholoParseError);
        let msg = unsafe { CStr::from_ptr(qholo_last_error()) };
        assert!(!msg.to_bytes().is_empty());
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut v: *mut QholoValue = ptr::null_mut();
        assert_eq!(
            qholo_homfly(ptr::null(), ptr::null(), &mut v),
            QholoNullPointer
        );
        assert_eq!(qholo_value_equals(ptr::null(), ptr::null()), 0);
        assert_eq!(qholo_table_len(ptr::null()), 0);
        assert_eq!(qholo_operator_order(ptr::null()), -1);
        // frees tolerate null
        qholo_value_free(ptr::null_mut());
        qholo_braid_free(ptr::null_mut());
    }

    #[test]
    fn web_eval_circle() {
        let ev = qholo_evaluator_new();
        let json = cstr(r#"{"vertices":[],"edges":[],"loops":[{"color":1,"count":1}]}"#);
        let mut v: *mut QholoValue = ptr::null_mut();
        assert_eq!(qholo_web_eval(ev, json.as_ptr(), &mut v), QholoOk);
        let shown = display(v);
        assert!(shown.contains('a'));
        qholo_value_free(v);
        qholo_evaluator_free(ev);
    }

    #[test]
    fn unknot_table_and_recursion_via_ffi() {
        let mut b: *mut QholoBraid = ptr::null_mut();
        let text = cstr("s=1; w=[]; colors=[1]");
        assert_eq!(qholo_braid_parse(text.as_ptr(), &mut b), QholoOk);
        let ev = qholo_evaluator_new();
        let mut t: *mut QholoTable = ptr::null_mut();
        assert_eq!(qholo_table_build(ev, b, 0, 5, &mut t), QholoOk);
        assert_eq!(qholo_table_len(t), 6);
        let mut v: *mut QholoValue = ptr::null_mut();
        assert_eq!(qholo_table_value(t, 6, &mut v), QholoOutOfRange);
        assert_eq!(qholo_table_value(t, 1, &mut v), QholoOk);
        qholo_value_free(v);

        let mut op: *mut QholoOperator = ptr::null_mut();
        assert_eq!(qholo_guess_recursion(t, 1, 2, 1, 2, &mut op), QholoOk);
        assert_eq!(qholo_operator_order(op), 1);

        // JSON round-trip preserves the operator
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(qholo_operator_to_json(op, &mut json), QholoOk);
        let mut back: *mut QholoOperator = ptr::null_mut();
        assert_eq!(qholo_operator_from_json(json, &mut back), QholoOk);
        let (mut s1, mut s2): (*mut c_char, *mut c_char) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(qholo_operator_display(op, &mut s1), QholoOk);
        assert_eq!(qholo_operator_display(back, &mut s2), QholoOk);
        assert_eq!(unsafe { CStr::from_ptr(s1) }, unsafe { CStr::from_ptr(s2) });
        qholo_string_free(s1);
        qholo_string_free(s2);
        qholo_string_free(json);
        qholo_operator_free(op);
        qholo_operator_free(back);

        // too-small ansatz reports the distinct no-recursion status
        let mut none: *mut QholoOperator = ptr::null_mut();
        assert_eq!(
            qholo_guess_recursion(t, 0, 0, 0, 0, &mut none),
            QholoNoRecursion
        );
        qholo_table_free(t);
        qholo_braid_free(b);
        qholo_evaluator_free(ev);
    }

    #[test]
    fn header_is_generated_with_expected_symbols() {
        let header = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/include/qholo.h"
        ))
        .expect("cbindgen header exists after build");
        for sym in [
            "QholoStatus",
            "qholo_braid_parse",
            "qholo_homfly",
            "qholo_guess_recursion",
            "qholo_last_error",
            "qholo_string_free",
        ] {
            assert!(header.contains(sym), "header is missing {sym}");
        }
    }
}
