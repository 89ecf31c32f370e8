//! C ABI over the counting library.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free`. Every fallible call returns a [`TwcStatus`] and, on
//! failure, leaves a message retrievable with [`twc_last_error`] on the same
//! thread. Strings handed out must be released with [`twc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use twcount::hamiltonian::count_hamiltonian;
use twcount::instance::{make_nice, parse_graph, parse_td, Graph, InstanceError, NiceDecomposition};
use twcount::ring::{Integers, ModP, Ring};
use twcount::steiner::count_steiner;
use twcount::{CountError, Mode};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Capacity = 5,
    Internal = 6,
}

/// Join algorithm.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwcJoin {
    Fast = 0,
    Naive = 1,
}

/// A parsed graph.
pub struct TwcGraph {
    graph: Graph,
}

/// A validated tree decomposition, already made nice, tied to the graph it was parsed against.
pub struct TwcDecomposition {
    nice: NiceDecomposition,
    n: usize,
    m: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(TwcStatus, String);

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Failure {
        let status = match e {
            InstanceError::Parse { .. } => TwcStatus::Parse,
            _ => TwcStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Failure {
        let status = match e {
            CountError::Capacity { .. } | CountError::Nsc(twcount::nsc::NscError::TooLarge { .. }) => TwcStatus::Capacity,
            CountError::NoTerminals | CountError::TerminalOutOfRange(_) | CountError::TooFewVertices(_) => {
                TwcStatus::Validation
            }
            _ => TwcStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TwcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TwcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            TwcStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(TwcStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(TwcStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(TwcStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn pair<'a>(
    graph: *const TwcGraph,
    td: *const TwcDecomposition,
) -> Result<(&'a Graph, &'a NiceDecomposition), Failure> {
    let g = &graph.as_ref().ok_or_else(|| null("graph"))?.graph;
    let d = td.as_ref().ok_or_else(|| null("decomposition"))?;
    if (d.n, d.m) != (g.n(), g.m()) {
        return Err(Failure(
            TwcStatus::Validation,
            "decomposition was parsed against a different graph".into(),
        ));
    }
    Ok((g, &d.nice))
}

fn mode(join: TwcJoin) -> Mode {
    match join {
        TwcJoin::Fast => Mode::Fast,
        TwcJoin::Naive => Mode::Naive,
    }
}

fn steiner_in<R: Ring>(ring: &R, g: &Graph, k: &[usize], nd: &NiceDecomposition, join: Mode) -> Result<Vec<BigInt>, Failure> {
    Ok(count_steiner(ring, g, k, nd, join)?.iter().map(|c| ring.to_bigint(c)).collect())
}

fn hamiltonian_in<R: Ring>(ring: &R, g: &Graph, nd: &NiceDecomposition, join: Mode) -> Result<BigInt, Failure> {
    Ok(ring.to_bigint(&count_hamiltonian(ring, g, nd, join)?))
}

fn modp(modulus: u64) -> Result<ModP, Failure> {
    ModP::new(modulus).map_err(|e| Failure(TwcStatus::Validation, format!("modulus {modulus}: {e}")))
}

/// Parses a graph in `p tw n m` format. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be null or a NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn twc_graph_parse(text: *const c_char, out: *mut *mut TwcGraph) -> TwcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let graph = parse_graph(self::text(text, "text")?)?;
        *out = Box::into_raw(Box::new(TwcGraph { graph }));
        Ok(())
    })
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twc_graph_vertices(graph: *const TwcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.n())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twc_graph_edges(graph: *const TwcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.m())
}

/// # Safety
/// `graph` must be null or a handle from [`twc_graph_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twc_graph_free(graph: *mut TwcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Parses and validates a tree decomposition (`s td` format) of `graph`.
///
/// # Safety
/// `graph` must be null or a live handle; `text` null or NUL-terminated; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn twc_decomposition_parse(
    graph: *const TwcGraph,
    text: *const c_char,
    out: *mut *mut TwcDecomposition,
) -> TwcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = &graph.as_ref().ok_or_else(|| null("graph"))?.graph;
        let td = parse_td(self::text(text, "text")?, g)?;
        let nice = make_nice(&td, g).map_err(|e| Failure(TwcStatus::Validation, e.to_string()))?;
        *out = Box::into_raw(Box::new(TwcDecomposition { nice, n: g.n(), m: g.m() }));
        Ok(())
    })
}

/// Width of the decomposition, or 0 for a null handle.
///
/// # Safety
/// `td` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twc_decomposition_width(td: *const TwcDecomposition) -> usize {
    td.as_ref().map_or(0, |d| d.nice.width())
}

/// # Safety
/// `td` must be null or a handle from [`twc_decomposition_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twc_decomposition_free(td: *mut TwcDecomposition) {
    if !td.is_null() {
        drop(Box::from_raw(td));
    }
}

/// Counts Steiner trees of every size connecting the 1-based `terminals`.
///
/// `modulus` 0 counts exactly; otherwise it must be a prime above 2^60.
/// On success `*out_json` receives `{"sizes":{"<edges>":"<count>",...}}`
/// listing the nonzero sizes.
///
/// # Safety
/// Handles must be live; `terminals` must point to `n_terminals` values
/// (may be null when `n_terminals` is 0); `out_json` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn twc_count_steiner(
    graph: *const TwcGraph,
    td: *const TwcDecomposition,
    terminals: *const u32,
    n_terminals: usize,
    join: TwcJoin,
    modulus: u64,
    out_json: *mut *mut c_char,
) -> TwcStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let (g, nd) = pair(graph, td)?;
        let mut k: Vec<usize> = match n_terminals {
            0 => Vec::new(),
            _ if terminals.is_null() => return Err(null("terminals")),
            n => std::slice::from_raw_parts(terminals, n).iter().map(|&v| v as usize).collect(),
        };
        k.sort_unstable();
        k.dedup();
        let counts = match modulus {
            0 => steiner_in(&Integers, g, &k, nd, mode(join))?,
            p => steiner_in(&modp(p)?, g, &k, nd, mode(join))?,
        };
        let sizes: serde_json::Map<String, serde_json::Value> = counts
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != BigInt::from(0))
            .map(|(i, c)| (i.to_string(), c.to_string().into()))
            .collect();
        give_string(out_json, serde_json::json!({ "sizes": sizes }).to_string())
    })
}

/// Counts Hamiltonian cycles; `*out_decimal` receives the count in base 10.
///
/// # Safety
/// Handles must be live; `out_decimal` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn twc_count_hamiltonian(
    graph: *const TwcGraph,
    td: *const TwcDecomposition,
    join: TwcJoin,
    modulus: u64,
    out_decimal: *mut *mut c_char,
) -> TwcStatus {
    guard(|| {
        if out_decimal.is_null() {
            return Err(null("out_decimal"));
        }
        let (g, nd) = pair(graph, td)?;
        let c = match modulus {
            0 => hamiltonian_in(&Integers, g, nd, mode(join))?,
            p => hamiltonian_in(&modp(p)?, g, nd, mode(join))?,
        };
        give_string(out_decimal, c.to_string())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn twc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_are_stable() {
        assert_eq!(TwcStatus::Ok as i32, 0);
        assert_eq!(TwcStatus::Internal as i32, 6);
    }

    #[test]
    fn panics_become_internal() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, TwcStatus::Internal);
        let msg = unsafe { CStr::from_ptr(twc_last_error()) }.to_str().unwrap();
        assert!(msg.contains("boom"));
    }

    #[test]
    fn success_clears_the_error() {
        guard(|| Err(null("x")));
        assert!(!twc_last_error().is_null());
        guard(|| Ok(()));
        assert!(twc_last_error().is_null());
    }
}
