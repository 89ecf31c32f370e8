use std::ffi::{c_char, CStr, CString};
use std::ptr;

use twcount_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { twc_string_free(s) };
    out
}

fn last_error() -> String {
    let p = twc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Handles(*mut TwcGraph, *mut TwcDecomposition);

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            twc_decomposition_free(self.1);
            twc_graph_free(self.0);
        }
    }
}

fn load(graph: &str, td: &str) -> Handles {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { twc_graph_parse(c(graph).as_ptr(), &mut g) }, TwcStatus::Ok);
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { twc_decomposition_parse(g, c(td).as_ptr(), &mut d) }, TwcStatus::Ok);
    Handles(g, d)
}

const TRI: &str = "p tw 3 3\n1 2\n2 3\n1 3\n";
const TRI_TD: &str = "s td 1 3 3\nb 1 1 2 3\n";
const K4: &str = "p tw 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";
const K4_TD: &str = "s td 1 4 4\nb 1 1 2 3 4\n";

#[test]
fn steiner_on_triangle() {
    let h = load(TRI, TRI_TD);
    assert_eq!(unsafe { (twc_graph_vertices(h.0), twc_graph_edges(h.0), twc_decomposition_width(h.1)) }, (3, 3, 2));
    for join in [TwcJoin::Fast, TwcJoin::Naive] {
        let mut out = ptr::null_mut();
        let k = [1u32, 2];
        let s = unsafe { twc_count_steiner(h.0, h.1, k.as_ptr(), k.len(), join, 0, &mut out) };
        assert_eq!(s, TwcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v, serde_json::json!({"sizes": {"1": "1", "2": "3"}}));
    }
}

#[test]
fn hamiltonian_on_k4_exact_and_modular() {
    let h = load(K4, K4_TD);
    for modulus in [0, 2305843009213693951] {
        let mut out = ptr::null_mut();
        let s = unsafe { twc_count_hamiltonian(h.0, h.1, TwcJoin::Fast, modulus, &mut out) };
        assert_eq!(s, TwcStatus::Ok);
        assert_eq!(take(out), "3");
    }
}

#[test]
fn error_codes() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { twc_graph_parse(ptr::null(), &mut g) }, TwcStatus::NullArgument);
    assert!(last_error().contains("text"));
    assert_eq!(unsafe { twc_graph_parse(c("p tw x").as_ptr(), &mut g) }, TwcStatus::Parse);
    assert!(g.is_null());

    let bad = [0x70u8, 0xff, 0];
    assert_eq!(unsafe { twc_graph_parse(bad.as_ptr().cast(), &mut g) }, TwcStatus::InvalidUtf8);

    let h = load(TRI, TRI_TD);
    let mut d = ptr::null_mut();
    // vertex 3 never appears in a bag
    let s = unsafe { twc_decomposition_parse(h.0, c("s td 1 2 3\nb 1 1 2\n").as_ptr(), &mut d) };
    assert_eq!(s, TwcStatus::Validation);
    assert!(d.is_null());

    let mut out = ptr::null_mut();
    let k = [7u32];
    let s = unsafe { twc_count_steiner(h.0, h.1, k.as_ptr(), 1, TwcJoin::Fast, 0, &mut out) };
    assert_eq!(s, TwcStatus::Validation);
    let s = unsafe { twc_count_steiner(h.0, h.1, ptr::null(), 0, TwcJoin::Fast, 0, &mut out) };
    assert_eq!(s, TwcStatus::Validation);
    let s = unsafe { twc_count_hamiltonian(h.0, h.1, TwcJoin::Fast, 15, &mut out) };
    assert_eq!(s, TwcStatus::Validation);
    let s = unsafe { twc_count_hamiltonian(h.0, ptr::null(), TwcJoin::Fast, 0, &mut out) };
    assert_eq!(s, TwcStatus::NullArgument);
    assert!(out.is_null());
}

#[test]
fn decomposition_must_match_graph() {
    let tri = load(TRI, TRI_TD);
    let k4 = load(K4, K4_TD);
    let mut out = ptr::null_mut();
    let s = unsafe { twc_count_hamiltonian(tri.0, k4.1, TwcJoin::Naive, 0, &mut out) };
    assert_eq!(s, TwcStatus::Validation);
    assert!(last_error().contains("different graph"));
}

#[test]
fn oversized_bag_is_capacity() {
    let n = 20;
    let mut graph = format!("p tw {n} {}\n", n * (n - 1) / 2);
    for u in 1..=n {
        for v in u + 1..=n {
            graph += &format!("{u} {v}\n");
        }
    }
    let bag: Vec<String> = (1..=n).map(|v| v.to_string()).collect();
    let td = format!("s td 1 {n} {n}\nb 1 {}\n", bag.join(" "));
    let h = load(&graph, &td);
    let mut out = ptr::null_mut();
    let s = unsafe { twc_count_hamiltonian(h.0, h.1, TwcJoin::Fast, 0, &mut out) };
    assert_eq!(s, TwcStatus::Capacity);
}

#[test]
fn header_declares_the_abi() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/twcount.h")).unwrap();
    for name in [
        "TwcGraph",
        "TwcDecomposition",
        "TWC_STATUS_NULL_ARGUMENT",
        "twc_graph_parse",
        "twc_graph_free",
        "twc_decomposition_parse",
        "twc_decomposition_free",
        "twc_count_steiner",
        "twc_count_hamiltonian",
        "twc_string_free",
        "twc_last_error",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/twcount.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ TwcGraph *g = 0; return twc_graph_parse(\"\", &g) == TWC_STATUS_OK; }}\n"
        ),
    )
    .unwrap();
    let status = match std::process::Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg(&src).status() {
        Ok(s) => s,
        Err(_) => return, // no C compiler available
    };
    assert!(status.success());
}
