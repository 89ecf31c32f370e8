//! Seeded property suites over the algebra layers. Shared by `selftest` and
//! the acceptance harness; each suite checks exact equalities only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::gamma::gamma_multiply;
use crate::clifford::matrix::DEFAULT_STRASSEN_THRESHOLD;
use crate::clifford::pauli::PauliTable;
use crate::clifford::{
    clifford_mul_fast, clifford_mul_naive, clifford_mul_via_gamma, gamma_forward, gamma_inverse, monomial_sign,
    CliffordElement, Signature,
};
use crate::hamiltonian::tau::pow6;
use crate::hamiltonian::{
    mu_forward, mu_inverse, oslash, oslash_naive, orig_code, tau_forward, tau_inverse, trans_code, translate,
    HamFactorFamily, ORIG,
};
use crate::nsc::{nsc, nsc2, Mode, PairSetFunction};
use crate::ring::{Int, Integers, Ring};
use crate::subsetfn::{
    mobius_forward, mobius_inverse, sign_i, subset_convolve, submasks, SetFunction, Universe,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{suite}: {detail}")]
pub struct SuiteFailure {
    pub suite: &'static str,
    pub detail: String,
}

type Outcome = Result<SuiteReport, SuiteFailure>;
pub type Suite = (&'static str, fn(u64) -> Outcome);

pub const SUITES: [Suite; 4] =
    [("algebra", algebra), ("clifford", clifford), ("nsc", nsc_suite), ("tau", tau_suite)];

pub fn run_all(seed: u64) -> Vec<Outcome> {
    SUITES.iter().map(|(_, f)| f(seed)).collect()
}

struct Ctx {
    suite: &'static str,
    cases: usize,
    rng: ChaCha8Rng,
}

impl Ctx {
    fn new(suite: &'static str, seed: u64) -> Ctx {
        Ctx { suite, cases: 0, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) -> Result<(), SuiteFailure> {
        self.cases += 1;
        if ok {
            Ok(())
        } else {
            Err(SuiteFailure { suite: self.suite, detail: detail() })
        }
    }

    fn vec(&mut self, len: usize, bound: i64) -> Vec<Int> {
        (0..len).map(|_| Int::from(self.rng.gen_range(-bound..=bound))).collect()
    }

    fn report(self) -> Outcome {
        Ok(SuiteReport { name: self.suite, cases: self.cases })
    }
}

fn fail(suite: &'static str, e: impl std::fmt::Display) -> SuiteFailure {
    SuiteFailure { suite, detail: e.to_string() }
}

fn set_fn(v: Vec<Int>) -> SetFunction<Int> {
    let n = v.len().trailing_zeros() as usize;
    SetFunction::new(Universe::range(n), v).expect("power-of-two length")
}

/// Sign identities, Möbius roundtrips, subset convolution against `O(3^n)`.
pub fn algebra(seed: u64) -> Outcome {
    let ring = Integers;
    let mut cx = Ctx::new("algebra", seed);
    for n in 0..=6usize {
        let full = (1usize << n) - 1;
        for a in 0..=full {
            for b in submasks(full & !a) {
                let want = if a.count_ones() * b.count_ones() % 2 == 0 { 1 } else { -1 };
                cx.check(sign_i(a, b) * sign_i(b, a) == want, || format!("swap sign, A={a:b} B={b:b}"))?;
            }
        }
    }
    for n in 0..=5u32 {
        for code in 0..9usize.pow(n) {
            let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
            let mut rest = code;
            for p in 0..n {
                match rest % 3 {
                    1 => a |= 1 << p,
                    2 => b |= 1 << p,
                    _ => {}
                }
                match rest / 3 % 3 {
                    1 => c |= 1 << p,
                    2 => d |= 1 << p,
                    _ => {}
                }
                rest /= 9;
            }
            let lhs = sign_i(a | b, c | d);
            let rhs = sign_i(a, c) * sign_i(a, d) * sign_i(b, c) * sign_i(b, d);
            cx.check(lhs == rhs, || format!("union sign, A={a:b} B={b:b} C={c:b} D={d:b}"))?;
        }
    }
    for _ in 0..500 {
        let n = cx.rng.gen_range(0..=10);
        let f = set_fn(cx.vec(1 << n, 1000));
        let z = mobius_forward(&ring, &f);
        let brute: Vec<Int> = (0usize..1 << n)
            .map(|x| submasks(x).fold(Int::zero(), |s, a| s.add(f.get(a))))
            .collect();
        cx.check(z.coeffs() == brute.as_slice(), || format!("zeta transform, n={n}"))?;
        cx.check(mobius_inverse(&ring, &z) == f, || format!("Möbius roundtrip, n={n}"))?;
    }
    for _ in 0..500 {
        let n = cx.rng.gen_range(0..=8);
        let (f, g) = (set_fn(cx.vec(1 << n, 1000)), set_fn(cx.vec(1 << n, 1000)));
        let got = subset_convolve(&ring, &f, &g).map_err(|e| fail("algebra", e))?;
        let brute: Vec<Int> = (0usize..1 << n)
            .map(|x| submasks(x).fold(Int::zero(), |s, a| s.add(&f.get(a).mul(g.get(x & !a)))))
            .collect();
        cx.check(got.coeffs() == brute.as_slice(), || format!("subset convolution, n={n}"))?;
    }
    cx.report()
}

fn element(cx: &mut Ctx, n: usize, bound: i64) -> CliffordElement<Int> {
    let v = cx.vec(1 << n, bound);
    CliffordElement::from_coeffs(n, v).expect("power-of-two length")
}

/// Clifford products on three paths, the Pauli monomial law, and the
/// recursive matrix isomorphism.
pub fn clifford(seed: u64) -> Outcome {
    let ring = Integers;
    let mut cx = Ctx::new("clifford", seed);
    let e = |e: crate::clifford::CliffordError| fail("clifford", e);
    for i in 0..200 {
        // every size appears; large sizes are rarer since the recursive path is slow there
        let n = if i < 11 { i } else { cx.rng.gen_range(0..=8) };
        let (f, g) = (element(&mut cx, n, 1_000_000), element(&mut cx, n, 1_000_000));
        let naive = clifford_mul_naive(&ring, &f, &g, Signature::euclidean(n)).map_err(e)?;
        let fast = clifford_mul_fast(&ring, &f, &g).map_err(e)?;
        cx.check(fast == naive, || format!("matrix product differs from naive, n={n}"))?;
        let via = clifford_mul_via_gamma(&ring, &f, &g).map_err(e)?;
        cx.check(via == naive, || format!("recursive product differs from naive, n={n}"))?;
    }
    for n in 0..=8 {
        let table = PauliTable::new(n);
        for a in 0usize..1 << n {
            let ia = table.image(a);
            for b in 0usize..1 << n {
                let mut want = table.image(a ^ b);
                if monomial_sign(a, b, 0) < 0 {
                    want.phase = (want.phase + 2) % 4;
                }
                cx.check(ia.mul(&table.image(b)) == want, || format!("monomial law, n={n} A={a:b} B={b:b}"))?;
            }
        }
    }
    let sig = Signature::balanced(3);
    for _ in 0..50 {
        let (u, v) = (element(&mut cx, 6, 1000), element(&mut cx, 6, 1000));
        let uv = clifford_mul_naive(&ring, &u, &v, sig).map_err(e)?;
        let (gu, gv) = (gamma_forward(&ring, &u, sig).map_err(e)?, gamma_forward(&ring, &v, sig).map_err(e)?);
        let prod = gamma_multiply(&ring, &gu, &gv, DEFAULT_STRASSEN_THRESHOLD);
        let direct = gamma_forward(&ring, &uv, sig).map_err(e)?;
        cx.check(prod.entries == direct.entries, || "matrix image of a product in Cl(3,3)".into())?;
        cx.check(gamma_inverse(&ring, &gu, 3).map_err(e)? == u, || "recursive inverse in Cl(3,3)".into())?;
    }
    cx.report()
}

/// Fast against definitional `nsc` and `nsc2`, plus associativity.
pub fn nsc_suite(seed: u64) -> Outcome {
    let ring = Integers;
    let mut cx = Ctx::new("nsc", seed);
    let e = |e: crate::nsc::NscError| fail("nsc", e);
    for _ in 0..200 {
        let n = cx.rng.gen_range(0..=8);
        let (f, g) = (set_fn(cx.vec(1 << n, 1000)), set_fn(cx.vec(1 << n, 1000)));
        let fast = nsc(&ring, &f, &g, Mode::Fast).map_err(e)?;
        cx.check(fast == nsc(&ring, &f, &g, Mode::Naive).map_err(e)?, || format!("nsc, n={n}"))?;
    }
    for _ in 0..200 {
        let n = cx.rng.gen_range(0..=4);
        let mk = |cx: &mut Ctx| PairSetFunction::new(Universe::range(n), cx.vec(1 << (2 * n), 1000)).expect("length");
        let (f, g) = (mk(&mut cx), mk(&mut cx));
        let fast = nsc2(&ring, &f, &g, Mode::Fast).map_err(e)?;
        cx.check(fast == nsc2(&ring, &f, &g, Mode::Naive).map_err(e)?, || format!("nsc2, n={n}"))?;
    }
    for _ in 0..50 {
        let n = cx.rng.gen_range(0..=6);
        let (f, g, h) = (set_fn(cx.vec(1 << n, 100)), set_fn(cx.vec(1 << n, 100)), set_fn(cx.vec(1 << n, 100)));
        let left = nsc(&ring, &nsc(&ring, &f, &g, Mode::Fast).map_err(e)?, &h, Mode::Fast).map_err(e)?;
        let right = nsc(&ring, &f, &nsc(&ring, &g, &h, Mode::Fast).map_err(e)?, Mode::Fast).map_err(e)?;
        cx.check(left == right, || format!("nsc associativity, n={n}"))?;
    }
    cx.report()
}

/// Random table supported on the six allowed codes, optionally with all
/// entries at one `|A|`.
fn ham_table(cx: &mut Ctx, u: usize, rank: Option<usize>) -> Vec<Int> {
    (0..pow6(u))
        .map(|mut i| {
            let mut a = 0;
            for _ in 0..u {
                a += usize::from(crate::hamiltonian::trans_triple((i % 6) as u8).0);
                i /= 6;
            }
            if rank.is_some_and(|r| r != a) {
                Int::zero()
            } else {
                Int::from(cx.rng.gen_range(-5i64..=5))
            }
        })
        .collect()
}

/// Dense index of a general triple `(A, B, C)` over `u` elements.
fn triple_index(a: usize, b: usize, c: usize, u: usize) -> usize {
    a | b << u | c << (2 * u)
}

fn ham_to_triples(f: &[Int], u: usize) -> Vec<Int> {
    let mut out = vec![Int::zero(); 1 << (3 * u)];
    for (mut i, v) in f.iter().enumerate() {
        let (mut a, mut b, mut c) = (0, 0, 0);
        for p in 0..u {
            let t = crate::hamiltonian::trans_triple((i % 6) as u8);
            a |= usize::from(t.0) << p;
            b |= usize::from(t.1) << p;
            c |= usize::from(t.2) << p;
            i /= 6;
        }
        out[triple_index(a, b, c, u)] = v.clone();
    }
    out
}

/// `Σ h(A1, B1, C1) h'(A2, B2, C2) I(B1, B2) I(C1, C2)` over `A1 ∪ A2 = A`
/// and disjoint unions for `B` and `C`.
fn union_product(f: &[Int], g: &[Int], u: usize) -> Vec<Int> {
    let m = (1usize << u) - 1;
    let mut out = vec![Int::zero(); f.len()];
    for (i, x) in f.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        let (a1, b1, c1) = (i & m, i >> u & m, i >> (2 * u));
        for (j, y) in g.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            let (a2, b2, c2) = (j & m, j >> u & m, j >> (2 * u));
            if b1 & b2 != 0 || c1 & c2 != 0 {
                continue;
            }
            let k = triple_index(a1 | a2, b1 | b2, c1 | c2, u);
            let p = x.mul(y);
            out[k] = out[k].add(&Integers.signed(&p, sign_i(b1, b2) * sign_i(c1, c2)));
        }
    }
    out
}

/// `τ` of a general triple function, straight from its definition.
fn tau_general(h: &[Int], u: usize) -> HamFactorFamily<Int> {
    let ring = Integers;
    let mut fam = HamFactorFamily::zeros(&ring, u);
    let full = (1usize << u) - 1;
    for dm in 0..=full {
        for e in submasks(full & !dm) {
            for b in submasks(dm) {
                for c in submasks(dm) {
                    let s = submasks(dm).fold(Int::zero(), |s, a| s.add(&h[triple_index(a, b | e, c | e, u)]));
                    let idx = fam.index(dm, e, b, c);
                    fam.part_mut(dm)[idx] = ring.signed(&s, sign_i(b, e) * sign_i(c, e));
                }
            }
        }
    }
    fam
}

/// `τ` roundtrip and homomorphism, `μ` homomorphism and roundtrip, fast
/// `⊘`, and the per-vertex translation tables.
pub fn tau_suite(seed: u64) -> Outcome {
    let ring = Integers;
    let mut cx = Ctx::new("tau", seed);
    let e = |e: crate::nsc::NscError| fail("tau", e);
    for ty in ORIG {
        for tz in ORIG {
            let orig = (ty.1 & tz.1 == 0 && ty.2 & tz.2 == 0)
                .then(|| orig_code(ty.0 + tz.0, ty.1 | tz.1, ty.2 | tz.2))
                .flatten();
            let (a, b) = (translate(ty).expect("allowed"), translate(tz).expect("allowed"));
            let trans = (a.0 & b.0 == 0 && a.1 & b.1 == 0 && a.2 & b.2 == 0)
                .then(|| trans_code(a.0 | b.0, a.1 | b.1, a.2 | b.2))
                .flatten();
            cx.check(orig == trans, || format!("translation table cell {ty:?} {tz:?}"))?;
        }
    }
    for i in 0..100 {
        let u = i % 4;
        let f = ham_table(&mut cx, u, None);
        cx.check(tau_inverse(&ring, &tau_forward(&ring, &f, u)) == f, || format!("τ roundtrip, |U|={u}"))?;
    }
    for i in 0..100 {
        let u = i % 4;
        let (r1, r2) = (cx.rng.gen_range(0..=u), cx.rng.gen_range(0..=u));
        let (f, g) = (ham_table(&mut cx, u, Some(r1)), ham_table(&mut cx, u, Some(r2)));
        let (tf, tg) = (tau_forward(&ring, &f, u), tau_forward(&ring, &g, u));
        let want = tau_general(&union_product(&ham_to_triples(&f, u), &ham_to_triples(&g, u), u), u);
        for dm in 0usize..1 << u {
            let d = dm.count_ones() as usize;
            let got = oslash_naive(&ring, tf.part(dm), tg.part(dm), d, u - d);
            cx.check(got == want.part(dm), || format!("τ homomorphism, |U|={u} D={dm:b}"))?;
        }
    }
    for _ in 0..100 {
        let (d, k) = (cx.rng.gen_range(0..=2), cx.rng.gen_range(0..=2));
        let bc = 1usize << (2 * d);
        let (f, g) = (cx.vec(bc << k, 5), cx.vec(bc << k, 5));
        let dmask = (1usize << d) - 1;
        let mut prod = vec![Int::zero(); bc << k];
        for (i, x) in f.iter().enumerate() {
            for (j, y) in g.iter().enumerate() {
                let (x1, x2) = (i % bc, j % bc);
                let (b1, c1, b2, c2) = (x1 & dmask, x1 >> d, x2 & dmask, x2 >> d);
                if b1 & b2 != 0 || c1 & c2 != 0 {
                    continue;
                }
                let slot = ((i / bc) | (j / bc)) * bc + ((b1 | b2) | (c1 | c2) << d);
                prod[slot] = prod[slot].add(&ring.signed(&x.mul(y), sign_i(b1, b2) * sign_i(c1, c2)));
            }
        }
        let (mut mf, mut mg) = (f.clone(), g.clone());
        mu_forward(&ring, &mut mf, d, k);
        mu_forward(&ring, &mut mg, d, k);
        mu_forward(&ring, &mut prod, d, k);
        for ev in 0usize..1 << k {
            let r = ev * bc..(ev + 1) * bc;
            let got = crate::nsc::nsc2_naive_slices(&ring, &mf[r.clone()], &mg[r.clone()], d);
            cx.check(got == prod[r], || format!("μ homomorphism, d={d} k={k}"))?;
        }
        mu_inverse(&ring, &mut mf, d, k);
        cx.check(mf == f, || format!("μ roundtrip, d={d} k={k}"))?;
    }
    for _ in 0..100 {
        let (d, k) = (cx.rng.gen_range(0..=3), cx.rng.gen_range(0..=3));
        let (f, g) = (cx.vec(1 << (2 * d + k), 5), cx.vec(1 << (2 * d + k), 5));
        let fast = oslash(&ring, &f, &g, d, k, Mode::Fast).map_err(e)?;
        cx.check(fast == oslash_naive(&ring, &f, &g, d, k), || format!("⊘ fast, d={d} k={k}"))?;
    }
    cx.report()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        for outcome in run_all(7) {
            let report = outcome.unwrap();
            assert!(report.cases >= 100, "{report:?}");
        }
    }

    #[test]
    fn union_product_is_not_the_disjoint_one() {
        // the A-parts may overlap: x_A ⊙ x_A stays nonzero
        let u = 1;
        let mut f = vec![Int::zero(); 8];
        f[triple_index(1, 0, 0, u)] = Int::from(1);
        let p = union_product(&f, &f, u);
        assert_eq!(p[triple_index(1, 0, 0, u)], Int::from(1));
    }
}
