//! The transform `τ` from Ham-supported functions on triples of subsets of a
//! universe `U` to a family of functions, one per `D ⊆ U`:
//!
//! `(τ_D f)(E, B, C) = I(B, E) · I(C, E) · Σ_{A ⊆ D} f(A, B ∪ E, C ∪ E)`
//!
//! for `E ⊆ U \ D` and `B, C ⊆ D`. Ham functions are stored densely with one
//! base-6 digit per element (see [`super::TRANS`]).
//!
//! Both directions run in `O(6^|U| · |U|)`: for each pair `(B', C')` the
//! entries `f(·, B', C')` form a function of `A \ (B' △ C')` alone, and one
//! zeta (or Möbius) transform of it yields every family entry that reads it.

use crate::meter::Buf;
use crate::ring::Ring;
use crate::subsetfn::{mobius_bits, sign_i, zeta_bits};

/// Packs the bits of `x` selected by `m` into the low bits.
pub(crate) fn pext(x: usize, m: usize) -> usize {
    let (mut out, mut k, mut rest) = (0, 0, m);
    while rest != 0 {
        let low = rest & rest.wrapping_neg();
        if x & low != 0 {
            out |= 1 << k;
        }
        k += 1;
        rest ^= low;
    }
    out
}

/// Inverse of [`pext`]: spreads the low bits of `x` onto the bits of `m`.
pub(crate) fn pdep(x: usize, m: usize) -> usize {
    let (mut out, mut k, mut rest) = (0, 0, m);
    while rest != 0 {
        let low = rest & rest.wrapping_neg();
        if x >> k & 1 == 1 {
            out |= low;
        }
        k += 1;
        rest ^= low;
    }
    out
}

pub(crate) fn pow6(k: usize) -> usize {
    6usize.pow(k as u32)
}

/// `τ f`: for every `D ⊆ U` (as a mask) a table over `(E, B, C)`, laid out
/// as `(B | C << d) + 4^d · E` with `B, C` packed within `D` and `E` packed
/// within `U \ D` (`d = |D|`).
#[derive(Debug, Clone, PartialEq)]
pub struct HamFactorFamily<T> {
    u: usize,
    parts: Vec<Buf<T>>,
}

impl<T: Clone> HamFactorFamily<T> {
    pub fn zeros<R: Ring<Elem = T>>(ring: &R, u: usize) -> HamFactorFamily<T> {
        let parts = (0usize..1 << u)
            .map(|dm| {
                let d = dm.count_ones() as usize;
                Buf::new(ring.zeros((1 << (u - d)) << (2 * d)))
            })
            .collect();
        HamFactorFamily { u, parts }
    }

    pub fn universe_len(&self) -> usize {
        self.u
    }

    /// Table of `τ_D` for the mask `dm`.
    pub fn part(&self, dm: usize) -> &[T] {
        &self.parts[dm]
    }

    pub fn part_mut(&mut self, dm: usize) -> &mut [T] {
        &mut self.parts[dm]
    }

    /// Index of `(E, B, C)` (unpacked masks over `U`) within part `dm`.
    pub fn index(&self, dm: usize, e: usize, b: usize, c: usize) -> usize {
        let d = dm.count_ones() as usize;
        let rest = ((1 << self.u) - 1) & !dm;
        (pext(b, dm) | pext(c, dm) << d) + (pext(e, rest) << (2 * d))
    }

    pub fn get(&self, dm: usize, e: usize, b: usize, c: usize) -> &T {
        &self.parts[dm][self.index(dm, e, b, c)]
    }

    pub fn is_zero<R: Ring<Elem = T>>(&self, ring: &R) -> bool {
        self.parts.iter().all(|p| p.iter().all(|v| ring.is_zero(v)))
    }
}

/// Walks every `(B', C')` pair, giving `(b1, c1, h, rest)`: `B' \ C'`,
/// `C' \ B'`, `B' ∩ C'` and the elements in neither.
fn for_each_pair(u: usize, mut visit: impl FnMut(usize, usize, usize, usize)) {
    let full = (1usize << u) - 1;
    for bm in 0..=full {
        for cm in 0..=full {
            visit(bm & !cm, cm & !bm, bm & cm, full & !(bm | cm));
        }
    }
}

/// Base-6 code of the Ham triple with `A ∩ F = C1` and no free element in
/// `A`: digits `010` on `B1`, `101` on `C1`, `011` on `H`, `000` elsewhere.
/// Adding a free element `p` to `A` adds `6^p`.
fn base_code(b1: usize, c1: usize, h: usize, u: usize) -> usize {
    (0..u)
        .map(|p| {
            let d = if b1 >> p & 1 == 1 {
                3
            } else if c1 >> p & 1 == 1 {
                2
            } else if h >> p & 1 == 1 {
                4
            } else {
                0
            };
            d * pow6(p)
        })
        .sum()
}

fn signed<R: Ring>(ring: &R, v: &R::Elem, s: i32) -> R::Elem {
    if s > 0 {
        v.clone()
    } else {
        ring.neg(v)
    }
}

pub fn tau_forward<R: Ring>(ring: &R, f: &[R::Elem], u: usize) -> HamFactorFamily<R::Elem> {
    assert_eq!(f.len(), pow6(u), "Ham table length");
    let mut fam = HamFactorFamily::zeros(ring, u);
    for_each_pair(u, |b1, c1, h, rest| {
        let free = h | rest;
        let nfree = free.count_ones() as usize;
        let base = base_code(b1, c1, h, u);
        let mut phi: Vec<R::Elem> = (0usize..1 << nfree)
            .map(|a0| f[base + (0..u).filter(|&p| pdep(a0, free) >> p & 1 == 1).map(pow6).sum::<usize>()].clone())
            .collect();
        if phi.iter().all(|v| ring.is_zero(v)) {
            return;
        }
        zeta_bits(ring, &mut phi, 0, nfree);
        let (bp, cp) = (b1 | h, c1 | h);
        for e in crate::subsetfn::submasks(h) {
            let (b, c) = (bp & !e, cp & !e);
            let sign = sign_i(b, e) * sign_i(c, e);
            for d0 in crate::subsetfn::submasks(rest) {
                let dm = b1 | c1 | (h & !e) | d0;
                let val = &phi[pext((h & !e) | d0, free)];
                let idx = fam.index(dm, e, b, c);
                fam.parts[dm][idx] = signed(ring, val, sign);
            }
        }
    });
    fam
}

pub fn tau_inverse<R: Ring>(ring: &R, fam: &HamFactorFamily<R::Elem>) -> Vec<R::Elem> {
    let u = fam.u;
    let mut f = ring.zeros(pow6(u));
    for_each_pair(u, |b1, c1, h, rest| {
        let free = h | rest;
        let nfree = free.count_ones() as usize;
        let mut gamma: Vec<R::Elem> = (0usize..1 << nfree)
            .map(|packed| {
                let a1 = pdep(packed, free);
                let dm = a1 | b1 | c1;
                let e = h & !a1;
                let (b2, c2) = (b1 | (h & a1), c1 | (h & a1));
                signed(ring, fam.get(dm, e, b2, c2), sign_i(b2, e) * sign_i(c2, e))
            })
            .collect();
        if gamma.iter().all(|v| ring.is_zero(v)) {
            return;
        }
        mobius_bits(ring, &mut gamma, 0, nfree);
        let base = base_code(b1, c1, h, u);
        for (packed, v) in gamma.into_iter().enumerate() {
            let a1 = pdep(packed, free);
            let code = base + (0..u).filter(|&p| a1 >> p & 1 == 1).map(pow6).sum::<usize>();
            f[code] = v;
        }
    });
    f
}
