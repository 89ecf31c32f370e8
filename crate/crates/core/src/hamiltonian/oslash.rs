//! Multiplication inside one factor `H_D` of the τ image:
//!
//! `(f ⊘ g)(E, B, C) = Σ f(E1, B1, C1) g(E2, B2, C2) I(B1, B2) I(C1, C2)
//! (-1)^{|E1| (|B2| + |C2|)}`
//!
//! over `E1 ⊎ E2 = E`, `B1 ⊎ B2 = B`, `C1 ⊎ C2 = C`, with `E ⊆ U \ D` and
//! `B, C ⊆ D`. Tables use the [`super::tau::HamFactorFamily`] layout: the
//! `4^d` entries for `(B, C)` of one `E` are contiguous, as `B | C << d`.
//!
//! The fast path groups `f` by `|E1|` and `g` by `|E2|` and the parity of
//! `|B2| + |C2|`, which makes the sign constant per group. Each group pair
//! is then an `∪`-product over `E`: after a zeta transform over `E` (`μ`)
//! it becomes one `nsc2` over `(B, C)` per `E`. Products are summed per
//! target `|E|` before transforming back, and only entries with
//! `|E| = |E1| + |E2|` are kept.

use crate::clifford::pauli::PauliTable;
use crate::meter::Buf;
use crate::nsc::{nsc2_naive_slices, LeftImage, Mode, Nsc2Accumulator, NscError, RightImage};
use crate::ring::Ring;
use crate::subsetfn::{mobius_bits, sign_i, zeta_bits};

/// Zeta transform over the `E` coordinate (`μ`).
pub fn mu_forward<R: Ring>(ring: &R, f: &mut [R::Elem], d: usize, k: usize) {
    zeta_bits(ring, f, 2 * d, 2 * d + k);
}

/// Inverse of [`mu_forward`].
pub fn mu_inverse<R: Ring>(ring: &R, f: &mut [R::Elem], d: usize, k: usize) {
    mobius_bits(ring, f, 2 * d, 2 * d + k);
}

/// Direct evaluation of the display.
pub fn oslash_naive<R: Ring>(ring: &R, f: &[R::Elem], g: &[R::Elem], d: usize, k: usize) -> Vec<R::Elem> {
    let bc = 1usize << (2 * d);
    let dmask = (1usize << d) - 1;
    let mut out = ring.zeros(bc << k);
    for e1 in 0usize..1 << k {
        for (x1, fv) in f[e1 * bc..(e1 + 1) * bc].iter().enumerate() {
            if ring.is_zero(fv) {
                continue;
            }
            let (b1, c1) = (x1 & dmask, x1 >> d);
            for e2 in crate::subsetfn::submasks(((1 << k) - 1) & !e1) {
                for (x2, gv) in g[e2 * bc..(e2 + 1) * bc].iter().enumerate() {
                    let (b2, c2) = (x2 & dmask, x2 >> d);
                    if ring.is_zero(gv) || b1 & b2 != 0 || c1 & c2 != 0 {
                        continue;
                    }
                    let mut sign = sign_i(b1, b2) * sign_i(c1, c2);
                    if (e1.count_ones() * (b2.count_ones() + c2.count_ones())) % 2 == 1 {
                        sign = -sign;
                    }
                    let slot = &mut out[((e1 | e2) * bc) | (b1 | b2) | ((c1 | c2) << d)];
                    let p = ring.mul(fv, gv);
                    ring.add_assign(slot, &ring.signed(&p, sign));
                }
            }
        }
    }
    out
}

/// `f ⊘ g` by size grouping, `μ` and one `nsc2` per `E` and target size.
pub fn oslash<R: Ring>(
    ring: &R,
    f: &[R::Elem],
    g: &[R::Elem],
    d: usize,
    k: usize,
    mode: Mode,
) -> Result<Vec<R::Elem>, NscError> {
    let table = PauliTable::new(2 * d);
    let mut acc = OslashAccumulator::new(ring, d, k, &table);
    acc.add(ring, f, g, mode)?;
    Ok(acc.finish(ring))
}

/// Sum of several `⊘` products on one `H_D`, transformed back once.
pub struct OslashAccumulator<'t, T> {
    d: usize,
    k: usize,
    table: &'t PauliTable,
    /// `μ`-domain partial sums per target `|E|`.
    targets: Vec<Option<Buf<T>>>,
}

impl<'t, T: Clone> OslashAccumulator<'t, T> {
    pub fn new<R: Ring<Elem = T>>(_ring: &R, d: usize, k: usize, table: &'t PauliTable) -> Self {
        OslashAccumulator {
            d,
            k,
            table,
            targets: (0..=k).map(|_| None).collect(),
        }
    }

    pub fn add<R: Ring<Elem = T>>(&mut self, ring: &R, f: &[T], g: &[T], mode: Mode) -> Result<(), NscError> {
        let (d, k) = (self.d, self.k);
        let bc = 1usize << (2 * d);
        let dmask = (1usize << d) - 1;
        // f by |E1|, g by |E2| with the parity sign folded in: index 0 is
        // used when |E1| is even, index 1 when odd.
        let mut fr: Vec<Option<Vec<T>>> = (0..=k).map(|_| None).collect();
        let mut gr: Vec<[Option<Vec<T>>; 2]> = (0..=k).map(|_| [None, None]).collect();
        for e in 0usize..1 << k {
            let m = e.count_ones() as usize;
            for x in 0..bc {
                let i = e * bc + x;
                if !ring.is_zero(&f[i]) {
                    fr[m].get_or_insert_with(|| ring.zeros(bc << k))[i] = f[i].clone();
                }
                if !ring.is_zero(&g[i]) {
                    let odd = ((x & dmask).count_ones() + (x >> d).count_ones()) % 2 == 1;
                    let [even_side, odd_side] = &mut gr[m];
                    even_side.get_or_insert_with(|| ring.zeros(bc << k))[i] = g[i].clone();
                    let v = if odd { ring.neg(&g[i]) } else { g[i].clone() };
                    odd_side.get_or_insert_with(|| ring.zeros(bc << k))[i] = v;
                }
            }
        }
        for v in fr.iter_mut().flatten() {
            mu_forward(ring, v, d, k);
        }
        for v in gr.iter_mut().flat_map(|p| p.iter_mut()).flatten() {
            mu_forward(ring, v, d, k);
        }
        let slice = |v: &Vec<T>, e: usize| -> Option<Vec<T>> {
            let s = &v[e * bc..(e + 1) * bc];
            s.iter().any(|x| !ring.is_zero(x)).then(|| s.to_vec())
        };
        for e in 0usize..1 << k {
            let m = e.count_ones() as usize;
            let lefts: Vec<Option<Vec<T>>> = (0..=m).map(|e1| fr[e1].as_ref().and_then(|v| slice(v, e))).collect();
            if lefts.iter().all(Option::is_none) {
                continue;
            }
            let rights: Vec<[Option<Vec<T>>; 2]> = (0..=m)
                .map(|e2| [0, 1].map(|s| gr[e2][s].as_ref().and_then(|v| slice(v, e))))
                .collect();
            match mode {
                Mode::Naive => {
                    for target in m..=k.min(2 * m) {
                        let mut sum: Option<Vec<T>> = None;
                        for e1 in target.saturating_sub(m)..=m.min(target) {
                            let e2 = target - e1;
                            let (Some(l), Some(r)) = (&lefts[e1], &rights[e2][e1 % 2]) else {
                                continue;
                            };
                            let p = nsc2_naive_slices(ring, l, r, d);
                            match sum.as_mut() {
                                Some(s) => s.iter_mut().zip(&p).for_each(|(a, b)| ring.add_assign(a, b)),
                                None => sum = Some(p),
                            }
                        }
                        if let Some(s) = sum {
                            self.deposit(ring, target, e, &s);
                        }
                    }
                }
                Mode::Fast => {
                    let limages: Vec<Option<LeftImage<T>>> = lefts
                        .iter()
                        .map(|l| l.as_ref().map(|l| LeftImage::new(ring, self.table, l)))
                        .collect();
                    let rimages: Vec<[Option<RightImage<T>>; 2]> = rights
                        .iter()
                        .map(|pair| {
                            [0, 1].map(|s| pair[s].as_ref().map(|r| RightImage::new(ring, self.table, r)))
                        })
                        .collect();
                    for target in m..=k.min(2 * m) {
                        let mut acc = Nsc2Accumulator::new(self.table);
                        for e1 in target.saturating_sub(m)..=m.min(target) {
                            let e2 = target - e1;
                            if let (Some(l), Some(r)) = (&limages[e1], &rimages[e2][e1 % 2]) {
                                acc.add_product(ring, l, r);
                            }
                        }
                        if !acc.is_empty() {
                            let s = acc.finish(ring)?;
                            self.deposit(ring, target, e, &s);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn deposit<R: Ring<Elem = T>>(&mut self, ring: &R, target: usize, e: usize, s: &[T]) {
        let bc = 1usize << (2 * self.d);
        let len = bc << self.k;
        let buf = self.targets[target].get_or_insert_with(|| Buf::new(ring.zeros(len)));
        for (slot, v) in buf[e * bc..(e + 1) * bc].iter_mut().zip(s) {
            ring.add_assign(slot, v);
        }
    }

    /// Transforms back and keeps, per target size, the entries with that `|E|`.
    pub fn finish<R: Ring<Elem = T>>(self, ring: &R) -> Vec<T> {
        let (d, k) = (self.d, self.k);
        let bc = 1usize << (2 * d);
        let mut out = ring.zeros(bc << k);
        for (target, buf) in self.targets.into_iter().enumerate() {
            let Some(buf) = buf else { continue };
            let mut v = buf.into_vec();
            mu_inverse(ring, &mut v, d, k);
            for e in (0usize..1 << k).filter(|e| e.count_ones() as usize == target) {
                out[e * bc..(e + 1) * bc].clone_from_slice(&v[e * bc..(e + 1) * bc]);
            }
        }
        out
    }
}
