//! Subset convolutions twisted by the inversion sign.
//!
//! `nsc(f, g)(X) = sum_{A ⊎ B = X} f(A) g(B) I_{A,B}` is the Clifford product
//! restricted to disjoint pairs, which the fast path recovers by splitting
//! both operands by rank and keeping only `|X| = |A| + |B|`. `nsc2` acts on
//! functions of two subsets and reduces to two `nsc` products on the doubled
//! universe in which every `Y`-element sits above every `X`-element.

use crate::clifford::matrix::{complex_add, complex_matmul, ComplexMatrix, DEFAULT_STRASSEN_THRESHOLD};
use crate::clifford::pauli::{phi_inverse_slice, phi_slice, PauliTable};
use crate::clifford::CliffordError;
use crate::ring::Ring;
use crate::subsetfn::{inversion_parity, submasks, Mask, SetFunction, Universe};

/// Largest universe for the fast `nsc` path.
pub const NSC_FAST_CAP: usize = 20;
/// Largest universe for the fast `nsc2` path.
pub const NSC2_FAST_CAP: usize = 10;

/// Which algorithm to use for a convolution or a join.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Fast,
    Naive,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NscError {
    #[error("operands live on different universes")]
    UniverseMismatch,
    #[error("universe of size {n} exceeds the fast-path cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// Function of a pair of subsets, indexed by `(Y << n) | X`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSetFunction<T> {
    universe: Universe,
    coeffs: Vec<T>,
}

#[inline]
pub fn pair_index(x: Mask, y: Mask, n: usize) -> usize {
    (y << n) | x
}

impl<T: Clone> PairSetFunction<T> {
    pub fn new(universe: Universe, coeffs: Vec<T>) -> Option<PairSetFunction<T>> {
        (coeffs.len() == 1 << (2 * universe.len())).then_some(PairSetFunction { universe, coeffs })
    }

    pub fn zeros<R: Ring<Elem = T>>(ring: &R, universe: Universe) -> PairSetFunction<T> {
        let len = 1 << (2 * universe.len());
        PairSetFunction {
            universe,
            coeffs: ring.zeros(len),
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.universe.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn get(&self, x: Mask, y: Mask) -> &T {
        &self.coeffs[pair_index(x, y, self.n())]
    }

    pub fn set(&mut self, x: Mask, y: Mask, v: T) {
        let n = self.n();
        self.coeffs[pair_index(x, y, n)] = v;
    }
}

/// Matrix images of the rank slices of one operand; `None` for empty slices.
#[derive(Debug, Clone)]
pub struct RankedImage<T> {
    slices: Vec<Option<ComplexMatrix<T>>>,
}

impl<T: Clone> RankedImage<T> {
    pub fn new<R: Ring<Elem = T>>(ring: &R, table: &PauliTable, coeffs: &[T]) -> RankedImage<T> {
        let n = table.n();
        let mut parts: Vec<Option<Vec<T>>> = vec![None; n + 1];
        for (x, c) in coeffs.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            let part = parts[x.count_ones() as usize].get_or_insert_with(|| ring.zeros(coeffs.len()));
            part[x] = c.clone();
        }
        RankedImage {
            slices: parts
                .into_iter()
                .map(|p| p.map(|s| phi_slice(ring, table, &s)))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(Option::is_none)
    }
}

/// Accumulates sums of `nsc` products in the matrix domain, one running
/// matrix per output rank, and converts back once.
pub struct NscAccumulator<'a, T> {
    table: &'a PauliTable,
    threshold: usize,
    acc: Vec<Option<ComplexMatrix<T>>>,
}

impl<'a, T: Clone> NscAccumulator<'a, T> {
    pub fn new(table: &'a PauliTable) -> NscAccumulator<'a, T> {
        NscAccumulator {
            table,
            threshold: DEFAULT_STRASSEN_THRESHOLD,
            acc: vec![None; table.n() + 1],
        }
    }

    /// Add `nsc(a, b)`.
    pub fn add_product<R: Ring<Elem = T>>(&mut self, ring: &R, a: &RankedImage<T>, b: &RankedImage<T>) {
        let n = self.table.n();
        for (i, fa) in a.slices.iter().enumerate() {
            let Some(fa) = fa else { continue };
            for (j, gb) in b.slices.iter().enumerate().take(n + 1 - i) {
                let Some(gb) = gb else { continue };
                let prod = complex_matmul(ring, fa, gb, self.threshold);
                let slot = &mut self.acc[i + j];
                *slot = Some(match slot.take() {
                    None => prod,
                    Some(cur) => complex_add(ring, &cur, &prod),
                });
            }
        }
    }

    /// Coefficients of the accumulated sum.
    pub fn finish<R: Ring<Elem = T>>(self, ring: &R) -> Result<Vec<T>, NscError> {
        let len = 1usize << self.table.n();
        let mut out = ring.zeros(len);
        for (r, m) in self.acc.into_iter().enumerate() {
            let Some(m) = m else { continue };
            let coeffs = phi_inverse_slice(ring, self.table, &m)?;
            for (x, c) in coeffs.into_iter().enumerate() {
                if x.count_ones() as usize == r {
                    out[x] = c;
                }
            }
        }
        Ok(out)
    }
}

/// Definitional `nsc` on raw slices.
pub fn nsc_naive_slices<R: Ring>(ring: &R, f: &[R::Elem], g: &[R::Elem]) -> Vec<R::Elem> {
    let full = f.len() - 1;
    let mut out = ring.zeros(f.len());
    for (a, fa) in f.iter().enumerate() {
        if ring.is_zero(fa) {
            continue;
        }
        for b in submasks(full & !a) {
            let gb = &g[b];
            if ring.is_zero(gb) {
                continue;
            }
            if inversion_parity(a, b) == 0 {
                ring.mul_add_assign(&mut out[a | b], fa, gb);
            } else {
                ring.mul_sub_assign(&mut out[a | b], fa, gb);
            }
        }
    }
    out
}

/// Fast `nsc` on raw slices of length `2^n`.
pub fn nsc_fast_slices<R: Ring>(ring: &R, f: &[R::Elem], g: &[R::Elem]) -> Result<Vec<R::Elem>, NscError> {
    let n = f.len().trailing_zeros() as usize;
    if n > NSC_FAST_CAP {
        return Err(NscError::TooLarge { n, cap: NSC_FAST_CAP });
    }
    let table = PauliTable::new(n);
    let mut acc = NscAccumulator::new(&table);
    acc.add_product(ring, &RankedImage::new(ring, &table, f), &RankedImage::new(ring, &table, g));
    acc.finish(ring)
}

pub fn nsc<R: Ring>(
    ring: &R,
    f: &SetFunction<R::Elem>,
    g: &SetFunction<R::Elem>,
    mode: Mode,
) -> Result<SetFunction<R::Elem>, NscError> {
    if f.universe() != g.universe() {
        return Err(NscError::UniverseMismatch);
    }
    let coeffs = match mode {
        Mode::Naive => nsc_naive_slices(ring, f.coeffs(), g.coeffs()),
        Mode::Fast => nsc_fast_slices(ring, f.coeffs(), g.coeffs())?,
    };
    Ok(SetFunction::new(f.universe().clone(), coeffs).expect("same length"))
}

/// Definitional `nsc2` on raw slices of length `4^n`.
pub fn nsc2_naive_slices<R: Ring>(ring: &R, f: &[R::Elem], g: &[R::Elem], n: usize) -> Vec<R::Elem> {
    let full = (1usize << n) - 1;
    let mut out = ring.zeros(f.len());
    for (i, fv) in f.iter().enumerate() {
        if ring.is_zero(fv) {
            continue;
        }
        let (x1, y1) = (i & full, i >> n);
        for x2 in submasks(full & !x1) {
            for y2 in submasks(full & !y1) {
                let gv = &g[pair_index(x2, y2, n)];
                if ring.is_zero(gv) {
                    continue;
                }
                let slot = &mut out[pair_index(x1 | x2, y1 | y2, n)];
                if inversion_parity(x1, x2) ^ inversion_parity(y1, y2) == 0 {
                    ring.mul_add_assign(slot, fv, gv);
                } else {
                    ring.mul_sub_assign(slot, fv, gv);
                }
            }
        }
    }
    out
}

/// Split of the left operand of `nsc2` by the parity of `|Y|`.
///
/// `nsc2(f, g)` equals `nsc(f_0, g) + nsc(f_1, g_0 - g_1)` on the doubled
/// universe, where `f_p` keeps the entries with `|Y| = p (mod 2)` and `g_p`
/// those with `|X| = p (mod 2)`.
pub fn split_left<R: Ring>(ring: &R, f: &[R::Elem], n: usize) -> [Vec<R::Elem>; 2] {
    let mut f0 = ring.zeros(f.len());
    let mut f1 = ring.zeros(f.len());
    for (i, v) in f.iter().enumerate() {
        if ring.is_zero(v) {
            continue;
        }
        if (i >> n).count_ones().is_multiple_of(2) {
            f0[i] = v.clone();
        } else {
            f1[i] = v.clone();
        }
    }
    [f0, f1]
}

/// `(g, g_0 - g_1)` for the right operand of `nsc2`.
pub fn split_right<R: Ring>(ring: &R, g: &[R::Elem], n: usize) -> [Vec<R::Elem>; 2] {
    let full = (1usize << n) - 1;
    let twisted = g
        .iter()
        .enumerate()
        .map(|(i, v)| if (i & full).count_ones().is_multiple_of(2) { v.clone() } else { ring.neg(v) })
        .collect();
    [g.to_vec(), twisted]
}

/// Images of an `nsc2` left operand, ready for [`Nsc2Accumulator`].
pub struct LeftImage<T>([RankedImage<T>; 2]);
/// Images of an `nsc2` right operand, ready for [`Nsc2Accumulator`].
pub struct RightImage<T>([RankedImage<T>; 2]);

impl<T: Clone> LeftImage<T> {
    pub fn new<R: Ring<Elem = T>>(ring: &R, table: &PauliTable, f: &[T]) -> LeftImage<T> {
        let n = table.n() / 2;
        let [f0, f1] = split_left(ring, f, n);
        LeftImage([RankedImage::new(ring, table, &f0), RankedImage::new(ring, table, &f1)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(RankedImage::is_zero)
    }
}

impl<T: Clone> RightImage<T> {
    pub fn new<R: Ring<Elem = T>>(ring: &R, table: &PauliTable, g: &[T]) -> RightImage<T> {
        let n = table.n() / 2;
        let [g0, g1] = split_right(ring, g, n);
        RightImage([RankedImage::new(ring, table, &g0), RankedImage::new(ring, table, &g1)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(RankedImage::is_zero)
    }
}

/// Sums of `nsc2` products over one universe of size `n` (table on `2n`).
pub struct Nsc2Accumulator<'a, T> {
    inner: NscAccumulator<'a, T>,
    empty: bool,
}

impl<'a, T: Clone> Nsc2Accumulator<'a, T> {
    pub fn new(table: &'a PauliTable) -> Nsc2Accumulator<'a, T> {
        Nsc2Accumulator {
            inner: NscAccumulator::new(table),
            empty: true,
        }
    }

    pub fn add_product<R: Ring<Elem = T>>(&mut self, ring: &R, f: &LeftImage<T>, g: &RightImage<T>) {
        self.empty = false;
        self.inner.add_product(ring, &f.0[0], &g.0[0]);
        self.inner.add_product(ring, &f.0[1], &g.0[1]);
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn finish<R: Ring<Elem = T>>(self, ring: &R) -> Result<Vec<T>, NscError> {
        self.inner.finish(ring)
    }
}

/// Fast `nsc2` on raw slices of length `4^n`.
pub fn nsc2_fast_slices<R: Ring>(
    ring: &R,
    f: &[R::Elem],
    g: &[R::Elem],
    n: usize,
) -> Result<Vec<R::Elem>, NscError> {
    if n > NSC2_FAST_CAP {
        return Err(NscError::TooLarge { n, cap: NSC2_FAST_CAP });
    }
    let table = PauliTable::new(2 * n);
    let mut acc = Nsc2Accumulator::new(&table);
    acc.add_product(ring, &LeftImage::new(ring, &table, f), &RightImage::new(ring, &table, g));
    acc.finish(ring)
}

pub fn nsc2<R: Ring>(
    ring: &R,
    f: &PairSetFunction<R::Elem>,
    g: &PairSetFunction<R::Elem>,
    mode: Mode,
) -> Result<PairSetFunction<R::Elem>, NscError> {
    if f.universe != g.universe {
        return Err(NscError::UniverseMismatch);
    }
    let n = f.n();
    let coeffs = match mode {
        Mode::Naive => nsc2_naive_slices(ring, &f.coeffs, &g.coeffs, n),
        Mode::Fast => nsc2_fast_slices(ring, &f.coeffs, &g.coeffs, n)?,
    };
    Ok(PairSetFunction {
        universe: f.universe.clone(),
        coeffs,
    })
}
