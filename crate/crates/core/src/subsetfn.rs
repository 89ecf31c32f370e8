//! Dense functions on the subsets of a small ordered universe.
//!
//! Masks are plain `usize` bit sets: bit `i` is the `i`-th universe element
//! in universe order. All transforms here work either on a [`SetFunction`]
//! or directly on a coefficient slice (the slice forms are what the join
//! code uses on its hot paths).

use crate::ring::Ring;

/// Bit set over universe positions.
pub type Mask = usize;

/// Largest supported universe.
pub const MAX_UNIVERSE: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubsetError {
    #[error("universe of size {0} exceeds the cap of {MAX_UNIVERSE}")]
    TooLarge(usize),
    #[error("universe elements must be strictly increasing")]
    NotIncreasing,
    #[error("expected {expected} coefficients, got {got}")]
    Length { expected: usize, got: usize },
    #[error("operands live on different universes")]
    UniverseMismatch,
}

/// Ordered ground set; masks are interpreted against this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Universe {
    elements: Vec<u32>,
}

impl Universe {
    pub fn new(elements: Vec<u32>) -> Result<Universe, SubsetError> {
        if elements.len() > MAX_UNIVERSE {
            return Err(SubsetError::TooLarge(elements.len()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SubsetError::NotIncreasing);
        }
        Ok(Universe { elements })
    }

    /// The universe `{1, .., n}`.
    pub fn range(n: usize) -> Universe {
        assert!(n <= MAX_UNIVERSE, "universe too large");
        Universe {
            elements: (1..=n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn full(&self) -> Mask {
        (1usize << self.len()) - 1
    }

    /// Mask of the given element ids; `None` if one is not in the universe.
    pub fn mask_of(&self, ids: &[u32]) -> Option<Mask> {
        let mut m = 0;
        for id in ids {
            let pos = self.elements.binary_search(id).ok()?;
            m |= 1 << pos;
        }
        Some(m)
    }
}

/// Parity of `#{(a, b) in A x B : a > b}`.
#[inline]
pub fn inversion_parity(a: Mask, b: Mask) -> u32 {
    let mut parity = 0;
    let mut rest = b;
    while rest != 0 {
        let low = rest.trailing_zeros();
        parity ^= ((a >> low) >> 1).count_ones() & 1;
        rest &= rest - 1;
    }
    parity
}

/// `I_{A,B}`: `+1` or `-1` according to the parity of inverted pairs.
#[inline]
pub fn sign_i(a: Mask, b: Mask) -> i32 {
    if inversion_parity(a, b) == 0 {
        1
    } else {
        -1
    }
}

/// Function `2^U -> R`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction<T> {
    universe: Universe,
    coeffs: Vec<T>,
}

impl<T: Clone> SetFunction<T> {
    pub fn new(universe: Universe, coeffs: Vec<T>) -> Result<SetFunction<T>, SubsetError> {
        let expected = 1usize << universe.len();
        if coeffs.len() != expected {
            return Err(SubsetError::Length {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(SetFunction { universe, coeffs })
    }

    pub fn zeros<R: Ring<Elem = T>>(ring: &R, universe: Universe) -> SetFunction<T> {
        let len = 1usize << universe.len();
        SetFunction {
            universe,
            coeffs: ring.zeros(len),
        }
    }

    /// The indicator of a single mask (scaled by `value`).
    pub fn point<R: Ring<Elem = T>>(ring: &R, universe: Universe, at: Mask, value: T) -> Self {
        let mut f = SetFunction::zeros(ring, universe);
        f.coeffs[at] = value;
        f
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

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn get(&self, x: Mask) -> &T {
        &self.coeffs[x]
    }

    pub fn set(&mut self, x: Mask, v: T) {
        self.coeffs[x] = v;
    }
}

/// A set function split by the popcount of its argument.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSetFunction<T> {
    pub slices: Vec<SetFunction<T>>,
}

impl<T: Clone> RankedSetFunction<T> {
    pub fn split<R: Ring<Elem = T>>(ring: &R, f: &SetFunction<T>) -> RankedSetFunction<T> {
        let n = f.n();
        let mut slices: Vec<SetFunction<T>> = (0..=n)
            .map(|_| SetFunction::zeros(ring, f.universe.clone()))
            .collect();
        for (x, c) in f.coeffs.iter().enumerate() {
            slices[x.count_ones() as usize].coeffs[x] = c.clone();
        }
        RankedSetFunction { slices }
    }

    pub fn sum<R: Ring<Elem = T>>(&self, ring: &R) -> SetFunction<T> {
        let first = &self.slices[0];
        let mut out = SetFunction::zeros(ring, first.universe.clone());
        for s in &self.slices {
            for (o, c) in out.coeffs.iter_mut().zip(&s.coeffs) {
                ring.add_assign(o, c);
            }
        }
        out
    }
}

/// In-place zeta transform over bit positions `lo..hi` of the index:
/// `d[X] <- sum of d[A]` over `A` that agree with `X` outside those bits and
/// are contained in `X` on them.
pub fn zeta_bits<R: Ring>(ring: &R, data: &mut [R::Elem], lo: usize, hi: usize) {
    for bit in lo..hi {
        let step = 1usize << bit;
        for base in (0..data.len()).step_by(step << 1) {
            for x in base..base + step {
                let (a, b) = data.split_at_mut(x + step);
                ring.add_assign(&mut b[0], &a[x]);
            }
        }
    }
}

/// Inverse of [`zeta_bits`].
pub fn mobius_bits<R: Ring>(ring: &R, data: &mut [R::Elem], lo: usize, hi: usize) {
    for bit in lo..hi {
        let step = 1usize << bit;
        for base in (0..data.len()).step_by(step << 1) {
            for x in base..base + step {
                let (a, b) = data.split_at_mut(x + step);
                ring.sub_assign(&mut b[0], &a[x]);
            }
        }
    }
}

/// Zeta transform over every bit of a `2^n` slice.
pub fn zeta_in_place<R: Ring>(ring: &R, data: &mut [R::Elem]) {
    let n = data.len().trailing_zeros() as usize;
    zeta_bits(ring, data, 0, n);
}

/// Möbius inversion over every bit of a `2^n` slice.
pub fn mobius_in_place<R: Ring>(ring: &R, data: &mut [R::Elem]) {
    let n = data.len().trailing_zeros() as usize;
    mobius_bits(ring, data, 0, n);
}

/// `result(X) = sum_{A ⊆ X} f(A)`.
pub fn mobius_forward<R: Ring>(ring: &R, f: &SetFunction<R::Elem>) -> SetFunction<R::Elem> {
    let mut out = f.clone();
    zeta_in_place(ring, &mut out.coeffs);
    out
}

/// Inverse of [`mobius_forward`].
pub fn mobius_inverse<R: Ring>(ring: &R, g: &SetFunction<R::Elem>) -> SetFunction<R::Elem> {
    let mut out = g.clone();
    mobius_in_place(ring, &mut out.coeffs);
    out
}

/// Ranked zeta transforms of a slice: entry `r` is the zeta transform of the
/// restriction of `data` to masks of popcount `r`.
pub fn ranked_zeta<R: Ring>(ring: &R, data: &[R::Elem]) -> Vec<Vec<R::Elem>> {
    let n = data.len().trailing_zeros() as usize;
    (0..=n)
        .map(|r| {
            let mut s: Vec<R::Elem> = data
                .iter()
                .enumerate()
                .map(|(x, c)| {
                    if x.count_ones() as usize == r {
                        c.clone()
                    } else {
                        ring.zero()
                    }
                })
                .collect();
            zeta_in_place(ring, &mut s);
            s
        })
        .collect()
}

/// Subset convolution on raw slices of equal length `2^n`.
pub fn subset_convolve_slices<R: Ring>(ring: &R, f: &[R::Elem], g: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(f.len(), g.len());
    let n = f.len().trailing_zeros() as usize;
    let fh = ranked_zeta(ring, f);
    let gh = ranked_zeta(ring, g);
    let mut out = ring.zeros(f.len());
    for r in 0..=n {
        let mut h = ring.zeros(f.len());
        for i in 0..=r {
            for (x, hx) in h.iter_mut().enumerate() {
                ring.mul_add_assign(hx, &fh[i][x], &gh[r - i][x]);
            }
        }
        mobius_in_place(ring, &mut h);
        for (x, hx) in h.into_iter().enumerate() {
            if x.count_ones() as usize == r {
                out[x] = hx;
            }
        }
    }
    out
}

/// `result(X) = sum_{A ⊎ B = X} f(A) g(B)`.
pub fn subset_convolve<R: Ring>(
    ring: &R,
    f: &SetFunction<R::Elem>,
    g: &SetFunction<R::Elem>,
) -> Result<SetFunction<R::Elem>, SubsetError> {
    if f.universe != g.universe {
        return Err(SubsetError::UniverseMismatch);
    }
    Ok(SetFunction {
        universe: f.universe.clone(),
        coeffs: subset_convolve_slices(ring, &f.coeffs, &g.coeffs),
    })
}

/// Iterate over all submasks of `m` (including `m` and `0`).
pub fn submasks(m: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Int, Integers};
    use proptest::prelude::*;

    fn sf(n: usize, v: &[i64]) -> SetFunction<Int> {
        SetFunction::new(Universe::range(n), v.iter().map(|&x| Int::from(x)).collect()).unwrap()
    }

    fn ints(f: &SetFunction<Int>) -> Vec<i64> {
        f.coeffs()
            .iter()
            .map(|c| match c {
                Int::Small(v) => *v,
                Int::Big(_) => panic!("unexpected big value"),
            })
            .collect()
    }

    fn brute_inversions(a: Mask, b: Mask) -> i32 {
        let mut count = 0;
        for i in 0..16 {
            for j in 0..16 {
                if a >> i & 1 == 1 && b >> j & 1 == 1 && i > j {
                    count += 1;
                }
            }
        }
        if count % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_i(0, 0b11), 1);
        assert_eq!(sign_i(0b10, 0b01), -1);
        assert_eq!(sign_i(0b0101, 0b1010), -1);
    }

    #[test]
    fn sign_matches_pair_enumeration() {
        for a in 0..64 {
            for b in 0..64 {
                assert_eq!(sign_i(a, b), brute_inversions(a, b));
            }
        }
    }

    #[test]
    fn swap_law_for_disjoint_sets() {
        for a in 0..64usize {
            for b in submasks(63 & !a) {
                let expect = if (a.count_ones() * b.count_ones()) % 2 == 0 { 1 } else { -1 };
                assert_eq!(sign_i(a, b) * sign_i(b, a), expect);
            }
        }
    }

    #[test]
    fn split_law_for_disjoint_pairs() {
        let full = 31usize;
        for a in 0..32usize {
            for b in submasks(full & !a) {
                for c in 0..32usize {
                    for d in submasks(full & !c) {
                        let lhs = sign_i(a | b, c | d);
                        let rhs = sign_i(a, c) * sign_i(a, d) * sign_i(b, c) * sign_i(b, d);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let z = Integers;
        assert_eq!(ints(&mobius_forward(&z, &sf(2, &[1, 0, 0, 0]))), vec![1, 1, 1, 1]);
        assert_eq!(ints(&mobius_forward(&z, &sf(2, &[0, 1, 0, 0]))), vec![0, 1, 0, 1]);
        assert_eq!(ints(&mobius_inverse(&z, &sf(2, &[1, 1, 1, 1]))), vec![1, 0, 0, 0]);
        assert_eq!(ints(&mobius_inverse(&z, &sf(2, &[0, 1, 0, 1]))), vec![0, 1, 0, 0]);
    }

    #[test]
    fn convolution_examples() {
        let z = Integers;
        let f = sf(2, &[3, -1, 4, 1]);
        let e = sf(2, &[1, 0, 0, 0]);
        assert_eq!(subset_convolve(&z, &f, &e).unwrap(), f);
        let one = sf(3, &[1; 8]);
        let h = subset_convolve(&z, &one, &one).unwrap();
        for x in 0..8usize {
            assert_eq!(h.coeffs()[x], Int::from(1i64 << x.count_ones()));
        }
    }

    #[test]
    fn universe_checks() {
        assert_eq!(Universe::new(vec![3, 1]), Err(SubsetError::NotIncreasing));
        assert!(Universe::new((0..31).collect()).is_err());
        assert_eq!(Universe::new(vec![2, 5, 9]).unwrap().mask_of(&[9, 2]), Some(0b101));
        let f = sf(1, &[0, 1]);
        let g = sf(2, &[0, 1, 0, 0]);
        assert_eq!(subset_convolve(&Integers, &f, &g), Err(SubsetError::UniverseMismatch));
    }

    #[test]
    fn submask_enumeration() {
        let mut s: Vec<Mask> = submasks(0b1010).collect();
        s.sort();
        assert_eq!(s, vec![0, 0b10, 0b1000, 0b1010]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    fn coeffs(n: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-50i64..50, 1 << n)
    }

    proptest! {
        #[test]
        fn zeta_matches_double_loop(n in 0usize..=8, seed in any::<u64>()) {
            let v: Vec<i64> = (0..1usize << n)
                .map(|x| ((x as u64).wrapping_mul(seed | 1) % 97) as i64 - 48)
                .collect();
            let got = ints(&mobius_forward(&Integers, &sf(n, &v)));
            for (x, &g) in got.iter().enumerate() {
                let expect: i64 = submasks(x).map(|a| v[a]).sum();
                prop_assert_eq!(g, expect);
            }
        }

        #[test]
        fn mobius_roundtrip(v in (0usize..=10).prop_flat_map(coeffs)) {
            let n = v.len().trailing_zeros() as usize;
            let f = sf(n, &v);
            prop_assert_eq!(mobius_inverse(&Integers, &mobius_forward(&Integers, &f)), f);
        }

        #[test]
        fn convolution_matches_enumeration(
            (f, g) in (0usize..=8).prop_flat_map(|n| (coeffs(n), coeffs(n)))
        ) {
            let n = f.len().trailing_zeros() as usize;
            let got = ints(&subset_convolve(&Integers, &sf(n, &f), &sf(n, &g)).unwrap());
            for x in 0..1usize << n {
                let expect: i64 = submasks(x).map(|a| f[a] * g[x & !a]).sum();
                prop_assert_eq!(got[x], expect);
            }
        }

        #[test]
        fn convolution_commutative_associative(
            (f, g, h) in (0usize..=6).prop_flat_map(|n| (coeffs(n), coeffs(n), coeffs(n)))
        ) {
            let n = f.len().trailing_zeros() as usize;
            let z = Integers;
            let (f, g, h) = (sf(n, &f), sf(n, &g), sf(n, &h));
            prop_assert_eq!(subset_convolve(&z, &f, &g).unwrap(), subset_convolve(&z, &g, &f).unwrap());
            let left = subset_convolve(&z, &subset_convolve(&z, &f, &g).unwrap(), &h).unwrap();
            let right = subset_convolve(&z, &f, &subset_convolve(&z, &g, &h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn rank_split_reconstructs(v in (0usize..=7).prop_flat_map(coeffs)) {
            let n = v.len().trailing_zeros() as usize;
            let f = sf(n, &v);
            let ranked = RankedSetFunction::split(&Integers, &f);
            prop_assert_eq!(ranked.slices.len(), n + 1);
            for (r, s) in ranked.slices.iter().enumerate() {
                for (x, c) in s.coeffs().iter().enumerate() {
                    if x.count_ones() as usize != r {
                        prop_assert!(c.is_zero());
                    }
                }
            }
            prop_assert_eq!(ranked.sum(&Integers), f);
        }
    }
}
