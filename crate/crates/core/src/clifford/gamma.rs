//! The recursive isomorphism `Cl_{k,k} -> M_{2^k}` and its inverse.
//!
//! Generators `1..=k` square to `+e`, `k+1..=2k` to `-e`. At each level the
//! first generator plays `x_+` and the last plays `x_-`; an element is split
//! as `y = a + b x_- + c x_+ + d x_- x_+` with `a, b, c, d` in the algebra on
//! the middle `2k - 2` generators. The forward map carries the pair
//! `(gamma(y+), gamma(y-))` of even and odd parts so each level needs only
//! four recursive calls; the inverse halves at every level, and all those
//! halvings are deferred to one exact division at the end.

use super::matrix::{add, matmul_with, neg, sub, Matrix, DEFAULT_STRASSEN_THRESHOLD};
use super::{CliffordElement, CliffordError, Signature, DEFAULT_GAMMA_CAP};
use crate::ring::Ring;
use crate::subsetfn::Mask;

/// Integer matrix whose true value is `entries / 2^deferred_shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBlockMatrix<T> {
    pub k: usize,
    pub entries: Matrix<T>,
    pub deferred_shift: u32,
}

/// Outer masks of the four parts of inner mask `m`, with the sign relating
/// the outer monomial to `x_{m} * (1, x_-, x_+, x_- x_+)`.
#[inline]
fn outer_masks(m: Mask, k: usize) -> [(Mask, bool); 4] {
    let last = 1usize << (2 * k - 1);
    let body = m << 1;
    let odd = m.count_ones() % 2 == 1;
    [(body, false), (body | last, false), (body | 1, odd), (body | 1 | last, !odd)]
}

fn split<R: Ring>(ring: &R, y: &[R::Elem], k: usize) -> [Vec<R::Elem>; 4] {
    let inner = 1usize << (2 * k - 2);
    let mut parts = [ring.zeros(inner), ring.zeros(inner), ring.zeros(inner), ring.zeros(inner)];
    for m in 0..inner {
        for (part, (outer, negate)) in parts.iter_mut().zip(outer_masks(m, k)) {
            let v = &y[outer];
            if !ring.is_zero(v) {
                part[m] = if negate { ring.neg(v) } else { v.clone() };
            }
        }
    }
    parts
}

/// `(gamma(y+), gamma(y-))`.
fn forward_rec<R: Ring>(ring: &R, y: &[R::Elem], k: usize) -> (Matrix<R::Elem>, Matrix<R::Elem>) {
    if k == 0 {
        return (Matrix::from_vec(1, vec![y[0].clone()]), Matrix::zeros(ring, 1));
    }
    let [a, b, c, d] = split(ring, y, k);
    let (ap, am) = forward_rec(ring, &a, k - 1);
    let (bp, bm) = forward_rec(ring, &b, k - 1);
    let (cp, cm) = forward_rec(ring, &c, k - 1);
    let (dp, dm) = forward_rec(ring, &d, k - 1);
    let even = Matrix::from_quadrants(
        sub(ring, &ap, &dp),
        sub(ring, &cm, &bm),
        neg(ring, &add(ring, &bm, &cm)),
        add(ring, &ap, &dp),
    );
    let odd = Matrix::from_quadrants(
        sub(ring, &am, &dm),
        sub(ring, &cp, &bp),
        add(ring, &bp, &cp),
        neg(ring, &add(ring, &am, &dm)),
    );
    (even, odd)
}

/// `2^k` times the preimage of `m`.
fn inverse_rec<R: Ring>(ring: &R, m: &Matrix<R::Elem>, k: usize) -> Vec<R::Elem> {
    if k == 0 {
        return vec![m.get(0, 0).clone()];
    }
    let y11 = inverse_rec(ring, &m.quadrant(0, 0), k - 1);
    let y12 = inverse_rec(ring, &m.quadrant(0, 1), k - 1);
    let y21 = inverse_rec(ring, &m.quadrant(1, 0), k - 1);
    let y22 = inverse_rec(ring, &m.quadrant(1, 1), k - 1);
    let mut out = ring.zeros(1 << (2 * k));
    for inner in 0..y11.len() {
        let hat = |v: &R::Elem| if inner.count_ones() % 2 == 1 { ring.neg(v) } else { v.clone() };
        let h22 = hat(&y22[inner]);
        let h21 = hat(&y21[inner]);
        let parts = [
            ring.add(&h22, &y11[inner]),
            ring.sub(&h21, &y12[inner]),
            ring.add(&h21, &y12[inner]),
            ring.sub(&h22, &y11[inner]),
        ];
        for (v, (outer, negate)) in parts.into_iter().zip(outer_masks(inner, k)) {
            out[outer] = if negate { ring.neg(&v) } else { v };
        }
    }
    out
}

fn check_balanced(sig: Signature) -> Result<usize, CliffordError> {
    if sig.p != sig.q {
        return Err(CliffordError::Unbalanced { p: sig.p, q: sig.q });
    }
    Ok(sig.p)
}

/// `gamma_k(y)` for `y` in `Cl_{k,k}`.
pub fn gamma_forward<R: Ring>(
    ring: &R,
    y: &CliffordElement<R::Elem>,
    sig: Signature,
) -> Result<RealBlockMatrix<R::Elem>, CliffordError> {
    let k = check_balanced(sig)?;
    if y.n() != 2 * k {
        return Err(CliffordError::SignatureMismatch { sig: 2 * k, n: y.n() });
    }
    let (even, odd) = forward_rec(ring, y.coeffs.coeffs(), k);
    Ok(RealBlockMatrix {
        k,
        entries: add(ring, &even, &odd),
        deferred_shift: 0,
    })
}

/// Preimage of `m` in `Cl_{k,k}`; fails if the deferred division is inexact.
pub fn gamma_inverse<R: Ring>(
    ring: &R,
    m: &RealBlockMatrix<R::Elem>,
    k: usize,
) -> Result<CliffordElement<R::Elem>, CliffordError> {
    if m.entries.side() != 1 << k {
        return Err(CliffordError::NotInImage(format!(
            "matrix side {} does not match level {k}",
            m.entries.side()
        )));
    }
    let shift = k as u32 + m.deferred_shift;
    let coeffs = inverse_rec(ring, &m.entries, k)
        .into_iter()
        .enumerate()
        .map(|(a, v)| {
            ring.div_pow2(&v, shift).ok_or_else(|| {
                CliffordError::NotInImage(format!("coefficient of monomial {a} is not divisible by 2^{shift}"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    CliffordElement::from_coeffs(2 * k, coeffs)
}

/// Product of two scaled matrices; shifts add.
pub fn gamma_multiply<R: Ring>(
    ring: &R,
    a: &RealBlockMatrix<R::Elem>,
    b: &RealBlockMatrix<R::Elem>,
    strassen_threshold: usize,
) -> RealBlockMatrix<R::Elem> {
    RealBlockMatrix {
        k: a.k,
        entries: matmul_with(ring, &a.entries, &b.entries, strassen_threshold),
        deferred_shift: a.deferred_shift + b.deferred_shift,
    }
}

/// Product in `Cl_{n,0}` via the embedding into `Cl_{n,n}` on its positive
/// generators and the recursive matrix isomorphism.
pub fn clifford_mul_via_gamma<R: Ring>(
    ring: &R,
    f: &CliffordElement<R::Elem>,
    g: &CliffordElement<R::Elem>,
) -> Result<CliffordElement<R::Elem>, CliffordError> {
    let n = f.n();
    if g.n() != n {
        return Err(CliffordError::GeneratorMismatch(n, g.n()));
    }
    if n > DEFAULT_GAMMA_CAP {
        return Err(CliffordError::TooLarge { n, cap: DEFAULT_GAMMA_CAP });
    }
    let embed = |h: &CliffordElement<R::Elem>| {
        let mut coeffs = ring.zeros(1 << (2 * n));
        coeffs[..1 << n].clone_from_slice(h.coeffs.coeffs());
        CliffordElement::from_coeffs(2 * n, coeffs)
    };
    let sig = Signature::balanced(n);
    let a = gamma_forward(ring, &embed(f)?, sig)?;
    let b = gamma_forward(ring, &embed(g)?, sig)?;
    let prod = gamma_inverse(ring, &gamma_multiply(ring, &a, &b, DEFAULT_STRASSEN_THRESHOLD), n)?;
    let coeffs = prod.coeffs.coeffs();
    if let Some(a) = (1 << n..coeffs.len()).find(|&a| !ring.is_zero(&coeffs[a])) {
        return Err(CliffordError::NotInImage(format!(
            "product has support at monomial {a} outside the embedded subalgebra"
        )));
    }
    CliffordElement::from_coeffs(n, coeffs[..1 << n].to_vec())
}

#[cfg(test)]
mod tests {
    use super::super::tests::elem;
    use super::super::{clifford_mul_fast, clifford_mul_naive};
    use super::*;
    use crate::ring::{Int, Integers};
    use proptest::prelude::*;

    fn identity(k: usize) -> RealBlockMatrix<Int> {
        RealBlockMatrix {
            k,
            entries: Matrix::identity(&Integers, 1 << k),
            deferred_shift: 0,
        }
    }

    #[test]
    fn unit_maps_to_identity() {
        let z = Integers;
        for k in 0..=3 {
            let e = CliffordElement::one(&z, 2 * k);
            assert_eq!(gamma_forward(&z, &e, Signature::balanced(k)).unwrap(), identity(k));
            assert_eq!(gamma_inverse(&z, &identity(k), k).unwrap(), e);
        }
    }

    #[test]
    fn level_one_generators() {
        let z = Integers;
        let sig = Signature::balanced(1);
        let xp = gamma_forward(&z, &elem(2, &[0, 1, 0, 0]), sig).unwrap().entries;
        let xm = gamma_forward(&z, &elem(2, &[0, 0, 1, 0]), sig).unwrap().entries;
        let m = |v: [i64; 4]| Matrix::from_vec(2, v.iter().map(|&x| Int::from(x)).collect());
        assert_eq!(xp, m([0, 1, 1, 0]));
        assert_eq!(xm, m([0, -1, 1, 0]));
    }

    #[test]
    fn unbalanced_signature_is_rejected() {
        let z = Integers;
        let e = CliffordElement::one(&z, 2);
        assert!(matches!(
            gamma_forward(&z, &e, Signature { p: 2, q: 0 }),
            Err(CliffordError::Unbalanced { .. })
        ));
    }

    #[test]
    fn odd_matrix_is_not_a_product() {
        let z = Integers;
        let mut m = identity(1);
        m.entries.set(0, 1, Int::from(1));
        assert!(gamma_inverse(&z, &m, 1).is_err());
    }

    fn element(k: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-1000i64..1000, 1 << (2 * k))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn homomorphism_level_two(u in element(2), v in element(2)) {
            let z = Integers;
            let sig = Signature::balanced(2);
            let (u, v) = (elem(4, &u), elem(4, &v));
            let uv = clifford_mul_naive(&z, &u, &v, sig).unwrap();
            let gu = gamma_forward(&z, &u, sig).unwrap();
            let gv = gamma_forward(&z, &v, sig).unwrap();
            let prod = gamma_multiply(&z, &gu, &gv, 1 << 20);
            prop_assert_eq!(&prod.entries, &gamma_forward(&z, &uv, sig).unwrap().entries);
            prop_assert_eq!(gamma_inverse(&z, &prod, 2).unwrap(), uv);
        }

        #[test]
        fn linear_and_invertible(u in element(3), v in element(3)) {
            let z = Integers;
            let sig = Signature::balanced(3);
            let (u, v) = (elem(6, &u), elem(6, &v));
            let sum = CliffordElement::from_coeffs(6, u.coeffs.coeffs().iter().zip(v.coeffs.coeffs()).map(|(a, b)| a.add(b)).collect()).unwrap();
            let gu = gamma_forward(&z, &u, sig).unwrap();
            let gv = gamma_forward(&z, &v, sig).unwrap();
            prop_assert_eq!(gamma_forward(&z, &sum, sig).unwrap().entries, add(&z, &gu.entries, &gv.entries));
            prop_assert_eq!(gamma_inverse(&z, &gu, 3).unwrap(), u);
        }

        #[test]
        fn via_gamma_matches_other_paths(n in 0usize..=6, a in element(3), b in element(3)) {
            let z = Integers;
            let f = elem(n, &a[..1 << n]);
            let g = elem(n, &b[..1 << n]);
            let naive = clifford_mul_naive(&z, &f, &g, Signature::euclidean(n)).unwrap();
            let via = clifford_mul_via_gamma(&z, &f, &g).unwrap();
            prop_assert_eq!(&via, &naive);
            prop_assert_eq!(&via, &clifford_mul_fast(&z, &f, &g).unwrap());
            prop_assert_eq!(clifford_mul_via_gamma(&z, &f, &CliffordElement::one(&z, n)).unwrap(), f);
        }
    }
}
