//! Exact arithmetic in real Clifford algebras with integer coefficients.
//!
//! An element of `Cl_{p,q}` on `n = p + q` generators is a set function over
//! generator positions: `sum_A coeffs(A) x_A`, where `x_A` is the product of
//! the generators in `A` in increasing order. Generator `i` (1-based) squares
//! to `+e` when `i <= p` and to `-e` otherwise.

pub mod gamma;
pub mod matrix;
pub mod pauli;

use crate::ring::Ring;
use crate::subsetfn::{inversion_parity, Mask, SetFunction, SubsetError, Universe};

pub use gamma::{clifford_mul_via_gamma, gamma_forward, gamma_inverse, RealBlockMatrix};
pub use matrix::{ComplexMatrix, GaussianInt, Matrix};
pub use pauli::{clifford_mul_fast, clifford_mul_fast_with, phi_forward, phi_inverse};

/// Largest generator count accepted by the Pauli representation.
pub const DEFAULT_PHI_CAP: usize = 20;
/// Largest generator count accepted by the `Cl_{n,n}` cross-check path.
pub const DEFAULT_GAMMA_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliffordError {
    #[error("signature has {sig} generators but the element has {n}")]
    SignatureMismatch { sig: usize, n: usize },
    #[error("operands have {0} and {1} generators")]
    GeneratorMismatch(usize, usize),
    #[error("{n} generators exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("matrix is not in the image of the representation: {0}")]
    NotInImage(String),
    #[error("signature ({p},{q}) is not balanced")]
    Unbalanced { p: usize, q: usize },
    #[error(transparent)]
    Subset(#[from] SubsetError),
}

/// `(p, q)`: the first `p` generators square to `+e`, the remaining `q` to `-e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn euclidean(n: usize) -> Signature {
        Signature { p: n, q: 0 }
    }

    pub fn balanced(k: usize) -> Signature {
        Signature { p: k, q: k }
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Mask of the generators squaring to `-e`.
    pub fn negative_mask(&self) -> Mask {
        ((1usize << self.n()) - 1) & !((1usize << self.p) - 1)
    }
}

/// Sign `s` with `x_A x_B = s x_{A xor B}`.
#[inline]
pub fn monomial_sign(a: Mask, b: Mask, negative: Mask) -> i32 {
    let parity = inversion_parity(a, b) ^ ((a & b & negative).count_ones() & 1);
    if parity == 0 {
        1
    } else {
        -1
    }
}

/// `sum_A coeffs(A) x_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement<T> {
    pub coeffs: SetFunction<T>,
}

impl<T: Clone> CliffordElement<T> {
    /// Element on `n` generators from `2^n` coefficients.
    pub fn from_coeffs(n: usize, coeffs: Vec<T>) -> Result<CliffordElement<T>, CliffordError> {
        Ok(CliffordElement {
            coeffs: SetFunction::new(Universe::range(n), coeffs)?,
        })
    }

    pub fn zero<R: Ring<Elem = T>>(ring: &R, n: usize) -> CliffordElement<T> {
        CliffordElement {
            coeffs: SetFunction::zeros(ring, Universe::range(n)),
        }
    }

    /// `value * x_A`.
    pub fn monomial<R: Ring<Elem = T>>(ring: &R, n: usize, a: Mask, value: T) -> CliffordElement<T> {
        CliffordElement {
            coeffs: SetFunction::point(ring, Universe::range(n), a, value),
        }
    }

    /// The unit `e`.
    pub fn one<R: Ring<Elem = T>>(ring: &R, n: usize) -> CliffordElement<T> {
        CliffordElement::monomial(ring, n, 0, ring.one())
    }

    pub fn n(&self) -> usize {
        self.coeffs.n()
    }

    pub fn coeff(&self, a: Mask) -> &T {
        self.coeffs.get(a)
    }
}

/// Direct product from the monomial law; `O(4^n)`.
pub fn clifford_mul_naive<R: Ring>(
    ring: &R,
    f: &CliffordElement<R::Elem>,
    g: &CliffordElement<R::Elem>,
    sig: Signature,
) -> Result<CliffordElement<R::Elem>, CliffordError> {
    let n = f.n();
    if g.n() != n {
        return Err(CliffordError::GeneratorMismatch(n, g.n()));
    }
    if sig.n() != n {
        return Err(CliffordError::SignatureMismatch { sig: sig.n(), n });
    }
    let negative = sig.negative_mask();
    let mut out = ring.zeros(1 << n);
    for (a, fa) in f.coeffs.coeffs().iter().enumerate() {
        if ring.is_zero(fa) {
            continue;
        }
        for (b, gb) in g.coeffs.coeffs().iter().enumerate() {
            if ring.is_zero(gb) {
                continue;
            }
            if monomial_sign(a, b, negative) > 0 {
                ring.mul_add_assign(&mut out[a ^ b], fa, gb);
            } else {
                ring.mul_sub_assign(&mut out[a ^ b], fa, gb);
            }
        }
    }
    CliffordElement::from_coeffs(n, out)
}

/// Grade involution: negate odd-grade coefficients.
pub fn grade_involution<R: Ring>(ring: &R, f: &CliffordElement<R::Elem>) -> CliffordElement<R::Elem> {
    let coeffs = f
        .coeffs
        .coeffs()
        .iter()
        .enumerate()
        .map(|(a, c)| if a.count_ones() % 2 == 1 { ring.neg(c) } else { c.clone() })
        .collect();
    CliffordElement::from_coeffs(f.n(), coeffs).expect("same shape")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ring::{Int, Integers};

    pub fn elem(n: usize, v: &[i64]) -> CliffordElement<Int> {
        CliffordElement::from_coeffs(n, v.iter().map(|&x| Int::from(x)).collect()).unwrap()
    }

    #[test]
    fn generator_products() {
        let z = Integers;
        let sig = Signature::euclidean(2);
        let x1 = elem(2, &[0, 1, 0, 0]);
        let x2 = elem(2, &[0, 0, 1, 0]);
        assert_eq!(clifford_mul_naive(&z, &x1, &x2, sig).unwrap(), elem(2, &[0, 0, 0, 1]));
        assert_eq!(clifford_mul_naive(&z, &x2, &x1, sig).unwrap(), elem(2, &[0, 0, 0, -1]));
        let a = elem(1, &[1, 1]);
        let b = elem(1, &[1, -1]);
        assert_eq!(clifford_mul_naive(&z, &a, &b, Signature::euclidean(1)).unwrap(), elem(1, &[0, 0]));
    }

    #[test]
    fn negative_generators_square_to_minus_one() {
        let z = Integers;
        let sig = Signature::balanced(1);
        let xm = elem(2, &[0, 0, 1, 0]);
        assert_eq!(clifford_mul_naive(&z, &xm, &xm, sig).unwrap(), elem(2, &[-1, 0, 0, 0]));
        let xp = elem(2, &[0, 1, 0, 0]);
        assert_eq!(clifford_mul_naive(&z, &xp, &xp, sig).unwrap(), elem(2, &[1, 0, 0, 0]));
    }

    #[test]
    fn shape_errors() {
        let z = Integers;
        let a = elem(1, &[1, 0]);
        let b = elem(2, &[1, 0, 0, 0]);
        assert!(matches!(
            clifford_mul_naive(&z, &a, &b, Signature::euclidean(1)),
            Err(CliffordError::GeneratorMismatch(1, 2))
        ));
        assert!(matches!(
            clifford_mul_naive(&z, &a, &a, Signature::euclidean(2)),
            Err(CliffordError::SignatureMismatch { .. })
        ));
    }
}
