//! Pauli-string matrix representation of `Cl_{n,0}`.
//!
//! With `t = ceil(n/2)` qubits, generator `x_{2k-1}` maps to
//! `Z^{(k-1)} (x) X (x) I^{(t-k)}` and `x_{2k}` to `Z^{(k-1)} (x) Y (x) I^{(t-k)}`.
//! Qubit 1 is the most significant bit of a row index (Kronecker order).
//!
//! A Pauli operator is kept as `i^phase X^x Z^z` with `x`, `z` bit masks over
//! row-index bits; `Y = i X Z`. Its matrix has entry `i^phase (-1)^{|z & c|}`
//! at `(c xor x, c)`, so going from Pauli coefficients to the matrix is one
//! Walsh-Hadamard transform over `z` per value of `x`.

use super::matrix::{complex_matmul, ComplexMatrix, DEFAULT_STRASSEN_THRESHOLD};
use super::{CliffordElement, CliffordError, DEFAULT_PHI_CAP};
use crate::ring::Ring;
use crate::subsetfn::Mask;

/// `i^phase X^x Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliString {
    pub phase: u32,
    pub x: usize,
    pub z: usize,
}

impl PauliString {
    pub fn identity() -> PauliString {
        PauliString { phase: 0, x: 0, z: 0 }
    }

    pub fn mul(&self, o: &PauliString) -> PauliString {
        let swap = 2 * (self.z & o.x).count_ones();
        PauliString {
            phase: (self.phase + o.phase + swap) % 4,
            x: self.x ^ o.x,
            z: self.z ^ o.z,
        }
    }

    /// Two bits per qubit, qubit `k` at bits `2(k-1)` (X part) and
    /// `2(k-1)+1` (Z part): `00 = I, 01 = X, 11 = Y, 10 = Z`.
    pub fn code(&self, t: usize) -> usize {
        let mut code = 0;
        for k in 0..t {
            let pos = t - 1 - k;
            code |= ((self.x >> pos) & 1) << (2 * k);
            code |= ((self.z >> pos) & 1) << (2 * k + 1);
        }
        code
    }
}

/// Number of qubits used for `n` generators.
pub fn qubits(n: usize) -> usize {
    n.div_ceil(2)
}

/// Image of generator `g` (1-based) on `t` qubits.
pub fn generator_image(g: usize, t: usize) -> PauliString {
    let q = (g - 1) / 2;
    let pos = t - 1 - q;
    let full = (1usize << t) - 1;
    let mut p = PauliString {
        phase: 0,
        x: 1 << pos,
        z: full & !((1usize << (pos + 1)) - 1),
    };
    if g.is_multiple_of(2) {
        p.z |= 1 << pos;
        p.phase = 1;
    }
    p
}

/// Images of all monomials `x_A` on `n` generators, plus the reverse lookup
/// from `(x << t) | z` to the monomial mapped there.
#[derive(Debug, Clone)]
pub struct PauliTable {
    n: usize,
    t: usize,
    images: Vec<PauliString>,
    reverse: Vec<Option<Mask>>,
}

impl PauliTable {
    pub fn new(n: usize) -> PauliTable {
        let t = qubits(n);
        let gens: Vec<PauliString> = (1..=n).map(|g| generator_image(g, t)).collect();
        let mut images = vec![PauliString::identity(); 1 << n];
        for a in 1usize..1 << n {
            // x_A = x_{A minus top} * x_top, with top the largest generator in A.
            let top = usize::BITS as usize - 1 - a.leading_zeros() as usize;
            images[a] = images[a & !(1 << top)].mul(&gens[top]);
        }
        let mut reverse = vec![None; 1 << (2 * t)];
        for (a, p) in images.iter().enumerate() {
            reverse[(p.x << t) | p.z] = Some(a);
        }
        PauliTable { n, t, images, reverse }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn image(&self, a: Mask) -> PauliString {
        self.images[a]
    }
}

fn walsh_hadamard<R: Ring>(ring: &R, data: &mut [R::Elem]) {
    let mut h = 1;
    while h < data.len() {
        for base in (0..data.len()).step_by(2 * h) {
            for i in base..base + h {
                let a = data[i].clone();
                let b = data[i + h].clone();
                data[i] = ring.add(&a, &b);
                data[i + h] = ring.sub(&a, &b);
            }
        }
        h *= 2;
    }
}

/// Matrix image of the element with the given `2^n` coefficients.
pub fn phi_slice<R: Ring>(ring: &R, table: &PauliTable, coeffs: &[R::Elem]) -> ComplexMatrix<R::Elem> {
    let t = table.t;
    let side = 1usize << t;
    let mut re = ring.zeros(side * side);
    let mut im = ring.zeros(side * side);
    for (a, c) in coeffs.iter().enumerate() {
        if ring.is_zero(c) {
            continue;
        }
        let p = table.images[a];
        let idx = (p.x << t) | p.z;
        match p.phase {
            0 => re[idx] = c.clone(),
            1 => im[idx] = c.clone(),
            2 => re[idx] = ring.neg(c),
            _ => im[idx] = ring.neg(c),
        }
    }
    let mut out = ComplexMatrix::zeros(ring, t);
    for x in 0..side {
        let (wr, wi) = (&mut re[x * side..(x + 1) * side], &mut im[x * side..(x + 1) * side]);
        walsh_hadamard(ring, wr);
        walsh_hadamard(ring, wi);
        for c in 0..side {
            let r = c ^ x;
            out.re.set(r, c, wr[c].clone());
            out.im.set(r, c, wi[c].clone());
        }
    }
    out
}

/// Coefficients of the preimage of `m`, checking that it lies in the image.
pub fn phi_inverse_slice<R: Ring>(
    ring: &R,
    table: &PauliTable,
    m: &ComplexMatrix<R::Elem>,
) -> Result<Vec<R::Elem>, CliffordError> {
    let t = table.t;
    let side = 1usize << t;
    if m.side() != side {
        return Err(CliffordError::NotInImage(format!(
            "matrix side {} does not match {} generators",
            m.side(),
            table.n
        )));
    }
    let mut re = ring.zeros(side * side);
    let mut im = ring.zeros(side * side);
    for x in 0..side {
        for c in 0..side {
            re[x * side + c] = m.re.get(c ^ x, c).clone();
            im[x * side + c] = m.im.get(c ^ x, c).clone();
        }
        walsh_hadamard(ring, &mut re[x * side..(x + 1) * side]);
        walsh_hadamard(ring, &mut im[x * side..(x + 1) * side]);
    }
    // re/im now hold 2^t times the Pauli coefficients.
    for (idx, pre) in table.reverse.iter().enumerate() {
        if pre.is_none() && !(ring.is_zero(&re[idx]) && ring.is_zero(&im[idx])) {
            return Err(CliffordError::NotInImage(format!(
                "nonzero Pauli coefficient outside the image at index {idx}"
            )));
        }
    }
    let mut out = Vec::with_capacity(1 << table.n);
    for (a, p) in table.images.iter().enumerate() {
        let idx = (p.x << t) | p.z;
        // coefficient = P * i^{-phase}
        let (real, imag) = match p.phase {
            0 => (re[idx].clone(), im[idx].clone()),
            1 => (im[idx].clone(), ring.neg(&re[idx])),
            2 => (ring.neg(&re[idx]), ring.neg(&im[idx])),
            _ => (ring.neg(&im[idx]), re[idx].clone()),
        };
        if !ring.is_zero(&imag) {
            return Err(CliffordError::NotInImage(format!("coefficient of monomial {a} is not real")));
        }
        let v = ring.div_pow2(&real, t as u32).ok_or_else(|| {
            CliffordError::NotInImage(format!("coefficient of monomial {a} is not divisible by 2^{t}"))
        })?;
        out.push(v);
    }
    Ok(out)
}

fn check_cap(n: usize, cap: usize) -> Result<(), CliffordError> {
    if n > cap {
        Err(CliffordError::TooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// `Phi(f)`.
pub fn phi_forward<R: Ring>(
    ring: &R,
    f: &CliffordElement<R::Elem>,
) -> Result<ComplexMatrix<R::Elem>, CliffordError> {
    check_cap(f.n(), DEFAULT_PHI_CAP)?;
    Ok(phi_slice(ring, &PauliTable::new(f.n()), f.coeffs.coeffs()))
}

/// Inverse of [`phi_forward`] for elements on `n` generators.
pub fn phi_inverse<R: Ring>(
    ring: &R,
    m: &ComplexMatrix<R::Elem>,
    n: usize,
) -> Result<CliffordElement<R::Elem>, CliffordError> {
    check_cap(n, DEFAULT_PHI_CAP)?;
    let coeffs = phi_inverse_slice(ring, &PauliTable::new(n), m)?;
    CliffordElement::from_coeffs(n, coeffs)
}

/// Tuning knobs for the matrix path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastConfig {
    pub phi_cap: usize,
    pub strassen_threshold: usize,
}

impl Default for FastConfig {
    fn default() -> Self {
        FastConfig {
            phi_cap: DEFAULT_PHI_CAP,
            strassen_threshold: DEFAULT_STRASSEN_THRESHOLD,
        }
    }
}

/// Product in `Cl_{n,0}` through the matrix representation.
pub fn clifford_mul_fast<R: Ring>(
    ring: &R,
    f: &CliffordElement<R::Elem>,
    g: &CliffordElement<R::Elem>,
) -> Result<CliffordElement<R::Elem>, CliffordError> {
    clifford_mul_fast_with(ring, f, g, &FastConfig::default())
}

pub fn clifford_mul_fast_with<R: Ring>(
    ring: &R,
    f: &CliffordElement<R::Elem>,
    g: &CliffordElement<R::Elem>,
    cfg: &FastConfig,
) -> Result<CliffordElement<R::Elem>, CliffordError> {
    let n = f.n();
    if g.n() != n {
        return Err(CliffordError::GeneratorMismatch(n, g.n()));
    }
    check_cap(n, cfg.phi_cap)?;
    let table = PauliTable::new(n);
    let a = phi_slice(ring, &table, f.coeffs.coeffs());
    let b = phi_slice(ring, &table, g.coeffs.coeffs());
    let prod = complex_matmul(ring, &a, &b, cfg.strassen_threshold);
    let coeffs = phi_inverse_slice(ring, &table, &prod)?;
    CliffordElement::from_coeffs(n, coeffs)
}

#[cfg(test)]
mod tests {
    use super::super::matrix::{neg, GaussianInt};
    use super::super::tests::elem;
    use super::super::{clifford_mul_naive, Signature};
    use super::*;
    use crate::ring::{Int, Integers, ModP};
    use crate::subsetfn::sign_i;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn g(re: i64, im: i64) -> GaussianInt<Int> {
        GaussianInt {
            re: Int::from(re),
            im: Int::from(im),
        }
    }

    fn basis(n: usize, a: Mask) -> CliffordElement<Int> {
        CliffordElement::monomial(&Integers, n, a, Int::from(1))
    }

    fn phi(n: usize, a: Mask) -> ComplexMatrix<Int> {
        phi_forward(&Integers, &basis(n, a)).unwrap()
    }

    fn mm(a: &ComplexMatrix<Int>, b: &ComplexMatrix<Int>) -> ComplexMatrix<Int> {
        complex_matmul(&Integers, a, b, 1 << 20)
    }

    fn scale(m: &ComplexMatrix<Int>, s: i32) -> ComplexMatrix<Int> {
        if s > 0 {
            return m.clone();
        }
        ComplexMatrix {
            t: m.t,
            re: neg(&Integers, &m.re),
            im: neg(&Integers, &m.im),
        }
    }

    #[test]
    fn two_generator_images() {
        let x1 = phi(2, 0b01);
        assert_eq!((x1.get(0, 0), x1.get(0, 1), x1.get(1, 0), x1.get(1, 1)), (g(0, 0), g(1, 0), g(1, 0), g(0, 0)));
        let x2 = phi(2, 0b10);
        assert_eq!((x2.get(0, 0), x2.get(0, 1), x2.get(1, 0), x2.get(1, 1)), (g(0, 0), g(0, -1), g(0, 1), g(0, 0)));
        let x12 = phi(2, 0b11);
        assert_eq!((x12.get(0, 0), x12.get(0, 1), x12.get(1, 0), x12.get(1, 1)), (g(0, 1), g(0, 0), g(0, 0), g(0, -1)));
    }

    #[test]
    fn kronecker_order_for_four_generators() {
        // x_1 = X (x) I: flips the most significant row bit.
        let x1 = phi(4, 0b0001);
        for c in 0..4 {
            assert_eq!(x1.get(c ^ 2, c), g(1, 0));
        }
        // x_3 = Z (x) X.
        let x3 = phi(4, 0b0100);
        for c in 0..4usize {
            let s = if c & 2 == 0 { 1 } else { -1 };
            assert_eq!(x3.get(c ^ 1, c), g(s, 0));
        }
    }

    #[test]
    fn generator_relations() {
        for n in 1..=10 {
            let id = ComplexMatrix::identity(&Integers, qubits(n));
            let gens: Vec<_> = (0..n).map(|i| phi(n, 1 << i)).collect();
            for i in 0..n {
                assert_eq!(mm(&gens[i], &gens[i]), id);
                for j in 0..i {
                    assert_eq!(mm(&gens[i], &gens[j]), scale(&mm(&gens[j], &gens[i]), -1));
                }
            }
        }
    }

    #[test]
    fn monomial_product_law() {
        // Exhaustive up to n = 6 here; the acceptance suite covers n = 8.
        for n in 0..=6 {
            let imgs: Vec<_> = (0..1usize << n).map(|a| phi(n, a)).collect();
            for a in 0..1usize << n {
                for b in 0..1usize << n {
                    assert_eq!(mm(&imgs[a], &imgs[b]), scale(&imgs[a ^ b], sign_i(a, b)));
                }
            }
        }
    }

    #[test]
    fn images_are_distinct_pauli_strings() {
        for n in 0..=10 {
            let table = PauliTable::new(n);
            let codes: HashSet<usize> = (0..1usize << n).map(|a| table.image(a).code(table.t())).collect();
            assert_eq!(codes.len(), 1 << n);
        }
    }

    #[test]
    fn identity_matrix_is_unit() {
        let z = Integers;
        for n in 0..6 {
            let e = phi_inverse(&z, &ComplexMatrix::identity(&z, qubits(n)), n).unwrap();
            assert_eq!(e, CliffordElement::one(&z, n));
        }
    }

    #[test]
    fn non_image_is_rejected() {
        let z = Integers;
        // Odd n: Y on the last qubit is unused.
        let mut m = ComplexMatrix::zeros(&z, 1);
        m.set(0, 1, g(0, -1));
        m.set(1, 0, g(0, 1));
        assert!(matches!(phi_inverse(&z, &m, 1), Err(CliffordError::NotInImage(_))));
        // Odd entries cannot be halved.
        let mut m = ComplexMatrix::zeros(&z, 1);
        m.set(0, 0, g(1, 0));
        assert!(matches!(phi_inverse(&z, &m, 2), Err(CliffordError::NotInImage(_))));
        // i * identity has a non-real coefficient.
        let mut m = ComplexMatrix::zeros(&z, 1);
        m.set(0, 0, g(0, 1));
        m.set(1, 1, g(0, 1));
        assert!(matches!(phi_inverse(&z, &m, 1), Err(CliffordError::NotInImage(_))));
    }

    #[test]
    fn sum_of_generators_squared() {
        let z = Integers;
        let s = elem(2, &[0, 1, 1, 0]);
        assert_eq!(clifford_mul_fast(&z, &s, &s).unwrap(), elem(2, &[2, 0, 0, 0]));
    }

    #[test]
    fn cap_is_enforced() {
        let z = Integers;
        let f = CliffordElement::one(&z, 3);
        let cfg = FastConfig { phi_cap: 2, ..FastConfig::default() };
        assert!(matches!(clifford_mul_fast_with(&z, &f, &f, &cfg), Err(CliffordError::TooLarge { .. })));
    }

    fn pair(max_n: usize) -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>)> {
        (0..=max_n).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(-1_000_000i64..=1_000_000, 1 << n),
                prop::collection::vec(-1_000_000i64..=1_000_000, 1 << n),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn roundtrip((n, a, _b) in pair(10)) {
            let z = Integers;
            let f = elem(n, &a);
            prop_assert_eq!(phi_inverse(&z, &phi_forward(&z, &f).unwrap(), n).unwrap(), f);
        }

        #[test]
        fn fast_matches_naive((n, a, b) in pair(8)) {
            let z = Integers;
            let (f, g) = (elem(n, &a), elem(n, &b));
            let naive = clifford_mul_naive(&z, &f, &g, Signature::euclidean(n)).unwrap();
            prop_assert_eq!(&clifford_mul_fast(&z, &f, &g).unwrap(), &naive);
            let strassen = FastConfig { strassen_threshold: 1, ..FastConfig::default() };
            prop_assert_eq!(&clifford_mul_fast_with(&z, &f, &g, &strassen).unwrap(), &naive);
            prop_assert_eq!(clifford_mul_fast(&z, &f, &CliffordElement::one(&z, n)).unwrap(), f);
        }

        #[test]
        fn fast_matches_naive_mod_p((n, a, b) in pair(6)) {
            let m = ModP::new(2305843009213693951).unwrap();
            let lift = |v: &[i64]| CliffordElement::from_coeffs(n, v.iter().map(|&x| m.from_i64(x)).collect()).unwrap();
            let (f, g) = (lift(&a), lift(&b));
            let naive = clifford_mul_naive(&m, &f, &g, Signature::euclidean(n)).unwrap();
            prop_assert_eq!(clifford_mul_fast(&m, &f, &g).unwrap(), naive);
        }

        #[test]
        fn associativity((n, a, b) in pair(8), c in prop::collection::vec(-100i64..100, 256)) {
            let z = Integers;
            let (f, g, h) = (elem(n, &a), elem(n, &b), elem(n, &c[..1 << n]));
            let left = clifford_mul_fast(&z, &clifford_mul_fast(&z, &f, &g).unwrap(), &h).unwrap();
            let right = clifford_mul_fast(&z, &f, &clifford_mul_fast(&z, &g, &h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
