//! Coefficient rings.
//!
//! Every table in the crate is generic over a [`Ring`] context. Two rings are
//! provided: [`Integers`] (exact, backed by [`Int`]) and [`ModP`] (residues
//! modulo a user-supplied odd prime above 2^60). Modular results equal the
//! true counts only when those counts are below the modulus.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Ring context. Elements carry no modulus themselves; the context does.
// constructors take `&self` because a ring value carries its modulus
#[allow(clippy::wrong_self_convention)]
pub trait Ring: Clone + Send + Sync + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Integer value (canonical residue for modular rings).
    fn to_bigint(&self, a: &Self::Elem) -> BigInt;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Exact division by a positive integer; `None` when inexact.
    fn div_exact(&self, a: &Self::Elem, d: u64) -> Option<Self::Elem>;

    fn one(&self) -> Self::Elem {
        self.from_i64(1)
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    fn sub_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.sub(a, b);
    }

    fn mul_add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let p = self.mul(a, b);
        self.add_assign(acc, &p);
    }

    fn mul_sub_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let p = self.mul(a, b);
        self.sub_assign(acc, &p);
    }

    /// `a` if `sign > 0`, `-a` otherwise.
    fn signed(&self, a: &Self::Elem, sign: i32) -> Self::Elem {
        if sign > 0 {
            a.clone()
        } else {
            self.neg(a)
        }
    }

    /// Row-major `n x n` product through a specialised kernel, when one
    /// applies to these operands.
    fn matmul_kernel(&self, _a: &[Self::Elem], _b: &[Self::Elem], _n: usize) -> Option<Vec<Self::Elem>> {
        None
    }

    fn zeros(&self, len: usize) -> Vec<Self::Elem> {
        vec![self.zero(); len]
    }

    /// Exact division by `2^k`.
    fn div_pow2(&self, a: &Self::Elem, k: u32) -> Option<Self::Elem> {
        let mut cur = a.clone();
        let mut left = k;
        while left > 0 {
            let step = left.min(62);
            cur = self.div_exact(&cur, 1u64 << step)?;
            left -= step;
        }
        Some(cur)
    }
}

/// Arbitrary-precision integer that stays inline while it fits in an `i64`.
///
/// Invariant: the `Big` variant never holds a value representable as `i64`,
/// so derived equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i64),
    Big(BigInt),
}

impl Int {
    pub fn zero() -> Int {
        Int::Small(0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn add(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(s) = a.checked_add(*b) {
                return Int::Small(s);
            }
        }
        Int::from_big(self.to_bigint() + o.to_bigint())
    }

    pub fn sub(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(s) = a.checked_sub(*b) {
                return Int::Small(s);
            }
        }
        Int::from_big(self.to_bigint() - o.to_bigint())
    }

    pub fn mul(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(s) = a.checked_mul(*b) {
                return Int::Small(s);
            }
        }
        Int::from_big(self.to_bigint() * o.to_bigint())
    }

    pub fn neg(&self) -> Int {
        match self {
            Int::Small(a) => match a.checked_neg() {
                Some(v) => Int::Small(v),
                None => Int::from_big(-BigInt::from(*a)),
            },
            Int::Big(b) => Int::from_big(-b.clone()),
        }
    }

    pub fn div_exact(&self, d: u64) -> Option<Int> {
        match self {
            Int::Small(a) => {
                let d = i128::from(d);
                let a = i128::from(*a);
                if a % d != 0 {
                    return None;
                }
                Some(Int::Small((a / d) as i64))
            }
            Int::Big(b) => {
                let (q, r) = b.div_rem(&BigInt::from(d));
                if !r.is_zero() {
                    return None;
                }
                Some(Int::from_big(q))
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Int::Small(a) => *a < 0,
            Int::Big(b) => b.is_negative(),
        }
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Int {
        Int::Small(v)
    }
}

impl From<BigInt> for Int {
    fn from(v: BigInt) -> Int {
        Int::from_big(v)
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The ring of integers, exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl Ring for Integers {
    type Elem = Int;

    fn zero(&self) -> Int {
        Int::Small(0)
    }
    fn from_i64(&self, v: i64) -> Int {
        Int::Small(v)
    }
    fn from_bigint(&self, v: &BigInt) -> Int {
        Int::from_big(v.clone())
    }
    fn to_bigint(&self, a: &Int) -> BigInt {
        a.to_bigint()
    }
    fn is_zero(&self, a: &Int) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Int, b: &Int) -> Int {
        a.add(b)
    }
    fn sub(&self, a: &Int, b: &Int) -> Int {
        a.sub(b)
    }
    fn neg(&self, a: &Int) -> Int {
        a.neg()
    }
    fn mul(&self, a: &Int, b: &Int) -> Int {
        a.mul(b)
    }
    fn div_exact(&self, a: &Int, d: u64) -> Option<Int> {
        a.div_exact(d)
    }
    fn add_assign(&self, a: &mut Int, b: &Int) {
        if let (Int::Small(x), Int::Small(y)) = (&mut *a, b) {
            if let Some(s) = x.checked_add(*y) {
                *x = s;
                return;
            }
        }
        *a = a.add(b);
    }
    fn mul_add_assign(&self, acc: &mut Int, a: &Int, b: &Int) {
        if let (Int::Small(x), Int::Small(y), Int::Small(z)) = (&mut *acc, a, b) {
            if let Some(s) = y.checked_mul(*z).and_then(|p| x.checked_add(p)) {
                *x = s;
                return;
            }
        }
        *acc = acc.add(&a.mul(b));
    }
    /// Machine-word product when every entry is small enough that no
    /// `i128` accumulator can overflow.
    fn matmul_kernel(&self, a: &[Int], b: &[Int], n: usize) -> Option<Vec<Int>> {
        let small = |m: &[Int]| -> Option<(Vec<i64>, u128)> {
            let mut top = 0u128;
            let v = m
                .iter()
                .map(|x| match x {
                    Int::Small(v) => {
                        top = top.max(v.unsigned_abs() as u128);
                        Some(*v)
                    }
                    Int::Big(_) => None,
                })
                .collect::<Option<Vec<i64>>>()?;
            Some((v, top))
        };
        let (a, ta) = small(a)?;
        let (b, tb) = small(b)?;
        ta.checked_mul(tb)?.checked_mul(n as u128).filter(|&t| t <= i128::MAX as u128)?;
        let mut out = vec![0i128; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let x = a[i * n + k] as i128;
                if x == 0 {
                    continue;
                }
                for (o, &y) in row.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                    *o += x * y as i128;
                }
            }
        }
        Some(
            out.into_iter()
                .map(|v| match i64::try_from(v) {
                    Ok(s) => Int::Small(s),
                    Err(_) => Int::Big(BigInt::from(v)),
                })
                .collect(),
        )
    }
}

/// Error for an unusable modulus.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModulusError {
    #[error("modulus {0} must exceed 2^60")]
    TooSmall(u64),
    #[error("modulus {0} is not an odd prime")]
    NotPrime(u64),
}

/// Residues modulo an odd prime `p > 2^60`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModP {
    p: u64,
}

impl ModP {
    pub fn new(p: u64) -> Result<ModP, ModulusError> {
        if p <= 1u64 << 60 {
            return Err(ModulusError::TooSmall(p));
        }
        if p.is_multiple_of(2) || !is_prime_u64(p) {
            return Err(ModulusError::NotPrime(p));
        }
        Ok(ModP { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((u128::from(a) * u128::from(b)) % u128::from(self.p)) as u64
    }

    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mulmod(r, b);
            }
            b = self.mulmod(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inverse(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }
}

impl Ring for ModP {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn from_i64(&self, v: i64) -> u64 {
        let p = i128::from(self.p);
        (i128::from(v).rem_euclid(p)) as u64
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = ((v % &p) + &p) % &p;
        r.to_u64().expect("residue fits u64")
    }
    fn to_bigint(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = u128::from(*a) + u128::from(*b);
        (s % u128::from(self.p)) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulmod(*a, *b)
    }
    fn div_exact(&self, a: &u64, d: u64) -> Option<u64> {
        self.inverse(d).map(|inv| self.mulmod(*a, inv))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Convenience: `BigInt` to decimal string with no separators.
pub fn decimal(v: &BigInt) -> String {
    v.to_string()
}

/// `true` if `v` equals one.
pub fn is_one(v: &BigInt) -> bool {
    v.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// A prime just above 2^61.
    pub const TEST_PRIME: u64 = 2305843009213693951; // 2^61 - 1

    #[test]
    fn mersenne_61_is_accepted() {
        assert!(ModP::new(TEST_PRIME).is_ok());
        assert_eq!(ModP::new(1 << 61), Err(ModulusError::NotPrime(1 << 61)));
        assert_eq!(ModP::new(97), Err(ModulusError::TooSmall(97)));
    }

    #[test]
    fn int_overflow_promotes_and_demotes() {
        let big = Int::Small(i64::MAX).add(&Int::Small(1));
        assert!(matches!(big, Int::Big(_)));
        let back = big.sub(&Int::Small(1));
        assert_eq!(back, Int::Small(i64::MAX));
        assert_eq!(Int::Small(i64::MIN).neg().to_bigint(), -BigInt::from(i64::MIN));
    }

    #[test]
    fn exact_division() {
        assert_eq!(Int::Small(12).div_exact(4), Some(Int::Small(3)));
        assert_eq!(Int::Small(13).div_exact(4), None);
        assert_eq!(Integers.div_pow2(&Int::Small(-64), 6), Some(Int::Small(-1)));
        let m = ModP::new(TEST_PRIME).unwrap();
        let third = m.div_exact(&1, 3).unwrap();
        assert_eq!(m.mul(&third, &3), 1);
    }

    proptest! {
        #[test]
        fn int_matches_bigint(a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
            let (x, y, z) = (Int::Small(a), Int::Small(b), Int::Small(c));
            let (bx, by, bz) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
            prop_assert_eq!(x.mul(&y).add(&z).to_bigint(), &bx * &by + &bz);
            prop_assert_eq!(x.sub(&y).mul(&z).to_bigint(), (&bx - &by) * &bz);
            let mut acc = z.clone();
            Integers.mul_add_assign(&mut acc, &x, &y);
            prop_assert_eq!(acc.to_bigint(), &bx * &by + &bz);
        }

        #[test]
        fn modp_matches_bigint(a in any::<i64>(), b in any::<i64>()) {
            let m = ModP::new(TEST_PRIME).unwrap();
            let p = BigInt::from(TEST_PRIME);
            let expect = ((BigInt::from(a) * BigInt::from(b)) % &p + &p) % &p;
            let got = m.mul(&m.from_i64(a), &m.from_i64(b));
            prop_assert_eq!(BigInt::from(got), expect);
        }
    }
}
