//! Commutative rings with a runtime context, so that matrix algorithms can be
//! written once for integers, rationals, residues, cyclotomic fields and group rings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_int(&BigInt::from(n))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Z/nZ with canonical representatives in [0, n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residues {
    pub modulus: BigInt,
}

impl Residues {
    pub fn new(modulus: BigInt) -> Self {
        assert!(modulus > BigInt::zero());
        Residues { modulus }
    }

    pub fn prime_power(p: u64, m: u32) -> Self {
        Self::new(num_traits::pow(BigInt::from(p), m as usize))
    }

    pub fn reduce(&self, a: &BigInt) -> BigInt {
        a.mod_floor(&self.modulus)
    }

    /// Image of a rational whose denominator is a unit modulo n.
    pub fn from_rational(&self, r: &BigRational) -> Option<BigInt> {
        let inv = self.inverse(r.denom())?;
        Some(self.reduce(&(r.numer() * inv)))
    }

    pub fn inverse(&self, a: &BigInt) -> Option<BigInt> {
        let e = self.reduce(a).extended_gcd(&self.modulus);
        e.gcd.is_one().then(|| self.reduce(&e.x))
    }
}

impl Ring for Residues {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        self.reduce(&BigInt::one())
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        self.reduce(n)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a + b))
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        self.reduce(&-a)
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a * b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_reduce_and_invert() {
        let r = Residues::prime_power(5, 2);
        assert_eq!(r.neg(&BigInt::from(1)), BigInt::from(24));
        assert_eq!(r.inverse(&BigInt::from(2)), Some(BigInt::from(13)));
        assert_eq!(r.inverse(&BigInt::from(5)), None);
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(r.from_rational(&q), Some(BigInt::from(17)));
    }

    #[test]
    fn pow_by_squaring() {
        assert_eq!(Integers.pow(&BigInt::from(3), 5), BigInt::from(243));
        assert_eq!(Residues::new(BigInt::from(7)).pow(&BigInt::from(3), 6), BigInt::from(1));
    }
}
