use super::group::{Elem, FiniteAbelianGroup};
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{Error, Result};
use crate::ring::{Residues, Ring};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// A character of a finite abelian group, stored as exponents: χ(e_i) = ζ_{d_i}^{a_i}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    group: FiniteAbelianGroup,
    exponents: Vec<u64>,
}

impl Character {
    pub fn new(group: FiniteAbelianGroup, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != group.rank() {
            return Err(Error::Structural("exponent vector length differs from group rank".into()));
        }
        let exponents = exponents.iter().zip(group.invariants()).map(|(&a, &d)| a % d).collect();
        Ok(Character { group, exponents })
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Character { group: group.clone(), exponents: vec![0; group.rank()] }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// χ(g) = ζ_E^k with E = exponent(G); returns k.
    pub fn value_exponent(&self, g: Elem) -> u64 {
        let e = self.group.exponent();
        let c = self.group.coords(g);
        c.iter()
            .zip(&self.exponents)
            .zip(self.group.invariants())
            .fold(0u128, |acc, ((&x, &a), &d)| (acc + x as u128 * a as u128 * (e / d) as u128) % e as u128) as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&a| a == 0)
    }

    pub fn is_odd(&self, conj: Elem) -> bool {
        let e = self.group.exponent();
        e % 2 == 0 && self.value_exponent(conj) == e / 2
    }

    pub fn order(&self) -> u64 {
        use num_integer::Integer;
        self.exponents.iter().zip(self.group.invariants()).fold(1u64, |acc, (&a, &d)| acc.lcm(&(d / d.gcd(&a))))
    }

    pub fn inverse(&self) -> Self {
        let exps = self.exponents.iter().zip(self.group.invariants()).map(|(&a, &d)| (d - a) % d).collect();
        Character { group: self.group.clone(), exponents: exps }
    }

    pub fn product(&self, other: &Self) -> Self {
        let exps = self.exponents.iter().zip(&other.exponents).zip(self.group.invariants()).map(|((&a, &b), &d)| (a + b) % d).collect();
        Character { group: self.group.clone(), exponents: exps }
    }

    /// True when χ is trivial on every listed element.
    pub fn kills(&self, elems: &[Elem]) -> bool {
        elems.iter().all(|&g| self.value_exponent(g) == 0)
    }

    /// χ(g) in Q(ζ_n) for a field whose order is a multiple of exponent(G).
    pub fn eval_cyclotomic(&self, field: &CyclotomicField, g: Elem) -> Cyclo {
        let e = self.group.exponent();
        assert!(field.order() % e == 0, "field does not contain the character values");
        field.zeta_pow((self.value_exponent(g) * (field.order() / e)) as i64)
    }

    /// χ(g) in Z/p^m using a fixed primitive exponent(G)-th root of unity.
    pub fn eval_mod(&self, embedding: &RootOfUnityMod, g: Elem) -> BigInt {
        embedding.power(self.value_exponent(g))
    }
}

/// All characters, in lexicographic order of exponent vectors.
pub fn enumerate_characters(group: &FiniteAbelianGroup) -> Vec<Character> {
    let dual = group.clone();
    dual.elements().map(|i| Character { group: group.clone(), exponents: dual.coords(i) }).collect()
}

/// A primitive n-th root of unity in Z/p^m (exists iff n | p - 1).
#[derive(Debug, Clone)]
pub struct RootOfUnityMod {
    pub ring: Residues,
    pub order: u64,
    pub root: BigInt,
}

impl RootOfUnityMod {
    pub fn new(order: u64, p: u64, m: u32) -> Result<Self> {
        if (p - 1) % order != 0 {
            return Err(Error::Unsupported(format!("exponent {order} does not divide {p} - 1; values need a ramified extension of Z_{p}")));
        }
        let ring = Residues::prime_power(p, m);
        let g = (2..p).find(|&g| crate::arith::prime_divisors(p - 1).iter().all(|&q| crate::arith::mod_pow(g as i64, (p - 1) / q, p as i64) != 1)).unwrap_or(1);
        // Teichmüller lift of g has order exactly p - 1
        let pm1 = num_traits::pow(BigInt::from(p), (m - 1) as usize);
        let teich = BigInt::from(g).modpow(&pm1, &ring.modulus);
        let root = ring.pow(&teich, (p - 1) / order);
        Ok(RootOfUnityMod { ring, order, root })
    }

    pub fn power(&self, k: u64) -> BigInt {
        self.ring.pow(&self.root, k % self.order)
    }
}
