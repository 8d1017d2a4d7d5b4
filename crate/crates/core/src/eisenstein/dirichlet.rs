use crate::arith::{divisors, gcd, kronecker, lcm, prime_divisors};
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{invalid, Result};
use crate::stickelberger::UnitGroupMod;
use serde::Serialize;
use std::sync::Arc;

/// A Dirichlet character mod n, given by χ(g_i) = ζ_{ord_i}^{e_i} on the
/// generators g_i of (Z/n)^*.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    units: Arc<UnitGroupMod>,
    exps: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exps == other.exps
    }
}

impl Eq for DirichletCharacter {}

/// Label for reports: modulus and the generator exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterLabel {
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub exponents: Vec<u64>,
}

impl DirichletCharacter {
    pub fn new(modulus: u64, exps: Vec<u64>) -> Result<Self> {
        Self::with_units(Arc::new(UnitGroupMod::new(modulus)), exps)
    }

    fn with_units(units: Arc<UnitGroupMod>, exps: Vec<u64>) -> Result<Self> {
        if exps.len() != units.gens.len() {
            return Err(invalid(format!("(Z/{})^* has {} generators, got {} exponents", units.modulus, units.gens.len(), exps.len())));
        }
        let exps = exps.iter().zip(&units.orders).map(|(e, o)| e % o).collect();
        Ok(DirichletCharacter { units, exps })
    }

    pub fn trivial(modulus: u64) -> Self {
        let units = Arc::new(UnitGroupMod::new(modulus));
        let exps = vec![0; units.gens.len()];
        DirichletCharacter { units, exps }
    }

    /// The character a ↦ (D/a) of modulus |D|.
    pub fn kronecker(d: i64) -> Result<Self> {
        let n = d.unsigned_abs();
        let units = Arc::new(UnitGroupMod::new(n));
        let exps = units.gens.iter().zip(&units.orders).map(|(&g, &o)| if kronecker(d, g) == 1 { 0 } else { o / 2 }).collect();
        let chi = Self::with_units(units, exps)?;
        if (1..n).any(|a| gcd(a as i64, n as i64) == 1 && chi.value_int(a as i64) != Some(kronecker(d, a))) {
            return Err(invalid(format!("(D/·) with D = {d} is not a character mod |D|")));
        }
        Ok(chi)
    }

    /// Every character mod n, lexicographic in the exponent vectors.
    pub fn all(modulus: u64) -> Vec<Self> {
        let units = Arc::new(UnitGroupMod::new(modulus));
        let mut out = Vec::new();
        let mut exps = vec![0u64; units.gens.len()];
        loop {
            out.push(DirichletCharacter { units: units.clone(), exps: exps.clone() });
            let mut i = exps.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < units.orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    /// Primitive characters of conductor exactly f.
    pub fn primitive_of_conductor(f: u64) -> Vec<Self> {
        Self::all(f).into_iter().filter(|c| c.conductor() == f).collect()
    }

    pub fn modulus(&self) -> u64 {
        self.units.modulus
    }

    pub fn label(&self) -> CharacterLabel {
        CharacterLabel { modulus: self.modulus(), generators: self.units.gens.clone(), exponents: self.exps.clone() }
    }

    /// Exponent of (Z/n)^*; all values lie in μ of this order.
    pub fn value_order(&self) -> u64 {
        self.units.orders.iter().fold(1, |a, &b| lcm(a as i64, b as i64) as u64)
    }

    /// χ(a) = ζ_E^k with E = value_order(); None when gcd(a, n) > 1.
    pub fn value_exponent(&self, a: i64) -> Option<u64> {
        let e = self.value_order();
        let log = self.units.dlog(a)?;
        Some(log.iter().zip(&self.exps).zip(&self.units.orders).fold(0u64, |acc, ((&x, &c), &o)| (acc + (x as u64 * c % o) * (e / o)) % e))
    }

    /// Exact multiplicative order of the character.
    pub fn order(&self) -> u64 {
        self.exps.iter().zip(&self.units.orders).fold(1u64, |acc, (&c, &o)| lcm(acc as i64, (o / gcd(c as i64, o as i64) as u64) as i64) as u64)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.modulus() > 2 && self.value_exponent(-1) != Some(0)
    }

    /// ±1 for real characters, None at non-units or for non-real values.
    pub fn value_int(&self, a: i64) -> Option<i64> {
        let e = self.value_order();
        match self.value_exponent(a)? {
            0 => Some(1),
            k if 2 * k == e => Some(-1),
            _ => None,
        }
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    /// χ(a) in Q(ζ_N) for N a multiple of the value order.
    pub fn value_in(&self, field: &CyclotomicField, a: i64) -> Option<Cyclo> {
        let e = self.value_order();
        assert!(field.order() % e == 0, "field too small for the character values");
        self.value_exponent(a).map(|k| field.zeta_pow((k * (field.order() / e)) as i64))
    }

    pub fn inverse(&self) -> Self {
        let exps = self.exps.iter().zip(&self.units.orders).map(|(&e, &o)| (o - e) % o).collect();
        DirichletCharacter { units: self.units.clone(), exps }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(invalid("characters of different moduli"));
        }
        let exps = self.exps.iter().zip(&other.exps).zip(&self.units.orders).map(|((&a, &b), &o)| (a + b) % o).collect();
        Ok(DirichletCharacter { units: self.units.clone(), exps })
    }

    /// Smallest d | n such that χ is trivial on units ≡ 1 mod d.
    pub fn conductor(&self) -> u64 {
        let n = self.modulus();
        let units: Vec<u64> = self.units.residues().collect();
        divisors(n)
            .into_iter()
            .find(|&d| units.iter().filter(|&&a| a % d == 1 % d).all(|&a| self.value_exponent(a as i64) == Some(0)))
            .unwrap_or(n)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// The same character viewed mod a multiple m of the modulus.
    pub fn induce(&self, m: u64) -> Result<Self> {
        if m % self.modulus().max(1) != 0 {
            return Err(invalid(format!("{m} is not a multiple of {}", self.modulus())));
        }
        let units = Arc::new(UnitGroupMod::new(m));
        self.transport(units, |g| g)
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let f = self.conductor();
        let n = self.modulus();
        let units = Arc::new(UnitGroupMod::new(f));
        // lift a unit mod f to a unit mod n
        let lift = |g: u64| (0..n / f).map(|j| g + j * f).find(|&b| gcd(b as i64, n as i64) == 1).expect("units lift");
        self.transport(units, lift).expect("conductor is well defined")
    }

    fn transport(&self, units: Arc<UnitGroupMod>, lift: impl Fn(u64) -> u64) -> Result<Self> {
        let e = self.value_order();
        let mut exps = Vec::with_capacity(units.gens.len());
        for (&g, &o) in units.gens.iter().zip(&units.orders) {
            let k = self.value_exponent(lift(g) as i64).ok_or_else(|| invalid("generator is not a unit"))?;
            // ζ_E^k = ζ_o^{k o / E}
            if (k * o) % e != 0 {
                return Err(invalid("character does not factor through the requested modulus"));
            }
            exps.push(k * o / e);
        }
        Self::with_units(units, exps)
    }

    /// Primes at which the primitive character vanishes.
    pub fn conductor_primes(&self) -> Vec<u64> {
        prime_divisors(self.conductor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicativity_enumerated() {
        for n in [1u64, 2, 3, 4, 5, 7, 8, 9, 12, 15, 16, 20, 24, 35, 40, 63, 100, 120, 200] {
            for chi in DirichletCharacter::all(n).into_iter().step_by(3) {
                let e = chi.value_order();
                for a in 0..n as i64 {
                    for b in 0..n as i64 {
                        match (chi.value_exponent(a), chi.value_exponent(b)) {
                            (Some(x), Some(y)) => assert_eq!(chi.value_exponent(a * b), Some((x + y) % e)),
                            _ => assert_eq!(chi.value_exponent(a * b), None),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn counts_and_parity() {
        assert_eq!(DirichletCharacter::all(15).len(), 8);
        let k4 = DirichletCharacter::kronecker(-4).unwrap();
        assert!(k4.is_odd() && k4.is_primitive());
        assert_eq!(k4.value_int(3), Some(-1));
        let k3 = DirichletCharacter::kronecker(-3).unwrap();
        assert_eq!(k3.value_int(2), Some(-1));
        assert_eq!(DirichletCharacter::kronecker(-3).unwrap().induce(12).unwrap().conductor(), 3);
        // primitive characters: φ*(n) = Σ_{d | n} μ(n/d) φ(d)
        for n in 1..=60u64 {
            let expected: i64 = divisors(n).iter().map(|&d| crate::arith::moebius(n / d) * crate::arith::euler_phi(d) as i64).sum();
            assert_eq!(DirichletCharacter::primitive_of_conductor(n).len() as i64, expected, "n = {n}");
        }
    }

    #[test]
    fn induction_from_conductor_reproduces_values() {
        for n in [12u64, 20, 24, 36, 40, 45] {
            for chi in DirichletCharacter::all(n) {
                let f = chi.conductor();
                assert_eq!(n % f, 0);
                let prim = chi.primitive();
                assert!(prim.is_primitive());
                assert_eq!(prim.induce(n).unwrap(), chi);
                for a in 0..n as i64 {
                    if gcd(a, n as i64) == 1 {
                        let e = chi.value_order() / prim.value_order().max(1);
                        let lifted = prim.value_exponent(a).map(|k| k * e);
                        assert_eq!(chi.value_exponent(a), lifted);
                    }
                }
            }
        }
    }

    #[test]
    fn kronecker_characters_match_symbol() {
        for d in crate::arith::fundamental_discriminants_negative(200) {
            let chi = DirichletCharacter::kronecker(d).unwrap();
            assert!(chi.is_primitive() && chi.is_odd() && chi.is_real(), "D = {d}");
            for a in 1..400u64 {
                assert_eq!(chi.value_int(a as i64).unwrap_or(0), kronecker(d, a));
            }
        }
    }
}
