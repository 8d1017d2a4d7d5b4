use super::character::{Character, RootOfUnityMod};
use super::group::{Elem, FiniteAbelianGroup};
use crate::arith::rat_to_string;
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{structural, Error, Result};
use crate::ring::{Residues, Ring};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient ring of a group ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoeffRing {
    Integers,
    Rationals,
    ModPrimePower { p: u64, m: u32 },
}

impl CoeffRing {
    fn normalize(&self, c: BigRational) -> Result<BigRational> {
        match self {
            CoeffRing::Rationals => Ok(c),
            CoeffRing::Integers => {
                if c.is_integer() {
                    Ok(c)
                } else {
                    Err(Error::NotIntegral(rat_to_string(&c)))
                }
            }
            CoeffRing::ModPrimePower { p, m } => {
                let r = Residues::prime_power(*p, *m);
                r.from_rational(&c).map(BigRational::from_integer).ok_or_else(|| Error::NotIntegral(format!("{} is not {p}-integral", rat_to_string(&c))))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CoeffRing::Integers => "Z".into(),
            CoeffRing::Rationals => "Q".into(),
            CoeffRing::ModPrimePower { p, m } => format!("Z/{p}^{m}"),
        }
    }
}

/// Element of R[G]; coefficient of group element i is `coeffs[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    group: FiniteAbelianGroup,
    ring: CoeffRing,
    coeffs: Vec<BigRational>,
}

impl GroupRingElement {
    pub fn zero(group: &FiniteAbelianGroup, ring: CoeffRing) -> Self {
        GroupRingElement { group: group.clone(), ring, coeffs: vec![BigRational::zero(); group.order()] }
    }

    pub fn one(group: &FiniteAbelianGroup, ring: CoeffRing) -> Self {
        Self::basis(group, ring, 0)
    }

    pub fn basis(group: &FiniteAbelianGroup, ring: CoeffRing, g: Elem) -> Self {
        let mut z = Self::zero(group, ring);
        z.coeffs[g] = BigRational::one();
        z
    }

    pub fn scalar(group: &FiniteAbelianGroup, ring: CoeffRing, c: BigRational) -> Result<Self> {
        let mut z = Self::zero(group, ring.clone());
        z.coeffs[0] = ring.normalize(c)?;
        Ok(z)
    }

    pub fn from_coeffs(group: &FiniteAbelianGroup, ring: CoeffRing, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(structural(format!("expected {} coefficients, got {}", group.order(), coeffs.len())));
        }
        let coeffs = coeffs.into_iter().map(|c| ring.normalize(c)).collect::<Result<_>>()?;
        Ok(GroupRingElement { group: group.clone(), ring, coeffs })
    }

    pub fn from_ints(group: &FiniteAbelianGroup, coeffs: &[i64]) -> Result<Self> {
        Self::from_coeffs(group, CoeffRing::Integers, coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn from_rationals(group: &FiniteAbelianGroup, coeffs: Vec<BigRational>) -> Result<Self> {
        Self::from_coeffs(group, CoeffRing::Rationals, coeffs)
    }

    /// Σ_{g ∈ elems} g.
    pub fn sum_of(group: &FiniteAbelianGroup, ring: CoeffRing, elems: &[Elem]) -> Self {
        let mut z = Self::zero(group, ring);
        for &g in elems {
            z.coeffs[g] += BigRational::one();
        }
        z
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, g: Elem) -> &BigRational {
        &self.coeffs[g]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(structural(format!("groups differ: {:?} vs {:?}", self.group.invariants(), other.group.invariants())));
        }
        if self.ring != other.ring {
            return Err(structural(format!("coefficient rings differ: {} vs {}", self.ring.label(), other.ring.label())));
        }
        Ok(())
    }

    fn rebuild(&self, coeffs: Vec<BigRational>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| self.ring.normalize(c).expect("closed under ring ops")).collect();
        GroupRingElement { group: self.group.clone(), ring: self.ring.clone(), coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.rebuild(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.rebuild(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    pub fn neg(&self) -> Self {
        self.rebuild(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.group.order();
        let mut out = vec![BigRational::zero(); n];
        let nz_b: Vec<(usize, &BigRational)> = other.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, b) in &nz_b {
                out[self.group.op(i, j)] += a * b;
            }
        }
        Ok(self.rebuild(out))
    }

    pub fn scale(&self, c: &BigRational) -> Result<Self> {
        let c = self.ring.normalize(c.clone())?;
        Ok(self.rebuild(self.coeffs.iter().map(|a| a * &c).collect()))
    }

    /// Multiplication by the group element g.
    pub fn shift(&self, g: Elem) -> Self {
        let mut out = vec![BigRational::zero(); self.group.order()];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[self.group.op(i, g)] = a.clone();
        }
        GroupRingElement { group: self.group.clone(), ring: self.ring.clone(), coeffs: out }
    }

    /// The involution induced by g ↦ g⁻¹.
    pub fn sharp(&self) -> Self {
        let mut out = vec![BigRational::zero(); self.group.order()];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[self.group.inv(i)] = a.clone();
        }
        GroupRingElement { group: self.group.clone(), ring: self.ring.clone(), coeffs: out }
    }

    pub fn augmentation(&self) -> BigRational {
        let s: BigRational = self.coeffs.iter().sum();
        self.ring.normalize(s).expect("closed")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Least common denominator of the coefficients.
    pub fn denominator(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn to_rationals(&self) -> Self {
        GroupRingElement { group: self.group.clone(), ring: CoeffRing::Rationals, coeffs: self.coeffs.clone() }
    }

    pub fn to_integers(&self) -> Result<Self> {
        Self::from_coeffs(&self.group, CoeffRing::Integers, self.coeffs.clone())
    }

    pub fn to_mod(&self, p: u64, m: u32) -> Result<Self> {
        Self::from_coeffs(&self.group, CoeffRing::ModPrimePower { p, m }, self.coeffs.clone())
    }

    /// Integer coefficient vector; fails on non-integral coefficients.
    pub fn integer_coeffs(&self) -> Result<Vec<BigInt>> {
        self.coeffs.iter().map(|c| if c.is_integer() { Ok(c.to_integer()) } else { Err(Error::NotIntegral(rat_to_string(c))) }).collect()
    }

    /// χ(x) = Σ x_g χ(g) in Q(ζ_n).
    pub fn eval_character(&self, chi: &Character, field: &CyclotomicField) -> Cyclo {
        let mut acc = vec![BigInt::zero(); field.order() as usize];
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let step = field.order() / self.group.exponent();
        for (g, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (chi.value_exponent(g) * step) as usize;
            acc[e] += (c * BigRational::from_integer(den.clone())).to_integer();
        }
        let v = field.from_exponent_vector(&acc);
        field.scale(&v, &BigRational::new(BigInt::one(), den))
    }

    /// χ(x) in Z/p^m.
    pub fn eval_character_mod(&self, chi: &Character, root: &RootOfUnityMod) -> Result<BigInt> {
        let ring = &root.ring;
        let mut acc = BigInt::zero();
        for (g, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cm = ring.from_rational(c).ok_or_else(|| Error::NotIntegral(rat_to_string(c)))?;
            acc = ring.add(&acc, &ring.mul(&cm, &chi.eval_mod(root, g)));
        }
        Ok(acc)
    }

    /// Matrix (in the group basis) of multiplication by self on Q[G]; column j is self·g_j.
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.group.order();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for j in 0..n {
            for (i, c) in self.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    m[self.group.op(i, j)][j] += c;
                }
            }
        }
        m
    }

    pub fn display(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| {
                let coords = self.group.coords(g);
                if g == 0 {
                    rat_to_string(c)
                } else {
                    format!("{}*g{:?}", rat_to_string(c), coords)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// R[G] as a ring context for generic matrix algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRing {
    pub group: FiniteAbelianGroup,
    pub coeff: CoeffRing,
}

impl GroupRing {
    pub fn new(group: FiniteAbelianGroup, coeff: CoeffRing) -> Self {
        GroupRing { group, coeff }
    }

    pub fn basis(&self, g: Elem) -> GroupRingElement {
        GroupRingElement::basis(&self.group, self.coeff.clone(), g)
    }
}

impl Ring for GroupRing {
    type Elem = GroupRingElement;
    fn zero(&self) -> GroupRingElement {
        GroupRingElement::zero(&self.group, self.coeff.clone())
    }
    fn one(&self) -> GroupRingElement {
        GroupRingElement::one(&self.group, self.coeff.clone())
    }
    fn from_int(&self, n: &BigInt) -> GroupRingElement {
        GroupRingElement::scalar(&self.group, self.coeff.clone(), BigRational::from_integer(n.clone())).expect("integers embed")
    }
    fn add(&self, a: &GroupRingElement, b: &GroupRingElement) -> GroupRingElement {
        a.add(b).expect("same ring")
    }
    fn neg(&self, a: &GroupRingElement) -> GroupRingElement {
        a.neg()
    }
    fn mul(&self, a: &GroupRingElement, b: &GroupRingElement) -> GroupRingElement {
        a.mul(b).expect("same ring")
    }
    fn is_zero(&self, a: &GroupRingElement) -> bool {
        a.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::character::enumerate_characters;
    use crate::arith::rat;

    fn z2() -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(2)
    }

    #[test]
    fn one_minus_sigma_times_one_plus_sigma() {
        let a = GroupRingElement::from_ints(&z2(), &[1, -1]).unwrap();
        let b = GroupRingElement::from_ints(&z2(), &[1, 1]).unwrap();
        assert!(a.mul(&b).unwrap().is_zero());
        assert_eq!(b.sharp(), b);
    }

    #[test]
    fn convolution_in_z3() {
        let g = FiniteAbelianGroup::cyclic(3);
        let a = GroupRingElement::from_ints(&g, &[1, 1, 0]).unwrap();
        let b = GroupRingElement::from_ints(&g, &[1, 0, 1]).unwrap();
        assert_eq!(a.mul(&b).unwrap(), GroupRingElement::from_ints(&g, &[2, 1, 1]).unwrap());
    }

    #[test]
    fn mismatches_are_structural_errors() {
        let a = GroupRingElement::from_ints(&z2(), &[1, 0]).unwrap();
        let b = GroupRingElement::from_ints(&FiniteAbelianGroup::cyclic(3), &[1, 0, 0]).unwrap();
        assert!(matches!(a.add(&b), Err(Error::Structural(_))));
        let c = a.to_rationals();
        assert!(matches!(a.mul(&c), Err(Error::Structural(_))));
    }

    #[test]
    fn modular_coefficients_reduce() {
        let x = GroupRingElement::from_coeffs(&z2(), CoeffRing::ModPrimePower { p: 3, m: 1 }, vec![rat(1, 2), rat(-1, 1)]).unwrap();
        assert_eq!(x.coeffs(), &[rat(2, 1), rat(2, 1)]);
        assert_eq!(x.augmentation(), rat(1, 1));
    }

    #[test]
    fn character_values() {
        let g = FiniteAbelianGroup::cyclic(3);
        let f = CyclotomicField::new(3);
        let x = GroupRingElement::from_ints(&g, &[1, 1, 1]).unwrap();
        for chi in enumerate_characters(&g) {
            let v = x.eval_character(&chi, &f);
            let expected = if chi.is_trivial() { rat(3, 1) } else { rat(0, 1) };
            assert_eq!(f.as_rational(&v), Some(expected));
        }
    }
}
