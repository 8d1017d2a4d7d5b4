use crate::arith::{is_fundamental_discriminant, kronecker, rat_to_string};
use crate::error::{invalid, Result};
use crate::linalg::hnf;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// An imaginary quadratic field of fundamental discriminant D < 0, with
/// ring of integers Z[ω], ω = (D + √D)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImagQuadField {
    disc: i64,
}

/// a + bω with rational a, b.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNumber {
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadNumber {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadNumber { a, b }
    }

    pub fn int(a: i64, b: i64) -> Self {
        QuadNumber { a: BigRational::from_integer(a.into()), b: BigRational::from_integer(b.into()) }
    }

    pub fn from_ints(a: BigInt, b: BigInt) -> Self {
        QuadNumber { a: BigRational::from_integer(a), b: BigRational::from_integer(b) }
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Integer coordinates; panics on non-integral input.
    pub fn coords(&self) -> (BigInt, BigInt) {
        assert!(self.is_integral(), "non-integral element");
        (self.a.to_integer(), self.b.to_integer())
    }

    pub fn denominator(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadNumber { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadNumber { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QuadNumber { a: &self.a * r, b: &self.b * r }
    }
}

impl fmt::Display for QuadNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*w", rat_to_string(&self.a), rat_to_string(&self.b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl ImagQuadField {
    pub fn new(disc: i64) -> Result<Self> {
        if disc >= 0 || !is_fundamental_discriminant(disc) {
            return Err(invalid(format!("{disc} is not a negative fundamental discriminant")));
        }
        Ok(ImagQuadField { disc })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// Number of roots of unity.
    pub fn w(&self) -> u64 {
        match self.disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }

    /// N(ω) = (D² − D)/4.
    pub fn omega_norm(&self) -> BigInt {
        BigInt::from((self.disc * self.disc - self.disc) / 4)
    }

    pub fn one(&self) -> QuadNumber {
        QuadNumber::int(1, 0)
    }

    pub fn mul(&self, x: &QuadNumber, y: &QuadNumber) -> QuadNumber {
        // ω² = Dω − N(ω)
        let n0 = BigRational::from_integer(self.omega_norm());
        let d = BigRational::from_integer(self.disc.into());
        let bd = &x.b * &y.b;
        QuadNumber { a: &x.a * &y.a - &bd * &n0, b: &x.a * &y.b + &x.b * &y.a + &bd * &d }
    }

    pub fn conj(&self, x: &QuadNumber) -> QuadNumber {
        let d = BigRational::from_integer(self.disc.into());
        QuadNumber { a: &x.a + &x.b * &d, b: -x.b.clone() }
    }

    pub fn norm(&self, x: &QuadNumber) -> BigRational {
        self.mul(x, &self.conj(x)).a
    }

    pub fn trace(&self, x: &QuadNumber) -> BigRational {
        BigRational::from_integer(2.into()) * &x.a + &x.b * BigRational::from_integer(self.disc.into())
    }

    pub fn inv(&self, x: &QuadNumber) -> QuadNumber {
        let n = self.norm(x);
        self.conj(x).scale(&(BigRational::one() / n))
    }

    pub fn div(&self, x: &QuadNumber, y: &QuadNumber) -> QuadNumber {
        self.mul(x, &self.inv(y))
    }

    pub fn pow(&self, x: &QuadNumber, k: u32) -> QuadNumber {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    /// A generator of the roots of unity.
    pub fn root_of_unity(&self) -> QuadNumber {
        match self.w() {
            // ω + 2 is i for D = −4 and (1 + √−3)/2 for D = −3
            4 | 6 => QuadNumber::int(2, 1),
            _ => QuadNumber::int(-1, 0),
        }
    }

    pub fn roots_of_unity(&self) -> Vec<QuadNumber> {
        let z = self.root_of_unity();
        (0..self.w() as u32).map(|k| self.pow(&z, k)).collect()
    }

    pub fn splitting(&self, p: u64) -> Splitting {
        match kronecker(self.disc, p) {
            1 => Splitting::Split,
            -1 => Splitting::Inert,
            _ => Splitting::Ramified,
        }
    }

    /// Roots mod p of the minimal polynomial x² − Dx + N(ω) of ω, ascending.
    pub fn omega_roots_mod(&self, p: u64) -> Vec<u64> {
        let n0 = self.omega_norm().mod_floor(&BigInt::from(p)).to_i64().unwrap();
        let d = self.disc.rem_euclid(p as i64);
        (0..p as i64).filter(|&r| (r * r - d * r + n0).rem_euclid(p as i64) == 0).map(|r| r as u64).collect()
    }

    /// Primes of O above p: one for inert or ramified p, two (𝔭, 𝔭̄) for split p.
    pub fn primes_above(&self, p: u64) -> Vec<QuadIdeal> {
        match self.splitting(p) {
            Splitting::Inert => vec![QuadIdeal::principal(self, &QuadNumber::int(p as i64, 0))],
            _ => {
                let roots = self.omega_roots_mod(p);
                roots.iter().map(|&r| QuadIdeal::from_generators(self, &[QuadNumber::int(p as i64, 0), QuadNumber::int(-(r as i64), 1)])).collect()
            }
        }
    }

    /// x ≡ 1 mod nO.
    pub fn congruent_to_one(&self, x: &QuadNumber, n: &BigInt) -> bool {
        let y = x.sub(&self.one());
        if !y.is_integral() {
            return false;
        }
        let (a, b) = y.coords();
        (a % n).is_zero() && (b % n).is_zero()
    }
}

/// A nonzero ideal Z·a + Z·(b + cω) of O in Hermite normal form: c | a, c | b, 0 ≤ b < a.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadIdeal {
    pub field: ImagQuadField,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadIdeal {
    pub fn unit(field: &ImagQuadField) -> Self {
        QuadIdeal { field: *field, a: BigInt::one(), b: BigInt::zero(), c: BigInt::one() }
    }

    /// Z-span of the given integral elements (assumed to be an ideal).
    fn from_z_span(field: &ImagQuadField, elems: &[QuadNumber]) -> Self {
        // columns (ω, 1) so that the HNF rows read [c, b], [0, a]
        let rows: Vec<Vec<BigInt>> = elems.iter().map(|x| {
            let (a, b) = x.coords();
            vec![b, a]
        }).collect();
        let h = hnf(&rows, 2);
        assert!(h.len() == 2 && !h[0][0].is_zero() && !h[1][1].is_zero(), "ideal lattice must have rank 2");
        QuadIdeal { field: *field, a: h[1][1].abs(), b: h[0][1].mod_floor(&h[1][1].abs()), c: h[0][0].abs() }
    }

    /// The ideal generated over O by integral elements.
    pub fn from_generators(field: &ImagQuadField, gens: &[QuadNumber]) -> Self {
        let omega = QuadNumber::int(0, 1);
        let mut all: Vec<QuadNumber> = gens.to_vec();
        all.extend(gens.iter().map(|g| field.mul(g, &omega)));
        Self::from_z_span(field, &all)
    }

    pub fn principal(field: &ImagQuadField, x: &QuadNumber) -> Self {
        Self::from_generators(field, &[x.clone()])
    }

    pub fn z_basis(&self) -> [QuadNumber; 2] {
        [QuadNumber::from_ints(self.a.clone(), BigInt::zero()), QuadNumber::from_ints(self.b.clone(), self.c.clone())]
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut gens = Vec::with_capacity(4);
        for x in self.z_basis().iter() {
            for y in other.z_basis().iter() {
                gens.push(self.field.mul(x, y));
            }
        }
        Self::from_generators(&self.field, &gens)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::unit(&self.field);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn conj(&self) -> Self {
        let gens: Vec<QuadNumber> = self.z_basis().iter().map(|x| self.field.conj(x)).collect();
        Self::from_generators(&self.field, &gens)
    }

    pub fn contains(&self, x: &QuadNumber) -> bool {
        if !x.is_integral() {
            return false;
        }
        let (xa, xb) = x.coords();
        if !(&xb % &self.c).is_zero() {
            return false;
        }
        let k = &xb / &self.c;
        ((xa - k * &self.b) % &self.a).is_zero()
    }

    pub fn is_coprime_to(&self, n: &BigInt) -> bool {
        self.norm().gcd(n).is_one()
    }

    /// (u, v): a Gauss-reduced Z-basis, u of minimal norm.
    pub fn reduced_basis(&self) -> (QuadNumber, QuadNumber) {
        let f = &self.field;
        let [mut u, mut v] = self.z_basis();
        loop {
            if f.norm(&v) < f.norm(&u) {
                std::mem::swap(&mut u, &mut v);
            }
            // v ← v − μu with μ the nearest integer to Tr(v ū) / 2N(u)
            let tr = f.trace(&f.mul(&v, &f.conj(&u)));
            let mu = (tr / (BigRational::from_integer(2.into()) * f.norm(&u))).round();
            if mu.is_zero() {
                return (u, v);
            }
            v = v.sub(&u.scale(&mu));
            if f.norm(&v) >= f.norm(&u) {
                return (u, v);
            }
        }
    }

    /// A generator if the ideal is principal: an element of norm N(𝔞).
    pub fn generator(&self) -> Option<QuadNumber> {
        let (u, _) = self.reduced_basis();
        (self.field.norm(&u) == BigRational::from_integer(self.norm())).then_some(u)
    }

    /// Largest k ≥ 0 with x ∈ self^k for integral x ≠ 0.
    pub fn valuation_of_integral(&self, x: &QuadNumber) -> u32 {
        assert!(!x.is_zero(), "valuation of zero");
        let mut k = 0;
        let mut power = self.clone();
        while power.contains(x) {
            k += 1;
            power = power.mul(self);
        }
        k
    }

    /// ord at this prime ideal of a nonzero element of K.
    pub fn valuation(&self, x: &QuadNumber) -> i64 {
        let d = x.denominator();
        let num = x.scale(&BigRational::from_integer(d.clone()));
        self.valuation_of_integral(&num) as i64 - self.valuation_of_integral(&QuadNumber::from_ints(d, BigInt::zero())) as i64
    }
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {} + {}*w]", self.a, self.b, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_validation_and_units() {
        assert!(ImagQuadField::new(-23).is_ok());
        assert!(ImagQuadField::new(-12).is_err());
        assert!(ImagQuadField::new(5).is_err());
        for d in [-3i64, -4, -7] {
            let k = ImagQuadField::new(d).unwrap();
            let z = k.root_of_unity();
            assert_eq!(k.norm(&z), BigRational::one());
            assert_eq!(k.pow(&z, k.w() as u32), k.one());
            for j in 1..k.w() as u32 {
                assert_ne!(k.pow(&z, j), k.one());
            }
        }
    }

    #[test]
    fn norm_and_conjugation() {
        let k = ImagQuadField::new(-23).unwrap();
        let x = QuadNumber::int(3, 2);
        let y = QuadNumber::int(-1, 5);
        assert_eq!(k.norm(&k.mul(&x, &y)), k.norm(&x) * k.norm(&y));
        assert_eq!(k.conj(&k.conj(&x)), x);
        assert_eq!(k.mul(&x, &k.inv(&x)), k.one());
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(ImagQuadField::new(-3).unwrap().splitting(7), Splitting::Split);
        assert_eq!(ImagQuadField::new(-4).unwrap().splitting(2), Splitting::Ramified);
        assert_eq!(ImagQuadField::new(-23).unwrap().splitting(2), Splitting::Split);
        // (−3 | 7): −3 ≡ 4 = 2² mod 7
        assert_eq!((4i64 - (-3i64)).rem_euclid(7), 0);
    }

    #[test]
    fn prime_ideals() {
        for d in [-3i64, -4, -7, -23, -47, -84] {
            let k = ImagQuadField::new(d).unwrap();
            for p in crate::arith::primes_up_to(40) {
                let ps = k.primes_above(p);
                let total: BigInt = ps.iter().map(|q| q.norm()).product();
                match k.splitting(p) {
                    Splitting::Split => {
                        assert_eq!(ps.len(), 2);
                        assert_eq!(ps[0].norm(), BigInt::from(p));
                        assert_eq!(ps[0].conj(), ps[1]);
                        assert_eq!(ps[0].mul(&ps[1]), QuadIdeal::principal(&k, &QuadNumber::int(p as i64, 0)));
                    }
                    Splitting::Inert => assert_eq!(total, BigInt::from(p * p)),
                    Splitting::Ramified => {
                        assert_eq!(ps.len(), 1);
                        assert_eq!(ps[0].pow(2), QuadIdeal::principal(&k, &QuadNumber::int(p as i64, 0)));
                    }
                }
            }
        }
    }

    #[test]
    fn ideals_are_closed_under_omega_and_norm_is_multiplicative() {
        let k = ImagQuadField::new(-47).unwrap();
        let omega = QuadNumber::int(0, 1);
        let ideals: Vec<QuadIdeal> = [2u64, 3, 7, 17].iter().flat_map(|&p| k.primes_above(p)).collect();
        for i in &ideals {
            for x in i.z_basis().iter() {
                assert!(i.contains(&k.mul(x, &omega)));
            }
            for j in &ideals {
                assert_eq!(i.mul(j).norm(), i.norm() * j.norm());
            }
        }
    }

    #[test]
    fn principal_generators() {
        let k = ImagQuadField::new(-7).unwrap();
        assert_eq!(QuadIdeal::unit(&k).generator().map(|g| k.norm(&g)), Some(BigRational::one()));
        let p2 = &k.primes_above(2)[0];
        let g = p2.generator().unwrap();
        assert_eq!(k.norm(&g), BigRational::from_integer(2.into()));
        assert_eq!(QuadIdeal::principal(&k, &g), *p2);
        // (1 + √−7)/2 = ω + 4 has norm 2
        assert_eq!(k.norm(&QuadNumber::int(4, 1)), BigRational::from_integer(2.into()));
        let k = ImagQuadField::new(-23).unwrap();
        let p = &k.primes_above(2)[0];
        assert!(p.generator().is_none());
        let g3 = p.pow(3).generator().unwrap();
        assert_eq!(QuadIdeal::principal(&k, &g3), p.pow(3));
    }

    #[test]
    fn valuations() {
        let k = ImagQuadField::new(-23).unwrap();
        let ps = k.primes_above(2);
        let g = ps[0].pow(3).generator().unwrap();
        assert_eq!(ps[0].valuation(&g), 3);
        assert_eq!(ps[1].valuation(&g), 0);
        let x = k.div(&g, &QuadNumber::int(2, 0));
        assert_eq!(ps[0].valuation(&x), 2);
        assert_eq!(ps[1].valuation(&x), -1);
    }
}
