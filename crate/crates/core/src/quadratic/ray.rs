use super::field::{ImagQuadField, QuadIdeal, QuadNumber, Splitting};
use super::forms::ClassGroup;
use crate::algebra::FiniteAbelianGroup;
use crate::arith::{is_prime, mod_inv};
use crate::error::{invalid, structural, Result};
use crate::fitting::GaloisModule;
use crate::linalg::{hnf, mat_vec, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::HashMap;

fn reduce_rat(x: &BigRational, l: u64) -> Option<u64> {
    let m = BigInt::from(l);
    let den = x.denom().mod_floor(&m).to_i64().unwrap();
    let inv = mod_inv(den, l as i64)?;
    let num = x.numer().mod_floor(&m).to_i64().unwrap();
    Some(((num as i128 * inv as i128).rem_euclid(l as i128)) as u64)
}

/// One cyclic factor of (O/𝔱)^*: the residue field at a prime above ℓ.
#[derive(Debug, Clone, Serialize)]
pub struct ResidueFactor {
    pub prime: u64,
    /// root of ω modulo the prime ideal for split ℓ, none for inert ℓ
    pub omega_root: Option<u64>,
    pub order: u64,
    /// a + bω reducing to a generator here and to 1 at every other factor
    #[serde(skip)]
    pub lift: QuadNumber,
    #[serde(skip)]
    dlog: HashMap<(u64, u64), u64>,
}

impl ResidueFactor {
    /// Image of an ℓ-integral element, as a pair (a, b) of the residue field
    /// (b = 0 in the split case).
    fn reduce(&self, x: &QuadNumber) -> Option<(u64, u64)> {
        let l = self.prime;
        let a = reduce_rat(&x.a, l)?;
        let b = reduce_rat(&x.b, l)?;
        Some(match self.omega_root {
            Some(r) => ((a + b * r) % l, 0),
            None => (a, b),
        })
    }

    fn log(&self, x: &QuadNumber) -> Option<u64> {
        self.dlog.get(&self.reduce(x)?).copied()
    }
}

/// (O/𝔱)^* for squarefree 𝔱 = tO, t a product of unramified primes, as a
/// product of cyclic residue-field unit groups.
#[derive(Debug, Clone)]
pub struct ResidueUnits {
    pub field: ImagQuadField,
    pub t: Vec<u64>,
    pub factors: Vec<ResidueFactor>,
}

/// Integers ≡ target_i mod primes_i, reduced mod the product.
fn crt_all(residues: &[(u64, u64)]) -> BigInt {
    let mut acc = BigInt::zero();
    let mut m = BigInt::one();
    for &(r, l) in residues {
        let lb = BigInt::from(l);
        let inv = mod_inv((&m % &lb).to_i64().unwrap(), l as i64).expect("distinct primes");
        let k = ((BigInt::from(r) - &acc) * inv).mod_floor(&lb);
        acc += &m * k;
        m *= lb;
    }
    acc
}

impl ResidueUnits {
    pub fn new(field: &ImagQuadField, t: &[u64]) -> Result<Self> {
        let mut t = t.to_vec();
        t.sort_unstable();
        t.dedup();
        for &l in &t {
            if !is_prime(l) {
                return Err(invalid(format!("{l} is not prime")));
            }
            if field.splitting(l) == Splitting::Ramified {
                return Err(invalid(format!("{l} ramifies in Q(√{})", field.disc())));
            }
        }
        // (residue at ℓ, ℓ) pairs for a and b coordinates
        let lift_of = |l: u64, a: u64, b: u64| {
            let ra: Vec<(u64, u64)> = t.iter().map(|&m| (if m == l { a } else { 1 }, m)).collect();
            let rb: Vec<(u64, u64)> = t.iter().map(|&m| (if m == l { b } else { 0 }, m)).collect();
            QuadNumber::from_ints(crt_all(&ra), crt_all(&rb))
        };
        let mut factors = Vec::new();
        for &l in &t {
            match field.splitting(l) {
                Splitting::Split => {
                    let roots = field.omega_roots_mod(l);
                    let g = primitive_root(l);
                    let (r1, r2) = (roots[0], roots[1]);
                    for (ri, rj) in [(r1, r2), (r2, r1)] {
                        // a + b ri = g, a + b rj = 1
                        let diff = (ri + l - rj) % l;
                        let b = ((g + l - 1) % l) * mod_inv(diff as i64, l as i64).unwrap() as u64 % l;
                        let a = (1 + l * l - b * rj % l) % l;
                        let mut dlog = HashMap::new();
                        let mut x = 1u64;
                        for k in 0..l - 1 {
                            dlog.insert((x, 0), k);
                            x = x * g % l;
                        }
                        factors.push(ResidueFactor { prime: l, omega_root: Some(ri), order: l - 1, lift: lift_of(l, a, b), dlog });
                    }
                }
                _ => {
                    let (g, dlog) = inert_generator(field, l);
                    factors.push(ResidueFactor { prime: l, omega_root: None, order: l * l - 1, lift: lift_of(l, g.0, g.1), dlog });
                }
            }
        }
        Ok(ResidueUnits { field: *field, t, factors })
    }

    pub fn modulus(&self) -> BigInt {
        self.t.iter().map(|&l| BigInt::from(l)).product()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().map(|f| BigInt::from(f.order)).product()
    }

    /// Discrete logarithm of an element that is a unit at every prime above t.
    pub fn dlog(&self, x: &QuadNumber) -> Result<Vec<BigInt>> {
        self.factors
            .iter()
            .map(|f| f.log(x).map(BigInt::from).ok_or_else(|| invalid(format!("{x} is not a unit modulo {}", f.prime))))
            .collect()
    }

    /// Number of distinct residues of the roots of unity.
    pub fn unit_image_order(&self) -> u64 {
        let t = self.modulus();
        let f = &self.field;
        let trivial = f.roots_of_unity().iter().filter(|z| f.congruent_to_one(z, &t)).count() as u64;
        f.w() / trivial
    }
}

fn primitive_root(l: u64) -> u64 {
    let phi = l - 1;
    let ps = crate::arith::prime_divisors(phi);
    (1..l.max(2)).find(|&g| ps.iter().all(|&q| crate::arith::mod_pow(g as i64, phi / q, l as i64) != 1)).unwrap_or(1)
}

/// A generator of F_ℓ[ω]^* (ℓ inert) and its discrete-log table.
fn inert_generator(field: &ImagQuadField, l: u64) -> ((u64, u64), HashMap<(u64, u64), u64>) {
    let n0 = field.omega_norm().mod_floor(&BigInt::from(l)).to_u64().unwrap();
    let d = field.disc().rem_euclid(l as i64) as u64;
    // (a + bω)(c + eω) with ω² = dω − n0
    let mul = |x: (u64, u64), y: (u64, u64)| {
        let bb = x.1 * y.1 % l;
        ((x.0 * y.0 + l * l - bb * n0 % l) % l, (x.0 * y.1 + x.1 * y.0 + bb * d) % l)
    };
    let order = l * l - 1;
    for a in 0..l {
        for b in 1..l {
            let g = (a, b);
            let mut table = HashMap::new();
            let mut x = (1, 0);
            for k in 0..order {
                if table.insert(x, k).is_some() {
                    break;
                }
                x = mul(x, g);
            }
            if table.len() as u64 == order {
                return (g, table);
            }
        }
    }
    unreachable!("F_{{ℓ²}}^* is cyclic")
}

/// Cl^T(K): ideals coprime to 𝔱 modulo principal ideals (α) with α ≡ 1 mod 𝔱,
/// as a module over Gal(K/Q) = Z/2.
///
/// Presentation generators: the cyclic factors of (O/𝔱)^* followed by the
/// prime ideals generating Cl.
#[derive(Debug, Clone)]
pub struct RayClassGroup {
    pub field: ImagQuadField,
    pub units: ResidueUnits,
    pub class_group: ClassGroup,
    /// HNF of the relations among the presentation generators
    pub relations: IntMatrix,
    pub module: GaloisModule,
    /// rows of the map Z^gens → module coordinates
    coords: IntMatrix,
    /// columns: presentation images of the conjugated generators
    pub conj_matrix: IntMatrix,
}

impl RayClassGroup {
    pub fn new(field: &ImagQuadField, t: &[u64]) -> Result<Self> {
        let units = ResidueUnits::new(field, t)?;
        let class_group = ClassGroup::new(field, &units.t)?;
        let nu = units.factors.len();
        let k = class_group.generators.len();
        let n = nu + k;
        let mut rels: Vec<Vec<BigInt>> = Vec::new();
        for (i, f) in units.factors.iter().enumerate() {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::from(f.order);
            rels.push(r);
        }
        let mut mu = units.dlog(&field.root_of_unity())?;
        mu.resize(n, BigInt::zero());
        rels.push(mu);
        for rel in &class_group.relations {
            let exps: Vec<i64> = rel.iter().map(|x| x.to_i64().unwrap()).collect();
            let beta = principal_quotient(&class_group, &exps)?;
            let mut row: Vec<BigInt> = units.dlog(&beta)?.into_iter().map(|x| -x).collect();
            row.extend(rel.iter().cloned());
            rels.push(row);
        }
        let relations = hnf(&rels, n);
        let mut partial = RayClassGroup {
            field: *field,
            units,
            class_group,
            relations,
            module: GaloisModule::trivial_action(FiniteAbelianGroup::cyclic(2), Vec::new())?,
            coords: Vec::new(),
            conj_matrix: Vec::new(),
        };
        // conjugation: column j is the image of generator j
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for f in &partial.units.factors {
            let mut c = partial.units.dlog(&field.conj(&f.lift))?;
            c.resize(n, BigInt::zero());
            cols.push(c);
        }
        for g in &partial.class_group.generators {
            cols.push(partial.presentation_vector(&g.conj())?);
        }
        let conj_matrix: IntMatrix = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let (module, coords) = GaloisModule::from_presentation_with_coordinates(FiniteAbelianGroup::cyclic(2), n, &partial.relations, std::slice::from_ref(&conj_matrix))?;
        partial.module = module;
        partial.coords = coords;
        partial.conj_matrix = conj_matrix;
        let expected = BigInt::from(partial.class_group.order()) * partial.units.order() / BigInt::from(partial.units.unit_image_order());
        if partial.module.order() != expected {
            return Err(structural(format!("ray class group has order {} but the exact sequence predicts {expected}", partial.module.order())));
        }
        Ok(partial)
    }

    pub fn t(&self) -> &[u64] {
        &self.units.t
    }

    pub fn order(&self) -> BigInt {
        self.module.order()
    }

    pub fn ngens(&self) -> usize {
        self.units.factors.len() + self.class_group.generators.len()
    }

    /// Vector over the presentation generators representing the class of an
    /// ideal coprime to 𝔱.
    pub fn presentation_vector(&self, ideal: &QuadIdeal) -> Result<Vec<BigInt>> {
        if !ideal.is_coprime_to(&self.units.modulus()) {
            return Err(invalid(format!("ideal {ideal} is not coprime to the modulus")));
        }
        let word = self.class_group.word(ideal).to_vec();
        // 𝔞 Π 𝔭_j^{-x_j} = (γ'/n) with γ' generating 𝔞 Π 𝔭̄_j^{x_j}
        let mut j = ideal.clone();
        let mut n = BigInt::one();
        for (g, &x) in self.class_group.generators.iter().zip(&word) {
            j = j.mul(&g.conj().pow(x as u32));
            n *= g.norm().pow(x as u32);
        }
        let gamma = j.generator().ok_or_else(|| structural("class word left a non-principal ideal"))?;
        let gamma = gamma.scale(&BigRational::new(BigInt::one(), n));
        let mut v = self.units.dlog(&gamma)?;
        v.extend(word.iter().map(|&x| BigInt::from(x)));
        Ok(v)
    }

    /// Module coordinates of a presentation vector.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.module.reduce(&mat_vec(&self.coords, v))
    }

    /// Class of an ideal coprime to 𝔱 in module coordinates.
    pub fn class_of(&self, ideal: &QuadIdeal) -> Result<Vec<BigInt>> {
        Ok(self.reduce(&self.presentation_vector(ideal)?))
    }

    /// Class of the principal ideal (x), x a unit at the primes above 𝔱.
    pub fn class_of_element(&self, x: &QuadNumber) -> Result<Vec<BigInt>> {
        let mut v = self.units.dlog(x)?;
        v.resize(self.ngens(), BigInt::zero());
        Ok(self.reduce(&v))
    }

    /// Module coordinates of the image of presentation generator j.
    pub fn generator_class(&self, j: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.ngens()];
        v[j] = BigInt::one();
        self.reduce(&v)
    }

    /// Coordinates in (O/𝔱)^*/μ are zero exactly when the class is trivial.
    pub fn is_trivial(&self, v: &[BigInt]) -> bool {
        v.iter().all(|x| x.is_zero())
    }
}

/// β with Π 𝔭_j^{e_j} = (β), for an exponent vector e in the relation lattice.
fn principal_quotient(cl: &ClassGroup, e: &[i64]) -> Result<QuadNumber> {
    let mut num = QuadIdeal::unit(&cl.field);
    let mut n = BigInt::one();
    for (g, &x) in cl.generators.iter().zip(e) {
        if x >= 0 {
            num = num.mul(&g.pow(x as u32));
        } else {
            num = num.mul(&g.conj().pow((-x) as u32));
            n *= g.norm().pow((-x) as u32);
        }
    }
    let beta = num.generator().ok_or_else(|| structural("class group relation is not principal"))?;
    Ok(beta.scale(&BigRational::new(BigInt::one(), n)))
}

/// Invariant factors and exact-sequence witnesses, with decimal-string integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RayClassSummary {
    pub disc: i64,
    pub t: Vec<u64>,
    pub invariants: Vec<String>,
    pub class_number: usize,
    pub residue_unit_orders: Vec<u64>,
    pub unit_image_order: u64,
    pub conjugation: Vec<Vec<String>>,
}

impl RayClassGroup {
    pub fn summary(&self) -> RayClassSummary {
        let s = |x: &BigInt| x.to_str_radix(10);
        RayClassSummary {
            disc: self.field.disc(),
            t: self.units.t.clone(),
            invariants: self.module.invariants().iter().map(s).collect(),
            class_number: self.class_group.order(),
            residue_unit_orders: self.units.factors.iter().map(|f| f.order).collect(),
            unit_image_order: self.units.unit_image_order(),
            conjugation: self.module.action()[0].iter().map(|r| r.iter().map(s).collect()).collect(),
        }
    }
}

pub fn ray_class_group(field: &ImagQuadField, t: &[u64]) -> Result<RayClassGroup> {
    RayClassGroup::new(field, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(d: i64) -> ImagQuadField {
        ImagQuadField::new(d).unwrap()
    }

    /// #(O/t)^* by listing a + bω mod t with norm prime to t.
    fn count_residue_units(k: &ImagQuadField, t: u64) -> u64 {
        let mut count = 0;
        for a in 0..t as i64 {
            for b in 0..t as i64 {
                let n = k.norm(&QuadNumber::int(a, b)).to_integer();
                if n.gcd(&BigInt::from(t)).is_one() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn gaussian_integers_mod_three() {
        let k = field(-4);
        let ray = ray_class_group(&k, &[3]).unwrap();
        assert_eq!(count_residue_units(&k, 3), 8);
        assert_eq!(ray.units.order(), BigInt::from(8));
        assert_eq!(ray.units.unit_image_order(), 4);
        assert_eq!(ray.module.invariants(), &[BigInt::from(2)]);
        assert!(ray_class_group(&k, &[]).unwrap().module.is_zero());
        assert!(ray_class_group(&k, &[2]).is_err());
    }

    #[test]
    fn q_sqrt_minus_23_mod_three() {
        let k = field(-23);
        let ray = ray_class_group(&k, &[3]).unwrap();
        assert_eq!(ray.order(), BigInt::from(6));
        assert_eq!(ray.class_group.order(), 3);
        assert_eq!(ray.module.invariants(), &[BigInt::from(6)]);
    }

    #[test]
    fn residue_unit_counts_match_enumeration() {
        for (d, t) in [(-3i64, 7u64), (-3, 5), (-7, 3), (-7, 11), (-23, 5), (-20, 3), (-4, 7)] {
            let k = field(d);
            assert_eq!(ResidueUnits::new(&k, &[t]).unwrap().order(), BigInt::from(count_residue_units(&k, t)), "D={d} t={t}");
        }
    }

    #[test]
    fn lifts_reduce_to_generators() {
        let k = field(-23);
        let u = ResidueUnits::new(&k, &[3, 5, 7]).unwrap();
        for (i, f) in u.factors.iter().enumerate() {
            let v = u.dlog(&f.lift).unwrap();
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, BigInt::from((i == j) as u8));
            }
        }
    }

    fn random_ideal(k: &ImagQuadField, rng: &mut ChaCha8Rng, avoid: &[u64]) -> QuadIdeal {
        let primes: Vec<u64> = crate::arith::primes_up_to(40).into_iter().filter(|p| !avoid.contains(p)).collect();
        let mut ideal = QuadIdeal::unit(k);
        for _ in 0..rng.gen_range(1..4) {
            let p = primes[rng.gen_range(0..primes.len())];
            let above = k.primes_above(p);
            ideal = ideal.mul(&above[rng.gen_range(0..above.len())]);
        }
        ideal
    }

    #[test]
    fn class_map_is_a_homomorphism_compatible_with_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (d, t) in [(-23i64, vec![3u64]), (-47, vec![7]), (-4, vec![3, 5]), (-3, vec![7]), (-84, vec![5]), (-31, vec![3, 5])] {
            let k = field(d);
            let ray = ray_class_group(&k, &t).unwrap();
            let conj = &ray.module.action()[0];
            for _ in 0..8 {
                let a = random_ideal(&k, &mut rng, &t);
                let b = random_ideal(&k, &mut rng, &t);
                let ca = ray.class_of(&a).unwrap();
                let cb = ray.class_of(&b).unwrap();
                let sum: Vec<BigInt> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
                assert_eq!(ray.class_of(&a.mul(&b)).unwrap(), ray.module.reduce(&sum));
                assert_eq!(ray.class_of(&a.conj()).unwrap(), ray.module.apply(conj, &ca));
            }
        }
    }

    #[test]
    fn principal_ideals_map_to_residue_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, t) in [(-23i64, vec![3u64]), (-4, vec![3]), (-3, vec![7, 2]), (-56, vec![3, 5])] {
            let k = field(d);
            let ray = ray_class_group(&k, &t).unwrap();
            let modulus = ray.units.modulus();
            let mut hits = 0;
            while hits < 10 {
                let x = QuadNumber::int(rng.gen_range(-30..30), rng.gen_range(-30..30));
                if x.is_zero() || !k.norm(&x).to_integer().gcd(&modulus).is_one() {
                    continue;
                }
                hits += 1;
                let ideal = QuadIdeal::principal(&k, &x);
                assert_eq!(ray.class_of(&ideal).unwrap(), ray.class_of_element(&x).unwrap());
                let shifted = x.scale(&BigRational::from_integer(modulus.clone())).add(&k.one());
                assert!(ray.is_trivial(&ray.class_of(&QuadIdeal::principal(&k, &shifted)).unwrap()));
            }
        }
    }

    #[test]
    fn conjugation_restricts_to_form_inversion_on_cl() {
        let k = field(-47);
        let ray = ray_class_group(&k, &[3]).unwrap();
        for g in &ray.class_group.generators {
            let f = super::super::forms::ideal_to_form(g);
            assert_eq!(super::super::forms::ideal_to_form(&g.conj()), f.inverse());
            assert_eq!(ray.class_group.class_index(&g.conj()), ray.class_group.form_index(&f.inverse()).unwrap());
        }
    }
}
