use super::field::{ImagQuadField, QuadIdeal, QuadNumber};
use super::forms::{ideal_to_form, QuadForm};
use super::ray::ResidueUnits;
use crate::error::Result;
use num_bigint::BigInt;
use serde::Serialize;

/// Outcome of a generator search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrincipalOutcome {
    Generator(QuadNumber),
    /// the ideal class, as its reduced form
    NotPrincipal(QuadForm),
    /// principal, but no generator is ≡ 1 modulo 𝔱; the residue-unit
    /// logarithm of one generator witnesses the class in (O/𝔱)^*/μ
    Obstruction { generator: QuadNumber, residue_log: Vec<BigInt> },
}

/// A generator of `ideal`, optionally required to be ≡ 1 modulo tO.
pub fn principal_generator(ideal: &QuadIdeal, congruence: Option<&ResidueUnits>) -> Result<PrincipalOutcome> {
    let Some(alpha) = ideal.generator() else {
        return Ok(PrincipalOutcome::NotPrincipal(ideal_to_form(ideal)));
    };
    let Some(units) = congruence else {
        return Ok(PrincipalOutcome::Generator(alpha));
    };
    let f = &ideal.field;
    let t = units.modulus();
    for z in f.roots_of_unity() {
        let candidate = f.mul(&alpha, &z);
        if f.congruent_to_one(&candidate, &t) {
            return Ok(PrincipalOutcome::Generator(candidate));
        }
    }
    let residue_log = units.dlog(&alpha)?;
    Ok(PrincipalOutcome::Obstruction { generator: alpha, residue_log })
}

/// Generators of O_{K,S}^* modulo roots of unity with their valuations.
#[derive(Debug, Clone)]
pub struct SUnits {
    /// primes of K above S, conjugate pairs adjacent
    pub places: Vec<QuadIdeal>,
    /// order of each place in Cl
    pub class_orders: Vec<u64>,
    /// γ_i generating places[i]^{class_orders[i]}
    pub generators: Vec<QuadNumber>,
    /// valuations[i][j] = ord_{places[j]}(generators[i])
    pub valuations: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SUnitSummary {
    pub places: Vec<String>,
    pub generators: Vec<String>,
    pub valuations: Vec<Vec<i64>>,
}

impl SUnits {
    pub fn summary(&self) -> SUnitSummary {
        SUnitSummary {
            places: self.places.iter().map(|p| p.to_string()).collect(),
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            valuations: self.valuations.clone(),
        }
    }
}

/// The class order h_𝔭 of each prime above S and a generator of 𝔭^{h_𝔭}.
/// These generate a finite-index subgroup of O_S^*/μ, of full rank.
pub fn s_units(field: &ImagQuadField, s: &[u64]) -> Result<SUnits> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    let places: Vec<QuadIdeal> = s.iter().flat_map(|&p| field.primes_above(p)).collect();
    let mut class_orders = Vec::with_capacity(places.len());
    let mut generators = Vec::with_capacity(places.len());
    for p in &places {
        let mut power = p.clone();
        let mut h = 1u64;
        let gen = loop {
            if let Some(g) = power.generator() {
                break g;
            }
            power = power.mul(p);
            h += 1;
        };
        class_orders.push(h);
        generators.push(gen);
    }
    let valuations = generators.iter().map(|g| places.iter().map(|p| p.valuation(g)).collect()).collect();
    Ok(SUnits { places, class_orders, generators, valuations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::Splitting;

    fn field(d: i64) -> ImagQuadField {
        ImagQuadField::new(d).unwrap()
    }

    #[test]
    fn generator_examples() {
        let k = field(-7);
        assert_eq!(principal_generator(&QuadIdeal::unit(&k), None).unwrap(), PrincipalOutcome::Generator(k.one()));
        let p2 = &k.primes_above(2)[0];
        let PrincipalOutcome::Generator(g) = principal_generator(p2, None).unwrap() else { panic!() };
        assert_eq!(QuadIdeal::principal(&k, &g), *p2);
        let k = field(-23);
        let p = &k.primes_above(2)[0];
        assert!(matches!(principal_generator(p, None).unwrap(), PrincipalOutcome::NotPrincipal(f) if f.a == 2));
        let PrincipalOutcome::Generator(g) = principal_generator(&p.pow(3), None).unwrap() else { panic!() };
        assert_eq!(k.norm(&g), crate::arith::rat(8, 1));
        assert_eq!(QuadIdeal::principal(&k, &g), p.pow(3));
    }

    #[test]
    fn congruence_search_and_obstruction() {
        let k = field(-4);
        let units = ResidueUnits::new(&k, &[3]).unwrap();
        // (2 + i): the four associates reduce to four of the eight residues mod 3
        let ideal = QuadIdeal::principal(&k, &QuadNumber::int(4, 1));
        match principal_generator(&ideal, Some(&units)).unwrap() {
            PrincipalOutcome::Generator(g) => panic!("unexpected generator {g}"),
            PrincipalOutcome::Obstruction { generator, residue_log } => {
                assert_eq!(QuadIdeal::principal(&k, &generator), ideal);
                assert_eq!(residue_log.len(), 1);
            }
            other => panic!("{other:?}"),
        }
        // (1 + 3i) = (1 + 3(ω + 2)) has the generator 7 + 3ω ≡ 1 mod 3
        let x = QuadNumber::int(7, 3);
        let PrincipalOutcome::Generator(g) = principal_generator(&QuadIdeal::principal(&k, &x), Some(&units)).unwrap() else { panic!() };
        assert!(k.congruent_to_one(&g, &BigInt::from(3)));
        assert_eq!(QuadIdeal::principal(&k, &g), QuadIdeal::principal(&k, &x));
    }

    #[test]
    fn generators_regenerate_the_ideal() {
        for d in [-3i64, -4, -7, -8, -11, -19, -43, -67, -163] {
            let k = field(d);
            for p in crate::arith::primes_up_to(60) {
                for ideal in k.primes_above(p) {
                    let PrincipalOutcome::Generator(g) = principal_generator(&ideal, None).unwrap() else { panic!("h = 1 for D = {d}") };
                    assert_eq!(QuadIdeal::principal(&k, &g), ideal);
                }
            }
        }
    }

    #[test]
    fn s_unit_examples() {
        let k = field(-4);
        let su = s_units(&k, &[5]).unwrap();
        assert_eq!(su.generators.len(), 2);
        assert_eq!(su.valuations, vec![vec![1, 0], vec![0, 1]]);
        assert!(su.generators.iter().all(|g| k.norm(g) == crate::arith::rat(5, 1)));
        assert!(s_units(&k, &[]).unwrap().generators.is_empty());
        let k = field(-23);
        assert_eq!(k.splitting(2), Splitting::Split);
        let su = s_units(&k, &[2]).unwrap();
        assert_eq!(su.class_orders, vec![3, 3]);
        assert_eq!(su.valuations, vec![vec![3, 0], vec![0, 3]]);
        // inert primes contribute the rational prime itself
        let su = s_units(&field(-4), &[3]).unwrap();
        assert_eq!(su.valuations, vec![vec![1]]);
    }
}
