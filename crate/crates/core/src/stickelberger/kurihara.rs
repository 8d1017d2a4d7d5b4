use super::drcond::check_drcond;
use super::field::AbelianFieldQ;
use super::theta::theta;
use crate::algebra::{ideal_from_generators, rational_det, CoeffRing, Elem, GroupRingElement, IdealLattice, MinusQuotient};
use crate::arith::rat_valuation;
use crate::error::{structural, Error, Result};
use num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsVariant {
    /// the ideal of Z[G] built from Θ^#_{S∞,T}
    Integral,
    /// Θ^#_{Σ,T} with Σ = S∞ ∪ {ramified v | p}; only v ∤ p enter the product
    PModified(u64),
}

/// All products base · Π_v x_v with x_v ∈ {N I_v, 1 − σ_v e_v}.
pub fn ks_generators(field: &AbelianFieldQ, t: &[u64], variant: KsVariant) -> Result<Vec<GroupRingElement>> {
    let ram = field.ramified_primes();
    let (sigma, places): (Vec<u64>, Vec<u64>) = match variant {
        KsVariant::Integral => (Vec::new(), ram),
        KsVariant::PModified(p) => ram.into_iter().partition(|&v| v == p),
    };
    let base = theta(field, &sigma, t)?.sharp();
    let g = field.group();
    let one = GroupRingElement::one(g, CoeffRing::Rationals);
    let mut factors = Vec::new();
    for &v in &places {
        let norm = inertia_norm(field, v);
        let idem = norm.scale(&BigRational::new(1.into(), field.inertia(v).len().into()))?;
        factors.push((norm, one.sub(&idem.shift(field.frobenius(v)))?));
    }
    let mut gens = Vec::with_capacity(1 << places.len());
    for mask in 0u32..(1 << places.len()) {
        let mut x = base.clone();
        for (i, (norm, smooth)) in factors.iter().enumerate() {
            x = x.mul(if mask >> i & 1 == 1 { norm } else { smooth })?;
        }
        gens.push(x);
    }
    Ok(gens)
}

fn p_integral(x: &GroupRingElement, p: u64) -> bool {
    x.coeffs().iter().all(|c| rat_valuation(c, p).map_or(true, |v| v >= 0))
}

/// The Sinnott–Kurihara ideal as a lattice in Q[G]. Its generators are
/// checked to be integral (p-integral for the p-modified variant).
pub fn sinnott_kurihara_ideal(field: &AbelianFieldQ, t: &[u64], variant: KsVariant) -> Result<IdealLattice> {
    let report = check_drcond(field, t);
    if !report.holds {
        return Err(Error::DrCond(format!("roots of unity ζ_{}^j ≡ 1 above T for j in {:?}", report.roots_of_unity, report.offending)));
    }
    let gens = ks_generators(field, t, variant)?;
    for x in &gens {
        let ok = match variant {
            KsVariant::Integral => x.is_integral(),
            KsVariant::PModified(p) => p_integral(x, p),
        };
        if !ok {
            return Err(structural(format!("Sinnott–Kurihara generator {} is not integral", x.display())));
        }
    }
    ideal_from_generators(field.group(), &gens)
}

/// det of multiplication by x on Q[G]/(1 + conj).
pub fn odd_product_det(x: &GroupRingElement, conj: Elem) -> Result<BigRational> {
    let q = MinusQuotient::new(x.group(), conj)?;
    let xm = q.project(&x.to_rationals())?;
    Ok(rational_det(&q.multiplication_matrix(&xm)))
}

/// N I_v for use by callers assembling ideals by hand.
pub fn inertia_norm(field: &AbelianFieldQ, v: u64) -> GroupRingElement {
    GroupRingElement::sum_of(field.group(), CoeffRing::Rationals, &field.inertia(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_characters, FiniteAbelianGroup};
    use crate::arith::rat;
    use crate::cyclotomic::CyclotomicField;
    use crate::ring::Ring;

    #[test]
    fn odd_product_det_examples() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let x = GroupRingElement::from_ints(&z2, &[5, 3]).unwrap();
        assert_eq!(odd_product_det(&x, 1).unwrap(), rat(2, 1));
        let v4 = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let conj = v4.index(&[1, 1]);
        let one = GroupRingElement::one(&v4, CoeffRing::Integers);
        assert_eq!(odd_product_det(&one, conj).unwrap(), rat(1, 1));
        let g1 = v4.index(&[1, 0]);
        let x = one.scale(&rat(2, 1)).unwrap().add(&GroupRingElement::basis(&v4, CoeffRing::Integers, g1)).unwrap();
        let cf = CyclotomicField::new(2);
        let via_chars = enumerate_characters(&v4)
            .iter()
            .filter(|c| c.is_odd(conj))
            .fold(rat(1, 1), |acc, c| acc * cf.as_rational(&x.eval_character(c, &cf)).unwrap());
        // odd characters send g1 to +1 and −1 respectively
        assert_eq!(via_chars, rat(3, 1));
        assert_eq!(odd_product_det(&x, conj).unwrap(), via_chars);
    }

    #[test]
    fn odd_product_det_matches_characters_on_cyclic_groups() {
        let g = FiniteAbelianGroup::cyclic(6);
        let conj = 3;
        let x = GroupRingElement::from_ints(&g, &[4, -1, 2, 0, 7, 1]).unwrap();
        let cf = CyclotomicField::new(6);
        let mut prod = cf.one();
        for c in enumerate_characters(&g).iter().filter(|c| c.is_odd(conj)) {
            prod = cf.mul(&prod, &x.eval_character(c, &cf));
        }
        assert_eq!(cf.as_rational(&prod).unwrap(), odd_product_det(&x, conj).unwrap());
    }

    #[test]
    fn q_sqrt_minus_3_minus_part() {
        let k = AbelianFieldQ::quadratic(-3).unwrap();
        let t = [7u64];
        let ks = sinnott_kurihara_ideal(&k, &t, KsVariant::Integral).unwrap();
        let th = theta(&k, &[], &t).unwrap().sharp();
        let q = MinusQuotient::new(k.group(), k.conj()).unwrap();
        let principal = ideal_from_generators(k.group(), &[th]).unwrap();
        assert!(ks.project_to_minus(&q).unwrap().equals(&principal.project_to_minus(&q).unwrap()).unwrap());
        assert!(sinnott_kurihara_ideal(&k, &[], KsVariant::Integral).is_err());
    }

    #[test]
    fn alternate_generators_agree() {
        // KS = (Π_{v∉J} N I_v · Θ^#_{J,T} : J) with Θ_J computed independently
        for (field, t) in [(AbelianFieldQ::biquadratic(-3, 5).unwrap(), vec![7u64]), (AbelianFieldQ::biquadratic(-4, -3).unwrap(), vec![5]), (AbelianFieldQ::cyclotomic(15).unwrap(), vec![2, 7])] {
            let ks = sinnott_kurihara_ideal(&field, &t, KsVariant::Integral).unwrap();
            let ram = field.ramified_primes();
            let mut gens = Vec::new();
            for mask in 0u32..(1 << ram.len()) {
                let j: Vec<u64> = ram.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                let mut x = theta(&field, &j, &t).unwrap().sharp();
                for v in ram.iter().filter(|v| !j.contains(v)) {
                    x = x.mul(&inertia_norm(&field, *v)).unwrap();
                }
                gens.push(x);
            }
            let alt = ideal_from_generators(field.group(), &gens).unwrap();
            assert!(ks.equals(&alt).unwrap());
            assert!(ks.is_integral());
        }
    }

    #[test]
    fn unramified_product_is_empty() {
        // with S_ram = ∅ (H = Q, a degenerate but valid input) KS is principal
        let q = AbelianFieldQ::cyclotomic(1).unwrap();
        let gens = ks_generators(&q, &[3], KsVariant::Integral).unwrap();
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].coeffs(), &[rat(1, 1)]);
    }

    #[test]
    fn p_modified_ideal_is_p_integral_and_contains_theta() {
        let h = AbelianFieldQ::biquadratic(-3, 5).unwrap();
        let t = [7u64];
        for p in [3u64, 5, 7] {
            let ks_p = sinnott_kurihara_ideal(&h, &t, KsVariant::PModified(p)).unwrap();
            let full = theta(&h, &[3, 5], &t).unwrap().sharp();
            assert!(ks_p.contains_locally(full.coeffs(), p));
        }
    }
}
