use crate::algebra::{enumerate_characters, Character, Elem, GroupRingElement};
use crate::error::{structural, Error, Result};
use crate::fitting::GaloisModule;
use crate::quadratic::{ray_class_group, ImagQuadField, RayClassGroup};
use crate::stickelberger::AbelianFieldQ;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// χ(x) for a character with values ±1.
pub(crate) fn sign_value(x: &GroupRingElement, chi: &Character) -> BigRational {
    let e = chi.group().exponent();
    x.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(g, c)| if chi.value_exponent(g) == 0 { c.clone() } else { debug_assert_eq!(2 * chi.value_exponent(g), e); -c.clone() })
        .sum()
}

/// An odd character of Gal(H/Q) with the imaginary quadratic field it cuts out.
#[derive(Debug, Clone)]
pub(crate) struct OddComponent {
    pub character: Character,
    pub disc: i64,
    pub field: ImagQuadField,
}

/// The odd characters of an exponent-2 Galois group and their fields.
pub(crate) fn odd_components(h: &AbelianFieldQ) -> Result<Vec<OddComponent>> {
    let g = h.group();
    if g.exponent() > 2 {
        return Err(Error::Unsupported(format!("Galois group of exponent {} is outside the verified range", g.exponent())));
    }
    let conj = h.conj();
    let mut out = Vec::new();
    for chi in enumerate_characters(g) {
        if !chi.is_odd(conj) {
            continue;
        }
        let kernel: Vec<Elem> = g.elements().filter(|&x| chi.value_exponent(x) == 0).collect();
        let (sub, _) = h.fixed_field(&kernel)?;
        if sub.degree() != 2 || !sub.is_imaginary() {
            return Err(structural("odd quadratic character without an imaginary quadratic field"));
        }
        let disc = -(sub.conductor() as i64);
        out.push(OddComponent { character: chi, disc, field: ImagQuadField::new(disc)? });
    }
    Ok(out)
}

/// Cl^T(K)^-, odd part, for the field of a component.
pub(crate) fn component_minus(rcg: &RayClassGroup) -> Result<GaloisModule> {
    let m = &rcg.module;
    if m.acting_group().order() != 2 {
        return Err(structural("ray class module must carry the action of complex conjugation"));
    }
    m.odd_part()?.minus_part(1)
}

/// A module over Gal(K/Q) carried to Gal(H/Q), each generator acting by χ.
pub(crate) fn inflate(m: &GaloisModule, h: &AbelianFieldQ, chi: &Character) -> Result<GaloisModule> {
    let g = h.group();
    let r = m.rank();
    let action = (0..g.rank())
        .map(|i| {
            let s = if chi.value_exponent(g.generator(i)) == 0 { 1 } else { -1 };
            (0..r).map(|a| (0..r).map(|b| if a == b { BigInt::from(s) } else { BigInt::zero() }).collect()).collect()
        })
        .collect();
    GaloisModule::new(g.clone(), m.invariants().to_vec(), action)
}

/// Odd part of Cl^T(H)^- as ⊕_χ Cl^T(K_χ)^-_odd with G acting through χ,
/// together with the per-component data.
pub(crate) struct MinusAssembly {
    pub module: GaloisModule,
    pub components: Vec<(OddComponent, GaloisModule)>,
}

pub(crate) fn assemble_minus(h: &AbelianFieldQ, t: &[u64]) -> Result<MinusAssembly> {
    let mut module = GaloisModule::trivial_action(h.group().clone(), Vec::new())?;
    let mut components = Vec::new();
    for comp in odd_components(h)? {
        let rcg = ray_class_group(&comp.field, t)?;
        let minus = component_minus(&rcg)?;
        module = module.direct_sum(&inflate(&minus, h, &comp.character)?)?;
        components.push((comp, minus));
    }
    Ok(MinusAssembly { module, components })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biquadratic_components() {
        let h = AbelianFieldQ::biquadratic(-3, -4).unwrap();
        let mut d: Vec<i64> = odd_components(&h).unwrap().iter().map(|c| c.disc).collect();
        d.sort();
        assert_eq!(d, vec![-4, -3]);
        let h = AbelianFieldQ::biquadratic(-3, 5).unwrap();
        let mut d: Vec<i64> = odd_components(&h).unwrap().iter().map(|c| c.disc).collect();
        d.sort();
        assert_eq!(d, vec![-15, -3]);
        assert_eq!(odd_components(&AbelianFieldQ::quadratic(-23).unwrap()).unwrap()[0].disc, -23);
        assert!(odd_components(&AbelianFieldQ::cyclotomic(7).unwrap()).is_err());
    }

    #[test]
    fn inflated_components_sum_orders() {
        let h = AbelianFieldQ::biquadratic(-23, -4).unwrap();
        let a = assemble_minus(&h, &[7]).unwrap();
        let product: BigInt = a.components.iter().map(|(_, m)| m.order()).product();
        assert_eq!(a.module.order(), product);
        assert!(a.module.minus_part(h.conj()).unwrap().order() == a.module.order());
    }
}
