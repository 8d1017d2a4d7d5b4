use super::group::{Elem, FiniteAbelianGroup};
use super::group_ring::{CoeffRing, GroupRingElement};
use crate::error::{invalid, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Inertia, decomposition and Frobenius data of one place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceData {
    pub inertia: Vec<Elem>,
    pub frobenius: Elem,
    pub decomposition: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisStructure {
    pub group: FiniteAbelianGroup,
    pub conj: Elem,
    pub places: BTreeMap<String, PlaceData>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalKind {
    NormOfInertia,
    UnramifiedIdempotent,
    OneMinusFrobTimesIdempotent,
}

impl GaloisStructure {
    pub fn new(group: FiniteAbelianGroup, conj: Elem, places: BTreeMap<String, PlaceData>) -> Result<Self> {
        if group.order_of(conj) != 2 {
            return Err(invalid("complex conjugation must have order exactly 2"));
        }
        for (label, d) in &places {
            let inertia = group.subgroup(&d.inertia);
            let decomp = group.subgroup(&d.decomposition);
            if !inertia.iter().all(|g| decomp.binary_search(g).is_ok()) {
                return Err(invalid(format!("inertia not inside decomposition group at {label}")));
            }
            let mut gens = d.inertia.clone();
            gens.push(d.frobenius);
            if group.subgroup(&gens) != decomp {
                return Err(invalid(format!("Frobenius and inertia do not generate the decomposition group at {label}")));
            }
        }
        Ok(GaloisStructure { group, conj, places })
    }

    pub fn place(&self, v: &str) -> Result<&PlaceData> {
        self.places.get(v).ok_or_else(|| Error::UnknownPlace(v.to_string()))
    }

    pub fn inertia_elements(&self, v: &str) -> Result<Vec<Elem>> {
        Ok(self.group.subgroup(&self.place(v)?.inertia))
    }

    pub fn canonical_element(&self, v: &str, kind: CanonicalKind) -> Result<GroupRingElement> {
        let d = self.place(v)?;
        self.canonical_with_frobenius(v, d.frobenius, kind)
    }

    /// Same as `canonical_element` but with an explicit Frobenius representative.
    pub fn canonical_with_frobenius(&self, v: &str, frob: Elem, kind: CanonicalKind) -> Result<GroupRingElement> {
        let inertia = self.inertia_elements(v)?;
        let norm = GroupRingElement::sum_of(&self.group, CoeffRing::Rationals, &inertia);
        let e = norm.scale(&BigRational::new(BigInt::from(1), BigInt::from(inertia.len())))?;
        Ok(match kind {
            CanonicalKind::NormOfInertia => norm,
            CanonicalKind::UnramifiedIdempotent => e,
            CanonicalKind::OneMinusFrobTimesIdempotent => {
                let one = GroupRingElement::one(&self.group, CoeffRing::Rationals);
                one.sub(&e.shift(frob))?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn z2_ramified() -> GaloisStructure {
        let g = FiniteAbelianGroup::cyclic(2);
        let mut places = BTreeMap::new();
        places.insert("3".into(), PlaceData { inertia: vec![1], frobenius: 0, decomposition: vec![1] });
        places.insert("7".into(), PlaceData { inertia: vec![], frobenius: 1, decomposition: vec![1] });
        GaloisStructure::new(g, 1, places).unwrap()
    }

    #[test]
    fn canonical_elements_for_z2() {
        let gal = z2_ramified();
        let n = gal.canonical_element("3", CanonicalKind::NormOfInertia).unwrap();
        assert_eq!(n.coeffs(), &[rat(1, 1), rat(1, 1)]);
        let x = gal.canonical_element("3", CanonicalKind::OneMinusFrobTimesIdempotent).unwrap();
        assert_eq!(x.coeffs(), &[rat(1, 2), rat(-1, 2)]);
        let y = gal.canonical_element("7", CanonicalKind::OneMinusFrobTimesIdempotent).unwrap();
        assert_eq!(y.coeffs(), &[rat(1, 1), rat(-1, 1)]);
        assert!(matches!(gal.canonical_element("5", CanonicalKind::NormOfInertia), Err(Error::UnknownPlace(_))));
    }

    #[test]
    fn independent_of_frobenius_representative() {
        let gal = z2_ramified();
        let a = gal.canonical_with_frobenius("3", 0, CanonicalKind::OneMinusFrobTimesIdempotent).unwrap();
        let b = gal.canonical_with_frobenius("3", 1, CanonicalKind::OneMinusFrobTimesIdempotent).unwrap();
        assert_eq!(a, b);
    }
}
