//! JSON views of single computations, shared by `compute` and the oracle.

use num_bigint::BigInt;
use serde_json::{json, Value};
use stark_core::algebra::{GroupRingElement, IdealLattice};
use stark_core::arith::rat_to_string;
use stark_core::eisenstein::{eisenstein_qexp, value_field, CoefficientRing, DirichletCharacter};
use stark_core::quadratic::{form_class_group, ray_class_group, ImagQuadField};
use stark_core::ring::Rationals;
use stark_core::stickelberger::{check_integrality, sinnott_kurihara_ideal, theta, AbelianFieldQ, KsVariant};
use stark_core::Result;

fn strs<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn big(x: &BigInt) -> String {
    x.to_str_radix(10)
}

pub fn field_json(h: &AbelianFieldQ) -> Value {
    json!({ "conductor": h.conductor().to_string(), "kernel": strs(&h.kernel_set()), "group": strs(h.group().invariants()) })
}

/// Coefficients keyed by the residue a with σ_a the group element.
pub fn element_json(h: &AbelianFieldQ, x: &GroupRingElement) -> Value {
    let terms: Vec<Value> = h.group().elements().map(|g| json!([h.representative(g).to_string(), rat_to_string(x.coeff(g))])).collect();
    Value::Array(terms)
}

pub fn lattice_json(l: &IdealLattice) -> Value {
    json!({ "denominator": big(l.denominator()), "basis": l.basis().iter().map(|r| r.iter().map(big).collect::<Vec<_>>()).collect::<Vec<_>>() })
}

pub fn theta_json(h: &AbelianFieldQ, s: &[u64], t: &[u64]) -> Result<Value> {
    let th = theta(h, s, t)?;
    Ok(json!({
        "field": field_json(h),
        "S": strs(&th.depletion),
        "T": strs(&th.smoothing),
        "theta": element_json(h, &th.element),
        "integral": check_integrality(&th),
    }))
}

pub fn ks_json(h: &AbelianFieldQ, t: &[u64], p: Option<u64>) -> Result<Value> {
    let variant = p.map_or(KsVariant::Integral, KsVariant::PModified);
    let l = sinnott_kurihara_ideal(h, t, variant)?;
    Ok(json!({ "field": field_json(h), "T": strs(t), "p": p.map(|p| p.to_string()), "lattice": lattice_json(&l) }))
}

pub fn classgroup_json(d: i64) -> Result<Value> {
    let cl = form_class_group(d)?;
    let forms: Vec<Value> = cl.forms.iter().map(|f| json!([f.a.to_string(), f.b.to_string(), f.c.to_string()])).collect();
    Ok(json!({ "disc": d.to_string(), "order": cl.order().to_string(), "invariants": strs(cl.group().invariants()), "forms": forms }))
}

pub fn rayclass_json(d: i64, t: &[u64]) -> Result<Value> {
    let rcg = ray_class_group(&ImagQuadField::new(d)?, t)?;
    Ok(serde_json::to_value(rcg.summary()).expect("summary serializes"))
}

/// Prefix of E_k(ψ) with S-depletion, over Q when ψ is real.
pub fn qexp_json(k: u64, psi: &DirichletCharacter, s: &[u64], n: usize) -> Result<Value> {
    if psi.value_order() <= 2 {
        prefix(&Rationals, k, psi, s, n)
    } else {
        prefix(&value_field(psi), k, psi, s, n)
    }
}

fn prefix<R: CoefficientRing>(ring: &R, k: u64, psi: &DirichletCharacter, s: &[u64], n: usize) -> Result<Value> {
    Ok(eisenstein_qexp(ring, k, psi, s)?.prefix_json(n))
}
