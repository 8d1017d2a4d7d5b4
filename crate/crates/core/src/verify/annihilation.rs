use super::components::{assemble_minus, odd_components, sign_value};
use super::report::{big_list, big_str, rat_list, rat_str, Theorem, VerificationCase, VerificationReport};
use crate::algebra::{enumerate_characters, CoeffRing, GroupRingElement};
use crate::arith::odd_part;
use crate::error::Result;
use crate::quadratic::{ray_class_group, ImagQuadField};
use crate::stickelberger::{check_drcond, odd_product_det, theta, AbelianFieldQ};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::json;

/// Skips cases whose T admits a root of unity ≡ 1 above T.
pub(crate) fn drcond_skip(field: &AbelianFieldQ, case: &VerificationCase, report: VerificationReport) -> std::result::Result<VerificationReport, VerificationReport> {
    let d = check_drcond(field, &case.t);
    if d.holds {
        Ok(report)
    } else {
        Err(report.skip(format!("T = {:?} fails the root-of-unity condition (w = {}, offending exponents {:?})", case.t, d.roots_of_unity, d.offending)))
    }
}

/// Θ_{S,T} annihilates the odd part of Cl^T(H).
pub fn check_brumer_stark(case: &VerificationCase) -> Result<VerificationReport> {
    let field = case.validate()?;
    let report = VerificationReport::new(Theorem::BrumerStark, case);
    let mut report = match drcond_skip(&field, case, report) {
        Ok(r) => r,
        Err(skipped) => return Ok(skipped),
    };
    let s = case.depletion(&field);
    let th = theta(&field, &s, &case.t)?;
    report.witness("theta", rat_list(th.element.coeffs()));
    if !th.element.is_integral() {
        report.fail("non_integral_theta", rat_list(th.element.coeffs()));
        return Ok(report);
    }
    match case.field {
        super::FieldSpec::Quadratic { disc } => {
            let k = ImagQuadField::new(disc)?;
            let rcg = ray_class_group(&k, &case.t)?;
            let odd = rcg.module.odd_part()?;
            report.witness("class_group_odd_invariants", big_list(odd.invariants()));
            let x = GroupRingElement::from_coeffs(odd.acting_group(), CoeffRing::Integers, th.element.coeffs().to_vec())?;
            let m = odd.matrix_of_element(&x)?;
            // a generator whose image is nonzero witnesses failure
            if let Some(j) = (0..odd.rank()).find(|&j| m.iter().any(|row| !row[j].is_zero())) {
                let image: Vec<BigInt> = m.iter().map(|row| row[j].clone()).collect();
                let mut gen = vec![BigInt::zero(); odd.rank()];
                gen[j] = BigInt::from(1);
                report.fail("not_annihilated", json!({ "element": big_list(&gen), "image": big_list(&image) }));
            }
        }
        super::FieldSpec::Biquadratic { .. } => {
            let conj = field.conj();
            for chi in enumerate_characters(field.group()).iter().filter(|c| !c.is_odd(conj)) {
                let v = sign_value(&th.element, chi);
                if !v.is_zero() {
                    report.fail("even_component_nonzero", json!({ "character": chi.exponents(), "value": rat_str(&v) }));
                }
            }
            let assembly = assemble_minus(&field, &case.t)?;
            for (comp, minus) in &assembly.components {
                let v = sign_value(&th.element, &comp.character).to_integer();
                let exponent = minus.invariants().last().cloned().unwrap_or_else(|| BigInt::from(1));
                let entry = json!({ "disc": comp.disc.to_string(), "chi_theta": big_str(&v), "invariants": big_list(minus.invariants()) });
                report.witness("component", entry.clone());
                if !v.is_multiple_of(&exponent) {
                    report.fail("not_annihilated", entry);
                }
            }
        }
    }
    Ok(report)
}

/// Odd parts of #Cl^T(H)^- and of Π_{ψ odd} L_{S∞,T}(ψ, 0) agree.
pub fn check_cnf(case: &VerificationCase) -> Result<VerificationReport> {
    let field = case.validate()?;
    let report = VerificationReport::new(Theorem::ClassNumberFormula, case);
    let mut report = match drcond_skip(&field, case, report) {
        Ok(r) => r,
        Err(skipped) => return Ok(skipped),
    };
    let th = theta(&field, &[], &case.t)?;
    let product = odd_product_det(&th.element, field.conj())?;
    report.witness("l_value_product", rat_str(&product));
    let (num, den) = (odd_part(&product.numer().abs()), odd_part(product.denom()));
    if den != BigInt::from(1) {
        report.fail("odd_denominator", big_str(&den));
        return Ok(report);
    }
    let lhs = match case.field {
        super::FieldSpec::Quadratic { disc } => {
            let rcg = ray_class_group(&ImagQuadField::new(disc)?, &case.t)?;
            rcg.module.odd_part()?.minus_part(1)?.order()
        }
        super::FieldSpec::Biquadratic { .. } => {
            let comps = odd_components(&field)?;
            let mut acc = BigInt::from(1);
            for c in comps {
                let rcg = ray_class_group(&c.field, &case.t)?;
                acc *= super::components::component_minus(&rcg)?.order();
            }
            acc
        }
    };
    report.witness("class_group_minus_odd_order", big_str(&lhs));
    report.witness("l_value_odd_part", big_str(&num));
    if lhs != num {
        report.fail("mismatch", json!({ "class_group": big_str(&lhs), "l_values": big_str(&num) }));
    }
    Ok(report)
}
