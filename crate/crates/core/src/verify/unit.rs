use super::annihilation::drcond_skip;
use super::report::{big_list, rat_list, rat_str, Theorem, VerificationCase, VerificationReport};
use super::FieldSpec;
use crate::arith::{kronecker, rat};
use crate::eisenstein::{l_at_nonpositive_rational, DirichletCharacter};
use crate::error::{invalid, Result};
use crate::quadratic::{ImagQuadField, QuadIdeal, QuadNumber, ResidueUnits, Splitting};
use crate::stickelberger::theta;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

/// L_{S,T}(χ, 0) for χ trivial or the quadratic character of K, from
/// Bernoulli numbers and explicit Euler factors.
fn smoothed_l_value(disc: i64, trivial: bool, s: &[u64], t: &[u64]) -> Result<BigRational> {
    let chi = |n: u64| if trivial { 1 } else { kronecker(disc, n) };
    let base = if trivial { rat(-1, 2) } else { l_at_nonpositive_rational(&DirichletCharacter::kronecker(disc)?, 1)? };
    let depleted = s.iter().fold(base, |acc, &p| acc * rat(1 - chi(p), 1));
    Ok(t.iter().fold(depleted, |acc, &l| acc * rat(1 - chi(l) * l as i64, 1)))
}

fn ideal_power(p: &QuadIdeal, e: u64) -> QuadIdeal {
    p.pow(e as u32)
}

/// The class of u in (O/𝔱)^* is trivial.
fn is_one_mod(units: &ResidueUnits, u: &QuadNumber) -> Result<bool> {
    Ok(units.dlog(u)?.iter().all(|x| x.is_zero()))
}

/// Finds u with (u) = 𝔓^{Θ_{S,T}} and u ≡ 1 mod 𝔱, then checks valuations,
/// the L-value identity for both characters and the anti-unit v = u/ū.
pub fn brumer_stark_unit(case: &VerificationCase) -> Result<VerificationReport> {
    let field = case.validate()?;
    let FieldSpec::Quadratic { disc } = case.field else {
        return Err(invalid("the unit construction needs an imaginary quadratic field"));
    };
    let q = case.split_prime.ok_or_else(|| invalid("a split prime is required"))?;
    let k = ImagQuadField::new(disc)?;
    let s = case.depletion(&field);
    if s.contains(&q) || case.t.contains(&q) {
        return Err(invalid(format!("{q} lies in S or T")));
    }
    if k.splitting(q) != Splitting::Split {
        return Err(invalid(format!("{q} does not split in Q(√{disc})")));
    }
    let report = VerificationReport::new(Theorem::BrumerStarkUnit, case);
    let mut report = match drcond_skip(&field, case, report) {
        Ok(r) => r,
        Err(skipped) => return Ok(skipped),
    };
    let th = theta(&field, &s, &case.t)?;
    report.witness("theta", rat_list(th.element.coeffs()));
    if th.element.is_zero() {
        return Ok(report.skip("Θ vanishes"));
    }
    let conj = field.conj();
    let coeff = |g: usize| th.element.coeff(g).to_integer().to_i64().expect("small Stickelberger coefficients");
    let (a, b) = (coeff(0), coeff(conj));
    // 𝔓^a 𝔓̄^b = 𝔓^{a-b} (q)^b
    let big_p = k.primes_above(q).remove(0);
    let (ideal, shift) = if a >= b { (ideal_power(&big_p, (a - b) as u64), b) } else { (ideal_power(&big_p.conj(), (b - a) as u64), a) };
    let Some(alpha) = ideal.generator() else {
        let f = crate::quadratic::ideal_to_form(&ideal);
        report.fail("not_principal", json!([f.a.to_string(), f.b.to_string(), f.c.to_string()]));
        return Ok(report);
    };
    let qk = if shift >= 0 { BigRational::from_integer(BigInt::from(q).pow(shift as u32)) } else { BigRational::new(BigInt::one(), BigInt::from(q).pow((-shift) as u32)) };
    let alpha = alpha.scale(&qk);
    let units = ResidueUnits::new(&k, &case.t)?;
    let mut found = None;
    for z in k.roots_of_unity() {
        let u = k.mul(&alpha, &z);
        if is_one_mod(&units, &u)? {
            found = Some(u);
            break;
        }
    }
    let Some(u) = found else {
        report.fail("congruence_obstruction", big_list(&units.dlog(&alpha)?));
        return Ok(report);
    };
    report.witness("u", u.to_string());
    let (ord_p, ord_pbar) = (big_p.valuation(&u), big_p.conj().valuation(&u));
    report.witness("valuations", json!([ord_p.to_string(), ord_pbar.to_string()]));
    let norm_ok = k.norm(&u) == BigRational::from_integer(BigInt::from(q)).pow((a + b) as i32);
    if ord_p != a || ord_pbar != b || !norm_ok {
        report.fail("wrong_ideal", json!({ "expected": [a.to_string(), b.to_string()], "norm": rat_str(&k.norm(&u)) }));
    }
    // Σ_σ χ(σ) ord_{σ^{-1}𝔓}(u) against L_{S,T}(χ, 0)
    for (name, trivial, sign) in [("trivial", true, 1i64), ("quadratic", false, -1)] {
        let lhs = rat(ord_p + sign * ord_pbar, 1);
        let rhs = smoothed_l_value(disc, trivial, &s, &case.t)?;
        report.witness(&format!("l_value_{name}"), rat_str(&rhs));
        if lhs != rhs {
            report.fail("valuation_identity", json!({ "character": name, "valuations": rat_str(&lhs), "l_value": rat_str(&rhs) }));
        }
    }
    let ubar = k.conj(&u);
    let v = k.div(&u, &ubar);
    report.witness("v", v.to_string());
    if k.mul(&v, &k.conj(&v)) != k.one() {
        report.fail("anti_unit_norm", k.mul(&v, &k.conj(&v)).to_string());
    }
    if big_p.valuation(&v) != a - b || big_p.conj().valuation(&v) != b - a {
        report.fail("anti_unit_valuations", json!([big_p.valuation(&v).to_string(), big_p.conj().valuation(&v).to_string()]));
    }
    if !k.norm(&u).is_positive() {
        report.fail("norm_sign", rat_str(&k.norm(&u)));
    }
    Ok(report)
}
