use super::annihilation::drcond_skip;
use super::report::{big_list, Theorem, VerificationCase, VerificationReport};
use super::FieldSpec;
use crate::arith::primes_up_to;
use crate::error::{invalid, structural, Result};
use crate::fitting::{fitting_equivalent, GaloisModule};
use crate::linalg::{congruence_kernel, hnf, solve_integral, IntMatrix};
use crate::quadratic::{ray_class_group, ImagQuadField, QuadIdeal, QuadNumber, RayClassGroup, ResidueUnits, Splitting};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

/// Largest prime tried when enlarging S′.
pub const AUXILIARY_PRIME_BOUND: u64 = 2000;

/// Split primes, in ascending order, until the classes of the primes above
/// them generate Cl^T(K) up to its 2-part. None if the bound is reached.
pub fn auxiliary_primes(rcg: &RayClassGroup, bound: u64) -> Result<Option<Vec<u64>>> {
    let k = &rcg.field;
    let mut chosen = Vec::new();
    let mut classes: Vec<Vec<BigInt>> = Vec::new();
    let done = |classes: &Vec<Vec<BigInt>>| -> Result<bool> { Ok(rcg.module.quotient(classes)?.odd_part()?.is_zero()) };
    if done(&classes)? {
        return Ok(Some(chosen));
    }
    for p in primes_up_to(bound) {
        if rcg.t().contains(&p) || k.splitting(p) != Splitting::Split {
            continue;
        }
        let new: Vec<Vec<BigInt>> = k.primes_above(p).iter().map(|i| rcg.class_of(i)).collect::<Result<_>>()?;
        let mut trial = classes.clone();
        trial.extend(new);
        if rcg.module.quotient(&trial)?.order() == rcg.module.quotient(&classes)?.order() {
            continue;
        }
        classes = trial;
        chosen.push(p);
        if done(&classes)? {
            return Ok(Some(chosen));
        }
    }
    Ok(None)
}

/// β with (β) = Π 𝔭_j^{v_j} for a vector in the principal lattice.
fn generator_of(k: &ImagQuadField, places: &[QuadIdeal], v: &[BigInt]) -> Result<QuadNumber> {
    let mut num = QuadIdeal::unit(k);
    let mut den = BigInt::one();
    for (p, e) in places.iter().zip(v) {
        let e: i64 = e.try_into().map_err(|_| structural("exponent too large"))?;
        if e >= 0 {
            num = num.mul(&p.pow(e as u32));
        } else {
            num = num.mul(&p.conj().pow((-e) as u32));
            den *= p.norm().pow((-e) as u32);
        }
    }
    let g = num.generator().ok_or_else(|| structural("valuation vector in the principal lattice is not principal"))?;
    Ok(g.scale(&BigRational::new(BigInt::one(), den)))
}

/// Valuation lattice of O^*_{S′,T}: vectors v with Π 𝔭^v = (u), u ≡ 1 mod 𝔱.
fn smoothed_unit_lattice(k: &ImagQuadField, places: &[QuadIdeal], units: &ResidueUnits) -> Result<IntMatrix> {
    let n = places.len();
    let cl = crate::quadratic::form_class_group(k.disc())?;
    let inv: Vec<BigInt> = cl.group().invariants().iter().map(|&d| BigInt::from(d)).collect();
    let coords: Vec<Vec<u64>> = places.iter().map(|p| cl.group().coords(cl.class_of(p))).collect();
    let a: IntMatrix = (0..inv.len()).map(|i| (0..n).map(|j| BigInt::from(coords[j][i])).collect()).collect();
    let principal = congruence_kernel(&a, &inv, n);
    // residue logs of generators, plus the root of unity
    let mut logs: Vec<Vec<BigInt>> = principal.iter().map(|v| generator_of(k, places, v).and_then(|g| units.dlog(&g))).collect::<Result<_>>()?;
    logs.push(units.dlog(&k.root_of_unity())?);
    let r = principal.len();
    let orders: Vec<BigInt> = units.factors.iter().map(|f| BigInt::from(f.order)).collect();
    let m: IntMatrix = (0..orders.len()).map(|f| (0..=r).map(|i| logs[i][f].clone()).collect()).collect();
    let ker = congruence_kernel(&m, &orders, r + 1);
    let ys: IntMatrix = hnf(&ker.iter().map(|row| row[..r].to_vec()).collect::<Vec<_>>(), r);
    let rows: IntMatrix = ys.iter().map(|y| (0..n).map(|w| y.iter().zip(&principal).map(|(c, v)| c * &v[w]).sum()).collect()).collect();
    Ok(hnf(&rows, n))
}

/// Sel^T_{S∞}(K) as the cokernel of Z^{S′_K} → Hom(O^*_{S′,T}, Z), with the
/// contragredient action of complex conjugation.
pub fn selmer_module(rcg: &RayClassGroup, aux: &[u64]) -> Result<GaloisModule> {
    let k = &rcg.field;
    let places: Vec<QuadIdeal> = aux.iter().flat_map(|&p| k.primes_above(p)).collect();
    let n = places.len();
    let lattice = smoothed_unit_lattice(k, &places, &rcg.units)?;
    if lattice.len() != n {
        return Err(structural("smoothed S′-units do not have full rank"));
    }
    let perm: Vec<usize> = places.iter().map(|p| places.iter().position(|x| *x == p.conj()).expect("S′ is closed under conjugation")).collect();
    // c(b_i) = Σ_j M_ij b_j; on the dual basis c acts by the matrix M (columns = images)
    let mut action: IntMatrix = vec![vec![BigInt::zero(); n]; n];
    for (i, b) in lattice.iter().enumerate() {
        let cb: Vec<BigInt> = (0..n).map(|w| b[perm[w]].clone()).collect();
        let coeffs = solve_integral(&lattice, &cb).ok_or_else(|| structural("smoothed unit lattice is not conjugation stable"))?;
        for (j, c) in coeffs.into_iter().enumerate() {
            action[i][j] = c;
        }
    }
    let relations: IntMatrix = (0..n).map(|w| lattice.iter().map(|b| b[w].clone()).collect()).collect();
    GaloisModule::from_presentation(rcg.module.acting_group().clone(), n, &relations, &[action])
}

/// Sel^T_{S∞}(K) and the dual of Cl^T(K) are Fitting-equivalent on odd parts
/// and on odd minus parts.
pub fn check_selmer_duality(case: &VerificationCase) -> Result<VerificationReport> {
    let field = case.validate()?;
    let FieldSpec::Quadratic { disc } = case.field else {
        return Err(invalid("Selmer duality is checked for imaginary quadratic fields"));
    };
    let report = VerificationReport::new(Theorem::SelmerDuality, case);
    let mut report = match drcond_skip(&field, case, report) {
        Ok(r) => r,
        Err(skipped) => return Ok(skipped),
    };
    let rcg = ray_class_group(&ImagQuadField::new(disc)?, &case.t)?;
    let Some(aux) = auxiliary_primes(&rcg, AUXILIARY_PRIME_BOUND)? else {
        return Ok(report.skip(format!("split primes below {AUXILIARY_PRIME_BOUND} do not generate the odd part")));
    };
    report.witness("auxiliary_primes", json!(aux.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
    let sel = selmer_module(&rcg, &aux)?.odd_part()?;
    let dual = rcg.module.dual()?.odd_part()?;
    report.witness("selmer_odd_invariants", big_list(sel.invariants()));
    report.witness("dual_class_group_odd_invariants", big_list(dual.invariants()));
    let whole = fitting_equivalent(&sel, &dual, 1)?;
    let minus = fitting_equivalent(&sel.minus_part(1)?, &dual.minus_part(1)?, 1)?;
    for (name, e) in [("odd", whole), ("odd_minus", minus)] {
        let entry = json!({ "invariants": e.invariants_match, "eigen_profiles": e.eigen_profiles_match, "minus_fitting": e.minus_fitting_match });
        report.witness(&format!("equivalence_{name}"), entry.clone());
        if !e.holds() {
            report.fail("not_equivalent", json!({ "part": name, "comparison": entry }));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    #[test]
    fn duality_examples() {
        let r = check_selmer_duality(&VerificationCase::quadratic(-4, &[3])).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:#?}");
        assert_eq!(r.get("auxiliary_primes").unwrap(), &json!([]));
        let r = check_selmer_duality(&VerificationCase::quadratic(-23, &[3])).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:#?}");
        assert_eq!(r.get("auxiliary_primes").unwrap(), &json!(["2"]));
        for (d, t) in [(-47, 5u64), (-31, 7), (-3, 7), (-84, 5)] {
            let r = check_selmer_duality(&VerificationCase::quadratic(d, &[t])).unwrap();
            assert_eq!(r.status, Status::Pass, "D = {d}: {r:#?}");
        }
    }
}
