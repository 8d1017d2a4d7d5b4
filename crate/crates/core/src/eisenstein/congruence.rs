use super::qexp::{normalized_level_one, CoefficientRing, QExpansion};
use crate::algebra::{ideal_from_generators, CoeffRing, GroupRingElement, IdealLattice};
use crate::arith::{is_prime, rat};
use crate::error::{invalid, Result};
use crate::ring::Residues;
use crate::stickelberger::{theta, AbelianFieldQ};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

/// Modulus for coefficientwise congruences.
#[derive(Debug, Clone, Copy)]
pub enum CongruenceModulus<'a> {
    PrimePower { p: u64, m: u32 },
    /// an ideal of the coefficient group ring, compared by lattice membership
    Ideal(&'a IdealLattice),
}

/// Result of a congruence check; index 0 is the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceOutcome {
    pub holds: bool,
    pub first_failure: Option<usize>,
    pub checked_through: usize,
}

/// Checks c(m, f) ≡ c(m, g) for 0 ≤ m ≤ bound.
pub fn congruence_check<R: CoefficientRing>(f: &QExpansion<R>, g: &QExpansion<R>, modulus: CongruenceModulus<'_>, bound: usize) -> Result<CongruenceOutcome> {
    if f.ring().label() != g.ring().label() {
        return Err(invalid(format!("coefficient rings differ: {} vs {}", f.ring().label(), g.ring().label())));
    }
    let ring = f.ring();
    let (cf, cg) = (f.coefficients(bound), g.coefficients(bound));
    for (m, (x, y)) in cf.iter().zip(&cg).enumerate() {
        let d = ring.sub(x, y);
        let ok = match modulus {
            CongruenceModulus::PrimePower { p, m: e } => ring.residues_mod(&d, p, e)?.iter().all(|r| r == &BigInt::from(0)),
            CongruenceModulus::Ideal(lattice) => lattice.contains_coords(&ring.coordinates(&d)),
        };
        if !ok {
            return Ok(CongruenceOutcome { holds: false, first_failure: Some(m), checked_through: bound });
        }
    }
    Ok(CongruenceOutcome { holds: true, first_failure: None, checked_through: bound })
}

/// V^{p^a} ≡ 1 mod p^{a+1} for V = E_{p−1}/c₀, computed in Z/p^{a+1}.
pub fn level_one_ladder(p: u64, a: u32, bound: usize) -> Result<CongruenceOutcome> {
    if !is_prime(p) || p < 5 {
        return Err(invalid(format!("the ladder needs a prime p ≥ 5, got {p}")));
    }
    let ring = Residues::prime_power(p, a + 1);
    let v = normalized_level_one(&ring, p - 1)?;
    let power = v.pow(p.pow(a))?;
    let one = QExpansion::constant(&ring, BigInt::from(1));
    congruence_check(&power, &one, CongruenceModulus::PrimePower { p, m: a + 1 }, bound)
}

/// Outcome of the Hecke-eigenvalue shadow: for each ℓ, the difference of the
/// T_ℓ eigenvalues 1 + ψ(ℓ)ℓ^{k−1} and ℓ^{k−1} + ψ(ℓ) lies in (Θ_{S,T}) + p^{N+1}Z[G].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShadowReport {
    pub p: u64,
    pub n: u32,
    pub k: u64,
    pub checked: Vec<u64>,
    pub failures: Vec<u64>,
    /// ℓ whose element lies in (Θ_{S,T}) only after adding p^{N+1}
    pub needs_modulus: Vec<u64>,
}

impl ShadowReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// (ℓ^{k−1} − 1)(1 − ψ(ℓ)) with ψ(ℓ) = σ_ℓ, or 0 when ℓ ramifies.
fn eigenvalue_gap(field: &AbelianFieldQ, ell: u64, k: u64) -> Result<GroupRingElement> {
    let g = field.group();
    let one = GroupRingElement::one(g, CoeffRing::Integers);
    let psi = if field.is_ramified(ell) { GroupRingElement::zero(g, CoeffRing::Integers) } else { GroupRingElement::basis(g, CoeffRing::Integers, field.sigma(ell as i64)?) };
    let pow = BigRational::from_integer(num_traits::pow(BigInt::from(ell), (k - 1) as usize)) - rat(1, 1);
    one.sub(&psi)?.scale(&pow)
}

/// Checks the shadow for every prime ℓ ≤ bound with k = 1 + (p − 1)p^N.
pub fn eisenstein_ideal_shadow(field: &AbelianFieldQ, s: &[u64], t: &[u64], p: u64, n: u32, bound: u64) -> Result<ShadowReport> {
    let k = 1 + (p - 1) * p.pow(n);
    let th = theta(field, s, t)?;
    let g = field.group();
    let theta_int = th.element.to_integers()?;
    let exact = ideal_from_generators(g, std::slice::from_ref(&theta_int))?;
    let pn = GroupRingElement::scalar(g, CoeffRing::Integers, BigRational::from_integer(num_traits::pow(BigInt::from(p), (n + 1) as usize)))?;
    let widened = ideal_from_generators(g, &[theta_int, pn])?;
    let mut report = ShadowReport { p, n, k, checked: Vec::new(), failures: Vec::new(), needs_modulus: Vec::new() };
    for ell in crate::arith::primes_up_to(bound) {
        let x = eigenvalue_gap(field, ell, k)?;
        report.checked.push(ell);
        if exact.contains_element(&x)? {
            continue;
        }
        if widened.contains_element(&x)? {
            report.needs_modulus.push(ell);
        } else {
            report.failures.push(ell);
        }
    }
    Ok(report)
}
