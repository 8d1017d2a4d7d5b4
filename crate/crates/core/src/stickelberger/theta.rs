use super::field::{check_primes, lift_along, AbelianFieldQ};
use crate::algebra::{CoeffRing, GroupRingElement};
use crate::arith::{gcd, rat};
use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// ζ_m(0, a): the value at 0 of Σ_{n ≡ a mod m, n > 0} n^{-s}, which is 1/2 − a/m.
pub fn partial_zeta_zero(m: u64, a: u64) -> Result<BigRational> {
    if a < 1 || a > m {
        return Err(invalid(format!("residue {a} outside 1..={m}")));
    }
    if gcd(a as i64, m as i64) != 1 {
        return Err(invalid(format!("gcd({a}, {m}) != 1")));
    }
    Ok(rat(1, 2) - rat(a as i64, m as i64))
}

/// Θ_{S,T} together with the data it was built from. `depletion` lists the
/// finite primes of S; the infinite place is always included.
#[derive(Debug, Clone, PartialEq)]
pub struct StickelbergerElement {
    pub field: AbelianFieldQ,
    pub depletion: Vec<u64>,
    pub smoothing: Vec<u64>,
    pub element: GroupRingElement,
}

impl StickelbergerElement {
    pub fn sharp(&self) -> GroupRingElement {
        self.element.sharp()
    }
}

fn sorted(v: &[u64]) -> Vec<u64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Σ_{a mod f} (1/2 − a/f) σ_a^{-1} at the conductor f.
fn conductor_level(field: &AbelianFieldQ) -> Result<GroupRingElement> {
    let g = field.group();
    let f = field.conductor();
    let mut coeffs = vec![BigRational::from_integer(BigInt::from(0)); g.order()];
    for a in (1..=f).filter(|&a| gcd(a as i64, f as i64) == 1) {
        let s = field.sigma(a as i64)?;
        coeffs[g.inv(s)] += partial_zeta_zero(f, a)?;
    }
    GroupRingElement::from_rationals(g, coeffs)
}

/// 1 − c·σ_p^{-1}.
fn euler_factor(field: &AbelianFieldQ, p: u64, c: i64) -> Result<GroupRingElement> {
    let g = field.group();
    let one = GroupRingElement::one(g, CoeffRing::Rationals);
    let frob = GroupRingElement::basis(g, CoeffRing::Rationals, g.inv(field.frobenius(p)));
    one.sub(&frob.scale(&rat(c, 1))?)
}

/// Θ_{S,T} when S contains every ramified prime.
fn theta_containing_ramified(field: &AbelianFieldQ, s: &[u64], t: &[u64]) -> Result<GroupRingElement> {
    let mut x = conductor_level(field)?;
    for &p in s.iter().filter(|&&p| !field.is_ramified(p)) {
        x = x.mul(&euler_factor(field, p, 1)?)?;
    }
    for &l in t {
        x = x.mul(&euler_factor(field, l, l as i64)?)?;
    }
    Ok(x)
}

/// e_v: the averaging idempotent of the inertia group at v.
fn inertia_idempotent(field: &AbelianFieldQ, v: u64) -> Result<GroupRingElement> {
    let inertia = field.inertia(v);
    let norm = GroupRingElement::sum_of(field.group(), CoeffRing::Rationals, &inertia);
    norm.scale(&rat(1, inertia.len() as i64))
}

/// Θ_{S,T} for the depletion set S ∪ {∞} and smoothing set T.
///
/// When some ramified primes U are missing from S, Θ is assembled from its
/// components Π_{v∈A} e_v Π_{v∈U∖A} (1 − e_v) for A ⊆ U; on the A-component
/// it agrees with Θ of the subfield unramified at A, depleted at S ∪ (U ∖ A).
pub fn theta(field: &AbelianFieldQ, s: &[u64], t: &[u64]) -> Result<StickelbergerElement> {
    check_primes(s, "S")?;
    check_primes(t, "T")?;
    let (s, t) = (sorted(s), sorted(t));
    if let Some(p) = s.iter().find(|p| t.contains(p)) {
        return Err(invalid(format!("{p} lies in both S and T")));
    }
    if let Some(p) = t.iter().find(|&&p| field.is_ramified(p)) {
        return Err(invalid(format!("T contains the ramified prime {p}")));
    }
    let missing: Vec<u64> = field.ramified_primes().into_iter().filter(|p| !s.contains(p)).collect();
    let element = if missing.is_empty() {
        theta_containing_ramified(field, &s, &t)?
    } else {
        let g = field.group();
        let idem: Vec<GroupRingElement> = missing.iter().map(|&v| inertia_idempotent(field, v)).collect::<Result<_>>()?;
        let one = GroupRingElement::one(g, CoeffRing::Rationals);
        let mut total = GroupRingElement::zero(g, CoeffRing::Rationals);
        for mask in 0u32..(1 << missing.len()) {
            let mut eps = one.clone();
            let mut killed = Vec::new();
            let mut s_a = s.clone();
            for (i, &v) in missing.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    eps = eps.mul(&idem[i])?;
                    killed.extend(field.inertia_generators(v));
                } else {
                    eps = eps.mul(&one.sub(&idem[i])?)?;
                    s_a.push(v);
                }
            }
            if eps.is_zero() {
                continue;
            }
            let (sub, map) = field.fixed_field(&killed)?;
            let part = theta_containing_ramified(&sub, &sorted(&s_a), &t)?;
            total = total.add(&eps.mul(&lift_along(&part, &map, g))?)?;
        }
        total
    };
    Ok(StickelbergerElement { field: field.clone(), depletion: s, smoothing: t, element })
}

/// True iff every coefficient of Θ is an integer.
pub fn check_integrality(theta: &StickelbergerElement) -> bool {
    theta.element.is_integral()
}

/// The integer δ_T = Π_{ℓ∈T} (1 − ℓ) by which smoothing scales the augmentation.
pub fn smoothing_degree(t: &[u64]) -> BigInt {
    t.iter().fold(BigInt::one(), |acc, &l| acc * (1 - l as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_characters, Character};
    use crate::cyclotomic::{Cyclo, CyclotomicField};
    use crate::ring::Ring;

    fn el(field: &AbelianFieldQ, c: &[(i64, i64)]) -> GroupRingElement {
        GroupRingElement::from_rationals(field.group(), c.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    #[test]
    fn partial_zeta_examples() {
        assert_eq!(partial_zeta_zero(3, 1).unwrap(), rat(1, 6));
        assert_eq!(partial_zeta_zero(2, 1).unwrap(), rat(0, 1));
        assert_eq!(partial_zeta_zero(4, 3).unwrap(), rat(-1, 4));
        assert!(partial_zeta_zero(4, 2).is_err());
    }

    /// Hurwitz ζ(s, x) by Euler–Maclaurin summation, valid near s = 0.
    fn hurwitz_numeric(s: f64, x: f64) -> f64 {
        let n = 20.0;
        let head: f64 = (0..20).map(|k| (k as f64 + x).powf(-s)).sum();
        let y: f64 = n + x;
        let mut tail = y.powf(1.0 - s) / (s - 1.0) + 0.5 * y.powf(-s);
        let bernoulli = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0];
        let mut rising = s;
        let mut fact = 2.0;
        for (k, b) in bernoulli.iter().enumerate() {
            let k = k as f64 + 1.0;
            tail += b / fact * rising * y.powf(-s - 2.0 * k + 1.0);
            rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
            fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        }
        head + tail
    }

    #[test]
    fn partial_zeta_against_hurwitz_continuation() {
        for m in 1..30u64 {
            for a in (1..=m).filter(|&a| gcd(a as i64, m as i64) == 1) {
                let exact = partial_zeta_zero(m, a).unwrap();
                let approx = hurwitz_numeric(1e-9, a as f64 / m as f64);
                let exact_f = num_traits::ToPrimitive::to_f64(&exact).unwrap();
                assert!((exact_f - approx).abs() < 1e-6, "m={m} a={a}: {exact_f} vs {approx}");
            }
        }
    }

    #[test]
    fn theta_examples() {
        let k3 = AbelianFieldQ::cyclotomic(3).unwrap();
        assert_eq!(theta(&k3, &[3], &[]).unwrap().element, el(&k3, &[(1, 6), (-1, 6)]));
        let t7 = theta(&k3, &[3], &[7]).unwrap();
        assert_eq!(t7.element, el(&k3, &[(-1, 1), (1, 1)]));
        assert!(check_integrality(&t7));
        assert!(!check_integrality(&theta(&k3, &[3], &[]).unwrap()));
        let k4 = AbelianFieldQ::quadratic(-4).unwrap();
        assert_eq!(theta(&k4, &[2], &[]).unwrap().element, el(&k4, &[(1, 4), (-1, 4)]));
        // (1/4)(1 − σ)(1 − 3σ) = (1/4)(1 + 3 − 4σ) = 1 − σ
        let t3 = theta(&k4, &[2], &[3]).unwrap();
        assert_eq!(t3.element, el(&k4, &[(1, 1), (-1, 1)]));
        assert!(check_integrality(&t3));
        assert!(theta(&k4, &[2], &[2]).is_err());
        assert!(theta(&k4, &[3], &[3]).is_err());
    }

    /// Independent L-value oracle: L_{S,T}(ψ, 0) for ψ = χ ∘ (residue ↦ σ)
    /// from the first generalized Bernoulli number of the primitive character.
    fn l_value(field: &AbelianFieldQ, chi: &Character, s: &[u64], t: &[u64], cf: &CyclotomicField) -> Cyclo {
        let f = field.conductor() as i64;
        let psi_raw = |a: i64| -> Option<Cyclo> { field.sigma(a).ok().map(|g| chi.eval_cyclotomic(cf, g)) };
        let one = cf.one();
        let cond = crate::arith::divisors(f as u64)
            .into_iter()
            .find(|&d| (1..=f).filter(|&a| gcd(a, f) == 1 && a % d as i64 == 1 % d as i64).all(|a| psi_raw(a).unwrap() == one))
            .unwrap() as i64;
        // primitive value at a residue prime to the conductor
        let prim = |a: i64| -> Cyclo {
            if gcd(a, cond) != 1 {
                return cf.zero();
            }
            let mut b = a.rem_euclid(cond.max(1));
            while gcd(b, f) != 1 {
                b += cond;
            }
            psi_raw(b).unwrap()
        };
        let base = if cond == 1 {
            cf.from_rational(&rat(-1, 2))
        } else {
            let mut b1 = cf.zero();
            for a in 1..=cond {
                b1 = cf.add(&b1, &cf.scale(&prim(a), &rat(a, cond)));
            }
            cf.neg(&b1)
        };
        let mut v = base;
        for &p in s {
            v = cf.mul(&v, &cf.sub(&one, &prim(p as i64)));
        }
        for &l in t {
            v = cf.mul(&v, &cf.sub(&one, &cf.scale(&prim(l as i64), &rat(l as i64, 1))));
        }
        v
    }

    fn check_character_identity(field: &AbelianFieldQ, s: &[u64], t: &[u64]) {
        let th = theta(field, s, t).unwrap();
        let cf = CyclotomicField::new(field.group().exponent());
        for chi in enumerate_characters(field.group()) {
            let lhs = th.element.eval_character(&chi, &cf);
            let rhs = l_value(field, &chi.inverse(), s, t, &cf);
            assert_eq!(lhs, rhs, "conductor {} S {s:?} T {t:?} χ {:?}", field.conductor(), chi.exponents());
        }
    }

    #[test]
    fn character_identity_with_full_depletion() {
        for (field, s, t) in [
            (AbelianFieldQ::cyclotomic(7).unwrap(), vec![7u64], vec![]),
            (AbelianFieldQ::cyclotomic(12).unwrap(), vec![2, 3, 5], vec![7u64]),
            (AbelianFieldQ::quadratic(-23).unwrap(), vec![23], vec![3]),
            (AbelianFieldQ::biquadratic(-3, 5).unwrap(), vec![3, 5], vec![7, 11]),
            (AbelianFieldQ::from_kernel(35, &[4]).unwrap(), vec![5, 7, 2], vec![3]),
        ] {
            check_character_identity(&field, &s, &t);
        }
    }

    #[test]
    fn character_identity_with_partial_depletion() {
        for (field, s, t) in [
            (AbelianFieldQ::cyclotomic(15).unwrap(), vec![3u64], vec![7u64]),
            (AbelianFieldQ::cyclotomic(15).unwrap(), vec![], vec![]),
            (AbelianFieldQ::biquadratic(-3, 5).unwrap(), vec![], vec![7]),
            (AbelianFieldQ::biquadratic(-4, -3).unwrap(), vec![2], vec![5]),
            (AbelianFieldQ::cyclotomic(9).unwrap(), vec![], vec![]),
            (AbelianFieldQ::quadratic(-23).unwrap(), vec![2], vec![]),
            (AbelianFieldQ::from_kernel(63, &[4]).unwrap(), vec![5], vec![2]),
        ] {
            check_character_identity(&field, &s, &t);
        }
    }

    #[test]
    fn removing_a_ramified_prime_from_depletion() {
        // Θ_{S∪{v}} = Θ_S · (1 − σ_v^{-1} e_v) for ramified v ∉ S
        let h = AbelianFieldQ::biquadratic(-3, 5).unwrap();
        let full = theta(&h, &[3, 5], &[7]).unwrap().element;
        let partial = theta(&h, &[5], &[7]).unwrap().element;
        let g = h.group();
        let e = inertia_idempotent(&h, 3).unwrap();
        let factor = GroupRingElement::one(g, CoeffRing::Rationals).sub(&e.shift(g.inv(h.frobenius(3)))).unwrap();
        assert_eq!(partial.mul(&factor).unwrap(), full);
    }

    #[test]
    fn pushing_to_a_subfield_commutes() {
        // H ⊂ Q(ζ_m): restriction of Θ over Q(ζ_m) equals Θ over H when S ⊇ ram(Q(ζ_m))
        for (m, kernel) in [(15u64, vec![4u64]), (21, vec![4]), (20, vec![9]), (13, vec![3])] {
            let big = AbelianFieldQ::cyclotomic(m).unwrap();
            let s = big.ramified_primes();
            let t = vec![if m % 11 == 0 { 17 } else { 11 }];
            let th = theta(&big, &s, &t).unwrap().element;
            let kgens: Vec<Elem> = kernel.iter().map(|&k| big.sigma(k as i64).unwrap()).collect();
            let (sub, map) = big.fixed_field(&kgens).unwrap();
            let pushed = super::super::field::push_forward(&th, &map, sub.group());
            assert_eq!(pushed, theta(&sub, &s, &t).unwrap().element, "m = {m}");
        }
    }

    use crate::algebra::Elem;

    #[test]
    fn trivial_zeros() {
        // ψ(G_v) = 1 for a finite v ∈ S forces ψ(Θ) = 0
        let h = AbelianFieldQ::biquadratic(-3, -4).unwrap();
        let s = [2u64, 3, 13];
        let th = theta(&h, &s, &[5]).unwrap();
        let cf = CyclotomicField::new(2);
        for chi in enumerate_characters(h.group()) {
            let vanishes = s.iter().any(|&v| {
                let d = h.place_data(v);
                chi.kills(&h.group().subgroup(&d.decomposition))
            });
            if vanishes {
                assert_eq!(th.element.eval_character(&chi, &cf), cf.zero());
            }
        }
    }
}
