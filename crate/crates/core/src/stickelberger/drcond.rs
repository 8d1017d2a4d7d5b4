use super::field::AbelianFieldQ;
use crate::arith::valuation;
use crate::cyclotomic::cyclotomic_polynomial;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

/// Outcome of testing that no root of unity ζ ≠ 1 of H is ≡ 1 modulo every
/// prime above T.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DrCondReport {
    pub holds: bool,
    /// order of the group of roots of unity of H
    pub roots_of_unity: u64,
    /// exponents j (0 < j < w) with ζ_w^j ≡ 1 at all primes above T
    pub offending: Vec<u64>,
    /// T contains two primes of different residue characteristic
    pub two_characteristics: bool,
}

/// x^j − 1 mod (Φ(x), ℓ) vanishes, with Φ monic over F_ℓ.
fn divides_power_minus_one(phi: &[i64], j: u64, l: i64) -> bool {
    let deg = phi.len() - 1;
    if deg == 0 {
        return true;
    }
    // r = x^j mod Φ by repeated multiplication by x
    let mut r = vec![0i64; deg];
    r[0] = 1;
    for _ in 0..j {
        let top = r[deg - 1];
        for i in (1..deg).rev() {
            r[i] = r[i - 1];
        }
        r[0] = 0;
        for (i, c) in r.iter_mut().enumerate() {
            *c = (*c - top * phi[i]).rem_euclid(l);
        }
    }
    r[0] = (r[0] - 1).rem_euclid(l);
    r.iter().all(|&c| c == 0)
}

/// ζ_w^j − 1 lies in every prime of Z[ζ_w] above ℓ, i.e. in the radical of ℓ.
///
/// Modulo ℓ the radical of Φ_w is Φ_{w'} with w' the prime-to-ℓ part of w.
fn congruent_to_one_above(w: u64, j: u64, l: u64) -> bool {
    let w_prime = w / l.pow(valuation(w, l));
    let phi: Vec<i64> = cyclotomic_polynomial(w_prime).iter().map(|c| c.mod_floor(&(l as i64).into()).to_i64().unwrap()).collect();
    divides_power_minus_one(&phi, j % w_prime, l as i64)
}

/// Checks the condition on T by reducing μ(H) modulo the primes above T.
/// All primes of Q(ζ_w) ⊆ H above ℓ are hit by primes of H, so it suffices
/// to reduce in Z[ζ_w].
pub fn check_drcond(field: &AbelianFieldQ, t: &[u64]) -> DrCondReport {
    let w = field.roots_of_unity_order();
    let offending: Vec<u64> = (1..w).filter(|&j| t.iter().all(|&l| congruent_to_one_above(w, j, l))).collect();
    let two_characteristics = t.iter().any(|&a| t.iter().any(|&b| a != b));
    DrCondReport { holds: offending.is_empty(), roots_of_unity: w, offending, two_characteristics }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;

    #[test]
    fn examples() {
        let k3 = AbelianFieldQ::cyclotomic(3).unwrap();
        let r = check_drcond(&k3, &[]);
        assert!(!r.holds);
        assert_eq!(r.offending, vec![1, 2, 3, 4, 5]);
        assert!(check_drcond(&k3, &[7]).holds);
        let r = check_drcond(&k3, &[2]);
        assert!(!r.holds);
        assert_eq!(r.offending, vec![3]);
        let h = AbelianFieldQ::biquadratic(-4, 5).unwrap();
        let r = check_drcond(&h, &[3, 7]);
        assert!(r.holds && r.two_characteristics);
    }

    #[test]
    fn brute_force_reduction_for_q_zeta3_mod_7() {
        // in F_7, ζ_3 ↦ 2: the six roots of unity ±1, ±2, ±4 are distinct and only 1 ≡ 1
        let roots: Vec<i64> = (0..6).map(|j| crate::arith::mod_pow(3, j, 7)).collect();
        let mut sorted = roots.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
        assert_eq!(roots.iter().filter(|&&r| r == 1).count(), 1);
        assert!(check_drcond(&AbelianFieldQ::cyclotomic(3).unwrap(), &[7]).holds);
    }

    #[test]
    fn matches_structural_criterion() {
        // a nontrivial ζ is ≡ 1 above ℓ iff its order is a power of ℓ, so the
        // condition fails iff T is empty or T = {ℓ} with ℓ | w
        let fields = [
            AbelianFieldQ::cyclotomic(3).unwrap(),
            AbelianFieldQ::cyclotomic(12).unwrap(),
            AbelianFieldQ::cyclotomic(8).unwrap(),
            AbelianFieldQ::quadratic(-23).unwrap(),
            AbelianFieldQ::biquadratic(-3, 5).unwrap(),
        ];
        let primes = primes_up_to(30);
        for f in &fields {
            let w = f.roots_of_unity_order();
            let usable: Vec<u64> = primes.iter().copied().filter(|&p| !f.is_ramified(p)).collect();
            assert!(!check_drcond(f, &[]).holds);
            for &l in &usable {
                assert_eq!(check_drcond(f, &[l]).holds, w % l != 0, "w={w} l={l}");
                for &m in usable.iter().filter(|&&m| m > l) {
                    assert!(check_drcond(f, &[l, m]).holds);
                }
            }
        }
    }
}
