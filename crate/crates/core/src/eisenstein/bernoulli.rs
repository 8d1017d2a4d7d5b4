use super::dirichlet::DirichletCharacter;
use crate::arith::{lcm, rat};
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{invalid, Result};
use crate::ring::Ring;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// B_0, …, B_n with B_1 = −1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n as u64 {
        // Σ_{j<m+1} C(m+1, j) B_j = 0
        let s: BigRational = (0..m).map(|j| BigRational::from_integer(binomial(m + 1, j)) * &b[j as usize]).sum();
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// B_k(x) = Σ_j C(k, j) B_j x^{k−j}.
pub fn bernoulli_polynomial(k: u64, x: &BigRational) -> BigRational {
    polynomial_with(&bernoulli_numbers(k as usize), k, x)
}

fn polynomial_with(b: &[BigRational], k: u64, x: &BigRational) -> BigRational {
    (0..=k).map(|j| BigRational::from_integer(binomial(k, j)) * &b[j as usize] * num_traits::pow(x.clone(), (k - j) as usize)).sum()
}

/// The field Q(ζ_E) holding the values of χ.
pub fn value_field(chi: &DirichletCharacter) -> CyclotomicField {
    CyclotomicField::new(chi.value_order())
}

/// B_{k,χ} = f^{k−1} Σ_{a=1}^{f} χ(a) B_k(a/f) with f the modulus, in Q(ζ_E).
pub fn generalized_bernoulli(chi: &DirichletCharacter, k: u64) -> Cyclo {
    let field = value_field(chi);
    let f = chi.modulus().max(1);
    let b = bernoulli_numbers(k as usize);
    let mut acc = field.zero();
    for a in 1..=f {
        if let Some(v) = chi.value_in(&field, a as i64) {
            let bk = polynomial_with(&b, k, &rat(a as i64, f as i64));
            acc = field.add(&acc, &field.scale(&v, &bk));
        }
    }
    field.scale(&acc, &BigRational::from_integer(num_traits::pow(BigInt::from(f), (k - 1) as usize)))
}

/// L(χ, 1 − k) = −B_{k,χ}/k for primitive χ, in Q(ζ_E).
pub fn l_at_nonpositive(chi: &DirichletCharacter, k: u64) -> Result<Cyclo> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if !chi.is_primitive() {
        return Err(invalid(format!("character mod {} is not primitive (conductor {})", chi.modulus(), chi.conductor())));
    }
    let field = value_field(chi);
    Ok(field.scale(&generalized_bernoulli(chi, k), &rat(-1, k as i64)))
}

/// Rational value of L(χ, 1 − k) for a real primitive character.
pub fn l_at_nonpositive_rational(chi: &DirichletCharacter, k: u64) -> Result<BigRational> {
    let field = value_field(chi);
    let v = l_at_nonpositive(chi, k)?;
    field.as_rational(&v).ok_or_else(|| invalid("L-value is not rational"))
}

/// L_S(χ, 1 − k) = L(χ, 1 − k) Π_{p ∈ S} (1 − χ(p) p^{k−1}) in Q(ζ_E).
pub fn depleted_l_value(chi: &DirichletCharacter, k: u64, s: &[u64]) -> Result<Cyclo> {
    let field = value_field(chi);
    let mut v = l_at_nonpositive(chi, k)?;
    for &p in s {
        if let Some(x) = chi.value_in(&field, p as i64) {
            let pk = BigRational::from_integer(num_traits::pow(BigInt::from(p), (k - 1) as usize));
            v = field.mul(&v, &field.sub(&field.one(), &field.scale(&x, &pk)));
        }
    }
    Ok(v)
}

/// The Gauss sum τ(χ) = Σ_{a mod f} χ(a) ζ_f^a, carried as a formal token
/// unless an exact value is requested.
#[derive(Debug, Clone)]
pub struct GaussSum {
    pub character: DirichletCharacter,
    /// Q(ζ_L) with L = lcm(E, f), and τ(χ) in it
    pub exact: Option<(CyclotomicField, Cyclo)>,
}

/// Conductor bound for exact evaluation.
pub const EXACT_GAUSS_SUM_BOUND: u64 = 40;

impl GaussSum {
    pub fn symbolic(chi: &DirichletCharacter) -> Self {
        GaussSum { character: chi.clone(), exact: None }
    }

    pub fn exact(chi: &DirichletCharacter) -> Result<Self> {
        let f = chi.modulus();
        if f > EXACT_GAUSS_SUM_BOUND {
            return Err(invalid(format!("exact Gauss sums only for conductor ≤ {EXACT_GAUSS_SUM_BOUND}")));
        }
        let l = lcm(chi.value_order() as i64, f as i64) as u64;
        let field = CyclotomicField::new(l);
        let mut acc = field.zero();
        for a in 0..f {
            if let Some(v) = chi.value_in(&field, a as i64) {
                acc = field.add(&acc, &field.mul(&v, &field.zeta_pow((a * (l / f)) as i64)));
            }
        }
        Ok(GaussSum { character: chi.clone(), exact: Some((field, acc)) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn bernoulli_oracle() {
        let b = bernoulli_numbers(12);
        let expected = [(0, rat(1, 1)), (1, rat(-1, 2)), (2, rat(1, 6)), (4, rat(-1, 30)), (6, rat(1, 42)), (8, rat(-1, 30)), (10, rat(5, 66)), (12, rat(-691, 2730))];
        for (i, v) in expected {
            assert_eq!(b[i], v);
        }
        assert!(b[3].is_zero() && b[11].is_zero());
    }

    #[test]
    fn l_value_examples() {
        let triv = DirichletCharacter::trivial(1);
        assert_eq!(l_at_nonpositive_rational(&triv, 2).unwrap(), rat(-1, 12));
        assert_eq!(l_at_nonpositive_rational(&triv, 1).unwrap(), rat(-1, 2));
        assert_eq!(l_at_nonpositive_rational(&triv, 4).unwrap(), rat(1, 120));
        assert_eq!(l_at_nonpositive_rational(&DirichletCharacter::kronecker(-4).unwrap(), 1).unwrap(), rat(1, 2));
        assert_eq!(l_at_nonpositive_rational(&DirichletCharacter::kronecker(-3).unwrap(), 1).unwrap(), rat(1, 3));
        assert!(l_at_nonpositive(&DirichletCharacter::kronecker(-3).unwrap().induce(6).unwrap(), 1).is_err());
    }

    #[test]
    fn first_bernoulli_matches_direct_sum() {
        // for χ ≠ 1: B_{1,χ} = (1/f) Σ_{a=1}^{f} χ(a) a
        for f in 3..=40u64 {
            for chi in DirichletCharacter::primitive_of_conductor(f) {
                let field = value_field(&chi);
                let mut direct = field.zero();
                for a in 1..=f {
                    if let Some(v) = chi.value_in(&field, a as i64) {
                        direct = field.add(&direct, &field.scale(&v, &rat(a as i64, f as i64)));
                    }
                }
                assert_eq!(generalized_bernoulli(&chi, 1), direct);
            }
        }
    }

    #[test]
    fn vanishing_follows_parity() {
        // B_{k,χ} = 0 exactly when χ(−1) ≠ (−1)^k (k ≥ 2, or k = 1 with χ ≠ 1)
        for f in [3u64, 4, 5, 7, 8, 11, 12, 13] {
            for chi in DirichletCharacter::primitive_of_conductor(f) {
                for k in 1..=6u64 {
                    let parity_matches = chi.is_odd() == (k % 2 == 1);
                    let b = generalized_bernoulli(&chi, k);
                    assert_eq!(b.iter().all(|c| c.is_zero()), !parity_matches, "f={f} k={k}");
                }
            }
        }
    }

    #[test]
    fn gauss_sum_norm() {
        for f in 3..=EXACT_GAUSS_SUM_BOUND {
            for chi in DirichletCharacter::primitive_of_conductor(f) {
                let (field, t) = GaussSum::exact(&chi).unwrap().exact.unwrap();
                let (_, tbar) = GaussSum::exact(&chi.inverse()).unwrap().exact.unwrap();
                let sign = if chi.is_odd() { -1 } else { 1 };
                assert_eq!(field.mul(&t, &tbar), field.from_rational(&rat(sign * f as i64, 1)), "f = {f}");
            }
        }
    }
}
