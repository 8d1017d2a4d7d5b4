//! Exact arithmetic in Q(ζ_n), elements stored in the power basis modulo Φ_n.

use crate::arith::euler_phi;
use crate::ring::Ring;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

/// Integer coefficients of the n-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in crate::arith::divisors(n) {
        if d == n {
            continue;
        }
        num = exact_divide(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn exact_divide(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = &den[dd];
    assert!(lead.is_one());
    let mut q = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    q
}

/// The field Q(ζ_n) together with a table of reduced powers of ζ_n.
#[derive(Debug, Clone)]
pub struct CyclotomicField {
    n: u64,
    degree: usize,
    powers: Arc<Vec<Vec<BigInt>>>,
}

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

pub type Cyclo = Vec<BigRational>;

impl CyclotomicField {
    pub fn new(n: u64) -> Self {
        let n = n.max(1);
        let phi = cyclotomic_polynomial(n);
        let degree = euler_phi(n) as usize;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x, then reduce x^degree using the monic Φ_n
            let top = cur[degree - 1].clone();
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !top.is_zero() {
                for i in 0..degree {
                    cur[i] -= &top * &phi[i];
                }
            }
        }
        CyclotomicField { n, degree, powers: Arc::new(powers) }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// ζ_n^e.
    pub fn zeta_pow(&self, e: i64) -> Cyclo {
        let e = e.rem_euclid(self.n as i64) as usize;
        self.powers[e].iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Σ_e v[e] ζ^e for an integer vector indexed by exponent mod n.
    pub fn from_exponent_vector(&self, v: &[BigInt]) -> Cyclo {
        let mut acc = vec![BigInt::zero(); self.degree];
        for (e, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (a, p) in acc.iter_mut().zip(&self.powers[e % self.n as usize]) {
                *a += c * p;
            }
        }
        acc.into_iter().map(BigRational::from_integer).collect()
    }

    pub fn from_rational(&self, r: &BigRational) -> Cyclo {
        let mut v = vec![BigRational::zero(); self.degree];
        v[0] = r.clone();
        v
    }

    /// Returns the rational value if the element lies in Q.
    pub fn as_rational(&self, a: &Cyclo) -> Option<BigRational> {
        a[1..].iter().all(|c| c.is_zero()).then(|| a[0].clone())
    }

    pub fn scale(&self, a: &Cyclo, r: &BigRational) -> Cyclo {
        a.iter().map(|c| c * r).collect()
    }
}

impl Ring for CyclotomicField {
    type Elem = Cyclo;
    fn zero(&self) -> Cyclo {
        vec![BigRational::zero(); self.degree]
    }
    fn one(&self) -> Cyclo {
        self.from_rational(&BigRational::one())
    }
    fn from_int(&self, n: &BigInt) -> Cyclo {
        self.from_rational(&BigRational::from_integer(n.clone()))
    }
    fn add(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn neg(&self, a: &Cyclo) -> Cyclo {
        a.iter().map(|x| -x).collect()
    }
    fn mul(&self, a: &Cyclo, b: &Cyclo) -> Cyclo {
        let mut acc = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, p) in self.powers[(i + j) % self.n as usize].iter().enumerate() {
                    if !p.is_zero() {
                        acc[k] += &xy * p;
                    }
                }
            }
        }
        acc
    }
    fn is_zero(&self, a: &Cyclo) -> bool {
        a.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn roots_of_unity_multiply() {
        let f = CyclotomicField::new(12);
        let a = f.zeta_pow(5);
        let b = f.zeta_pow(9);
        assert_eq!(f.mul(&a, &b), f.zeta_pow(2));
        // sum of all 12th roots of unity vanishes
        let s = (0..12).fold(f.zero(), |acc, e| f.add(&acc, &f.zeta_pow(e)));
        assert!(f.is_zero(&s));
        // ζ_3 + ζ_3^2 = -1 inside Q(ζ_12)
        let t = f.add(&f.zeta_pow(4), &f.zeta_pow(8));
        assert_eq!(f.as_rational(&t), Some(rat(-1, 1)));
    }

    #[test]
    fn exponent_vector_matches_sum() {
        let f = CyclotomicField::new(8);
        let v = ints(&[1, 0, 2, 0, 0, 0, 0, -1]);
        let direct = f.add(&f.add(&f.zeta_pow(0), &f.scale(&f.zeta_pow(2), &rat(2, 1))), &f.neg(&f.zeta_pow(7)));
        assert_eq!(f.from_exponent_vector(&v), direct);
    }
}
