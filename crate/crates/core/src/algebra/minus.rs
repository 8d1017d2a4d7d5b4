use super::group::{Elem, FiniteAbelianGroup};
use super::group_ring::{CoeffRing, GroupRingElement};
use crate::error::{invalid, structural, Result};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// The quotient ring Z[1/2][G]/(c + 1) for an element c of order 2.
///
/// Basis: one representative per coset {g, gc}, the one with smaller index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinusQuotient {
    group: FiniteAbelianGroup,
    conj: Elem,
    reps: Vec<Elem>,
    /// for each group element: (position of its representative, sign)
    class_of: Vec<(usize, i8)>,
}

impl MinusQuotient {
    pub fn new(group: &FiniteAbelianGroup, conj: Elem) -> Result<Self> {
        if group.order_of(conj) != 2 {
            return Err(invalid("complex conjugation must have order exactly 2"));
        }
        let mut reps = Vec::new();
        let mut class_of = vec![(0usize, 0i8); group.order()];
        for g in group.elements() {
            let partner = group.op(g, conj);
            if g < partner {
                class_of[g] = (reps.len(), 1);
                class_of[partner] = (reps.len(), -1);
                reps.push(g);
            }
        }
        Ok(MinusQuotient { group: group.clone(), conj, reps, class_of })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn conj(&self) -> Elem {
        self.conj
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[Elem] {
        &self.reps
    }

    /// (position, sign) with g ≡ sign · reps[position].
    pub fn class_of(&self, g: Elem) -> (usize, i8) {
        self.class_of[g]
    }

    pub fn project(&self, x: &GroupRingElement) -> Result<MinusElement> {
        if x.group() != &self.group {
            return Err(structural("element lives in a different group ring"));
        }
        if let CoeffRing::ModPrimePower { p: 2, .. } = x.ring() {
            return Err(invalid("2 must be invertible in the coefficient ring"));
        }
        let mut c = vec![BigRational::zero(); self.dim()];
        for (g, a) in x.coeffs().iter().enumerate() {
            let (pos, s) = self.class_of[g];
            if s > 0 {
                c[pos] += a;
            } else {
                c[pos] -= a;
            }
        }
        Ok(MinusElement { quotient: self.clone(), coeffs: c })
    }

    /// Lift placing coefficients on the representatives.
    pub fn lift(&self, coeffs: &[BigRational]) -> GroupRingElement {
        let mut v = vec![BigRational::zero(); self.group.order()];
        for (pos, c) in coeffs.iter().enumerate() {
            v[self.reps[pos]] = c.clone();
        }
        GroupRingElement::from_rationals(&self.group, v).expect("sizes match")
    }

    /// Coordinates of g · (Σ c_r r).
    pub fn act(&self, g: Elem, coeffs: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim()];
        for (pos, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (q, s) = self.class_of[self.group.op(self.reps[pos], g)];
            if s > 0 {
                out[q] += c;
            } else {
                out[q] -= c;
            }
        }
        out
    }

    pub fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let prod = self.lift(a).mul(&self.lift(b)).expect("same ring");
        self.project(&prod).expect("same group").coeffs
    }

    /// Matrix of multiplication by x on the quotient; column j is x · r_j.
    pub fn multiplication_matrix(&self, x: &MinusElement) -> Vec<Vec<BigRational>> {
        let n = self.dim();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for j in 0..n {
            let mut unit = vec![BigRational::zero(); n];
            unit[j] = BigRational::from_integer(1.into());
            let col = self.mul(&x.coeffs, &unit);
            for i in 0..n {
                m[i][j] = col[i].clone();
            }
        }
        m
    }
}

/// Element of the minus quotient in representative coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinusElement {
    quotient: MinusQuotient,
    pub coeffs: Vec<BigRational>,
}

impl MinusElement {
    pub fn quotient(&self) -> &MinusQuotient {
        &self.quotient
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn rational_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::from_integer(1.into());
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= &a[k][k];
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    det
}
