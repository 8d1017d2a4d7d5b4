use crate::error::{invalid, Error, Result};
use crate::linalg::{smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Finite abelian group Z/d_1 × … × Z/d_k with d_i ≥ 2 and d_i | d_{i+1}.
///
/// Elements are addressed by their index in lexicographic order of the
/// coordinate vectors (first coordinate most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariants: Vec<u64>,
}

pub type Elem = usize;

impl FiniteAbelianGroup {
    pub fn new(invariants: Vec<u64>) -> Result<Self> {
        if invariants.iter().any(|&d| d < 2) {
            return Err(invalid(format!("invariant factors must be >= 2: {invariants:?}")));
        }
        if invariants.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(invalid(format!("invariant factors must form a divisibility chain: {invariants:?}")));
        }
        Ok(FiniteAbelianGroup { invariants })
    }

    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            FiniteAbelianGroup { invariants: vec![n] }
        }
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { invariants: Vec::new() }
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn order(&self) -> usize {
        self.invariants.iter().product::<u64>() as usize
    }

    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> Elem {
        0
    }

    pub fn coords(&self, mut idx: Elem) -> Vec<u64> {
        let mut v = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.invariants[i] as usize;
            v[i] = (idx % d) as u64;
            idx /= d;
        }
        v
    }

    /// Index of the element with the given coordinates (reduced mod d_i).
    pub fn index(&self, coords: &[i64]) -> Elem {
        coords.iter().zip(&self.invariants).fold(0usize, |acc, (&c, &d)| acc * d as usize + c.rem_euclid(d as i64) as usize)
    }

    pub fn generator(&self, i: usize) -> Elem {
        let mut c = vec![0i64; self.rank()];
        c[i] = 1;
        self.index(&c)
    }

    pub fn op(&self, a: Elem, b: Elem) -> Elem {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let v: Vec<i64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) as i64).collect();
        self.index(&v)
    }

    pub fn inv(&self, a: Elem) -> Elem {
        let v: Vec<i64> = self.coords(a).iter().map(|&x| -(x as i64)).collect();
        self.index(&v)
    }

    pub fn pow(&self, a: Elem, k: i64) -> Elem {
        let v: Vec<i64> = self.coords(a).iter().zip(&self.invariants).map(|(&x, &d)| ((x as i128 * k as i128).rem_euclid(d as i128)) as i64).collect();
        self.index(&v)
    }

    pub fn order_of(&self, a: Elem) -> u64 {
        self.coords(a).iter().zip(&self.invariants).fold(1u64, |acc, (&x, &d)| acc.lcm(&(d / d.gcd(&x))))
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order()
    }

    /// Sorted list of elements of the subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.op(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    /// Quotient of this group by the subgroup generated by `gens`.
    pub fn quotient(&self, gens: &[Elem]) -> AbelianQuotient {
        let n = self.rank();
        let mut rels: IntMatrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::from(self.invariants[i]) } else { BigInt::zero() }).collect())
            .collect();
        for &g in gens {
            rels.push(self.coords(g).into_iter().map(BigInt::from).collect());
        }
        AbelianQuotient::from_relations(n, &rels).expect("quotient of a finite group is finite")
    }
}

/// A finite abelian group presented as Z^n / (relations), with the image of
/// each standard generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianQuotient {
    pub group: FiniteAbelianGroup,
    /// rows: coordinates (in `group`) of the images of the n generators
    gen_images: Vec<Vec<i64>>,
}

impl AbelianQuotient {
    pub fn from_relations(ngens: usize, relations: &IntMatrix) -> Result<Self> {
        if ngens == 0 {
            return Ok(AbelianQuotient { group: FiniteAbelianGroup::trivial(), gen_images: Vec::new() });
        }
        let snf = smith_normal_form(relations, ngens);
        let r = snf.diagonal.len();
        if r < ngens || snf.diagonal.iter().any(|d| d.is_zero()) {
            return Err(Error::InvalidInput("relations do not define a finite group".into()));
        }
        let keep: Vec<usize> = (0..ngens).filter(|&i| snf.diagonal[i] != BigInt::from(1)).collect();
        let invariants: Vec<u64> = keep.iter().map(|&i| snf.diagonal[i].to_u64().expect("group too large")).collect();
        let group = FiniteAbelianGroup::new(invariants.clone())?;
        // x ↦ x V in row convention
        let gen_images = (0..ngens)
            .map(|j| keep.iter().zip(&invariants).map(|(&i, &d)| snf.v[j][i].mod_floor(&BigInt::from(d)).to_i64().unwrap()).collect())
            .collect();
        Ok(AbelianQuotient { group, gen_images })
    }

    pub fn ngens(&self) -> usize {
        self.gen_images.len()
    }

    /// Image of the vector Σ x_j e_j.
    pub fn image(&self, x: &[i64]) -> Elem {
        let k = self.group.rank();
        let mut acc = vec![0i128; k];
        for (xj, img) in x.iter().zip(&self.gen_images) {
            for (a, &b) in acc.iter_mut().zip(img) {
                *a += *xj as i128 * b as i128;
            }
        }
        let v: Vec<i64> = acc.iter().zip(self.group.invariants()).map(|(&a, &d)| a.rem_euclid(d as i128) as i64).collect();
        self.group.index(&v)
    }

    pub fn gen_image(&self, j: usize) -> Elem {
        self.group.index(&self.gen_images[j])
    }
}
