//! Determinants, minors, compound matrices and higher adjugates over any commutative ring.

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Dense matrix with entries in a ring given by context.
#[derive(Debug, Clone)]
pub struct Matrix<R: Ring> {
    pub ring: R,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<R::Elem>>,
}

impl<R: Ring> PartialEq for Matrix<R> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl<R: Ring> Matrix<R> {
    pub fn new(ring: R, entries: Vec<Vec<R::Elem>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(Matrix { ring, rows, cols, entries })
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let entries = (0..n).map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
        Matrix { ring, rows: n, cols: n, entries }
    }

    pub fn scalar(ring: R, n: usize, c: &R::Elem) -> Self {
        let entries = (0..n).map(|i| (0..n).map(|j| if i == j { c.clone() } else { ring.zero() }).collect()).collect();
        Matrix { ring, rows: n, cols: n, entries }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Structural("dimension mismatch in matrix product".into()));
        }
        let r = &self.ring;
        let entries = (0..self.rows)
            .map(|i| {
                (0..other.cols)
                    .map(|j| (0..self.cols).fold(r.zero(), |acc, k| r.add(&acc, &r.mul(&self.entries[i][k], &other.entries[k][j]))))
                    .collect()
            })
            .collect();
        Ok(Matrix { ring: self.ring.clone(), rows: self.rows, cols: other.cols, entries })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let entries = rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect();
        Matrix { ring: self.ring.clone(), rows: rows.len(), cols: cols.len(), entries }
    }

    /// Division-free determinant (Bird's iteration), valid over any commutative ring.
    pub fn det(&self) -> Result<R::Elem> {
        if self.rows != self.cols {
            return Err(Error::Structural("determinant of a non-square matrix".into()));
        }
        Ok(det_entries(&self.ring, &self.entries))
    }

    /// C_r(A): all r×r minors, rows and columns indexed by r-subsets in lexicographic order.
    pub fn compound(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.rows.min(self.cols) {
            return Err(Error::Range(format!("compound order {r} outside 1..={}", self.rows.min(self.cols))));
        }
        let rs = subsets(self.rows, r);
        let cs = subsets(self.cols, r);
        let entries = rs.iter().map(|i| cs.iter().map(|j| det_entries(&self.ring, &self.submatrix(i, j).entries)).collect()).collect();
        Ok(Matrix { ring: self.ring.clone(), rows: rs.len(), cols: cs.len(), entries })
    }

    /// Higher adjugate adj_r(A) with adj_r(A)·C_r(A) = det(A)·I.
    pub fn higher_adjugate(&self, r: usize) -> Result<Self> {
        let n = self.rows;
        if self.rows != self.cols {
            return Err(Error::Structural("adjugate of a non-square matrix".into()));
        }
        if r == 0 || r > n {
            return Err(Error::Range(format!("adjugate order {r} outside 1..={n}")));
        }
        let subs = subsets(n, r);
        let ring = &self.ring;
        let entries = subs
            .iter()
            .map(|i| {
                subs.iter()
                    .map(|j| {
                        let (ic, jc) = (complement(n, i), complement(n, j));
                        let m = det_entries(ring, &self.submatrix(&jc, &ic).entries);
                        let s: usize = i.iter().chain(j.iter()).map(|x| x + 1).sum();
                        if s % 2 == 0 {
                            m
                        } else {
                            ring.neg(&m)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Matrix { ring: ring.clone(), rows: subs.len(), cols: subs.len(), entries })
    }

    /// (C_r(A), adj_r(A)) after checking adj_r(A)·C_r(A) = det(A)·I.
    pub fn compound_and_adjugate(&self, r: usize) -> Result<(Self, Self)> {
        let c = self.compound(r)?;
        let a = self.higher_adjugate(r)?;
        let lhs = a.mul(&c)?;
        let rhs = Matrix::scalar(self.ring.clone(), c.rows, &self.det()?);
        if lhs != rhs {
            return Err(Error::Structural("adj_r(A)·C_r(A) ≠ det(A)·I".into()));
        }
        Ok((c, a))
    }

    /// All k×k minors (rows and columns in lexicographic subset order).
    pub fn minors(&self, k: usize) -> Vec<R::Elem> {
        if k == 0 {
            return vec![self.ring.one()];
        }
        if k > self.rows || k > self.cols {
            return Vec::new();
        }
        let rs = subsets(self.rows, k);
        let cs = subsets(self.cols, k);
        rs.iter().flat_map(|i| cs.iter().map(move |j| (i, j))).map(|(i, j)| det_entries(&self.ring, &self.submatrix(i, j).entries)).collect()
    }
}

fn det_entries<R: Ring>(ring: &R, a: &[Vec<R::Elem>]) -> R::Elem {
    let n = a.len();
    if n == 0 {
        return ring.one();
    }
    let mut x: Vec<Vec<R::Elem>> = a.to_vec();
    for _ in 1..n {
        // μ(X): strict upper part of X, diagonal -Σ_{j>i} X_jj
        let mut mu = vec![vec![ring.zero(); n]; n];
        let mut tail = ring.zero();
        for i in (0..n).rev() {
            mu[i][i] = ring.neg(&tail);
            tail = ring.add(&tail, &x[i][i]);
            for j in i + 1..n {
                mu[i][j] = x[i][j].clone();
            }
        }
        x = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (i..n).fold(ring.zero(), |acc, k| if ring.is_zero(&mu[i][k]) { acc } else { ring.add(&acc, &ring.mul(&mu[i][k], &a[k][j])) }))
                    .collect()
            })
            .collect();
    }
    if n % 2 == 1 {
        x[0][0].clone()
    } else {
        ring.neg(&x[0][0])
    }
}

/// r-subsets of {0..n-1} in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !s.contains(i)).collect()
}
