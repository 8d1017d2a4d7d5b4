//! Exact integer linear algebra: Hermite and Smith normal forms, kernels, lattice solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn transpose(a: &IntMatrix, cols: usize) -> IntMatrix {
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize, cols: usize) -> IntMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(x).fold(BigInt::zero(), |acc, (r, v)| acc + r * v)).collect()
}

fn row_sub_mul(rows: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (a, b) in t.iter_mut().zip(s.iter()) {
        if !b.is_zero() {
            *a -= q * b;
        }
    }
}

/// Row Hermite normal form: echelon rows with positive pivots and entries above
/// each pivot reduced into [0, pivot). Zero rows are dropped.
pub fn hnf(rows: &[Vec<BigInt>], ncols: usize) -> IntMatrix {
    let mut a: IntMatrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for col in 0..ncols {
        if r >= a.len() {
            break;
        }
        loop {
            let piv = (r..a.len()).filter(|&i| !a[i][col].is_zero()).min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()));
            let Some(p) = piv else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][col].is_zero() {
                    let q = a[i][col].div_floor(&a[r][col]);
                    row_sub_mul(&mut a, i, r, &q);
                    if !a[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][col].is_zero() {
            if a[r][col].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = a[i][col].div_floor(&a[r][col]);
                row_sub_mul(&mut a, i, r, &q);
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

fn pivot_col(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Integer coefficients c with Σ c_i rows_i = x, for rows in echelon form.
pub fn solve_integral(echelon: &IntMatrix, x: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rem = x.to_vec();
    let mut coeffs = Vec::with_capacity(echelon.len());
    for row in echelon {
        let p = pivot_col(row)?;
        let (q, r) = rem[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for (a, b) in rem.iter_mut().zip(row) {
            *a -= &q * b;
        }
        coeffs.push(q);
    }
    rem.iter().all(|v| v.is_zero()).then_some(coeffs)
}

/// Rational coefficients c with Σ c_i rows_i = x, for rows in echelon form.
pub fn solve_rational(echelon: &IntMatrix, x: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut rem = x.to_vec();
    let mut coeffs = Vec::with_capacity(echelon.len());
    for row in echelon {
        let p = pivot_col(row)?;
        let q = &rem[p] / BigRational::from_integer(row[p].clone());
        for (a, b) in rem.iter_mut().zip(row) {
            *a -= &q * BigRational::from_integer(b.clone());
        }
        coeffs.push(q);
    }
    rem.iter().all(|v| v.is_zero()).then_some(coeffs)
}

/// Z-basis (in HNF) of {x ∈ Z^n : A x = 0} for a matrix with n columns.
pub fn integer_kernel(a: &IntMatrix, n: usize) -> IntMatrix {
    let k = a.len();
    let aug: IntMatrix = (0..n)
        .map(|i| {
            let mut row: Vec<BigInt> = a.iter().map(|r| r[i].clone()).collect();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let h = hnf(&aug, k + n);
    let kernel: IntMatrix = h.into_iter().filter(|row| row[..k].iter().all(|x| x.is_zero())).map(|row| row[k..].to_vec()).collect();
    hnf(&kernel, n)
}

/// Solutions x ∈ Z^n of A x ≡ 0 (mod m_i) row by row, as an HNF lattice basis.
pub fn congruence_kernel(a: &IntMatrix, moduli: &[BigInt], n: usize) -> IntMatrix {
    let k = a.len();
    let ext: IntMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { -moduli[i].clone() } else { BigInt::zero() }));
            r
        })
        .collect();
    let ker = integer_kernel(&ext, n + k);
    let proj: IntMatrix = ker.into_iter().map(|r| r[..n].to_vec()).collect();
    hnf(&proj, n)
}

/// Determinant by fraction-free Gaussian elimination.
pub fn det(a: &IntMatrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Smith normal form with unimodular transforms: u * a * v = d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix, ncols: usize) -> SmithForm {
    let m = a.len();
    let n = ncols;
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let swap_cols = |mat: &mut IntMatrix, i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };
    // column op: col_j -= q * col_i
    let col_sub = |mat: &mut IntMatrix, j: usize, i: usize, q: &BigInt| {
        for row in mat.iter_mut() {
            let t = &row[i] * q;
            row[j] -= t;
        }
    };
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[i][j].is_zero() && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);
            let mut clean = true;
            for i in t + 1..m {
                if !d[i][t].is_zero() {
                    let q = d[i][t].div_floor(&d[t][t]);
                    row_sub_mul(&mut d, i, t, &q);
                    row_sub_mul(&mut u, i, t, &q);
                    if !d[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !d[t][j].is_zero() {
                    let q = d[t][j].div_floor(&d[t][t]);
                    col_sub(&mut d, j, t, &q);
                    col_sub(&mut v, j, t, &q);
                    if !d[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[i][j] % &d[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    // row_t += row_i
                    let q = BigInt::from(-1);
                    row_sub_mul(&mut d, t, i, &q);
                    row_sub_mul(&mut u, t, i, &q);
                }
                None => break,
            }
        }
        if t < m && t < n && d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let diagonal = (0..m.min(n)).map(|i| d[i][i].clone()).collect();
    SmithForm { diagonal, d, u, v }
}

impl SmithForm {
    /// Checks u * a * v = d, the divisibility chain and unimodularity.
    pub fn verify(&self, a: &IntMatrix, ncols: usize) -> bool {
        let m = a.len();
        let uav = mat_mul(&mat_mul(&self.u, a, m, ncols), &self.v, ncols, ncols);
        if uav != self.d {
            return false;
        }
        let off_diag_zero = self.d.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| i == j || x.is_zero()));
        let chain = self.diagonal.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        });
        let nonneg = self.diagonal.iter().all(|x| !x.is_negative());
        off_diag_zero && chain && nonneg && det(&self.u).abs().is_one() && det(&self.v).abs().is_one()
    }
}

/// Canonical representative of x modulo a full-rank upper-triangular HNF lattice.
pub fn reduce_mod_hnf(h: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    let mut r = x.to_vec();
    for row in h {
        let p = pivot_col(row).expect("nonzero row");
        let q = r[p].div_floor(&row[p]);
        if !q.is_zero() {
            for (a, b) in r.iter_mut().zip(row) {
                *a -= &q * b;
            }
        }
    }
    r
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(a: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let aug: IntMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let h = hnf(&aug, 2 * n);
    assert!(h.len() == n && (0..n).all(|i| h[i][i].is_one()), "matrix is not unimodular");
    h.into_iter().map(|r| r[n..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        to_big_matrix(rows)
    }

    #[test]
    fn hnf_of_two_generators() {
        let h = hnf(&m(&[vec![2, 0], vec![1, 1], vec![0, 2]]), 2);
        assert_eq!(h, m(&[vec![1, 1], vec![0, 2]]));
    }

    #[test]
    fn smith_of_diagonal() {
        let a = m(&[vec![6, 0], vec![0, 4]]);
        let s = smith_normal_form(&a, 2);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(12)]);
        assert!(s.verify(&a, 2));
    }

    #[test]
    fn smith_rectangular() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&a, 3);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert!(s.verify(&a, 3));
        let b = m(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8]]);
        let s = smith_normal_form(&b, 4);
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(0)]);
        assert!(s.verify(&b, 4));
    }

    #[test]
    fn kernel_and_congruences() {
        let a = m(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let k = integer_kernel(&a, 3);
        assert_eq!(k, m(&[vec![1, -1, 1]]));
        // x ≡ 0 mod 3 in the first coordinate only
        let c = congruence_kernel(&m(&[vec![1, 0]]), &[BigInt::from(3)], 2);
        assert_eq!(c, m(&[vec![3, 0], vec![0, 1]]));
    }

    #[test]
    fn determinant_matches_cofactor() {
        let a = m(&[vec![2, -1, 0], vec![1, 3, 4], vec![0, 5, -2]]);
        assert_eq!(det(&a), BigInt::from(-54));
        assert_eq!(det(&m(&[vec![0, 1], vec![1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn solve_in_echelon_basis() {
        let h = hnf(&m(&[vec![2, 0], vec![1, 1], vec![0, 2]]), 2);
        let x = vec![BigInt::from(1), BigInt::from(-1)];
        assert!(solve_integral(&h, &x).is_some());
        let y = vec![BigInt::from(1), BigInt::from(0)];
        assert!(solve_integral(&h, &y).is_none());
    }

    #[test]
    fn unimodular_round_trip() {
        let a = m(&[vec![2, 3], vec![1, 2]]);
        let inv = unimodular_inverse(&a);
        assert_eq!(mat_mul(&a, &inv, 2, 2), identity(2));
    }
}
