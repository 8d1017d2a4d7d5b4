//! Fitting ideals, Smith normal form, annihilators and order checks for
//! finitely presented modules over Z, Z/p^m and integral group rings.

pub mod matrix;
pub mod module;

pub use matrix::{subsets, Matrix};
pub use module::{fitting_equivalent, EquivalenceReport, GaloisModule};

use crate::algebra::{Ambient, Character, FiniteAbelianGroup, GroupRing, GroupRingElement, IdealLattice};
use crate::error::{Error, Result};
use crate::linalg::{det, hnf, IntMatrix};
use crate::ring::{Integers, Residues};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use crate::linalg::{smith_normal_form, SmithForm};

/// Largest generator count for which minors are enumerated.
pub const MAX_GENERATORS: usize = 8;

/// Fitt^i over Z of the module presented by `a` (rows = relations), as a
/// nonnegative generator of the ideal.
pub fn fitting_ideal_integers(a: &Matrix<Integers>, i: usize) -> Result<BigInt> {
    let n = a.cols;
    if i >= n {
        return Ok(BigInt::one());
    }
    guard(n)?;
    Ok(a.minors(n - i).iter().fold(BigInt::zero(), |acc, m| acc.gcd(m)))
}

/// Fitt^i over Z/p^m, returned as the canonical generator p^k (0 for the zero ideal).
pub fn fitting_ideal_residues(a: &Matrix<Residues>, i: usize) -> Result<BigInt> {
    let n = a.cols;
    if i >= n {
        return Ok(BigInt::one());
    }
    guard(n)?;
    let g = a.minors(n - i).iter().fold(a.ring.modulus.clone(), |acc, m| acc.gcd(m));
    Ok(if g == a.ring.modulus { BigInt::zero() } else { g })
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_GENERATORS {
        return Err(Error::Range(format!("{n} generators exceed the minor-enumeration limit {MAX_GENERATORS}")));
    }
    Ok(())
}

/// Fitt^i over a group ring of the module presented by relation rows.
pub fn fitting_ideal_group_ring(ring: &GroupRing, rows: &[Vec<GroupRingElement>], ncols: usize, i: usize) -> Result<IdealLattice> {
    let amb = Ambient::Full(ring.group.clone());
    if i >= ncols {
        return Ok(IdealLattice::unit(amb));
    }
    guard(ncols)?;
    if rows.is_empty() {
        return Ok(IdealLattice::zero(amb));
    }
    let m = Matrix::new(ring.clone(), rows.to_vec())?;
    let minors = m.minors(ncols - i);
    crate::algebra::ideal_from_generators(&ring.group, &minors)
}

pub fn fitting_ideal(a: &Matrix<GroupRing>, i: usize) -> Result<IdealLattice> {
    fitting_ideal_group_ring(&a.ring, &a.entries, a.cols, i)
}

/// Integer matrix of x ↦ A·x on B^n for B = Z[G] (block (i,j) is multiplication by A_ij).
pub fn regular_representation(a: &Matrix<GroupRing>) -> Result<IntMatrix> {
    let g = a.ring.group.order();
    let n = a.rows;
    let mut out = vec![vec![BigInt::zero(); a.cols * g]; n * g];
    for i in 0..n {
        for j in 0..a.cols {
            let m = a.entries[i][j].multiplication_matrix();
            for (r, row) in m.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    if !v.is_integer() {
                        return Err(Error::NotIntegral("presentation entries must be integral".into()));
                    }
                    out[i * g + r][j * g + c] = v.to_integer();
                }
            }
        }
    }
    Ok(out)
}

/// #(B/xB) for B = Z[G], via the determinant of multiplication by x.
pub fn quotient_order(x: &GroupRingElement) -> Result<BigInt> {
    let m: IntMatrix = x
        .multiplication_matrix()
        .iter()
        .map(|r| r.iter().map(|v| if v.is_integer() { Ok(v.to_integer()) } else { Err(Error::NotIntegral("element".into())) }).collect())
        .collect::<Result<_>>()?;
    let d = det(&m).abs();
    if d.is_zero() {
        return Err(Error::ZeroDivisor(format!("{} is a zero divisor", x.display())));
    }
    Ok(d)
}

/// Both sides of #(B^n/A·B^n) = #(B/det A) for a square A over B = Z[G].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub quotient_order: BigInt,
    pub determinant_quotient_order: BigInt,
}

impl SizeReport {
    pub fn holds(&self) -> bool {
        self.quotient_order == self.determinant_quotient_order
    }
}

pub fn module_size_check(a: &Matrix<GroupRing>) -> Result<SizeReport> {
    let d = a.det()?;
    let determinant_quotient_order = quotient_order(&d)?;
    let reg = regular_representation(a)?;
    let snf = smith_normal_form(&reg, reg.len());
    let quotient_order = snf.diagonal.iter().fold(BigInt::one(), |acc, x| acc * x);
    Ok(SizeReport { quotient_order, determinant_quotient_order })
}

/// For characters with values ±1: (#R_Ψ/(x), |Π_ψ ψ(x)|), where R_Ψ is the image of Z[G] in Z^Ψ.
pub fn character_ring_size_check(group: &FiniteAbelianGroup, psi: &[Character], x: &GroupRingElement) -> Result<(BigInt, BigInt)> {
    if psi.iter().any(|c| c.order() > 2) {
        return Err(Error::Unsupported("character values must lie in Z (order ≤ 2)".into()));
    }
    let sign = |c: &Character, g: usize| if c.value_exponent(g) == 0 { 1i64 } else { -1 };
    let embed = |y: &GroupRingElement| -> Vec<BigRational> {
        psi.iter().map(|c| y.coeffs().iter().enumerate().map(|(g, a)| a * BigRational::from_integer(sign(c, g).into())).sum()).collect()
    };
    let xv = embed(x);
    let product = xv.iter().fold(BigRational::one(), |acc, v| acc * v).abs();
    if product.is_zero() {
        return Err(Error::ZeroDivisor("x vanishes at some character".into()));
    }
    let k = psi.len();
    let r_rows: Vec<Vec<BigRational>> = group.elements().map(|g| embed(&GroupRingElement::basis(group, crate::algebra::CoeffRing::Integers, g))).collect();
    let to_int = |rows: &Vec<Vec<BigRational>>| -> IntMatrix { rows.iter().map(|r| r.iter().map(|v| v.to_integer()).collect()).collect() };
    let r_lat = hnf(&to_int(&r_rows), k);
    let xr_rows: Vec<Vec<BigRational>> = r_rows.iter().map(|r| r.iter().zip(&xv).map(|(a, b)| a * b).collect()).collect();
    let xr_lat = hnf(&to_int(&xr_rows), k);
    let covol = |h: &IntMatrix| -> BigInt { h.iter().map(|row| row.iter().find(|v| !v.is_zero()).unwrap().clone()).product() };
    let index = covol(&xr_lat) / covol(&r_lat);
    Ok((index, product.to_integer()))
}
