use crate::algebra::{Ambient, Elem, FiniteAbelianGroup, GroupRingElement, IdealLattice, MinusQuotient};
use crate::error::{invalid, structural, Result};
use crate::linalg::{congruence_kernel, hnf, identity, mat_mul, smith_normal_form, solve_integral, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashSet;

/// A finite abelian group ⊕ Z/e_i together with a linear action of G.
///
/// Action matrices act on column vectors of coordinates; column j is the image of e_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisModule {
    acting: FiniteAbelianGroup,
    invariants: Vec<BigInt>,
    action: Vec<IntMatrix>,
}

fn reduce_columns(m: &IntMatrix, inv: &[BigInt]) -> IntMatrix {
    m.iter().enumerate().map(|(i, row)| row.iter().map(|x| x.mod_floor(&inv[i])).collect()).collect()
}

impl GaloisModule {
    pub fn new(acting: FiniteAbelianGroup, invariants: Vec<BigInt>, action: Vec<IntMatrix>) -> Result<Self> {
        let r = invariants.len();
        if invariants.iter().any(|e| e < &BigInt::from(2)) || invariants.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return Err(invalid("module invariant factors must be >= 2 and form a divisibility chain"));
        }
        if action.len() != acting.rank() || action.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
            return Err(structural("one r×r action matrix per group generator is required"));
        }
        let action: Vec<IntMatrix> = action.iter().map(|m| reduce_columns(m, &invariants)).collect();
        let module = GaloisModule { acting, invariants, action };
        module.validate()?;
        Ok(module)
    }

    fn validate(&self) -> Result<()> {
        let r = self.invariants.len();
        for m in &self.action {
            for i in 0..r {
                for j in 0..r {
                    if !((&m[i][j] * &self.invariants[j]) % &self.invariants[i]).is_zero() {
                        return Err(invalid("action matrix does not respect the invariant factors"));
                    }
                }
            }
        }
        for a in 0..self.action.len() {
            for b in 0..a {
                let ab = self.compose(&self.action[a], &self.action[b]);
                let ba = self.compose(&self.action[b], &self.action[a]);
                if ab != ba {
                    return Err(invalid("action matrices do not commute"));
                }
            }
            let d = self.acting.invariants()[a];
            if self.matrix_power(&self.action[a], d) != reduce_columns(&identity(r), &self.invariants) {
                return Err(invalid("action matrix order does not divide the generator order"));
            }
        }
        Ok(())
    }

    /// Module Z^n / span(relations) with G acting on Z^n through `action`.
    pub fn from_presentation(acting: FiniteAbelianGroup, ngens: usize, relations: &IntMatrix, action: &[IntMatrix]) -> Result<Self> {
        Self::from_presentation_with_coordinates(acting, ngens, relations, action).map(|(m, _)| m)
    }

    /// As `from_presentation`, also returning the matrix Q (rows = module
    /// coordinates, columns = generators) with x ∈ Z^n ↦ reduce(Q x).
    pub fn from_presentation_with_coordinates(acting: FiniteAbelianGroup, ngens: usize, relations: &IntMatrix, action: &[IntMatrix]) -> Result<(Self, IntMatrix)> {
        if ngens == 0 {
            let m = Self::new(acting.clone(), Vec::new(), vec![Vec::new(); acting.rank()])?;
            return Ok((m, Vec::new()));
        }
        let snf = smith_normal_form(relations, ngens);
        if snf.diagonal.len() < ngens || snf.diagonal.iter().any(|d| d.is_zero()) {
            return Err(invalid("presentation does not define a finite module"));
        }
        // y = P x with P = V^T; action becomes P ρ P^{-1}
        let p = crate::linalg::transpose(&snf.v, ngens);
        let pinv = crate::linalg::unimodular_inverse(&p);
        let keep: Vec<usize> = (0..ngens).filter(|&i| !snf.diagonal[i].is_one()).collect();
        let invariants: Vec<BigInt> = keep.iter().map(|&i| snf.diagonal[i].clone()).collect();
        let new_action = action
            .iter()
            .map(|rho| {
                let full = mat_mul(&mat_mul(&p, rho, ngens, ngens), &pinv, ngens, ngens);
                keep.iter().map(|&i| keep.iter().map(|&j| full[i][j].clone()).collect()).collect()
            })
            .collect();
        let coords = keep.iter().map(|&i| p[i].clone()).collect();
        Ok((Self::new(acting, invariants, new_action)?, coords))
    }

    /// Module with trivial G-action.
    pub fn trivial_action(acting: FiniteAbelianGroup, invariants: Vec<BigInt>) -> Result<Self> {
        let r = invariants.len();
        let rels: IntMatrix = (0..r).map(|i| (0..r).map(|j| if i == j { invariants[i].clone() } else { BigInt::zero() }).collect()).collect();
        let action = vec![identity(r); acting.rank()];
        Self::from_presentation(acting, r, &rels, &action)
    }

    /// Cyclic module Z/n on which each generator g_i acts by the scalar s_i.
    pub fn scalar_action(acting: FiniteAbelianGroup, n: BigInt, scalars: &[i64]) -> Result<Self> {
        let rels = vec![vec![n]];
        let action: Vec<IntMatrix> = scalars.iter().map(|&s| vec![vec![BigInt::from(s)]]).collect();
        Self::from_presentation(acting, 1, &rels, &action)
    }

    pub fn acting_group(&self) -> &FiniteAbelianGroup {
        &self.acting
    }

    pub fn invariants(&self) -> &[BigInt] {
        &self.invariants
    }

    pub fn action(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    pub fn order(&self) -> BigInt {
        self.invariants.iter().product()
    }

    pub fn is_zero(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter().zip(&self.invariants).map(|(a, e)| a.mod_floor(e)).collect()
    }

    fn compose(&self, a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let r = self.rank();
        reduce_columns(&mat_mul(a, b, r, r), &self.invariants)
    }

    fn matrix_power(&self, m: &IntMatrix, mut e: u64) -> IntMatrix {
        let r = self.rank();
        let mut acc = reduce_columns(&identity(r), &self.invariants);
        let mut base = m.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.compose(&acc, &base);
            }
            base = self.compose(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Matrix of the group element g.
    pub fn matrix_of(&self, g: Elem) -> IntMatrix {
        let c = self.acting.coords(g);
        let r = self.rank();
        let mut acc = reduce_columns(&identity(r), &self.invariants);
        for (i, &k) in c.iter().enumerate() {
            acc = self.compose(&acc, &self.matrix_power(&self.action[i], k));
        }
        acc
    }

    /// Matrix of an integral group ring element.
    pub fn matrix_of_element(&self, x: &GroupRingElement) -> Result<IntMatrix> {
        if x.group() != &self.acting {
            return Err(structural("element of a different group ring"));
        }
        let coeffs = x.integer_coeffs()?;
        let r = self.rank();
        let mut acc = vec![vec![BigInt::zero(); r]; r];
        for (g, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = self.matrix_of(g);
            for i in 0..r {
                for j in 0..r {
                    acc[i][j] += c * &m[i][j];
                }
            }
        }
        Ok(reduce_columns(&acc, &self.invariants))
    }

    pub fn apply(&self, m: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
        self.reduce(&crate::linalg::mat_vec(m, x))
    }

    /// True when x·M = 0.
    pub fn annihilated_by(&self, x: &GroupRingElement) -> Result<bool> {
        let m = self.matrix_of_element(x)?;
        Ok(m.iter().all(|row| row.iter().all(|v| v.is_zero())))
    }

    fn relation_rows(&self) -> IntMatrix {
        let r = self.rank();
        (0..r).map(|i| (0..r).map(|j| if i == j { self.invariants[i].clone() } else { BigInt::zero() }).collect()).collect()
    }

    /// Submodule generated (over Z[G]) by the given vectors.
    pub fn submodule(&self, gens: &[Vec<BigInt>]) -> Result<Self> {
        let r = self.rank();
        let mut all: IntMatrix = Vec::new();
        let mats: Vec<IntMatrix> = self.acting.elements().map(|g| self.matrix_of(g)).collect();
        for v in gens {
            for m in &mats {
                all.push(self.apply(m, v));
            }
        }
        all.extend(self.relation_rows());
        let basis = hnf(&all, r);
        let k = basis.len();
        // relations: c ∈ Z^k with Σ c_i b_i ≡ 0 in M
        let a: IntMatrix = (0..r).map(|row| (0..k).map(|i| basis[i][row].clone()).collect()).collect();
        let rels = congruence_kernel(&a, &self.invariants, k);
        let action: Vec<IntMatrix> = self
            .action
            .iter()
            .map(|rho| {
                let cols: Vec<Vec<BigInt>> = basis
                    .iter()
                    .map(|b| {
                        let img = crate::linalg::mat_vec(rho, b);
                        // img lies in the span of the HNF basis (which contains the relations)
                        solve_integral(&basis, &img).expect("submodule is G-stable")
                    })
                    .collect();
                (0..k).map(|i| (0..k).map(|j| cols[j][i].clone()).collect()).collect()
            })
            .collect();
        Self::from_presentation(self.acting.clone(), k, &rels, &action)
    }

    /// Quotient by the submodule generated by the given vectors.
    pub fn quotient(&self, gens: &[Vec<BigInt>]) -> Result<Self> {
        let mats: Vec<IntMatrix> = self.acting.elements().map(|g| self.matrix_of(g)).collect();
        let mut rels = self.relation_rows();
        for v in gens {
            for m in &mats {
                rels.push(crate::linalg::mat_vec(m, v));
            }
        }
        Self::from_presentation(self.acting.clone(), self.rank(), &rels, &self.action)
    }

    fn unit_vectors(&self) -> Vec<Vec<BigInt>> {
        let r = self.rank();
        (0..r).map(|i| (0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
    }

    /// Image of the endomorphism given by a module matrix.
    pub fn image_of(&self, m: &IntMatrix) -> Result<Self> {
        let gens: Vec<Vec<BigInt>> = self.unit_vectors().iter().map(|e| self.apply(m, e)).collect();
        self.submodule(&gens)
    }

    pub fn cokernel_of(&self, m: &IntMatrix) -> Result<Self> {
        let gens: Vec<Vec<BigInt>> = self.unit_vectors().iter().map(|e| self.apply(m, e)).collect();
        self.quotient(&gens)
    }

    /// Kernel of a G-equivariant endomorphism.
    pub fn kernel_of(&self, m: &IntMatrix) -> Result<Self> {
        let r = self.rank();
        let lat = congruence_kernel(m, &self.invariants, r);
        self.submodule(&lat)
    }

    /// The p-primary part.
    pub fn p_part(&self, p: u64) -> Result<Self> {
        let exp = self.invariants.last().cloned().unwrap_or_else(BigInt::one);
        let cofactor = crate::arith::strip_prime(&exp, p);
        let gens: Vec<Vec<BigInt>> = self.unit_vectors().into_iter().map(|v| v.into_iter().map(|x| x * &cofactor).collect()).collect();
        self.submodule(&gens)
    }

    /// Part of odd order.
    pub fn odd_part(&self) -> Result<Self> {
        let exp = self.invariants.last().cloned().unwrap_or_else(BigInt::one);
        let two_part = &exp / crate::arith::strip_prime(&exp, 2);
        let gens: Vec<Vec<BigInt>> = self.unit_vectors().into_iter().map(|v| v.into_iter().map(|x| x * &two_part).collect()).collect();
        self.submodule(&gens)
    }

    /// M/(1 + c)M; for modules of odd order this is the c = -1 eigenspace.
    pub fn minus_part(&self, conj: Elem) -> Result<Self> {
        let z = crate::algebra::CoeffRing::Integers;
        let one_plus = GroupRingElement::one(&self.acting, z.clone()).add(&GroupRingElement::basis(&self.acting, z, conj))?;
        let m = self.matrix_of_element(&one_plus)?;
        self.cokernel_of(&m)
    }

    /// Pontryagin dual with the contragredient action (g·f)(m) = f(g⁻¹m).
    pub fn dual(&self) -> Result<Self> {
        let r = self.rank();
        let action: Vec<IntMatrix> = (0..self.acting.rank())
            .map(|a| {
                let g = self.acting.generator(a);
                let rho = self.matrix_of(self.acting.inv(g));
                // D_{j,i} = ρ_{ij} e_j / e_i
                (0..r).map(|j| (0..r).map(|i| &rho[i][j] * &self.invariants[j] / &self.invariants[i]).collect()).collect()
            })
            .collect();
        Self::new(self.acting.clone(), self.invariants.clone(), action)
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.acting != other.acting {
            return Err(structural("modules over different groups"));
        }
        let (r, s) = (self.rank(), other.rank());
        let n = r + s;
        let mut rels: IntMatrix = self.relation_rows().into_iter().map(|mut row| {
            row.extend(std::iter::repeat(BigInt::zero()).take(s));
            row
        }).collect();
        rels.extend(other.relation_rows().into_iter().map(|row| {
            let mut v = vec![BigInt::zero(); r];
            v.extend(row);
            v
        }));
        let action: Vec<IntMatrix> = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| match (i < r, j < r) {
                                (true, true) => a[i][j].clone(),
                                (false, false) => b[i - r][j - r].clone(),
                                _ => BigInt::zero(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::from_presentation(self.acting.clone(), n, &rels, &action)
    }

    /// Every element, for small modules.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for e in &self.invariants {
            let e = e.to_u64().expect("module too large to enumerate");
            out = out.into_iter().flat_map(|v| (0..e).map(move |k| {
                let mut w = v.clone();
                w.push(BigInt::from(k));
                w
            })).collect();
        }
        out
    }

    /// Ann_{Z[G]}(M) as a lattice in Z[G].
    pub fn annihilator(&self) -> IdealLattice {
        let n = self.acting.order();
        let r = self.rank();
        let mats: Vec<IntMatrix> = self.acting.elements().map(|g| self.matrix_of(g)).collect();
        // row (i, j): Σ_g x_g ρ(g)_{ij} ≡ 0 mod e_i
        let mut a = Vec::with_capacity(r * r);
        let mut moduli = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                a.push((0..n).map(|g| mats[g][i][j].clone()).collect());
                moduli.push(self.invariants[i].clone());
            }
        }
        let amb = Ambient::Full(self.acting.clone());
        if r == 0 {
            return IdealLattice::unit(amb);
        }
        let lat = congruence_kernel(&a, &moduli, n);
        let vecs: Vec<Vec<BigRational>> = lat.iter().map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        IdealLattice::span(amb, &vecs)
    }

    /// Relations of a Z[G]-presentation Z[G]^r → M sending basis vectors to the
    /// module's Z-generators; each row is a relation (x_1..x_r) ∈ Z[G]^r.
    pub fn group_ring_relations(&self) -> Vec<Vec<GroupRingElement>> {
        let n = self.acting.order();
        let r = self.rank();
        if r == 0 {
            return Vec::new();
        }
        let mats: Vec<IntMatrix> = self.acting.elements().map(|g| self.matrix_of(g)).collect();
        // unknowns indexed (j, g) ↦ j*n + g; equation row i
        let a: IntMatrix = (0..r).map(|i| (0..r * n).map(|c| mats[c % n][i][c / n].clone()).collect()).collect();
        let lat = congruence_kernel(&a, &self.invariants, r * n);
        let to_elems = |row: &Vec<BigInt>| -> Vec<GroupRingElement> {
            (0..r)
                .map(|j| {
                    let c: Vec<BigRational> = (0..n).map(|g| BigRational::from_integer(row[j * n + g].clone())).collect();
                    GroupRingElement::from_coeffs(&self.acting, crate::algebra::CoeffRing::Integers, c).expect("integral")
                })
                .collect()
        };
        // keep a row only if it enlarges the Z[G]-span of the rows kept so far
        let mut kept: Vec<Vec<GroupRingElement>> = Vec::new();
        let mut span: IntMatrix = Vec::new();
        for row in &lat {
            let elems = to_elems(row);
            let in_span = if span.is_empty() { false } else { solve_integral(&span, row).is_some() };
            if in_span {
                continue;
            }
            for g in self.acting.elements() {
                let shifted: Vec<BigInt> = elems.iter().flat_map(|x| x.shift(g).integer_coeffs().unwrap()).collect();
                span.push(shifted);
            }
            span = hnf(&span, r * n);
            kept.push(elems);
        }
        kept
    }

    /// Fitt^i over Z[G], computed from a Z[G]-presentation of M.
    pub fn fitting_ideal(&self, i: usize) -> Result<IdealLattice> {
        let rows = self.group_ring_relations();
        let ring = crate::algebra::GroupRing::new(self.acting.clone(), crate::algebra::CoeffRing::Integers);
        super::fitting_ideal_group_ring(&ring, &rows, self.rank(), i)
    }

    /// Invariants of ker and coker of (g - λ) for a group element g.
    pub fn eigen_profile(&self, g: Elem, lambda: i64) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
        let r = self.rank();
        let mut m = self.matrix_of(g);
        for (i, row) in m.iter_mut().enumerate().take(r) {
            row[i] -= lambda;
        }
        let m = reduce_columns(&m, &self.invariants);
        Ok((self.kernel_of(&m)?.invariants, self.cokernel_of(&m)?.invariants))
    }
}

/// Outcome of a Fitting-equivalence comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub invariants_match: bool,
    pub eigen_profiles_match: bool,
    pub minus_fitting_match: bool,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.invariants_match && self.eigen_profiles_match && self.minus_fitting_match
    }
}

/// Compares two modules by invariant factors, (g - λ)-kernel/cokernel invariants
/// for each generator g and λ in {0, ±1, ±2}, and Fitt⁰ of the minus parts
/// (localized at every odd prime dividing the orders).
pub fn fitting_equivalent(a: &GaloisModule, b: &GaloisModule, conj: Elem) -> Result<EquivalenceReport> {
    if a.acting != b.acting {
        return Err(structural("modules over different groups"));
    }
    let invariants_match = a.invariants == b.invariants;
    let mut eigen_profiles_match = true;
    for i in 0..a.acting.rank() {
        let g = a.acting.generator(i);
        for lambda in [0, 1, -1, 2, -2] {
            if a.eigen_profile(g, lambda)? != b.eigen_profile(g, lambda)? {
                eigen_profiles_match = false;
            }
        }
    }
    let q = MinusQuotient::new(&a.acting, conj)?;
    let (am, bm) = (a.minus_part(conj)?, b.minus_part(conj)?);
    let fa = am.fitting_ideal(0)?.project_to_minus(&q)?;
    let fb = bm.fitting_ideal(0)?.project_to_minus(&q)?;
    let mut primes: HashSet<u64> = HashSet::new();
    for m in [&am, &bm] {
        let ord = m.order();
        let o = ord.to_u64().unwrap_or(0);
        if o > 0 {
            primes.extend(crate::arith::prime_divisors(o).into_iter().filter(|&p| p != 2));
        }
    }
    let mut minus_fitting_match = true;
    for p in primes {
        if !fa.p_part_equals(&fb, p)? {
            minus_fitting_match = false;
        }
    }
    Ok(EquivalenceReport { invariants_match, eigen_profiles_match, minus_fitting_match })
}
