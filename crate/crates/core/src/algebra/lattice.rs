use super::group::FiniteAbelianGroup;
use super::group_ring::GroupRingElement;
use super::minus::{MinusElement, MinusQuotient};
use crate::error::{structural, Result};
use crate::linalg::{hnf, solve_integral, solve_rational, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The ring an ideal lattice lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// Z[G], coordinates indexed by group elements
    Full(FiniteAbelianGroup),
    /// Z[G]/(c+1) (2 inverted only through p-local comparisons), coordinates on coset representatives
    Minus(MinusQuotient),
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match self {
            Ambient::Full(g) => g.order(),
            Ambient::Minus(q) => q.dim(),
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        match self {
            Ambient::Full(g) => g,
            Ambient::Minus(q) => q.group(),
        }
    }

    fn act(&self, g: usize, v: &[BigRational]) -> Vec<BigRational> {
        match self {
            Ambient::Full(grp) => {
                let mut out = vec![BigRational::zero(); v.len()];
                for (i, c) in v.iter().enumerate() {
                    out[grp.op(i, g)] = c.clone();
                }
                out
            }
            Ambient::Minus(q) => q.act(g, v),
        }
    }

    fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        match self {
            Ambient::Full(grp) => {
                let mut out = vec![BigRational::zero(); a.len()];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if !y.is_zero() {
                            out[grp.op(i, j)] += x * y;
                        }
                    }
                }
                out
            }
            Ambient::Minus(q) => q.mul(a, b),
        }
    }
}

/// A G-stable lattice (1/denominator)·Λ with Λ ⊆ Z^dim given by its row HNF.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdealLattice {
    ambient: Ambient,
    basis: IntMatrix,
    denominator: BigInt,
}

impl IdealLattice {
    /// Z-span of the given rational coordinate vectors (no G-closure).
    pub fn span(ambient: Ambient, vecs: &[Vec<BigRational>]) -> Self {
        let n = ambient.dim();
        let den = vecs.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let rows: IntMatrix = vecs.iter().map(|v| v.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
        let basis = hnf(&rows, n);
        let g = basis.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
        let basis = if g.is_one() { basis } else { basis.into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect() };
        IdealLattice { ambient, basis, denominator: den / g }
    }

    /// Z-span of {g·x : g ∈ G, x ∈ gens}.
    pub fn from_coordinate_generators(ambient: Ambient, gens: &[Vec<BigRational>]) -> Self {
        let group = ambient.group().clone();
        let mut all = Vec::with_capacity(gens.len() * group.order());
        for x in gens {
            for g in group.elements() {
                all.push(ambient.act(g, x));
            }
        }
        Self::span(ambient, &all)
    }

    pub fn zero(ambient: Ambient) -> Self {
        IdealLattice { ambient, basis: Vec::new(), denominator: BigInt::one() }
    }

    pub fn unit(ambient: Ambient) -> Self {
        let n = ambient.dim();
        let basis = crate::linalg::identity(n);
        IdealLattice { ambient, basis, denominator: BigInt::one() }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient.dim()
    }

    pub fn is_integral(&self) -> bool {
        self.denominator.is_one()
    }

    /// Basis vectors as rational coordinate vectors.
    pub fn rational_basis(&self) -> Vec<Vec<BigRational>> {
        self.basis.iter().map(|r| r.iter().map(|x| BigRational::new(x.clone(), self.denominator.clone())).collect()).collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(structural("lattices live in different rings"));
        }
        Ok(())
    }

    pub fn contains_coords(&self, x: &[BigRational]) -> bool {
        self.membership_witness(x).is_some()
    }

    /// Integer coefficients of x in the HNF basis, if x lies in the lattice.
    pub fn membership_witness(&self, x: &[BigRational]) -> Option<Vec<BigInt>> {
        let scaled: Vec<BigRational> = x.iter().map(|c| c * BigRational::from_integer(self.denominator.clone())).collect();
        if scaled.iter().any(|c| !c.is_integer()) {
            return None;
        }
        let ints: Vec<BigInt> = scaled.iter().map(|c| c.to_integer()).collect();
        solve_integral(&self.basis, &ints)
    }

    /// True when some integer n prime to p has n·x in the lattice.
    pub fn contains_locally(&self, x: &[BigRational], p: u64) -> bool {
        if x.iter().all(|c| c.is_zero()) {
            return true;
        }
        let scaled: Vec<BigRational> = x.iter().map(|c| c * BigRational::from_integer(self.denominator.clone())).collect();
        match solve_rational(&self.basis, &scaled) {
            None => false,
            Some(coeffs) => {
                let p = BigInt::from(p);
                coeffs.iter().all(|c| !(c.denom() % &p).is_zero())
            }
        }
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.basis == other.basis && self.denominator == other.denominator)
    }

    pub fn contains(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(other.rational_basis().iter().all(|v| self.contains_coords(v)))
    }

    /// Equality after localizing at p.
    pub fn p_part_equals(&self, other: &Self, p: u64) -> Result<bool> {
        self.check_same(other)?;
        let sub = |a: &Self, b: &Self| b.rational_basis().iter().all(|v| a.contains_locally(v, p));
        Ok(sub(self, other) && sub(other, self))
    }

    /// Localized containment: other ⊗ Z_(p) ⊆ self ⊗ Z_(p).
    pub fn p_part_contains(&self, other: &Self, p: u64) -> Result<bool> {
        self.check_same(other)?;
        Ok(other.rational_basis().iter().all(|v| self.contains_locally(v, p)))
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (a, b) = (self.rational_basis(), other.rational_basis());
        let prods: Vec<Vec<BigRational>> = a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).map(|(x, y)| self.ambient.mul(x, y)).collect();
        Ok(Self::span(self.ambient.clone(), &prods))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut v = self.rational_basis();
        v.extend(other.rational_basis());
        Ok(Self::span(self.ambient.clone(), &v))
    }

    /// Checks stability under every group generator.
    pub fn is_g_stable(&self) -> bool {
        let grp = self.ambient.group();
        let basis = self.rational_basis();
        (0..grp.rank()).all(|i| {
            let g = grp.generator(i);
            basis.iter().all(|v| self.contains_coords(&self.ambient.act(g, v)))
        })
    }

    /// Image in the minus quotient (only for lattices in the full group ring).
    pub fn project_to_minus(&self, q: &MinusQuotient) -> Result<Self> {
        let Ambient::Full(g) = &self.ambient else {
            return Err(structural("already a minus-part lattice"));
        };
        if g != q.group() {
            return Err(structural("minus quotient of a different group"));
        }
        let mut imgs = Vec::new();
        for v in self.rational_basis() {
            let x = GroupRingElement::from_rationals(g, v)?;
            imgs.push(q.project(&x)?.coeffs);
        }
        Ok(Self::span(Ambient::Minus(q.clone()), &imgs))
    }

    /// Index [Z^n : Λ]·(denominator)^(-n) as a rational, for full-rank lattices.
    pub fn covolume(&self) -> Option<BigRational> {
        if !self.is_full_rank() {
            return None;
        }
        let d: BigInt = (0..self.rank()).map(|i| self.basis[i].iter().find(|x| !x.is_zero()).unwrap().clone()).product();
        Some(BigRational::new(d, num_traits::pow(self.denominator.clone(), self.rank())))
    }
}

/// The ideal of Z[G] (or Q[G]) generated by the given elements.
pub fn ideal_from_generators(group: &FiniteAbelianGroup, gens: &[GroupRingElement]) -> Result<IdealLattice> {
    for x in gens {
        if x.group() != group {
            return Err(structural("generator from a different group ring"));
        }
    }
    let coords: Vec<Vec<BigRational>> = gens.iter().map(|x| x.coeffs().to_vec()).collect();
    Ok(IdealLattice::from_coordinate_generators(Ambient::Full(group.clone()), &coords))
}

/// The ideal of the minus quotient generated by the given elements.
pub fn minus_ideal_from_generators(q: &MinusQuotient, gens: &[MinusElement]) -> Result<IdealLattice> {
    for x in gens {
        if x.quotient() != q {
            return Err(structural("generator from a different minus quotient"));
        }
    }
    let coords: Vec<Vec<BigRational>> = gens.iter().map(|x| x.coeffs.clone()).collect();
    Ok(IdealLattice::from_coordinate_generators(Ambient::Minus(q.clone()), &coords))
}

impl IdealLattice {
    pub fn contains_element(&self, x: &GroupRingElement) -> Result<bool> {
        match &self.ambient {
            Ambient::Full(g) if g == x.group() => Ok(self.contains_coords(x.coeffs())),
            _ => Err(structural("element not in the ambient ring of the lattice")),
        }
    }
}
