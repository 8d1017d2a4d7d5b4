use super::bernoulli::{depleted_l_value, l_at_nonpositive, value_field};
use super::dirichlet::DirichletCharacter;
use crate::algebra::{Character, CoeffRing, Elem, GroupRing, GroupRingElement, RootOfUnityMod};
use crate::arith::{factorize, gcd, is_prime, lcm, prime_divisors, rat, rat_to_string};
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{invalid, Error, Result};
use crate::ring::{Rationals, Residues, Ring};
use crate::stickelberger::{theta, AbelianFieldQ};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::sync::Arc;

/// Rings that can carry q-expansion coefficients.
pub trait CoefficientRing: Ring {
    fn rational(&self, r: &BigRational) -> Result<Self::Elem>;

    /// ζ_order^e, when the ring has such a root of unity.
    fn root_of_unity(&self, e: u64, order: u64) -> Result<Self::Elem>;

    /// The image of a Galois group element, for group-ring coefficients.
    fn group_element(&self, _g: Elem) -> Result<Self::Elem> {
        Err(Error::Unsupported("coefficient ring has no group elements".into()))
    }

    fn scale_int(&self, a: &Self::Elem, n: &BigInt) -> Self::Elem {
        self.mul(&self.from_int(n), a)
    }

    /// Σ coeffs[i]·basis[i].
    fn linear_combination(&self, basis: &[Self::Elem], coeffs: &[BigInt]) -> Self::Elem {
        basis.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).fold(self.zero(), |acc, (b, c)| self.add(&acc, &self.scale_int(b, c)))
    }

    /// Coordinates reduced modulo p^m.
    fn residues_mod(&self, a: &Self::Elem, p: u64, m: u32) -> Result<Vec<BigInt>>;

    /// Rational coordinates, used for lattice membership.
    fn coordinates(&self, a: &Self::Elem) -> Vec<BigRational>;

    fn to_json(&self, a: &Self::Elem) -> Value;

    fn label(&self) -> String;

    /// Image of x ∈ Q(ζ_N) under ζ_N ↦ root_of_unity(1, N).
    fn from_cyclotomic(&self, field: &CyclotomicField, x: &Cyclo) -> Result<Self::Elem> {
        let mut acc = self.zero();
        for (i, c) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let term = self.mul(&self.rational(c)?, &self.root_of_unity(i as u64, field.order())?);
            acc = self.add(&acc, &term);
        }
        Ok(acc)
    }
}

/// e/order in lowest terms.
fn reduce_root(e: u64, order: u64) -> (u64, u64) {
    let order = order.max(1);
    let e = e % order;
    let g = gcd(e as i64, order as i64).max(1) as u64;
    (e / g, order / g)
}

fn residue_of_rational(r: &BigRational, p: u64, m: u32) -> Result<BigInt> {
    Residues::prime_power(p, m).from_rational(r).ok_or_else(|| Error::NotIntegral(format!("{} is not {p}-integral", rat_to_string(r))))
}

impl CoefficientRing for Rationals {
    fn rational(&self, r: &BigRational) -> Result<BigRational> {
        Ok(r.clone())
    }
    fn root_of_unity(&self, e: u64, order: u64) -> Result<BigRational> {
        match reduce_root(e, order) {
            (_, 1) => Ok(BigRational::one()),
            (_, 2) => Ok(-BigRational::one()),
            (_, o) => Err(Error::Unsupported(format!("Q has no primitive {o}-th root of unity"))),
        }
    }
    fn scale_int(&self, a: &BigRational, n: &BigInt) -> BigRational {
        a * n
    }
    fn residues_mod(&self, a: &BigRational, p: u64, m: u32) -> Result<Vec<BigInt>> {
        Ok(vec![residue_of_rational(a, p, m)?])
    }
    fn coordinates(&self, a: &BigRational) -> Vec<BigRational> {
        vec![a.clone()]
    }
    fn to_json(&self, a: &BigRational) -> Value {
        Value::String(rat_to_string(a))
    }
    fn label(&self) -> String {
        "Q".into()
    }
}

impl CoefficientRing for CyclotomicField {
    fn rational(&self, r: &BigRational) -> Result<Cyclo> {
        Ok(self.from_rational(r))
    }
    fn root_of_unity(&self, e: u64, order: u64) -> Result<Cyclo> {
        let (e, o) = reduce_root(e, order);
        if self.order() % o != 0 && !(o == 2 && self.order() % 2 == 1) {
            return Err(Error::Unsupported(format!("Q(ζ_{}) has no primitive {o}-th root of unity", self.order())));
        }
        if self.order() % o == 0 {
            Ok(self.zeta_pow((e * (self.order() / o)) as i64))
        } else {
            Ok(self.neg(&self.one()))
        }
    }
    fn scale_int(&self, a: &Cyclo, n: &BigInt) -> Cyclo {
        a.iter().map(|c| c * n).collect()
    }
    fn residues_mod(&self, a: &Cyclo, p: u64, m: u32) -> Result<Vec<BigInt>> {
        a.iter().map(|c| residue_of_rational(c, p, m)).collect()
    }
    fn coordinates(&self, a: &Cyclo) -> Vec<BigRational> {
        a.clone()
    }
    fn to_json(&self, a: &Cyclo) -> Value {
        Value::Array(a.iter().map(|c| Value::String(rat_to_string(c))).collect())
    }
    fn label(&self) -> String {
        format!("Q(zeta_{})", self.order())
    }
}

impl Residues {
    /// (p, m) with modulus p^m.
    fn prime_power_parts(&self) -> Result<(u64, u32)> {
        let n = self.modulus.to_u64().ok_or_else(|| Error::Unsupported("modulus too large".into()))?;
        match factorize(n).as_slice() {
            [(p, m)] => Ok((*p, *m)),
            _ => Err(Error::Unsupported(format!("Z/{n} is not a prime-power residue ring"))),
        }
    }
}

impl CoefficientRing for Residues {
    fn rational(&self, r: &BigRational) -> Result<BigInt> {
        self.from_rational(r).ok_or_else(|| Error::NotIntegral(format!("{} has a denominator not invertible mod {}", rat_to_string(r), self.modulus)))
    }
    fn root_of_unity(&self, e: u64, order: u64) -> Result<BigInt> {
        match reduce_root(e, order) {
            (_, 1) => Ok(self.one()),
            (_, 2) => Ok(self.neg(&self.one())),
            (e, o) => {
                let (p, m) = self.prime_power_parts()?;
                Ok(RootOfUnityMod::new(o, p, m)?.power(e))
            }
        }
    }
    fn scale_int(&self, a: &BigInt, n: &BigInt) -> BigInt {
        self.reduce(&(a * n))
    }
    fn linear_combination(&self, basis: &[BigInt], coeffs: &[BigInt]) -> BigInt {
        self.reduce(&basis.iter().zip(coeffs).map(|(b, c)| b * c).sum::<BigInt>())
    }
    fn residues_mod(&self, a: &BigInt, p: u64, m: u32) -> Result<Vec<BigInt>> {
        let target = num_traits::pow(BigInt::from(p), m as usize);
        if (&self.modulus % &target) != BigInt::zero() {
            return Err(invalid(format!("{p}^{m} does not divide the coefficient modulus {}", self.modulus)));
        }
        Ok(vec![a % target])
    }
    fn coordinates(&self, a: &BigInt) -> Vec<BigRational> {
        vec![BigRational::from_integer(a.clone())]
    }
    fn to_json(&self, a: &BigInt) -> Value {
        Value::String(a.to_string())
    }
    fn label(&self) -> String {
        format!("Z/{}", self.modulus)
    }
}

impl CoefficientRing for GroupRing {
    fn rational(&self, r: &BigRational) -> Result<GroupRingElement> {
        GroupRingElement::scalar(&self.group, self.coeff.clone(), r.clone())
    }
    /// ±1 always; other roots only in Q[C_N] viewed as exponent arithmetic.
    fn root_of_unity(&self, e: u64, order: u64) -> Result<GroupRingElement> {
        match reduce_root(e, order) {
            (_, 1) => Ok(self.one()),
            (_, 2) if self.group.rank() != 1 || self.group.exponent() % 2 == 1 => Ok(self.neg(&self.one())),
            (e, o) if self.group.rank() == 1 && self.group.exponent() % o == 0 => {
                Ok(self.basis(self.group.pow(self.group.generator(0), (e * (self.group.exponent() / o)) as i64)))
            }
            (_, o) => Err(Error::Unsupported(format!("no primitive {o}-th root of unity among the group elements"))),
        }
    }
    fn group_element(&self, g: Elem) -> Result<GroupRingElement> {
        if g >= self.group.order() {
            return Err(invalid(format!("group element {g} out of range")));
        }
        Ok(self.basis(g))
    }
    fn scale_int(&self, a: &GroupRingElement, n: &BigInt) -> GroupRingElement {
        a.scale(&BigRational::from_integer(n.clone())).expect("integers embed")
    }
    fn linear_combination(&self, basis: &[GroupRingElement], coeffs: &[BigInt]) -> GroupRingElement {
        let mut out = vec![BigRational::zero(); self.group.order()];
        for (b, c) in basis.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()) {
            for (g, x) in b.coeffs().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                out[g] += x * c;
            }
        }
        GroupRingElement::from_coeffs(&self.group, self.coeff.clone(), out).expect("closed under integer combinations")
    }
    fn residues_mod(&self, a: &GroupRingElement, p: u64, m: u32) -> Result<Vec<BigInt>> {
        if let CoeffRing::ModPrimePower { p: q, m: k } = self.coeff {
            if q != p || k < m {
                return Err(invalid(format!("cannot reduce Z/{q}^{k} coefficients modulo {p}^{m}")));
            }
        }
        a.coeffs().iter().map(|c| residue_of_rational(c, p, m)).collect()
    }
    fn coordinates(&self, a: &GroupRingElement) -> Vec<BigRational> {
        a.coeffs().to_vec()
    }
    fn to_json(&self, a: &GroupRingElement) -> Value {
        Value::Array(a.coeffs().iter().map(|c| Value::String(rat_to_string(c))).collect())
    }
    fn label(&self) -> String {
        format!("{}[G], G = {:?}", self.coeff.label(), self.group.invariants())
    }
}

/// The nebentypus of an expansion: a primitive Dirichlet character, or the
/// canonical character a ↦ σ_a of an abelian field for group-ring families.
#[derive(Debug, Clone, PartialEq)]
pub enum Nebentypus {
    Dirichlet(DirichletCharacter),
    Family(Arc<AbelianFieldQ>),
}

impl Nebentypus {
    pub fn trivial() -> Self {
        Nebentypus::Dirichlet(DirichletCharacter::trivial(1))
    }

    fn is_trivial(&self) -> bool {
        matches!(self, Nebentypus::Dirichlet(c) if c.is_trivial())
    }

    /// Value at a, viewed at the given level (zero off the units).
    fn value<R: CoefficientRing>(&self, ring: &R, a: u64, level: u64) -> Result<Option<R::Elem>> {
        if gcd(a as i64, level as i64) != 1 {
            return Ok(None);
        }
        match self {
            Nebentypus::Dirichlet(chi) => match chi.value_exponent(a as i64) {
                Some(e) => ring.root_of_unity(e, chi.value_order()).map(Some),
                None => Ok(None),
            },
            Nebentypus::Family(field) => ring.group_element(field.sigma(a as i64)?).map(Some),
        }
    }

    fn product(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Nebentypus::Dirichlet(a), Nebentypus::Dirichlet(b)) => {
                let m = lcm(a.modulus() as i64, b.modulus() as i64) as u64;
                Ok(Nebentypus::Dirichlet(a.induce(m)?.mul(&b.induce(m)?)?.primitive()))
            }
            (x, y) if y.is_trivial() => Ok(x.clone()),
            (x, y) if x.is_trivial() => Ok(y.clone()),
            _ => Err(Error::Unsupported("product of two group-ring families".into())),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Nebentypus::Dirichlet(chi) => serde_json::to_value(chi.label()).expect("serializable"),
            Nebentypus::Family(field) => json!({ "family_conductor": field.conductor(), "kernel": field.kernel_generators() }),
        }
    }
}

/// c(m) = Σ_{d | m, gcd(d, n) = 1} basis[label(d)]·(m/d)^{k−1} for m ≥ 1.
#[derive(Debug)]
struct DivisorSum<R: Ring> {
    k: u64,
    modulus: u64,
    table: Vec<Option<usize>>,
    basis: Vec<R::Elem>,
    constant: R::Elem,
}

impl<R: CoefficientRing> DivisorSum<R> {
    fn evaluate(&self, ring: &R, bound: usize) -> Vec<R::Elem> {
        let powers: Vec<BigInt> = (0..=bound).map(|j| num_traits::pow(BigInt::from(j), (self.k - 1) as usize)).collect();
        let labels = self.basis.len();
        let mut buckets = vec![vec![BigInt::zero(); labels]; bound + 1];
        let n = self.modulus.max(1) as usize;
        for d in 1..=bound {
            if let Some(l) = self.table[d % n] {
                for j in 1..=bound / d {
                    buckets[d * j][l] += &powers[j];
                }
            }
        }
        let mut out = Vec::with_capacity(bound + 1);
        out.push(self.constant.clone());
        out.extend(buckets[1..].iter().map(|b| ring.linear_combination(&self.basis, b)));
        out
    }
}

#[derive(Debug)]
enum Node<R: Ring> {
    DivisorSum(Arc<DivisorSum<R>>),
    Constant(R::Elem),
    /// c(m) = c(mℓ) + [ℓ | m]·factor·c(m/ℓ), with factor = ψ(ℓ)ℓ^{k−1} (zero for U_ℓ)
    Hecke { child: usize, ell: u64, factor: R::Elem },
    /// c(m) = c(m/q) if q | m, else 0
    RaiseLevel { child: usize, q: u64 },
    Scale { child: usize, factor: R::Elem },
    Sum { a: usize, b: usize },
    Product { a: usize, b: usize },
    Cached { child: usize, prefix: Arc<Vec<R::Elem>> },
}

impl<R: Ring> Clone for Node<R> {
    fn clone(&self) -> Self {
        match self {
            Node::DivisorSum(d) => Node::DivisorSum(d.clone()),
            Node::Constant(c) => Node::Constant(c.clone()),
            Node::Hecke { child, ell, factor } => Node::Hecke { child: *child, ell: *ell, factor: factor.clone() },
            Node::RaiseLevel { child, q } => Node::RaiseLevel { child: *child, q: *q },
            Node::Scale { child, factor } => Node::Scale { child: *child, factor: factor.clone() },
            Node::Sum { a, b } => Node::Sum { a: *a, b: *b },
            Node::Product { a, b } => Node::Product { a: *a, b: *b },
            Node::Cached { child, prefix } => Node::Cached { child: *child, prefix: prefix.clone() },
        }
    }
}

impl<R: Ring> Node<R> {
    fn shifted(&self, off: usize) -> Self {
        let mut n = self.clone();
        match &mut n {
            Node::Hecke { child, .. } | Node::RaiseLevel { child, .. } | Node::Scale { child, .. } | Node::Cached { child, .. } => *child += off,
            Node::Sum { a, b } | Node::Product { a, b } => {
                *a += off;
                *b += off;
            }
            Node::DivisorSum(_) | Node::Constant(_) => {}
        }
        n
    }
}

/// Hecke-type operators on expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeckeOp {
    T(u64),
    U(u64),
    Diamond(u64),
    RaiseLevel(u64),
}

/// A q-expansion given by a lazily evaluated expression over coefficient
/// providers. Nodes are stored children-first; the root is the last node.
#[derive(Debug, Clone)]
pub struct QExpansion<R: CoefficientRing> {
    ring: R,
    weight: u64,
    level: u64,
    nebentypus: Nebentypus,
    nodes: Vec<Node<R>>,
}

impl<R: CoefficientRing> QExpansion<R> {
    fn leaf(ring: &R, weight: u64, level: u64, nebentypus: Nebentypus, node: Node<R>) -> Self {
        QExpansion { ring: ring.clone(), weight, level, nebentypus, nodes: vec![node] }
    }

    /// The constant series c, of weight 0 and level 1.
    pub fn constant(ring: &R, c: R::Elem) -> Self {
        Self::leaf(ring, 0, 1, Nebentypus::trivial(), Node::Constant(c))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn nebentypus(&self) -> &Nebentypus {
        &self.nebentypus
    }

    fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    fn with_node(&self, node: Node<R>) -> Self {
        let mut out = self.clone();
        out.nodes.push(node);
        out
    }

    /// Appends other's nodes; returns the index of its root.
    fn absorb(&mut self, other: &Self) -> usize {
        let off = self.nodes.len();
        self.nodes.extend(other.nodes.iter().map(|n| n.shifted(off)));
        self.nodes.len() - 1
    }

    pub fn hecke_action(&self, op: HeckeOp) -> Result<Self> {
        match op {
            HeckeOp::T(ell) => {
                if !is_prime(ell) || self.level % ell == 0 {
                    return Err(invalid(format!("T_{ell} needs a prime not dividing the level {}", self.level)));
                }
                let psi = self.nebentypus.value(&self.ring, ell, self.level)?.expect("ℓ is prime to the level");
                let factor = self.ring.scale_int(&psi, &num_traits::pow(BigInt::from(ell), (self.weight.max(1) - 1) as usize));
                Ok(self.with_node(Node::Hecke { child: self.root(), ell, factor }))
            }
            HeckeOp::U(q) => {
                if !is_prime(q) || self.level % q != 0 {
                    return Err(invalid(format!("U_{q} needs a prime dividing the level {}", self.level)));
                }
                Ok(self.with_node(Node::Hecke { child: self.root(), ell: q, factor: self.ring.zero() }))
            }
            HeckeOp::Diamond(d) => {
                let psi = self.nebentypus.value(&self.ring, d, self.level)?.ok_or_else(|| invalid(format!("⟨{d}⟩ needs gcd({d}, {}) = 1", self.level)))?;
                Ok(self.with_node(Node::Scale { child: self.root(), factor: psi }))
            }
            HeckeOp::RaiseLevel(q) => {
                if q == 0 {
                    return Err(invalid("level raising by 0"));
                }
                let mut out = self.with_node(Node::RaiseLevel { child: self.root(), q });
                out.level *= q;
                Ok(out)
            }
        }
    }

    pub fn hecke_t(&self, ell: u64) -> Result<Self> {
        self.hecke_action(HeckeOp::T(ell))
    }

    pub fn hecke_u(&self, q: u64) -> Result<Self> {
        self.hecke_action(HeckeOp::U(q))
    }

    pub fn raise_level(&self, q: u64) -> Result<Self> {
        self.hecke_action(HeckeOp::RaiseLevel(q))
    }

    pub fn scale(&self, factor: &R::Elem) -> Self {
        self.with_node(Node::Scale { child: self.root(), factor: factor.clone() })
    }

    pub fn scale_rational(&self, r: &BigRational) -> Result<Self> {
        Ok(self.scale(&self.ring.rational(r)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.weight != other.weight || self.nebentypus != other.nebentypus {
            return Err(invalid("sum of expansions with different weight or nebentypus"));
        }
        let mut out = self.clone();
        let (a, b) = (out.root(), out.absorb(other));
        out.nodes.push(Node::Sum { a, b });
        out.level = lcm(self.level as i64, other.level as i64) as u64;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&self.ring.neg(&self.ring.one())))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let nebentypus = self.nebentypus.product(&other.nebentypus)?;
        let mut out = self.clone();
        let (a, b) = (out.root(), out.absorb(other));
        out.nodes.push(Node::Product { a, b });
        out.weight += other.weight;
        out.level = lcm(self.level as i64, other.level as i64) as u64;
        out.nebentypus = nebentypus;
        Ok(out)
    }

    /// f^e by repeated squaring inside one node arena.
    pub fn pow(&self, e: u64) -> Result<Self> {
        let mut nebentypus = Nebentypus::trivial();
        for _ in 0..e {
            nebentypus = nebentypus.product(&self.nebentypus)?;
        }
        let mut out = self.clone();
        out.nodes.push(Node::Constant(self.ring.one()));
        let mut acc = out.root();
        let mut base = self.root();
        let mut e_left = e;
        while e_left > 0 {
            if e_left & 1 == 1 {
                out.nodes.push(Node::Product { a: acc, b: base });
                acc = out.root();
            }
            e_left >>= 1;
            if e_left > 0 {
                out.nodes.push(Node::Product { a: base, b: base });
                base = out.root();
            }
        }
        out.nodes.push(Node::Scale { child: acc, factor: self.ring.one() });
        out.weight = self.weight * e;
        out.level = if e == 0 { 1 } else { self.level };
        out.nebentypus = nebentypus;
        Ok(out)
    }

    /// Memoizes c(0..=bound); later evaluations beyond it fall through to the provider.
    pub fn cached(&self, bound: usize) -> Self {
        let prefix = Arc::new(self.coefficients(bound));
        self.with_node(Node::Cached { child: self.root(), prefix })
    }

    /// c(0), c(1), …, c(bound), where c(0) is the constant term at ∞.
    pub fn coefficients(&self, bound: usize) -> Vec<R::Elem> {
        let n = self.nodes.len();
        let mut need: Vec<Option<usize>> = vec![None; n];
        need[n - 1] = Some(bound);
        let demand = |need: &mut Vec<Option<usize>>, i: usize, b: usize| need[i] = Some(need[i].map_or(b, |x| x.max(b)));
        for i in (0..n).rev() {
            let Some(b) = need[i] else { continue };
            match &self.nodes[i] {
                Node::DivisorSum(_) | Node::Constant(_) => {}
                Node::Hecke { child, ell, .. } => demand(&mut need, *child, b * *ell as usize),
                Node::RaiseLevel { child, q } => demand(&mut need, *child, b / *q as usize),
                Node::Scale { child, .. } => demand(&mut need, *child, b),
                Node::Sum { a, b: c } | Node::Product { a, b: c } => {
                    demand(&mut need, *a, b);
                    demand(&mut need, *c, b);
                }
                Node::Cached { child, prefix } => {
                    if b >= prefix.len() {
                        demand(&mut need, *child, b);
                    }
                }
            }
        }
        let r = &self.ring;
        let mut values: Vec<Vec<R::Elem>> = vec![Vec::new(); n];
        for i in 0..n {
            let Some(b) = need[i] else { continue };
            let v: Vec<R::Elem> = match &self.nodes[i] {
                Node::DivisorSum(d) => d.evaluate(r, b),
                Node::Constant(c) => (0..=b).map(|m| if m == 0 { c.clone() } else { r.zero() }).collect(),
                Node::Hecke { child, ell, factor } => {
                    let c = &values[*child];
                    let ell = *ell as usize;
                    (0..=b)
                        .map(|m| {
                            let head = c[m * ell].clone();
                            if m % ell == 0 && !r.is_zero(factor) {
                                r.add(&head, &r.mul(factor, &c[m / ell]))
                            } else {
                                head
                            }
                        })
                        .collect()
                }
                Node::RaiseLevel { child, q } => {
                    let q = *q as usize;
                    (0..=b).map(|m| if m % q == 0 { values[*child][m / q].clone() } else { r.zero() }).collect()
                }
                Node::Scale { child, factor } => values[*child][..=b].iter().map(|x| r.mul(factor, x)).collect(),
                Node::Sum { a, b: c } => values[*a][..=b].iter().zip(&values[*c][..=b]).map(|(x, y)| r.add(x, y)).collect(),
                Node::Product { a, b: c } => {
                    let (x, y) = (&values[*a], &values[*c]);
                    (0..=b).map(|m| r.sum((0..=m).map(|j| r.mul(&x[j], &y[m - j])).collect::<Vec<_>>().iter())).collect()
                }
                Node::Cached { child, prefix } => {
                    if b < prefix.len() {
                        prefix[..=b].to_vec()
                    } else {
                        values[*child][..=b].to_vec()
                    }
                }
            };
            values[i] = v;
        }
        values.pop().expect("root evaluated")
    }

    pub fn coefficient(&self, m: usize) -> R::Elem {
        self.coefficients(m).pop().expect("nonempty")
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coefficient(0)
    }

    /// {metadata, constant_term, coefficients[1..=n]} as JSON.
    pub fn prefix_json(&self, n: usize) -> Value {
        let c = self.coefficients(n);
        json!({
            "metadata": {
                "weight": self.weight,
                "level": self.level,
                "nebentypus": self.nebentypus.to_json(),
                "coefficient_ring": self.ring.label(),
            },
            "constant_term": self.ring.to_json(&c[0]),
            "coefficients": c[1..].iter().map(|x| self.ring.to_json(x)).collect::<Vec<_>>(),
        })
    }
}

fn check_prime_set(s: &[u64], what: &str) -> Result<Vec<u64>> {
    if let Some(p) = s.iter().find(|&&p| !is_prime(p)) {
        return Err(invalid(format!("{what} contains the non-prime {p}")));
    }
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// cond(ψ) times the primes of S not dividing it.
pub fn stabilized_level(psi: &DirichletCharacter, s: &[u64]) -> u64 {
    let f = psi.conductor();
    s.iter().filter(|&&p| f % p != 0).fold(f, |acc, &p| acc * p)
}

fn check_parity(k: u64, odd: bool) -> Result<()> {
    if k == 0 {
        return Err(invalid("weight must be positive"));
    }
    if odd != (k % 2 == 1) {
        return Err(Error::Parity(format!("character parity does not match weight {k}")));
    }
    Ok(())
}

/// Constant term at ∞ of E_k(ψ_S, 1) in Q(ζ_E), ψ primitive.
pub fn stabilized_constant(k: u64, psi: &DirichletCharacter, s: &[u64]) -> Result<(CyclotomicField, Cyclo)> {
    let field = value_field(psi);
    let n = stabilized_level(psi, s);
    let half = rat(1, 2);
    let value = match (k > 1, n == 1) {
        (true, false) => field.zero(),
        (true, true) => field.scale(&l_at_nonpositive(&psi.inverse(), k)?, &half),
        (false, false) => field.scale(&depleted_l_value(psi, 1, s)?, &half),
        (false, true) => {
            let sum = field.add(&l_at_nonpositive(psi, 1)?, &l_at_nonpositive(&psi.inverse(), 1)?);
            field.scale(&sum, &half)
        }
    };
    Ok((field, value))
}

/// The S-stabilized Eisenstein series E_k(ψ_S, 1): c(m) = Σ_{r | m} ψ_S(m/r) r^{k−1},
/// with ψ replaced by the primitive character inducing it.
pub fn eisenstein_qexp<R: CoefficientRing>(ring: &R, k: u64, psi: &DirichletCharacter, s: &[u64]) -> Result<QExpansion<R>> {
    let psi = psi.primitive();
    check_parity(k, psi.is_odd())?;
    let s = check_prime_set(s, "S")?;
    let n = stabilized_level(&psi, &s);
    let (field, c0) = stabilized_constant(k, &psi, &s)?;
    let constant = ring.from_cyclotomic(&field, &c0)?;
    divisor_sum_series(ring, k, &psi, n, constant, &BigRational::one())
}

/// E_k/c₀ for level 1 and even k: constant term 1 and c(m) = σ_{k−1}(m)/c₀.
pub fn normalized_level_one<R: CoefficientRing>(ring: &R, k: u64) -> Result<QExpansion<R>> {
    let psi = DirichletCharacter::trivial(1);
    check_parity(k, false)?;
    if k < 2 {
        return Err(invalid("level one needs weight at least 2"));
    }
    let (field, c0) = stabilized_constant(k, &psi, &[])?;
    let c0 = field.as_rational(&c0).expect("ζ values are rational");
    divisor_sum_series(ring, k, &psi, 1, ring.one(), &(BigRational::one() / c0))
}

fn divisor_sum_series<R: CoefficientRing>(ring: &R, k: u64, psi: &DirichletCharacter, n: u64, constant: R::Elem, scale: &BigRational) -> Result<QExpansion<R>> {
    // values are powers of ζ_o with o the order of ψ, which may be smaller than the exponent of (Z/n)^*
    let o = psi.order();
    let step = psi.value_order() / o;
    let s = ring.rational(scale)?;
    let basis = (0..o).map(|l| Ok(ring.mul(&s, &ring.root_of_unity(l, o)?))).collect::<Result<Vec<_>>>()?;
    let table = (0..n.max(1))
        .map(|a| if n == 1 { Some(0) } else if gcd(a as i64, n as i64) == 1 { psi.value_exponent(a as i64).map(|x| (x / step) as usize) } else { None })
        .collect();
    let leaf = DivisorSum { k, modulus: n, table, basis, constant };
    Ok(QExpansion::leaf(ring, k, n, Nebentypus::Dirichlet(psi.clone()), Node::DivisorSum(Arc::new(leaf))))
}

/// The group-ring Eisenstein series over G = Gal(H/Q):
/// c(m) = Σ_{r | m, gcd(m/r, n) = 1} σ_{m/r} r^{k−1}, n the conductor of H times the
/// extra primes in S. The constant term is 0 for k > 1 and Θ_S^#(0)/2 for k = 1,
/// S the primes dividing n.
pub fn family_qexp(ring: &GroupRing, k: u64, field: &AbelianFieldQ, s: &[u64]) -> Result<QExpansion<GroupRing>> {
    if ring.group != *field.group() {
        return Err(invalid("group ring does not match the Galois group"));
    }
    if k == 0 {
        return Err(invalid("weight must be positive"));
    }
    let s = check_prime_set(s, "S")?;
    let f = field.conductor();
    let n = s.iter().filter(|&&p| f % p != 0).fold(f, |acc, &p| acc * p);
    if n == 1 {
        return Err(Error::Parity("the canonical character of Q itself is even; no odd-weight family".into()));
    }
    let constant = if k > 1 {
        ring.zero()
    } else {
        let th = theta(field, &prime_divisors(n), &[])?;
        let half = th.sharp().scale(&rat(1, 2))?;
        GroupRingElement::from_coeffs(&ring.group, ring.coeff.clone(), half.coeffs().to_vec())?
    };
    let g = ring.group.clone();
    let basis: Vec<GroupRingElement> = g.elements().map(|x| ring.basis(x)).collect();
    let table = (0..n).map(|a| if gcd(a as i64, n as i64) == 1 { field.sigma(a as i64).ok() } else { None }).collect();
    let leaf = DivisorSum { k, modulus: n, table, basis, constant };
    Ok(QExpansion::leaf(ring, k, n, Nebentypus::Family(Arc::new(field.clone())), Node::DivisorSum(Arc::new(leaf))))
}

/// The Dirichlet character a ↦ χ(σ_a) of conductor dividing that of H.
pub fn dirichlet_from_galois_character(field: &AbelianFieldQ, chi: &Character) -> Result<DirichletCharacter> {
    let units = crate::stickelberger::UnitGroupMod::new(field.conductor());
    let exp = field.group().exponent();
    let exps = units
        .gens
        .iter()
        .zip(&units.orders)
        .map(|(&g, &o)| {
            let v = chi.value_exponent(field.sigma(g as i64)?);
            if (v * o) % exp != 0 {
                return Err(invalid("character value order does not divide the generator order"));
            }
            Ok(v * o / exp)
        })
        .collect::<Result<Vec<_>>>()?;
    DirichletCharacter::new(field.conductor(), exps)
}

/// Specializes each coefficient of a family at χ, landing in Z/p^m.
pub fn specialize_family(f: &QExpansion<GroupRing>, chi: &Character, p: u64, m: u32, bound: usize) -> Result<Vec<BigInt>> {
    let root = RootOfUnityMod::new(f.ring().group.exponent(), p, m)?;
    f.coefficients(bound).iter().map(|x| x.eval_character_mod(chi, &root)).collect()
}

/// E_k(ψ_S) − ψ(p)·E_k(ψ_S)|p = E_k(ψ_{S ∪ {p}}), the stabilization with U_p-eigenvalue p^{k−1}.
pub fn ordinary_stabilization<R: CoefficientRing>(e: &QExpansion<R>, p: u64) -> Result<QExpansion<R>> {
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    let psi_p = e.nebentypus.value(&e.ring, p, e.level)?.unwrap_or_else(|| e.ring.zero());
    e.sub(&e.raise_level(p)?.scale(&psi_p))
}

/// W_k(ψ_P, 1) = Σ_{m | t} μ(m) ψ(m) m^k E_k(ψ_P, 1)|m, checked against
/// c(ℓ, W) = c(ℓ, E) − ψ(ℓ)ℓ^k for ℓ ∈ T.
pub fn w_modified<R: CoefficientRing>(ring: &R, k: u64, psi: &DirichletCharacter, p: &[u64], t: &[u64]) -> Result<QExpansion<R>> {
    let psi = psi.primitive();
    let p = check_prime_set(p, "P")?;
    let t = check_prime_set(t, "T")?;
    if t.is_empty() {
        return Err(invalid("T must be nonempty"));
    }
    let c0 = psi.conductor();
    if let Some(l) = t.iter().find(|&&l| p.contains(&l) || c0 % l == 0) {
        return Err(invalid(format!("{l} ∈ T divides P or the conductor")));
    }
    let e = eisenstein_qexp(ring, k, &psi, &p)?;
    let mut w: Option<QExpansion<R>> = None;
    for mask in 0u32..(1 << t.len()) {
        let ls: Vec<u64> = t.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &l)| l).collect();
        let m: u64 = ls.iter().product();
        let psi_m = ring.root_of_unity(psi.value_exponent(m as i64).expect("T is prime to the conductor"), psi.value_order())?;
        let sign = if ls.len() % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let factor = ring.scale_int(&psi_m, &(sign * num_traits::pow(BigInt::from(m), k as usize)));
        let term = e.raise_level(m)?.scale(&factor);
        w = Some(match w {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let w = w.expect("T nonempty");
    let top = *t.last().expect("nonempty") as usize;
    let (cw, ce) = (w.coefficients(top), e.coefficients(top));
    for &l in &t {
        let psi_l = ring.root_of_unity(psi.value_exponent(l as i64).expect("coprime"), psi.value_order())?;
        let expected = ring.sub(&ce[l as usize], &ring.scale_int(&psi_l, &num_traits::pow(BigInt::from(l), k as usize)));
        if cw[l as usize] != expected {
            return Err(Error::Structural(format!("c({l}, W) does not match c({l}, E) − ψ({l}){l}^{k}")));
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_characters, FiniteAbelianGroup};
    use crate::arith::{divisors, moebius};

    fn q(n: i64) -> BigRational {
        rat(n, 1)
    }

    #[test]
    fn level_one_examples() {
        let e4 = eisenstein_qexp(&Rationals, 4, &DirichletCharacter::trivial(1), &[]).unwrap();
        let c = e4.coefficients(10);
        assert_eq!(c[0], rat(1, 240));
        assert_eq!(c[1], q(1));
        assert_eq!(c[2], q(9));
        assert_eq!(c[10], q(1 + 8 + 125 + 1000));
        let t2 = e4.hecke_t(2).unwrap();
        assert_eq!(t2.coefficient(1), q(9));
        assert_eq!(t2.coefficients(50), e4.scale(&q(9)).coefficients(50));
        let v = normalized_level_one(&Rationals, 4).unwrap().coefficients(3);
        assert_eq!(v, vec![q(1), q(240), q(2160), q(6720)]);
        assert!(eisenstein_qexp(&Rationals, 3, &DirichletCharacter::trivial(1), &[]).is_err());
    }

    #[test]
    fn weight_one_examples() {
        let chi = DirichletCharacter::kronecker(-4).unwrap();
        let e = eisenstein_qexp(&Rationals, 1, &chi, &[]).unwrap();
        let c = e.coefficients(25);
        assert_eq!(c[0], rat(1, 4));
        assert_eq!(c[5], q(2));
        // θ(q)^2/4 = r_2(m)/4
        for m in 1..=25usize {
            let r2 = (-5i64..=5).flat_map(|x| (-5i64..=5).map(move |y| x * x + y * y)).filter(|&s| s == m as i64).count();
            assert_eq!(c[m], rat(r2 as i64, 4), "m = {m}");
        }
        let raised = e.raise_level(2).unwrap();
        assert_eq!(raised.coefficient(6), c[3]);
        assert_eq!(raised.level(), 8);
        let k3 = DirichletCharacter::kronecker(-3).unwrap();
        assert_eq!(eisenstein_qexp(&Rationals, 1, &k3, &[]).unwrap().constant_term(), rat(1, 6));
        assert!(matches!(eisenstein_qexp(&Rationals, 2, &chi, &[]), Err(Error::Parity(_))));
    }

    #[test]
    fn depletion_matches_divisor_sum_oracle() {
        for (d, s) in [(-4i64, vec![3u64, 5]), (-3, vec![2]), (-7, vec![7, 2])] {
            let chi = DirichletCharacter::kronecker(d).unwrap();
            for k in [1u64, 3, 5] {
                let e = eisenstein_qexp(&Rationals, k, &chi, &s).unwrap();
                let c = e.coefficients(60);
                for m in 1..=60u64 {
                    let direct: i64 = divisors(m)
                        .into_iter()
                        .filter(|&a| s.iter().all(|p| a % p != 0))
                        .map(|a| chi.value_int(a as i64).unwrap_or(0) * ((m / a) as i64).pow(k as u32 - 1))
                        .sum();
                    assert_eq!(c[m as usize], q(direct));
                }
            }
        }
    }

    #[test]
    fn u_eigenvalue_and_stabilization() {
        let chi = DirichletCharacter::kronecker(-4).unwrap();
        for k in [1u64, 3, 5] {
            let e = eisenstein_qexp(&Rationals, k, &chi, &[3]).unwrap();
            let u = e.hecke_u(3).unwrap();
            assert_eq!(u.coefficients(50)[1..], e.scale(&q(3i64.pow(k as u32 - 1))).coefficients(50)[1..]);
            let e0 = eisenstein_qexp(&Rationals, k, &chi, &[]).unwrap();
            let st = ordinary_stabilization(&e0, 3).unwrap();
            assert_eq!(st.coefficients(60)[1..], e.coefficients(60)[1..]);
            // U_2 on the conductor prime
            let u2 = e0.hecke_u(2).unwrap();
            assert_eq!(u2.coefficients(40)[1..], e0.scale(&q(2i64.pow(k as u32 - 1))).coefficients(40)[1..]);
        }
    }

    #[test]
    fn hecke_eigenvalues_in_exponent_ring() {
        for f in [5u64, 7, 8, 13] {
            for chi in DirichletCharacter::primitive_of_conductor(f).into_iter().filter(|c| c.is_odd()) {
                let e = chi.value_order();
                let ring = GroupRing::new(FiniteAbelianGroup::cyclic(e), CoeffRing::Rationals);
                let ser = eisenstein_qexp(&ring, 3, &chi, &[]).unwrap().cached(40 * 11);
                for ell in [3u64, 11] {
                    if f % ell == 0 {
                        continue;
                    }
                    let psi = ring.root_of_unity(chi.value_exponent(ell as i64).unwrap(), e).unwrap();
                    let lambda = ring.add(&psi, &ring.from_i64((ell * ell) as i64));
                    assert_eq!(ser.hecke_t(ell).unwrap().coefficients(40), ser.scale(&lambda).coefficients(40));
                }
            }
        }
    }

    #[test]
    fn level_raising_commutes() {
        let chi = DirichletCharacter::kronecker(-3).unwrap();
        let e = eisenstein_qexp(&Rationals, 3, &chi, &[]).unwrap();
        let a = e.raise_level(2).unwrap().raise_level(5).unwrap();
        let b = e.raise_level(5).unwrap().raise_level(2).unwrap();
        assert_eq!(a.coefficients(200), b.coefficients(200));
        assert_eq!(a.coefficients(200), e.raise_level(10).unwrap().coefficients(200));
    }

    #[test]
    fn diamond_scales_by_the_character() {
        let chi = DirichletCharacter::kronecker(-4).unwrap();
        let e = eisenstein_qexp(&Rationals, 1, &chi, &[]).unwrap();
        assert_eq!(e.hecke_action(HeckeOp::Diamond(3)).unwrap().coefficients(20), e.scale(&q(-1)).coefficients(20));
        assert!(e.hecke_action(HeckeOp::Diamond(2)).is_err());
        assert!(e.hecke_t(2).is_err() && e.hecke_u(3).is_err());
    }

    #[test]
    fn deep_operator_chains_evaluate_iteratively() {
        let e = eisenstein_qexp(&Residues::prime_power(7, 2), 4, &DirichletCharacter::trivial(1), &[]).unwrap();
        let mut f = e.clone();
        for _ in 0..2000 {
            f = f.hecke_action(HeckeOp::RaiseLevel(1)).unwrap();
        }
        assert_eq!(f.coefficients(30), e.coefficients(30));
    }

    #[test]
    fn products_and_powers() {
        let e4 = eisenstein_qexp(&Rationals, 4, &DirichletCharacter::trivial(1), &[]).unwrap();
        let e8 = eisenstein_qexp(&Rationals, 8, &DirichletCharacter::trivial(1), &[]).unwrap();
        // E_4^2 = E_8 after normalizing constants: (240 E_4)^2 = 480 E_8
        let lhs = e4.scale(&q(240)).pow(2).unwrap();
        let rhs = e8.scale(&q(480));
        assert_eq!(lhs.coefficients(30), rhs.coefficients(30));
        assert_eq!(lhs.weight(), 8);
        assert_eq!(e4.mul(&e4).unwrap().coefficients(20), e4.pow(2).unwrap().coefficients(20));
    }

    #[test]
    fn w_examples() {
        let chi = DirichletCharacter::kronecker(-4).unwrap();
        let w = w_modified(&Rationals, 1, &chi, &[], &[3]).unwrap();
        assert_eq!(w.coefficient(1), q(1));
        assert_eq!(w.coefficient(3), q(3));
        assert_eq!(w.level(), 12);
        assert!(w_modified(&Rationals, 1, &chi, &[], &[2]).is_err());
        assert!(w_modified(&Rationals, 1, &chi, &[3], &[3]).is_err());
        // two primes: compare with direct inclusion–exclusion
        let t = [3u64, 5];
        let w = w_modified(&Rationals, 3, &chi, &[7], &t).unwrap();
        let e = eisenstein_qexp(&Rationals, 3, &chi, &[7]).unwrap().coefficients(400);
        let cw = w.coefficients(400);
        for n in [1usize, 3, 5, 9, 15, 45, 75, 150, 225, 391] {
            let mut direct = q(0);
            for m in [1u64, 3, 5, 15] {
                if n as u64 % m == 0 {
                    let psi = chi.value_int(m as i64).unwrap();
                    direct += &e[n / m as usize] * q(moebius(m) * psi * (m as i64).pow(3));
                }
            }
            assert_eq!(cw[n], direct, "n = {n}");
        }
    }

    #[test]
    fn family_specializes_to_depleted_series() {
        for (field, p) in [(AbelianFieldQ::quadratic(-3).unwrap(), 5u64), (AbelianFieldQ::biquadratic(-4, 5).unwrap(), 3), (AbelianFieldQ::biquadratic(-3, -4).unwrap(), 7)] {
            let ring = GroupRing::new(field.group().clone(), CoeffRing::ModPrimePower { p, m: 3 });
            for k in [1u64, 3] {
                let fam = family_qexp(&ring, k, &field, &[]).unwrap();
                let n = fam.level();
                for chi in enumerate_characters(field.group()) {
                    if chi.is_odd(field.conj()) != (k % 2 == 1) {
                        continue;
                    }
                    let psi = dirichlet_from_galois_character(&field, &chi).unwrap();
                    let spec = specialize_family(&fam, &chi, p, 3, 30).unwrap();
                    let scalar = eisenstein_qexp(&Residues::prime_power(p, 3), k, &psi, &prime_divisors(n)).unwrap().coefficients(30);
                    assert_eq!(spec, scalar, "k = {k}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn prefix_json_shape() {
        let e = eisenstein_qexp(&Rationals, 4, &DirichletCharacter::trivial(1), &[]).unwrap();
        let v = e.prefix_json(3);
        assert_eq!(v["constant_term"], "1/240");
        assert_eq!(v["coefficients"], json!(["1", "9", "28"]));
        assert_eq!(v["metadata"]["weight"], 4);
    }
}
