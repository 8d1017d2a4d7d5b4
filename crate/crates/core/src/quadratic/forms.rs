use super::field::{ImagQuadField, QuadIdeal, QuadNumber, Splitting};
use crate::algebra::{AbelianQuotient, Elem, FiniteAbelianGroup};
use crate::arith::primes_up_to;
use crate::error::{invalid, structural, Result};
use crate::linalg::hnf;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{HashMap, VecDeque};

/// Positive definite binary quadratic form ax² + bxy + cy².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    pub fn inverse(&self) -> Self {
        QuadForm { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    pub fn reduce(&self) -> Self {
        reduce_big(&BigInt::from(self.a), &BigInt::from(self.b), &BigInt::from(self.c))
    }

    /// The ideal [a, (b + √D)/2].
    pub fn to_ideal(&self, field: &ImagQuadField) -> QuadIdeal {
        let d = field.disc();
        QuadIdeal::from_generators(field, &[QuadNumber::int(self.a, 0), QuadNumber::int((self.b - d) / 2, 1)])
    }

    /// Gauss composition, realized through ideal multiplication.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.disc() != other.disc() {
            return Err(structural("forms of different discriminants"));
        }
        let field = ImagQuadField::new(self.disc())?;
        Ok(ideal_to_form(&self.to_ideal(&field).mul(&other.to_ideal(&field))))
    }
}

fn reduce_big(a: &BigInt, b: &BigInt, c: &BigInt) -> QuadForm {
    let (mut a, mut b, mut c) = (a.clone(), b.clone(), c.clone());
    let disc = &b * &b - BigInt::from(4) * &a * &c;
    loop {
        // bring b into (−a, a]
        let two_a = BigInt::from(2) * &a;
        let k = (&a - &b).div_floor(&two_a);
        if !k.is_zero() {
            b += &two_a * &k;
            c = (&b * &b - &disc) / (BigInt::from(4) * &a);
        }
        if c < a {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b.is_negative() {
            b = -b;
        }
        break;
    }
    QuadForm { a: a.to_i64().unwrap(), b: b.to_i64().unwrap(), c: c.to_i64().unwrap() }
}

/// The reduced form attached to the class of a nonzero ideal.
pub fn ideal_to_form(ideal: &QuadIdeal) -> QuadForm {
    let d = BigInt::from(ideal.field.disc());
    let n0 = ideal.field.omega_norm();
    let a = &ideal.a / &ideal.c;
    let b = &ideal.b / &ideal.c;
    // N(xA + y(B + ω))/A
    let c = (&b * &b + &b * &d + &n0) / &a;
    reduce_big(&a, &(BigInt::from(2) * &b + &d), &c)
}

/// All reduced forms of discriminant D, principal form first.
pub fn reduced_forms(d: i64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 || (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm { a, b, c: (b * b - d) / (4 * a) };
            if f.is_reduced() && a.gcd(&b).gcd(&f.c) == 1 {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    out
}

/// The class group of an imaginary quadratic field, generated by classes of
/// prime ideals of small norm.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub field: ImagQuadField,
    pub forms: Vec<QuadForm>,
    index: HashMap<QuadForm, usize>,
    /// generating prime ideals, coprime to the excluded primes
    pub generators: Vec<QuadIdeal>,
    /// exponent vector over `generators` of each class (a spanning-tree word)
    words: Vec<Vec<i64>>,
    /// HNF basis of the relation lattice among the generators
    pub relations: Vec<Vec<BigInt>>,
    pub structure: AbelianQuotient,
}

impl ClassGroup {
    pub fn new(field: &ImagQuadField, excluded: &[u64]) -> Result<Self> {
        let forms = reduced_forms(field.disc());
        let h = forms.len();
        let index: HashMap<QuadForm, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let compose = |i: usize, j: usize| -> usize { index[&forms[i].compose(&forms[j]).unwrap()] };
        let identity = 0;
        // greedily pick prime ideals until their classes generate
        let mut generators: Vec<QuadIdeal> = Vec::new();
        let mut gen_class: Vec<usize> = Vec::new();
        let mut reached = vec![identity];
        let mut bound = 50u64;
        while reached.len() < h {
            for p in primes_up_to(bound).into_iter().filter(|p| !excluded.contains(p)) {
                if reached.len() == h {
                    break;
                }
                if field.splitting(p) == Splitting::Inert {
                    continue;
                }
                let prime = field.primes_above(p).remove(0);
                let cls = index[&ideal_to_form(&prime)];
                if reached.contains(&cls) {
                    continue;
                }
                generators.push(prime);
                gen_class.push(cls);
                reached = closure(&gen_class, h, identity, &compose);
            }
            bound *= 2;
            if bound > 1 << 20 {
                return Err(structural("prime ideals failed to generate the class group"));
            }
        }
        // spanning-tree words and Schreier relations
        let k = generators.len();
        let mut words: Vec<Option<Vec<i64>>> = vec![None; h];
        words[identity] = Some(vec![0; k]);
        let mut rels: Vec<Vec<BigInt>> = Vec::new();
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            let wx = words[x].clone().unwrap();
            for (j, &g) in gen_class.iter().enumerate() {
                let y = compose(x, g);
                let mut wy = wx.clone();
                wy[j] += 1;
                match &words[y] {
                    None => {
                        words[y] = Some(wy);
                        queue.push_back(y);
                    }
                    Some(old) => {
                        let rel: Vec<BigInt> = wy.iter().zip(old).map(|(a, b)| BigInt::from(a - b)).collect();
                        if rel.iter().any(|x| !x.is_zero()) {
                            rels.push(rel);
                        }
                    }
                }
            }
        }
        let relations = hnf(&rels, k);
        let structure = AbelianQuotient::from_relations(k, &relations)?;
        if structure.group.order() != h {
            return Err(structural("class group relations inconsistent with the number of reduced forms"));
        }
        let words = words.into_iter().map(|w| w.expect("generators reach every class")).collect();
        Ok(ClassGroup { field: *field, forms, index, generators, words, relations, structure })
    }

    pub fn order(&self) -> usize {
        self.forms.len()
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.structure.group
    }

    pub fn class_index(&self, ideal: &QuadIdeal) -> usize {
        self.index[&ideal_to_form(ideal)]
    }

    /// Exponents e with [ideal] = Π [generator_j]^{e_j}, all e_j ≥ 0.
    pub fn word(&self, ideal: &QuadIdeal) -> &[i64] {
        &self.words[self.class_index(ideal)]
    }

    /// The class as an element of the abstract group.
    pub fn class_of(&self, ideal: &QuadIdeal) -> Elem {
        self.structure.image(self.word(ideal))
    }

    pub fn form_of(&self, i: usize) -> QuadForm {
        self.forms[i]
    }

    pub fn form_index(&self, f: &QuadForm) -> Result<usize> {
        self.index.get(&f.reduce()).copied().ok_or_else(|| invalid("form of another discriminant"))
    }
}

fn closure(gens: &[usize], h: usize, identity: usize, compose: &dyn Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut seen = vec![false; h];
    seen[identity] = true;
    let mut out = vec![identity];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for &g in gens {
            let y = compose(x, g);
            if !seen[y] {
                seen[y] = true;
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

/// Reduced forms with the class group structure.
pub fn form_class_group(d: i64) -> Result<ClassGroup> {
    ClassGroup::new(&ImagQuadField::new(d)?, &[])
}
