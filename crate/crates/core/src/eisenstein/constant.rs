use super::bernoulli::{l_at_nonpositive, value_field, GaussSum};
use super::dirichlet::DirichletCharacter;
use super::qexp::CoefficientRing;
use crate::arith::{divisors, gcd, is_prime, lcm, moebius, prime_divisors, rat};
use crate::cyclotomic::{Cyclo, CyclotomicField};
use crate::error::{invalid, Error, Result};
use crate::ring::Ring;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

/// The cusp a/c of level n, gcd(a, c) = 1. Over Q the ideal 𝔠_A is (c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CuspDatum {
    pub level: u64,
    pub a: i64,
    pub c: i64,
}

impl CuspDatum {
    pub fn new(level: u64, a: i64, c: i64) -> Result<Self> {
        if level == 0 || gcd(a, c) != 1 {
            return Err(invalid(format!("cusp {a}/{c} of level {level} is not in lowest terms")));
        }
        Ok(CuspDatum { level, a, c })
    }

    /// Membership in C₀(b, n): gcd(b, c) = 1.
    pub fn in_c0(&self, b: u64) -> bool {
        gcd(b as i64, self.c) == 1
    }

    /// Membership in C_∞(b, n): b | c.
    pub fn in_c_inf(&self, b: u64) -> bool {
        self.c % b as i64 == 0
    }
}

/// Data for E_k(ψ_𝔓, 1) and W_k(ψ_𝔓, 1): 𝔠 = lcm(cond ψ, 𝔓), n = 𝔠·t.
#[derive(Debug, Clone)]
pub struct ConstantTermSetup {
    pub k: u64,
    pub psi: DirichletCharacter,
    pub p_ideal: u64,
    pub t: Vec<u64>,
}

/// Which form of level n to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormSpec {
    /// E_k(ψ_𝔓, 1)|m for m | t
    Raised(u64),
    /// W_k(ψ_𝔓, 1); the weight decides between the k > 1 and k = 1 tables
    Modified,
}

/// plain + tau·τ(ψ), both in Q(ζ_E).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantTerm {
    pub field: CyclotomicField,
    pub plain: Cyclo,
    pub tau: Cyclo,
}

impl ConstantTerm {
    fn zero(field: &CyclotomicField) -> Self {
        ConstantTerm { field: field.clone(), plain: field.zero(), tau: field.zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.plain) && self.field.is_zero(&self.tau)
    }

    fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        ConstantTerm { field: f.clone(), plain: f.add(&self.plain, &other.plain), tau: f.add(&self.tau, &other.tau) }
    }

    fn scale(&self, x: &Cyclo) -> Self {
        let f = &self.field;
        ConstantTerm { field: f.clone(), plain: f.mul(&self.plain, x), tau: f.mul(&self.tau, x) }
    }

    /// The value with τ(ψ) evaluated, in Q(ζ_L) for L = lcm(E, cond ψ).
    pub fn exact(&self, psi: &DirichletCharacter) -> Result<(CyclotomicField, Cyclo)> {
        let (big, tau) = GaussSum::exact(psi)?.exact.expect("exact requested");
        let plain = big.from_cyclotomic(&self.field, &self.plain)?;
        let cof = big.from_cyclotomic(&self.field, &self.tau)?;
        Ok((big.clone(), big.add(&plain, &big.mul(&cof, &tau))))
    }
}

impl ConstantTermSetup {
    pub fn new(k: u64, psi: &DirichletCharacter, p_ideal: u64, t: &[u64]) -> Result<Self> {
        let psi = psi.primitive();
        if k % 2 == 0 || !psi.is_odd() {
            return Err(Error::Parity("constant-term tables need odd k and odd ψ".into()));
        }
        if p_ideal == 0 {
            return Err(invalid("𝔓 must be a nonzero ideal"));
        }
        let mut t = t.to_vec();
        t.sort_unstable();
        t.dedup();
        if t.is_empty() || t.iter().any(|&l| !is_prime(l)) {
            return Err(invalid("T must be a nonempty set of primes"));
        }
        let s = ConstantTermSetup { k, psi, p_ideal, t };
        if let Some(l) = s.t.iter().find(|&&l| s.c() % l == 0) {
            return Err(invalid(format!("{l} ∈ T divides 𝔠 = lcm(cond ψ, 𝔓)")));
        }
        Ok(s)
    }

    pub fn c0(&self) -> u64 {
        self.psi.conductor()
    }

    pub fn c(&self) -> u64 {
        lcm(self.c0() as i64, self.p_ideal as i64) as u64
    }

    pub fn t_product(&self) -> u64 {
        self.t.iter().product()
    }

    pub fn level(&self) -> u64 {
        self.c() * self.t_product()
    }

    pub fn field(&self) -> CyclotomicField {
        value_field(&self.psi)
    }

    fn chi(&self, chi: &DirichletCharacter, a: i64) -> Cyclo {
        let f = self.field();
        chi.value_in(&f, a).unwrap_or_else(|| f.zero())
    }

    fn psi_at(&self, a: i64) -> Cyclo {
        self.chi(&self.psi, a)
    }

    fn psi_inv_at(&self, a: i64) -> Cyclo {
        self.chi(&self.psi.inverse(), a)
    }

    fn q(&self, r: BigRational) -> Cyclo {
        self.field().from_rational(&r)
    }

    fn prod(&self, items: impl IntoIterator<Item = Cyclo>) -> Cyclo {
        let f = self.field();
        items.into_iter().fold(f.one(), |acc, x| f.mul(&acc, &x))
    }

    /// 1 − ψ(p)/p^e.
    fn depletion(&self, p: u64, e: u64) -> Cyclo {
        let f = self.field();
        f.sub(&f.one(), &f.scale(&self.psi_at(p as i64), &BigRational::new(1.into(), num_traits::pow(BigInt::from(p), e as usize))))
    }

    fn p_primes(&self) -> Vec<u64> {
        prime_divisors(self.p_ideal)
    }

    /// sgn(N(−c))ψ(𝔠_A) over Q, read as ψ(−c).
    fn cusp_psi(&self, cusp: &CuspDatum) -> Cyclo {
        self.psi_at(-cusp.c)
    }

    /// ψ(𝔟_A) at cusps of C_∞(c₀), read as sgn(a)ψ^{-1}(|a|) = ψ^{-1}(a).
    fn cusp_b(&self, cusp: &CuspDatum) -> Cyclo {
        self.psi_inv_at(cusp.a)
    }

    fn check_cusp(&self, cusp: &CuspDatum) -> Result<()> {
        if cusp.level != self.level() {
            return Err(invalid(format!("cusp of level {} for a form of level {}", cusp.level, self.level())));
        }
        Ok(())
    }

    /// Split of the primes of m into J_m (cusp in C₀(ℓ)) and J_m^c (cusp in C_∞(ℓ)).
    fn split(&self, m: u64, cusp: &CuspDatum) -> (Vec<u64>, Vec<u64>) {
        prime_divisors(m).into_iter().partition(|&l| cusp.in_c0(l))
    }

    fn half_l(&self, chi: &DirichletCharacter, k: u64) -> Result<Cyclo> {
        Ok(self.field().scale(&l_at_nonpositive(chi, k)?, &rat(1, 2)))
    }

    /// Normalized constant term of the given form at the cusp.
    pub fn constant_term_eval(&self, form: FormSpec, cusp: &CuspDatum) -> Result<ConstantTerm> {
        self.check_cusp(cusp)?;
        match form {
            FormSpec::Raised(m) => {
                if self.t_product() % m != 0 {
                    return Err(invalid(format!("{m} does not divide t = {}", self.t_product())));
                }
                self.raised(m, cusp)
            }
            FormSpec::Modified if self.k > 1 => self.modified_higher(cusp),
            FormSpec::Modified => self.modified_weight_one(cusp),
        }
    }

    /// E_k(ψ_𝔓, 1)|m.
    fn raised(&self, m: u64, cusp: &CuspDatum) -> Result<ConstantTerm> {
        let f = self.field();
        let (k, c0, c) = (self.k, self.c0(), self.c());
        let (j, jc) = self.split(m, cusp);
        if cusp.in_c0(c) {
            let head = self.q(BigRational::new(1.into(), num_traits::pow(BigInt::from(c0), k as usize)));
            let mut tau = self.prod([head, self.cusp_psi(cusp), self.half_l(&self.psi.inverse(), k)?]);
            tau = f.mul(&tau, &self.prod(self.p_primes().into_iter().map(|p| self.depletion(p, k))));
            tau = f.mul(&tau, &self.prod(j.iter().map(|&l| self.q(BigRational::new(1.into(), num_traits::pow(BigInt::from(l), k as usize))))));
            tau = f.mul(&tau, &self.prod(jc.iter().map(|&l| self.psi_inv_at(l as i64))));
            return Ok(ConstantTerm { field: f.clone(), plain: f.zero(), tau });
        }
        if k == 1 && cusp.in_c_inf(c0) {
            let mut plain = self.prod([self.cusp_b(cusp), self.half_l(&self.psi, 1)?]);
            plain = f.mul(&plain, &self.prod(self.p_primes().into_iter().map(|p| self.q(rat(1, 1) - rat(1, p as i64)))));
            // (ψ(ℓ)ℓ)^{-1} = ψ^{-1}(ℓ)/ℓ
            plain = f.mul(&plain, &self.prod(j.iter().map(|&l| f.scale(&self.psi_inv_at(l as i64), &rat(1, l as i64)))));
            return Ok(ConstantTerm { field: f.clone(), plain, tau: f.zero() });
        }
        Ok(ConstantTerm::zero(&f))
    }

    /// W_k for odd k > 1; the leading factor 𝔱 printed in the source table is
    /// omitted, as the Möbius computation it summarizes does not produce it.
    fn modified_higher(&self, cusp: &CuspDatum) -> Result<ConstantTerm> {
        let f = self.field();
        let (k, c0, c) = (self.k, self.c0(), self.c());
        if !cusp.in_c0(c) {
            return Ok(ConstantTerm::zero(&f));
        }
        let (j, jc) = self.split(self.t_product(), cusp);
        let head = self.q(BigRational::new(1.into(), num_traits::pow(BigInt::from(c0), k as usize)));
        let mut tau = self.prod([head, self.cusp_psi(cusp), self.half_l(&self.psi.inverse(), k)?]);
        tau = f.mul(&tau, &self.prod(self.p_primes().into_iter().map(|p| self.depletion(p, k))));
        tau = f.mul(&tau, &self.moebius_rhs(k, &j, &jc));
        Ok(ConstantTerm { field: f.clone(), plain: f.zero(), tau })
    }

    /// W_1 for cond ψ ≠ 1 (over Q an odd character never has conductor 1).
    fn modified_weight_one(&self, cusp: &CuspDatum) -> Result<ConstantTerm> {
        let f = self.field();
        let (c0, c, t) = (self.c0(), self.c(), self.t_product());
        if cusp.in_c_inf(c0 * t) {
            let l_t = self.prod(self.t.iter().map(|&l| f.sub(&f.one(), &f.scale(&self.psi_at(l as i64), &rat(l as i64, 1)))));
            let (jp, jpc) = self.split(self.p_ideal, cusp);
            let mut plain = self.prod([self.cusp_b(cusp), self.half_l(&self.psi, 1)?, l_t]);
            plain = f.mul(&plain, &self.prod(jp.iter().map(|&p| self.q(rat(1, 1) - rat(1, p as i64)))));
            plain = f.mul(&plain, &self.prod(jpc.iter().map(|&p| f.sub(&f.one(), &self.psi_at(p as i64)))));
            return Ok(ConstantTerm { field: f.clone(), plain, tau: f.zero() });
        }
        if cusp.in_c0(c) {
            let (j, jc) = self.split(t, cusp);
            let mut tau = self.prod([self.q(rat(1, c0 as i64)), self.cusp_psi(cusp), self.half_l(&self.psi.inverse(), 1)?]);
            tau = f.mul(&tau, &self.prod(self.p_primes().into_iter().map(|p| self.depletion(p, 1))));
            tau = f.mul(&tau, &self.moebius_rhs(1, &j, &jc));
            return Ok(ConstantTerm { field: f.clone(), plain: f.zero(), tau });
        }
        Ok(ConstantTerm::zero(&f))
    }

    /// Π_{J}(1 − ψ(ℓ)) Π_{J^c}(1 − ℓ^k).
    fn moebius_rhs(&self, k: u64, j: &[u64], jc: &[u64]) -> Cyclo {
        let f = self.field();
        let a = self.prod(j.iter().map(|&l| f.sub(&f.one(), &self.psi_at(l as i64))));
        let b = self.prod(jc.iter().map(|&l| self.q(BigRational::from_integer(BigInt::from(1) - num_traits::pow(BigInt::from(l), k as usize)))));
        f.mul(&a, &b)
    }

    /// Σ_{m | t} μ(m) Π_{J_m^c} ℓ^k Π_{J_m} ψ(ℓ), for J ⊆ T the primes in C₀.
    fn moebius_lhs(&self, k: u64, j: &[u64]) -> Cyclo {
        let f = self.field();
        divisors(self.t_product()).into_iter().fold(f.zero(), |acc, m| {
            let term = self.prod(prime_divisors(m).into_iter().map(|l| {
                if j.contains(&l) {
                    self.psi_at(l as i64)
                } else {
                    self.q(BigRational::from_integer(num_traits::pow(BigInt::from(l), k as usize)))
                }
            }));
            f.add(&acc, &f.scale(&term, &rat(moebius(m), 1)))
        })
    }

    /// The Möbius identity behind the W_k table, for the split T = J ⊔ J^c.
    pub fn moebius_identity_holds(&self, j: &[u64]) -> bool {
        let jc: Vec<u64> = self.t.iter().copied().filter(|l| !j.contains(l)).collect();
        self.moebius_lhs(self.k, j) == self.moebius_rhs(self.k, j, &jc)
    }

    /// Σ_{m | t} μ(m)ψ(m)m^k · c_A(0, E|m): the W constant term assembled from the E|m table.
    pub fn modified_by_summation(&self, cusp: &CuspDatum) -> Result<ConstantTerm> {
        let f = self.field();
        let mut acc = ConstantTerm::zero(&f);
        for m in divisors(self.t_product()) {
            let coeff = f.scale(&self.psi_at(m as i64), &rat(moebius(m), 1));
            let coeff = f.scale(&coeff, &BigRational::from_integer(num_traits::pow(BigInt::from(m), self.k as usize)));
            acc = acc.add(&self.constant_term_eval(FormSpec::Raised(m), cusp)?.scale(&coeff));
        }
        Ok(acc)
    }

    /// Whether the two routes to the W constant term are expected to agree at this cusp.
    /// For k = 1 the E|m table carries Π_{p | 𝔓}(1 − 1/p) at cusps of C_∞(c₀) while the
    /// W_1 table separates the primes of 𝔓 dividing c; they agree when 𝔓 is prime to c.
    pub fn summation_applies(&self, cusp: &CuspDatum) -> bool {
        self.k > 1 || !cusp.in_c_inf(self.c0()) || self.p_primes().iter().all(|&p| cusp.in_c0(p))
    }
}

/// Free-function form of [`ConstantTermSetup::constant_term_eval`].
pub fn constant_term_eval(setup: &ConstantTermSetup, form: FormSpec, cusp: &CuspDatum) -> Result<ConstantTerm> {
    setup.constant_term_eval(form, cusp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cusps(level: u64) -> Vec<CuspDatum> {
        let n = level as i64;
        let mut out = Vec::new();
        for c in -n..=2 * n {
            for a in [-7i64, -1, 1, 2, 3, 5, 11] {
                if gcd(a, c) == 1 {
                    out.push(CuspDatum::new(level, a, c).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn cusp_predicates() {
        let x = CuspDatum::new(60, 1, 12).unwrap();
        assert!(x.in_c_inf(4) && x.in_c_inf(3) && !x.in_c_inf(5));
        assert!(x.in_c0(5) && !x.in_c0(2) && !x.in_c0(6));
        let inf = CuspDatum::new(60, 1, 0).unwrap();
        assert!(inf.in_c_inf(60) && !inf.in_c0(2) && inf.in_c0(1));
        assert!(CuspDatum::new(60, 2, 4).is_err());
    }

    #[test]
    fn table_examples() {
        let chi = DirichletCharacter::kronecker(-4).unwrap();
        let s = ConstantTermSetup::new(3, &chi, 1, &[3]).unwrap();
        assert_eq!(s.level(), 12);
        // outside C₀(𝔠): zero
        let x = CuspDatum::new(12, 1, 2).unwrap();
        assert!(s.constant_term_eval(FormSpec::Modified, &x).unwrap().is_zero());
        // in C₀(4) ∩ C₀(3): the factor (1 − ψ(3)) = 2 appears
        let y = CuspDatum::new(12, 1, 1).unwrap();
        let v = s.constant_term_eval(FormSpec::Modified, &y).unwrap();
        let f = s.field();
        let l = l_at_nonpositive(&chi, 3).unwrap();
        // τ-cofactor: 4^{-3} ψ(−1) L(ψ,−2)/2 (1 − ψ(3))
        let expected = f.scale(&l, &(rat(1, 64) * rat(-1, 1) * rat(1, 2) * rat(2, 1)));
        assert_eq!(v.tau, expected);
        assert!(f.is_zero(&v.plain));
        assert!(ConstantTermSetup::new(3, &chi, 1, &[2]).is_err());
        assert!(ConstantTermSetup::new(2, &chi, 1, &[3]).is_err());
        assert!(s.constant_term_eval(FormSpec::Modified, &CuspDatum::new(24, 1, 1).unwrap()).is_err());
    }

    #[test]
    fn gauss_factor_evaluates() {
        let chi = DirichletCharacter::kronecker(-3).unwrap();
        let s = ConstantTermSetup::new(1, &chi, 1, &[2]).unwrap();
        let v = s.constant_term_eval(FormSpec::Modified, &CuspDatum::new(6, 1, 1).unwrap()).unwrap();
        let (big, x) = v.exact(&s.psi).unwrap();
        // τ(χ₋₃) = √−3, so the value is a rational multiple of √−3 and squares to a negative rational
        let sq = big.mul(&x, &x);
        let r = big.as_rational(&sq).expect("rational square");
        assert!(r < rat(0, 1));
    }

    #[test]
    fn moebius_identity_random_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let primes = [3u64, 5, 7, 11, 13, 17, 19, 23];
        let chars = [DirichletCharacter::kronecker(-4).unwrap(), DirichletCharacter::primitive_of_conductor(5).into_iter().find(|c| c.is_odd()).unwrap()];
        for _ in 0..30 {
            let chi = &chars[rng.gen_range(0..chars.len())];
            let mut t: Vec<u64> = primes.iter().copied().filter(|&l| chi.modulus() % l != 0 && rng.gen_bool(0.4)).collect();
            if t.is_empty() {
                t.push(3);
            }
            let j: Vec<u64> = t.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            let k = [1u64, 3, 5, 7][rng.gen_range(0..4)];
            let s = ConstantTermSetup::new(k, chi, 1, &t).unwrap();
            assert!(s.moebius_identity_holds(&j), "t = {t:?}, j = {j:?}, k = {k}");
        }
    }

    #[test]
    fn modified_tables_match_summation() {
        let chi4 = DirichletCharacter::kronecker(-4).unwrap();
        let chi3 = DirichletCharacter::kronecker(-3).unwrap();
        let chi5 = DirichletCharacter::primitive_of_conductor(5).into_iter().find(|c| c.is_odd()).unwrap();
        let cases = [(chi4.clone(), 1u64, vec![3u64]), (chi4.clone(), 5, vec![3, 7]), (chi3.clone(), 2, vec![5]), (chi5, 1, vec![2, 3]), (chi3, 1, vec![2, 5])];
        for (chi, p_ideal, t) in cases {
            for k in [1u64, 3] {
                let s = ConstantTermSetup::new(k, &chi, p_ideal, &t).unwrap();
                let mut compared = 0;
                for cusp in cusps(s.level()) {
                    if !s.summation_applies(&cusp) {
                        continue;
                    }
                    let direct = s.constant_term_eval(FormSpec::Modified, &cusp).unwrap();
                    let summed = s.modified_by_summation(&cusp).unwrap();
                    assert_eq!(direct, summed, "k = {k}, 𝔓 = {p_ideal}, t = {t:?}, cusp = {cusp:?}");
                    compared += 1;
                }
                assert!(compared > 10);
            }
        }
    }
}
