use crate::algebra::{AbelianQuotient, Elem, FiniteAbelianGroup, GaloisStructure, GroupRingElement, PlaceData};
use crate::arith::{factorize, gcd, is_fundamental_discriminant, is_prime, kronecker, lcm, mod_pow, prime_divisors, valuation};
use crate::error::{invalid, Result};
use crate::linalg::IntMatrix;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;

/// x ≡ a mod m, x ≡ b mod n for coprime m, n; result in [0, mn).
pub fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    let (_, u, _) = crate::arith::xgcd(m as i64, n as i64);
    let mn = (m * n) as i128;
    let t = ((b as i128 - a as i128) * u as i128).rem_euclid(n as i128);
    ((a as i128 + m as i128 * t).rem_euclid(mn)) as u64
}

/// Generators of (Z/p^k)^* with their orders.
fn prime_power_unit_generators(p: u64, k: u32) -> Vec<(u64, u64)> {
    let q = p.pow(k);
    if p == 2 {
        return match k {
            0 | 1 => vec![],
            2 => vec![(3, 2)],
            _ => vec![(q - 1, 2), (5, q / 4)],
        };
    }
    let phi = q / p * (p - 1);
    let pd = prime_divisors(p - 1);
    let g = (2..p).find(|&g| pd.iter().all(|&r| mod_pow(g as i64, (p - 1) / r, p as i64) != 1)).unwrap_or(1);
    let g = if k >= 2 && mod_pow(g as i64, p - 1, (p * p) as i64) == 1 { g + p } else { g };
    vec![(g % q, phi)]
}

/// Structure of (Z/m)^*: generators (as residues mod m) and their orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroupMod {
    pub modulus: u64,
    pub gens: Vec<u64>,
    pub orders: Vec<u64>,
    /// discrete logarithm of every residue coprime to the modulus
    dlog: Vec<Option<Vec<i64>>>,
}

impl UnitGroupMod {
    pub fn new(m: u64) -> Self {
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for (p, k) in factorize(m) {
            let q = p.pow(k);
            let rest = m / q;
            for (g, ord) in prime_power_unit_generators(p, k) {
                gens.push(if rest == 1 { g } else { crt(g, q, 1, rest) });
                orders.push(ord);
            }
        }
        let mut dlog = vec![None; m.max(1) as usize];
        let mut exps = vec![0i64; gens.len()];
        let mut residue = 1 % m.max(1);
        // odometer over all exponent vectors, tracking the residue multiplicatively
        loop {
            dlog[residue as usize] = Some(exps.clone());
            let mut i = gens.len();
            loop {
                if i == 0 {
                    return UnitGroupMod { modulus: m, gens, orders, dlog };
                }
                i -= 1;
                exps[i] += 1;
                residue = (residue as u128 * gens[i] as u128 % m as u128) as u64;
                if (exps[i] as u64) < orders[i] {
                    break;
                }
                // g_i^{order} = 1, so the residue is already correct
                exps[i] = 0;
            }
        }
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn dlog(&self, a: i64) -> Option<&[i64]> {
        let m = self.modulus.max(1) as i64;
        self.dlog[a.rem_euclid(m) as usize].as_deref()
    }

    pub fn residues(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.modulus.max(1)).filter(move |&a| self.dlog[a as usize].is_some())
    }
}

/// An abelian extension H/Q, given as the fixed field of a subgroup of
/// (Z/f)^* with f the conductor of H.
#[derive(Debug, Clone)]
pub struct AbelianFieldQ {
    conductor: u64,
    kernel_gens: Vec<u64>,
    units: UnitGroupMod,
    quotient: AbelianQuotient,
    residue_image: Vec<Option<Elem>>,
    representative: Vec<u64>,
}

impl PartialEq for AbelianFieldQ {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor && self.kernel_set() == other.kernel_set()
    }
}

impl AbelianFieldQ {
    /// Fixed field of the subgroup of (Z/m)^* generated by `kernel`,
    /// normalized to its conductor.
    pub fn from_kernel(m: u64, kernel: &[u64]) -> Result<Self> {
        if m == 0 {
            return Err(invalid("modulus must be positive"));
        }
        if let Some(&k) = kernel.iter().find(|&&k| gcd(k as i64, m as i64) != 1) {
            return Err(invalid(format!("kernel element {k} is not a unit mod {m}")));
        }
        let kernel = minimal_generators(m, kernel);
        let at_m = Self::build(m, &kernel)?;
        let conductor = crate::arith::divisors(m)
            .into_iter()
            .find(|&d| at_m.units.residues().filter(|a| a % d == 1 % d).all(|a| at_m.residue_image[a as usize] == Some(0)))
            .expect("m itself qualifies");
        if conductor == m {
            return Ok(at_m);
        }
        let reduced: Vec<u64> = kernel.iter().map(|k| k % conductor).collect();
        Self::build(conductor, &reduced)
    }

    fn build(m: u64, kernel: &[u64]) -> Result<Self> {
        let units = UnitGroupMod::new(m);
        let r = units.gens.len();
        let mut rels: IntMatrix = (0..r).map(|i| (0..r).map(|j| if i == j { BigInt::from(units.orders[i]) } else { BigInt::zero() }).collect()).collect();
        for &k in kernel {
            let d = units.dlog(k as i64).expect("kernel checked coprime");
            rels.push(d.iter().map(|&x| BigInt::from(x)).collect());
        }
        let quotient = AbelianQuotient::from_relations(r, &rels)?;
        let size = m.max(1) as usize;
        let mut residue_image = vec![None; size];
        let mut representative = vec![u64::MAX; quotient.group.order()];
        for a in units.residues() {
            let g = quotient.image(units.dlog(a as i64).unwrap());
            residue_image[a as usize] = Some(g);
            if representative[g] == u64::MAX {
                representative[g] = if m == 1 { 1 } else { a };
            }
        }
        let mut kernel_gens: Vec<u64> = kernel.iter().map(|&k| k % m.max(1)).collect();
        kernel_gens.sort_unstable();
        kernel_gens.dedup();
        Ok(AbelianFieldQ { conductor: m, kernel_gens, units, quotient, residue_image, representative })
    }

    /// Q(ζ_m).
    pub fn cyclotomic(m: u64) -> Result<Self> {
        Self::from_kernel(m, &[])
    }

    /// The compositum of Q(√d) for the given fundamental discriminants.
    pub fn from_quadratic_discriminants(discs: &[i64]) -> Result<Self> {
        if let Some(&d) = discs.iter().find(|&&d| d == 1 || !is_fundamental_discriminant(d)) {
            return Err(invalid(format!("{d} is not a fundamental discriminant of a quadratic field")));
        }
        let m = discs.iter().fold(1i64, |acc, &d| lcm(acc, d.abs())) as u64;
        let units = UnitGroupMod::new(m);
        let kernel: Vec<u64> = units.residues().filter(|&a| discs.iter().all(|&d| kronecker(d, a) == 1)).collect();
        Self::from_kernel(m, &kernel)
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        Self::from_quadratic_discriminants(&[d])
    }

    pub fn biquadratic(d1: i64, d2: i64) -> Result<Self> {
        let f = Self::from_quadratic_discriminants(&[d1, d2])?;
        if f.degree() != 4 {
            return Err(invalid(format!("Q(√{d1}, √{d2}) is not biquadratic")));
        }
        Ok(f)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn kernel_generators(&self) -> &[u64] {
        &self.kernel_gens
    }

    /// Sorted list of all residues mod f in the kernel.
    pub fn kernel_set(&self) -> Vec<u64> {
        self.units.residues().filter(|&a| self.residue_image[a as usize] == Some(0)).collect()
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.quotient.group
    }

    pub fn degree(&self) -> usize {
        self.group().order()
    }

    /// σ_a for a residue prime to the conductor.
    pub fn sigma(&self, a: i64) -> Result<Elem> {
        let m = self.conductor.max(1) as i64;
        self.residue_image[a.rem_euclid(m) as usize].ok_or_else(|| invalid(format!("{a} is not prime to the conductor {m}")))
    }

    /// Smallest positive residue mapping to g.
    pub fn representative(&self, g: Elem) -> u64 {
        self.representative[g]
    }

    pub fn conj(&self) -> Elem {
        self.sigma(-1).expect("-1 is always a unit")
    }

    pub fn is_imaginary(&self) -> bool {
        self.conj() != 0
    }

    pub fn ramified_primes(&self) -> Vec<u64> {
        prime_divisors(self.conductor)
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.conductor % p == 0
    }

    fn split_conductor(&self, p: u64) -> (u64, u64) {
        let pv = p.pow(valuation(self.conductor, p));
        (pv, self.conductor / pv)
    }

    /// Generators of the inertia group at p.
    pub fn inertia_generators(&self, p: u64) -> Vec<Elem> {
        if !self.is_ramified(p) {
            return Vec::new();
        }
        let (pv, rest) = self.split_conductor(p);
        prime_power_unit_generators(p, valuation(pv, p))
            .into_iter()
            .map(|(g, _)| self.sigma(if rest == 1 { g } else { crt(g, pv, 1, rest) } as i64).unwrap())
            .filter(|&g| g != 0)
            .collect()
    }

    pub fn inertia(&self, p: u64) -> Vec<Elem> {
        self.group().subgroup(&self.inertia_generators(p))
    }

    /// A Frobenius at p; for ramified p it is well defined modulo inertia.
    pub fn frobenius(&self, p: u64) -> Elem {
        let (pv, rest) = self.split_conductor(p);
        if pv == 1 {
            return self.sigma(p as i64).expect("unramified prime is a unit");
        }
        if rest == 1 {
            return 0;
        }
        self.sigma(crt(1, pv, p % rest, rest) as i64).unwrap()
    }

    pub fn place_data(&self, p: u64) -> PlaceData {
        let inertia = self.inertia_generators(p);
        let frobenius = self.frobenius(p);
        let mut decomposition = inertia.clone();
        decomposition.push(frobenius);
        PlaceData { inertia, frobenius, decomposition }
    }

    /// Galois data at the ramified primes and the extra listed primes.
    pub fn galois_structure(&self, extra: &[u64]) -> Result<GaloisStructure> {
        let mut places = BTreeMap::new();
        for p in self.ramified_primes().into_iter().chain(extra.iter().copied()) {
            places.insert(p.to_string(), self.place_data(p));
        }
        GaloisStructure::new(self.group().clone(), self.conj(), places)
    }

    /// The fixed field of the subgroup generated by `gens`, with the
    /// restriction map G → Gal(fixed field/Q).
    pub fn fixed_field(&self, gens: &[Elem]) -> Result<(AbelianFieldQ, Vec<Elem>)> {
        let mut kernel = self.kernel_gens.clone();
        kernel.extend(gens.iter().map(|&g| self.representative(g)));
        let sub = Self::from_kernel(self.conductor.max(1), &kernel)?;
        let map = self.group().elements().map(|g| sub.sigma(self.representative(g) as i64).unwrap()).collect();
        Ok((sub, map))
    }

    /// Order w of the group of roots of unity in H.
    pub fn roots_of_unity_order(&self) -> u64 {
        let kernel = self.kernel_set();
        let n = crate::arith::divisors(self.conductor.max(1))
            .into_iter()
            .filter(|&n| kernel.iter().all(|a| a % n == 1 % n))
            .max()
            .unwrap_or(1);
        if n % 2 == 0 {
            n
        } else {
            2 * n
        }
    }
}

/// A subset of `elems` generating the same subgroup of (Z/m)^*.
fn minimal_generators(m: u64, elems: &[u64]) -> Vec<u64> {
    let mut inside = vec![false; m.max(1) as usize];
    let mut members = vec![1 % m.max(1)];
    inside[members[0] as usize] = true;
    let mut gens = Vec::new();
    for &k in elems {
        let k = k % m.max(1);
        if inside[k as usize] {
            continue;
        }
        gens.push(k);
        let mut frontier = members.clone();
        while let Some(x) = frontier.pop() {
            let y = (x as u128 * k as u128 % m as u128) as u64;
            if !inside[y as usize] {
                inside[y as usize] = true;
                members.push(y);
                frontier.push(y);
            }
        }
    }
    gens
}

/// Image of x under the group homomorphism given by `map` into `target`.
pub fn push_forward(x: &GroupRingElement, map: &[Elem], target: &FiniteAbelianGroup) -> GroupRingElement {
    let mut out = GroupRingElement::zero(target, x.ring().clone());
    let mut coeffs = out.coeffs().to_vec();
    for (g, c) in x.coeffs().iter().enumerate() {
        coeffs[map[g]] += c;
    }
    out = GroupRingElement::from_coeffs(target, x.ring().clone(), coeffs).expect("same coefficient ring");
    out
}

/// Some preimage of x under `map` (coefficients placed on the smallest preimage).
pub fn lift_along(x: &GroupRingElement, map: &[Elem], source: &FiniteAbelianGroup) -> GroupRingElement {
    let mut coeffs = vec![num_rational::BigRational::zero(); source.order()];
    for (h, c) in x.coeffs().iter().enumerate() {
        let g = map.iter().position(|&t| t == h).expect("restriction map is surjective");
        coeffs[g] = c.clone();
    }
    GroupRingElement::from_coeffs(source, x.ring().clone(), coeffs).expect("same coefficient ring")
}

pub(crate) fn check_primes(list: &[u64], what: &str) -> Result<()> {
    match list.iter().find(|&&p| !is_prime(p)) {
        Some(p) => Err(invalid(format!("{what} contains the non-prime {p}"))),
        None => Ok(()),
    }
}
