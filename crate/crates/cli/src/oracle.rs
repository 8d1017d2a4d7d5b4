//! Golden values: every fixed example is recomputed and stored as JSON, one
//! file per module, so that later builds can be diffed against them.

use crate::compute::{classgroup_json, element_json, field_json, ks_json, lattice_json, qexp_json, rayclass_json, theta_json};
use num_bigint::BigInt;
use serde_json::{json, Value};
use stark_core::algebra::{enumerate_characters, ideal_from_generators, FiniteAbelianGroup, GroupRingElement};
use stark_core::arith::{rat, rat_to_string};
use stark_core::eisenstein::{eisenstein_ideal_shadow, l_at_nonpositive_rational, w_modified, DirichletCharacter};
use stark_core::fitting::{smith_normal_form, GaloisModule};
use stark_core::quadratic::{principal_generator, s_units, ImagQuadField, PrincipalOutcome};
use stark_core::ring::Rationals;
use stark_core::stickelberger::{check_drcond, partial_zeta_zero, AbelianFieldQ};
use stark_core::verify::{verify, Theorem, VerificationCase};
use stark_core::Result;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub type Goldens = BTreeMap<String, Value>;

/// Golden files are split by library area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OracleModule {
    Algebra,
    Fitting,
    Stickelberger,
    Quadratic,
    Eisenstein,
    Verify,
}

impl OracleModule {
    pub const ALL: [OracleModule; 6] =
        [OracleModule::Algebra, OracleModule::Fitting, OracleModule::Stickelberger, OracleModule::Quadratic, OracleModule::Eisenstein, OracleModule::Verify];

    pub fn name(&self) -> &'static str {
        match self {
            OracleModule::Algebra => "algebra",
            OracleModule::Fitting => "fitting",
            OracleModule::Stickelberger => "stickelberger",
            OracleModule::Quadratic => "quadratic",
            OracleModule::Eisenstein => "eisenstein",
            OracleModule::Verify => "verify",
        }
    }

    pub fn file(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.json", self.name()))
    }

    pub fn compute(&self) -> Result<Goldens> {
        match self {
            OracleModule::Algebra => algebra(),
            OracleModule::Fitting => fitting(),
            OracleModule::Stickelberger => stickelberger(),
            OracleModule::Quadratic => quadratic(),
            OracleModule::Eisenstein => eisenstein(),
            OracleModule::Verify => verification(),
        }
    }
}

impl fmt::Display for OracleModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleModule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        OracleModule::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown oracle module {s:?}"))
    }
}

fn ints(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(|x| x.to_str_radix(10)).collect()
}

fn algebra() -> Result<Goldens> {
    let mut g = Goldens::new();
    let v4 = FiniteAbelianGroup::new(vec![2, 2])?;
    let conj = v4.index(&[1, 1]);
    let chars = enumerate_characters(&v4);
    g.insert(
        "characters/Z2xZ2".into(),
        json!({ "count": chars.len().to_string(), "odd": chars.iter().filter(|c| c.is_odd(conj)).count().to_string() }),
    );
    let z3 = FiniteAbelianGroup::cyclic(3);
    let product = GroupRingElement::from_ints(&z3, &[1, 1, 0])?.mul(&GroupRingElement::from_ints(&z3, &[1, 0, 1])?)?;
    g.insert("group_ring/Z3/(1+g)(1+g^2)".into(), json!(product.coeffs().iter().map(rat_to_string).collect::<Vec<_>>()));
    let z2 = FiniteAbelianGroup::cyclic(2);
    let ideal = ideal_from_generators(&z2, &[GroupRingElement::from_ints(&z2, &[2, 0])?, GroupRingElement::from_ints(&z2, &[1, 1])?])?;
    g.insert("ideal/Z2/(2,1+s)".into(), lattice_json(&ideal));
    let witness = ideal.membership_witness(&[rat(1, 1), rat(-1, 1)]);
    g.insert("ideal/Z2/(2,1+s)/contains 1-s".into(), json!(witness.map(|w| ints(&w))));
    Ok(g)
}

fn fitting() -> Result<Goldens> {
    let mut g = Goldens::new();
    let a = vec![vec![BigInt::from(6), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(4)]];
    g.insert("smith/diag(6,4)".into(), json!(ints(&smith_normal_form(&a, 2).diagonal)));
    let z2 = FiniteAbelianGroup::cyclic(2);
    for (name, s) in [("trivial", 1), ("sign", -1)] {
        let m = GaloisModule::scalar_action(z2.clone(), BigInt::from(3), &[s])?;
        g.insert(format!("annihilator/Z3/{name}"), lattice_json(&m.annihilator()));
        g.insert(format!("fitting0/Z3/{name}"), lattice_json(&m.fitting_ideal(0)?));
    }
    Ok(g)
}

fn stickelberger() -> Result<Goldens> {
    let mut g = Goldens::new();
    for (m, a) in [(3u64, 1u64), (4, 3), (4, 1), (7, 2)] {
        g.insert(format!("partial_zeta/{m}/{a}"), json!(rat_to_string(&partial_zeta_zero(m, a)?)));
    }
    let q3 = AbelianFieldQ::cyclotomic(3)?;
    let qi = AbelianFieldQ::cyclotomic(4)?;
    for (name, h, s, t) in [("Q(zeta3)", &q3, vec![3u64], vec![]), ("Q(zeta3)", &q3, vec![3], vec![7u64]), ("Q(i)", &qi, vec![2], vec![]), ("Q(i)", &qi, vec![2], vec![3])] {
        g.insert(format!("theta/{name}/S={s:?}/T={t:?}"), theta_json(h, &s, &t)?);
    }
    let dr = check_drcond(&q3, &[7]);
    g.insert("drcond/Q(zeta3)/T=[7]".into(), json!({ "holds": dr.holds, "roots_of_unity": dr.roots_of_unity.to_string() }));
    g.insert("ks/Q(sqrt-3)/T=[7]".into(), ks_json(&AbelianFieldQ::quadratic(-3)?, &[7], None)?);
    g.insert("ks/Q(sqrt-3,sqrt5)/T=[11]/p=7".into(), ks_json(&AbelianFieldQ::biquadratic(-3, 5)?, &[11], Some(7))?);
    let h = AbelianFieldQ::biquadratic(-3, 5)?;
    let x = GroupRingElement::from_ints(h.group(), &(0..h.group().order()).map(|i| if i == 0 { 2 } else { 0 }).collect::<Vec<_>>())?;
    g.insert("field/Q(sqrt-3,sqrt5)".into(), json!({ "field": field_json(&h), "two": element_json(&h, &x) }));
    Ok(g)
}

fn quadratic() -> Result<Goldens> {
    let mut g = Goldens::new();
    for d in [-23, -47, -84] {
        g.insert(format!("classgroup/{d}"), classgroup_json(d)?);
    }
    for (d, p) in [(-3i64, 7u64), (-23, 2), (-4, 3), (-7, 7)] {
        g.insert(format!("splitting/{d}/{p}"), json!(format!("{:?}", ImagQuadField::new(d)?.splitting(p)).to_lowercase()));
    }
    for (d, t) in [(-4i64, vec![3u64]), (-23, vec![3]), (-3, vec![7])] {
        g.insert(format!("rayclass/{d}/T={t:?}"), rayclass_json(d, &t)?);
    }
    for (d, e) in [(-7i64, 1u32), (-23, 1), (-23, 3)] {
        let k = ImagQuadField::new(d)?;
        let ideal = k.primes_above(2).remove(0).pow(e);
        let v = match principal_generator(&ideal, None)? {
            PrincipalOutcome::Generator(x) => json!({ "generator": x.to_string() }),
            PrincipalOutcome::NotPrincipal(f) => json!({ "class": [f.a.to_string(), f.b.to_string(), f.c.to_string()] }),
            PrincipalOutcome::Obstruction { generator, .. } => json!({ "obstruction": generator.to_string() }),
        };
        g.insert(format!("principal/{d}/p2^{e}"), v);
    }
    for (d, s) in [(-4i64, 5u64), (-23, 2)] {
        let su = s_units(&ImagQuadField::new(d)?, &[s])?;
        g.insert(format!("s_units/{d}/S=[{s}]"), serde_json::to_value(su.summary()).expect("summary serializes"));
    }
    Ok(g)
}

fn eisenstein() -> Result<Goldens> {
    let mut g = Goldens::new();
    let triv = DirichletCharacter::trivial(1);
    g.insert("l_value/trivial/k=2".into(), json!(rat_to_string(&l_at_nonpositive_rational(&triv, 2)?)));
    for d in [-4i64, -3, -23] {
        g.insert(format!("l_value/kronecker{d}/k=1"), json!(rat_to_string(&l_at_nonpositive_rational(&DirichletCharacter::kronecker(d)?, 1)?)));
    }
    g.insert("qexp/E4".into(), qexp_json(4, &triv, &[], 200)?);
    g.insert("qexp/E1(kronecker-4)".into(), qexp_json(1, &DirichletCharacter::kronecker(-4)?, &[], 200)?);
    g.insert("qexp/E3(kronecker-3)/S=[7]".into(), qexp_json(3, &DirichletCharacter::kronecker(-3)?, &[7], 200)?);
    let w = w_modified(&Rationals, 1, &DirichletCharacter::kronecker(-4)?, &[], &[3])?;
    g.insert("w_modified/kronecker-4/T=[3]".into(), w.prefix_json(20));
    let shadow = eisenstein_ideal_shadow(&AbelianFieldQ::cyclotomic(3)?, &[3], &[7], 5, 3, 50)?;
    g.insert(
        "shadow/Q(zeta3)/T=[7]/p=5/N=3".into(),
        json!({ "k": shadow.k.to_string(), "failures": shadow.failures.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "needs_modulus": shadow.needs_modulus.iter().map(|x| x.to_string()).collect::<Vec<_>>() }),
    );
    Ok(g)
}

fn verification() -> Result<Goldens> {
    let cases = [
        (Theorem::BrumerStark, VerificationCase::quadratic(-3, &[7])),
        (Theorem::BrumerStark, VerificationCase::quadratic(-23, &[3])),
        (Theorem::ClassNumberFormula, VerificationCase::quadratic(-4, &[3])),
        (Theorem::ClassNumberFormula, VerificationCase::quadratic(-23, &[3])),
        (Theorem::Kurihara, VerificationCase::biquadratic(-3, 5, &[11]).with_p(7)),
        (Theorem::BrumerStarkUnit, VerificationCase::quadratic(-23, &[3]).with_split_prime(2)),
        (Theorem::SelmerDuality, VerificationCase::quadratic(-4, &[3])),
        (Theorem::SelmerDuality, VerificationCase::quadratic(-23, &[3])),
    ];
    let mut g = Goldens::new();
    for (th, case) in cases {
        let r = verify(th, &case)?;
        g.insert(r.case_id.clone(), serde_json::to_value(&r).expect("reports serialize"));
    }
    Ok(g)
}

/// Keys whose values differ between two golden sets, and keys present on
/// one side only.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct GoldenDiff {
    pub changed: Vec<String>,
    pub missing: Vec<String>,
    pub unexpected: Vec<String>,
}

impl GoldenDiff {
    pub fn between(stored: &Goldens, computed: &Goldens) -> Self {
        let mut d = GoldenDiff::default();
        for (k, v) in computed {
            match stored.get(k) {
                Some(s) if s != v => d.changed.push(k.clone()),
                Some(_) => {}
                None => d.missing.push(k.clone()),
            }
        }
        d.unexpected = stored.keys().filter(|k| !computed.contains_key(*k)).cloned().collect();
        d
    }
}

pub fn read_goldens(path: &Path) -> std::io::Result<Option<Goldens>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map(Some).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

pub fn write_goldens(path: &Path, g: &Goldens) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(g).expect("goldens serialize");
    text.push('\n');
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples_are_recorded() {
        let a = algebra().unwrap();
        assert_eq!(a["characters/Z2xZ2"], json!({ "count": "4", "odd": "2" }));
        assert_eq!(a["group_ring/Z3/(1+g)(1+g^2)"], json!(["2", "1", "1"]));
        assert_eq!(a["ideal/Z2/(2,1+s)"]["basis"], json!([["1", "1"], ["0", "2"]]));
        let f = fitting().unwrap();
        assert_eq!(f["smith/diag(6,4)"], json!(["2", "12"]));
        let q = quadratic().unwrap();
        assert_eq!(q["splitting/-3/7"], "split");
        assert_eq!(q["splitting/-23/2"], "split");
        assert_eq!(q["principal/-7/p2^1"]["generator"].is_string(), true);
        assert!(q["principal/-23/p2^1"].get("class").is_some());
        let s = stickelberger().unwrap();
        assert_eq!(s["partial_zeta/4/3"], "-1/4");
        assert_eq!(s["theta/Q(zeta3)/S=[3]/T=[]"]["integral"], false);
        let e = eisenstein().unwrap();
        assert_eq!(e["l_value/trivial/k=2"], "-1/12");
        assert_eq!(e["l_value/kronecker-4/k=1"], "1/2");
        assert_eq!(e["l_value/kronecker-3/k=1"], "1/3");
        assert_eq!(e["w_modified/kronecker-4/T=[3]"]["coefficients"][2], "3");
    }

    #[test]
    fn diff_classifies_keys() {
        let stored: Goldens = [("a".into(), json!(1)), ("b".into(), json!(2)), ("c".into(), json!(3))].into();
        let computed: Goldens = [("a".into(), json!(1)), ("b".into(), json!(5)), ("d".into(), json!(4))].into();
        let d = GoldenDiff::between(&stored, &computed);
        assert_eq!(d, GoldenDiff { changed: vec!["b".into()], missing: vec!["d".into()], unexpected: vec!["c".into()] });
        assert_eq!(GoldenDiff::between(&computed, &computed), GoldenDiff::default());
    }
}
