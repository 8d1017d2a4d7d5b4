use crate::arith::rat_to_string;
use crate::error::{invalid, Result};
use crate::stickelberger::AbelianFieldQ;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;

/// The statement a case is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    BrumerStark,
    ClassNumberFormula,
    Kurihara,
    BrumerStarkUnit,
    SelmerDuality,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [Theorem::BrumerStark, Theorem::ClassNumberFormula, Theorem::Kurihara, Theorem::BrumerStarkUnit, Theorem::SelmerDuality];

    pub fn as_str(&self) -> &'static str {
        match self {
            Theorem::BrumerStark => "brumer-stark",
            Theorem::ClassNumberFormula => "class-number",
            Theorem::Kurihara => "kurihara",
            Theorem::BrumerStarkUnit => "brumer-stark-unit",
            Theorem::SelmerDuality => "selmer-duality",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| invalid(format!("unknown theorem {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// An imaginary quadratic field, or a biquadratic field given by two quadratic
/// discriminants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FieldSpec {
    Quadratic { disc: i64 },
    Biquadratic { d1: i64, d2: i64 },
}

impl FieldSpec {
    pub fn abelian(&self) -> Result<AbelianFieldQ> {
        match *self {
            FieldSpec::Quadratic { disc } => {
                if disc >= 0 {
                    return Err(invalid(format!("{disc} is not a negative discriminant")));
                }
                AbelianFieldQ::quadratic(disc)
            }
            FieldSpec::Biquadratic { d1, d2 } => AbelianFieldQ::biquadratic(d1, d2),
        }
    }

    fn label(&self) -> String {
        match self {
            FieldSpec::Quadratic { disc } => format!("D={disc}"),
            FieldSpec::Biquadratic { d1, d2 } => format!("D={d1},{d2}"),
        }
    }
}

/// One instance: field, depletion set S (finite part), smoothing set T and
/// optional auxiliary primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationCase {
    pub field: FieldSpec,
    /// finite primes of S; `None` means the ramified primes
    pub s: Option<Vec<u64>>,
    pub t: Vec<u64>,
    /// prime for p-part comparisons
    pub p: Option<u64>,
    /// split prime below 𝔓 for the unit construction
    pub split_prime: Option<u64>,
    /// record wall-clock time in reports
    #[serde(default)]
    pub timings: bool,
}

fn sorted(v: &[u64]) -> Vec<u64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

impl VerificationCase {
    pub fn quadratic(disc: i64, t: &[u64]) -> Self {
        VerificationCase { field: FieldSpec::Quadratic { disc }, s: None, t: sorted(t), p: None, split_prime: None, timings: false }
    }

    pub fn biquadratic(d1: i64, d2: i64, t: &[u64]) -> Self {
        VerificationCase { field: FieldSpec::Biquadratic { d1, d2 }, ..Self::quadratic(-3, t) }
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_s(mut self, s: &[u64]) -> Self {
        self.s = Some(sorted(s));
        self
    }

    pub fn with_split_prime(mut self, q: u64) -> Self {
        self.split_prime = Some(q);
        self
    }

    pub fn with_timings(mut self, on: bool) -> Self {
        self.timings = on;
        self
    }

    /// Finite part of S: the given set, or the ramified primes.
    pub fn depletion(&self, field: &AbelianFieldQ) -> Vec<u64> {
        self.s.clone().unwrap_or_else(|| field.ramified_primes())
    }

    /// Structural checks that need no arithmetic beyond primality.
    pub fn validate(&self) -> Result<AbelianFieldQ> {
        let field = self.field.abelian()?;
        let primes = |v: &[u64], what: &str| -> Result<()> {
            match v.iter().find(|&&p| !crate::arith::is_prime(p)) {
                Some(p) => Err(invalid(format!("{what} contains the non-prime {p}"))),
                None => Ok(()),
            }
        };
        primes(&self.t, "T")?;
        if let Some(s) = &self.s {
            primes(s, "S")?;
            if let Some(p) = s.iter().find(|p| self.t.contains(p)) {
                return Err(invalid(format!("{p} lies in both S and T")));
            }
        }
        if let Some(p) = self.t.iter().find(|&&p| field.is_ramified(p)) {
            return Err(invalid(format!("T contains the ramified prime {p}")));
        }
        if let Some(p) = self.p {
            if !crate::arith::is_prime(p) || p == 2 {
                return Err(invalid(format!("p = {p} must be an odd prime")));
            }
        }
        if let Some(q) = self.split_prime {
            if !crate::arith::is_prime(q) {
                return Err(invalid(format!("{q} is not prime")));
            }
        }
        Ok(field)
    }

    pub fn case_id(&self, theorem: Theorem) -> String {
        let list = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut id = format!("{theorem}/{}/T={}", self.field.label(), list(&self.t));
        if let Some(s) = &self.s {
            id.push_str(&format!("/S={}", list(s)));
        }
        if let Some(p) = self.p {
            id.push_str(&format!("/p={p}"));
        }
        if let Some(q) = self.split_prime {
            id.push_str(&format!("/q={q}"));
        }
        id
    }

    /// Inputs with decimal-string integers.
    pub fn inputs_json(&self) -> Value {
        let strs = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let field = match self.field {
            FieldSpec::Quadratic { disc } => json!({ "type": "quadratic", "disc": disc.to_string() }),
            FieldSpec::Biquadratic { d1, d2 } => json!({ "type": "biquadratic", "d1": d1.to_string(), "d2": d2.to_string() }),
        };
        let mut obj = json!({ "field": field, "T": strs(&self.t) });
        let map = obj.as_object_mut().expect("object literal");
        if let Some(s) = &self.s {
            map.insert("S".into(), json!(strs(s)));
        }
        if let Some(p) = self.p {
            map.insert("p".into(), json!(p.to_string()));
        }
        if let Some(q) = self.split_prime {
            map.insert("split_prime".into(), json!(q.to_string()));
        }
        obj
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    pub value: Value,
}

/// Outcome of one case, serialized canonically: fixed field order, sorted
/// object keys, decimal-string integers and "num/den" rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub theorem: Theorem,
    pub inputs: Value,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn new(theorem: Theorem, case: &VerificationCase) -> Self {
        VerificationReport { case_id: case.case_id(theorem), theorem, inputs: case.inputs_json(), status: Status::Pass, witnesses: Vec::new(), elapsed_ms: 0 }
    }

    pub fn witness(&mut self, name: &str, value: impl Into<Value>) {
        self.witnesses.push(Witness { name: name.into(), value: value.into() });
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.witnesses.iter().find(|w| w.name == name).map(|w| &w.value)
    }

    pub fn fail(&mut self, name: &str, value: impl Into<Value>) {
        self.status = Status::Fail;
        self.witness(name, value);
    }

    pub fn skip(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.witness("skip_reason", reason.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Pass/fail/skip counts per theorem.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub failed_cases: Vec<String>,
}

impl Summary {
    pub fn of(reports: &[VerificationReport]) -> Self {
        let mut s = Summary { total: reports.len(), ..Default::default() };
        for r in reports {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => {
                    s.fail += 1;
                    s.failed_cases.push(r.case_id.clone());
                }
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }
}

pub(crate) fn big_str(x: &BigInt) -> Value {
    Value::String(x.to_str_radix(10))
}

pub(crate) fn big_list(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(big_str).collect())
}

pub(crate) fn rat_list(xs: &[BigRational]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(rat_to_string(x))).collect())
}

pub(crate) fn rat_str(x: &BigRational) -> Value {
    Value::String(rat_to_string(x))
}
