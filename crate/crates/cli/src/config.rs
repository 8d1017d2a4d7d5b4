use serde::Deserialize;
use stark_core::arith::{fundamental_discriminants_negative, is_fundamental_discriminant, primes_up_to};
use stark_core::quadratic::{ImagQuadField, Splitting};
use stark_core::stickelberger::AbelianFieldQ;
use stark_core::verify::{FieldSpec, Theorem, VerificationCase};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Norm bound for split primes when a unit task lists none.
pub const DEFAULT_SPLIT_PRIME_BOUND: u64 = 50;

/// A configuration problem, reported as JSON on stderr with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }

    pub fn diagnostic(&self) -> serde_json::Value {
        serde_json::json!({ "error": "invalid-config", "field": self.field, "message": self.message })
    }
}

/// One family of cases: a theorem, a set of fields and parameter samples.
/// Keys mirror the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Task {
    pub theorem: Option<String>,
    pub disc: Option<i64>,
    /// every negative fundamental discriminant with |D| up to this bound
    pub disc_max: Option<u64>,
    pub d1: Option<i64>,
    pub d2: Option<i64>,
    /// every imaginary biquadratic field with both |d_i| up to this bound
    pub biquadratic_max: Option<u64>,
    /// smoothing-set samples
    #[serde(rename = "T")]
    pub t: Option<Vec<Vec<u64>>>,
    #[serde(rename = "S")]
    pub s: Option<Vec<u64>>,
    pub p: Option<Vec<u64>>,
    pub q: Option<Vec<u64>>,
}

/// A config file: run settings, an inline task whose keys mirror the flags,
/// and an optional task list inheriting the inline values.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub output_dir: Option<PathBuf>,
    pub oracle_dir: Option<PathBuf>,
    pub parallel: Option<usize>,
    pub timings: Option<bool>,
    pub theorem: Option<String>,
    pub disc: Option<i64>,
    pub disc_max: Option<u64>,
    pub d1: Option<i64>,
    pub d2: Option<i64>,
    pub biquadratic_max: Option<u64>,
    #[serde(rename = "T")]
    pub t: Option<Vec<Vec<u64>>>,
    #[serde(rename = "S")]
    pub s: Option<Vec<u64>>,
    pub p: Option<Vec<u64>>,
    pub q: Option<Vec<u64>>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

impl FileConfig {
    fn settings(&self) -> Settings {
        Settings { output_dir: self.output_dir.clone(), parallel: self.parallel, timings: self.timings }
    }

    fn task(&self) -> Task {
        Task {
            theorem: self.theorem.clone(),
            disc: self.disc,
            disc_max: self.disc_max,
            d1: self.d1,
            d2: self.d2,
            biquadratic_max: self.biquadratic_max,
            t: self.t.clone(),
            s: self.s.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub output_dir: Option<PathBuf>,
    /// worker threads; 0 or 1 runs serially
    pub parallel: Option<usize>,
    pub timings: Option<bool>,
}

/// Everything a run needs, after validation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cases: Vec<(Theorem, VerificationCase)>,
    /// cases dropped from ranges because T or q was inadmissible
    pub excluded: usize,
    pub output_dir: PathBuf,
    pub parallel: usize,
}

impl Task {
    fn is_empty(&self) -> bool {
        *self == Task::default()
    }

    /// Fields set here win over `base`.
    pub fn or(self, base: &Task) -> Task {
        Task {
            theorem: self.theorem.or_else(|| base.theorem.clone()),
            disc: self.disc.or(base.disc),
            disc_max: self.disc_max.or(base.disc_max),
            d1: self.d1.or(base.d1),
            d2: self.d2.or(base.d2),
            biquadratic_max: self.biquadratic_max.or(base.biquadratic_max),
            t: self.t.or_else(|| base.t.clone()),
            s: self.s.or_else(|| base.s.clone()),
            p: self.p.or_else(|| base.p.clone()),
            q: self.q.or_else(|| base.q.clone()),
        }
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text).map_err(|e| ConfigError::new("config", e.to_string())),
        Some("toml") => toml::from_str(&text).map_err(|e| ConfigError::new("config", e.to_string())),
        _ => Err(ConfigError::new("config", "config files must end in .toml or .json")),
    }
}

/// Merges command-line values over a file config and expands every task.
pub fn resolve(file: FileConfig, cli_task: Task, cli_settings: Settings) -> Result<RunConfig, ConfigError> {
    let inline = cli_task.or(&file.task());
    let file_settings = file.settings();
    let tasks: Vec<Task> = if file.tasks.is_empty() { vec![inline] } else { file.tasks.iter().map(|t| t.clone().or(&inline)).collect() };
    let mut cases = Vec::new();
    let mut excluded = 0;
    for (i, task) in tasks.iter().enumerate() {
        if task.is_empty() {
            return Err(ConfigError::new(format!("tasks[{i}]"), "empty task"));
        }
        let (c, x) = expand(task).map_err(|e| if tasks.len() > 1 { ConfigError::new(format!("tasks[{i}].{}", e.field), e.message) } else { e })?;
        cases.extend(c);
        excluded += x;
    }
    let mut seen = BTreeSet::new();
    cases.retain(|(th, c)| seen.insert(c.case_id(*th)));
    let settings = Settings {
        output_dir: cli_settings.output_dir.or(file_settings.output_dir),
        parallel: cli_settings.parallel.or(file_settings.parallel),
        timings: cli_settings.timings.or(file_settings.timings),
    };
    if settings.timings == Some(true) {
        for (_, c) in cases.iter_mut() {
            c.timings = true;
        }
    }
    Ok(RunConfig { cases, excluded, output_dir: settings.output_dir.unwrap_or_else(|| PathBuf::from("reports")), parallel: settings.parallel.unwrap_or(1) })
}

enum Fields {
    /// explicitly named: inadmissible parameters are errors
    Explicit(Vec<FieldSpec>),
    /// from a range: inadmissible parameters drop the case
    Range(Vec<FieldSpec>),
}

fn fields_of(task: &Task) -> Result<Fields, ConfigError> {
    let sources = [task.disc.is_some(), task.disc_max.is_some(), task.d1.is_some() || task.d2.is_some(), task.biquadratic_max.is_some()];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err(ConfigError::new("disc", "give exactly one of disc, disc-max, d1/d2, biquadratic-max"));
    }
    if let Some(d) = task.disc {
        if d >= 0 || !is_fundamental_discriminant(d) {
            return Err(ConfigError::new("disc", format!("{d} is not a negative fundamental discriminant")));
        }
        return Ok(Fields::Explicit(vec![FieldSpec::Quadratic { disc: d }]));
    }
    if let Some(m) = task.disc_max {
        return Ok(Fields::Range(fundamental_discriminants_negative(m as i64).into_iter().map(|disc| FieldSpec::Quadratic { disc }).collect()));
    }
    if let Some(m) = task.biquadratic_max {
        return Ok(Fields::Range(biquadratic_fields(m as i64)));
    }
    let (Some(d1), Some(d2)) = (task.d1, task.d2) else {
        return Err(ConfigError::new("d1", "d1 and d2 must be given together"));
    };
    let spec = FieldSpec::Biquadratic { d1, d2 };
    spec.abelian().map_err(|e| ConfigError::new("d1", e.to_string()))?;
    Ok(Fields::Explicit(vec![spec]))
}

/// Imaginary biquadratic fields Q(√d1, √d2) with d1 < 0 and |d_i| ≤ bound,
/// one representative per field.
pub fn biquadratic_fields(bound: i64) -> Vec<FieldSpec> {
    let discs: Vec<i64> = (-bound..=bound).filter(|&d| d != 1 && is_fundamental_discriminant(d)).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &d1 in discs.iter().filter(|&&d| d < 0) {
        for &d2 in discs.iter().filter(|&&d| d > d1) {
            let Ok(h) = AbelianFieldQ::biquadratic(d1, d2) else { continue };
            if seen.insert((h.conductor(), h.kernel_set())) {
                out.push(FieldSpec::Biquadratic { d1, d2 });
            }
        }
    }
    out
}

fn expand(task: &Task) -> Result<(Vec<(Theorem, VerificationCase)>, usize), ConfigError> {
    let name = task.theorem.as_deref().ok_or_else(|| ConfigError::new("theorem", "no theorem given"))?;
    let theorem = Theorem::from_str(name).map_err(|e| ConfigError::new("theorem", e.to_string()))?;
    let fields = fields_of(task)?;
    let t_samples = task.t.clone().ok_or_else(|| ConfigError::new("T", "at least one smoothing set is required"))?;
    if t_samples.is_empty() {
        return Err(ConfigError::new("T", "at least one smoothing set is required"));
    }
    let ps: Vec<Option<u64>> = match (theorem, &task.p) {
        (Theorem::Kurihara, None) => return Err(ConfigError::new("p", "kurihara needs at least one prime p")),
        (_, Some(ps)) if ps.is_empty() => return Err(ConfigError::new("p", "empty prime list")),
        (_, Some(ps)) => ps.iter().map(|&p| Some(p)).collect(),
        (_, None) => vec![None],
    };
    let (specs, explicit) = match fields {
        Fields::Explicit(v) => (v, true),
        Fields::Range(v) => (v, false),
    };
    match theorem {
        Theorem::BrumerStarkUnit | Theorem::SelmerDuality if specs.iter().any(|f| matches!(f, FieldSpec::Biquadratic { .. })) => {
            return Err(ConfigError::new("d1", format!("{theorem} is checked on imaginary quadratic fields")));
        }
        _ => {}
    }
    let mut cases = Vec::new();
    let mut excluded = 0;
    for field in &specs {
        for t in &t_samples {
            for &p in &ps {
                let mut base = match field {
                    FieldSpec::Quadratic { disc } => VerificationCase::quadratic(*disc, t),
                    FieldSpec::Biquadratic { d1, d2 } => VerificationCase::biquadratic(*d1, *d2, t),
                };
                base.p = p;
                if let Some(s) = &task.s {
                    base = base.with_s(s);
                }
                let qs = split_primes(theorem, field, task, &base, explicit)?;
                for q in qs {
                    let case = match q {
                        Some(q) => base.clone().with_split_prime(q),
                        None => base.clone(),
                    };
                    match admissible(theorem, &case) {
                        Ok(()) => cases.push((theorem, case)),
                        Err(e) if explicit => return Err(e),
                        Err(_) => excluded += 1,
                    }
                }
            }
        }
    }
    Ok((cases, excluded))
}

fn split_primes(theorem: Theorem, field: &FieldSpec, task: &Task, case: &VerificationCase, explicit: bool) -> Result<Vec<Option<u64>>, ConfigError> {
    if theorem != Theorem::BrumerStarkUnit {
        if task.q.is_some() {
            return Err(ConfigError::new("q", format!("split primes only apply to {}", Theorem::BrumerStarkUnit)));
        }
        return Ok(vec![None]);
    }
    if let Some(q) = &task.q {
        return Ok(q.iter().map(|&q| Some(q)).collect());
    }
    let FieldSpec::Quadratic { disc } = *field else { return Ok(Vec::new()) };
    let k = ImagQuadField::new(disc).map_err(|e| ConfigError::new("disc", e.to_string()))?;
    let s = case.s.clone().unwrap_or_default();
    let qs: Vec<Option<u64>> = primes_up_to(DEFAULT_SPLIT_PRIME_BOUND)
        .into_iter()
        .filter(|q| !case.t.contains(q) && !s.contains(q) && k.splitting(*q) == Splitting::Split)
        .map(Some)
        .collect();
    if qs.is_empty() && explicit {
        return Err(ConfigError::new("q", format!("no split prime below {DEFAULT_SPLIT_PRIME_BOUND} avoids S and T")));
    }
    Ok(qs)
}

/// Structural validation, done for every case before any computation.
fn admissible(theorem: Theorem, case: &VerificationCase) -> Result<(), ConfigError> {
    let id = case.case_id(theorem);
    let field = case.validate().map_err(|e| ConfigError::new("T", format!("{id}: {e}")))?;
    if let (Some(q), FieldSpec::Quadratic { disc }) = (case.split_prime, case.field) {
        let k = ImagQuadField::new(disc).map_err(|e| ConfigError::new("disc", e.to_string()))?;
        if k.splitting(q) != Splitting::Split {
            return Err(ConfigError::new("q", format!("{id}: {q} does not split")));
        }
        if case.t.contains(&q) || case.depletion(&field).contains(&q) {
            return Err(ConfigError::new("q", format!("{id}: {q} lies in S or T")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(theorem: &str) -> Task {
        Task { theorem: Some(theorem.into()), ..Default::default() }
    }

    #[test]
    fn range_drops_ramified_t() {
        let t = Task { disc_max: Some(30), t: Some(vec![vec![3], vec![7]]), ..task("brumer-stark") };
        let run = resolve(FileConfig::default(), t, Settings::default()).unwrap();
        assert!(run.excluded > 0);
        assert!(run.cases.iter().all(|(_, c)| c.validate().is_ok()));
        assert!(!run.cases.iter().any(|(_, c)| c.field == FieldSpec::Quadratic { disc: -3 } && c.t == [3]));
    }

    #[test]
    fn explicit_ramified_t_is_an_error() {
        let t = Task { disc: Some(-7), t: Some(vec![vec![7]]), ..task("brumer-stark") };
        let e = resolve(FileConfig::default(), t, Settings::default()).unwrap_err();
        assert_eq!(e.field, "T");
        assert_eq!(e.diagnostic()["error"], "invalid-config");
    }

    #[test]
    fn missing_pieces() {
        let e = resolve(FileConfig::default(), Task { disc: Some(-23), t: Some(vec![vec![3]]), ..task("kurihara") }, Settings::default()).unwrap_err();
        assert_eq!(e.field, "p");
        let e = resolve(FileConfig::default(), Task { disc: Some(-23), ..task("brumer-stark") }, Settings::default()).unwrap_err();
        assert_eq!(e.field, "T");
        let e = resolve(FileConfig::default(), Task { disc: Some(-23), t: Some(vec![vec![3]]), ..task("fermat") }, Settings::default()).unwrap_err();
        assert_eq!(e.field, "theorem");
        let e = resolve(FileConfig::default(), Task { disc: Some(-27), t: Some(vec![vec![5]]), ..task("brumer-stark") }, Settings::default()).unwrap_err();
        assert_eq!(e.field, "disc");
    }

    #[test]
    fn default_split_primes() {
        let t = Task { disc: Some(-23), t: Some(vec![vec![3]]), ..task("brumer-stark-unit") };
        let run = resolve(FileConfig::default(), t, Settings::default()).unwrap();
        let qs: Vec<u64> = run.cases.iter().map(|(_, c)| c.split_prime.unwrap()).collect();
        assert_eq!(qs, [2, 13, 29, 31, 41, 47]);
    }

    #[test]
    fn file_tasks_inherit_inline_values() {
        let file: FileConfig = toml::from_str("parallel = 2\nT = [[3]]\n[[tasks]]\ntheorem = \"brumer-stark\"\ndisc = -23\n[[tasks]]\ntheorem = \"class-number\"\ndisc = -23\nT = [[5]]\n").unwrap();
        let run = resolve(file, Task::default(), Settings::default()).unwrap();
        assert_eq!(run.parallel, 2);
        let ids: Vec<String> = run.cases.iter().map(|(th, c)| c.case_id(*th)).collect();
        assert_eq!(ids, ["brumer-stark/D=-23/T=3", "class-number/D=-23/T=5"]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("disk = -23\n").is_err());
    }

    #[test]
    fn biquadratic_fields_are_distinct() {
        let fields = biquadratic_fields(8);
        // Q(√-3,√-4) and Q(√-3,√12)... each field once
        let keys: BTreeSet<_> = fields.iter().map(|f| {
            let h = f.abelian().unwrap();
            (h.conductor(), h.kernel_set())
        }).collect();
        assert_eq!(keys.len(), fields.len());
        assert!(fields.contains(&FieldSpec::Biquadratic { d1: -4, d2: -3 }));
    }
}
