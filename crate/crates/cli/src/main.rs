mod compute;
mod config;
mod oracle;
mod run;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{ConfigError, FileConfig, Settings, Task};
use oracle::{read_goldens, write_goldens, GoldenDiff, Goldens, OracleModule};
use serde_json::json;
use stark_core::eisenstein::DirichletCharacter;
use stark_core::stickelberger::AbelianFieldQ;
use stark_core::verify::Status;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

const ORACLE_DIR_ENV: &str = "STARK_ORACLE_DIR";

#[derive(Debug, Parser)]
#[command(name = "stark", version, about = "Exact verification of Stickelberger-element statements on small abelian fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a theorem on a family of cases and write one report per case.
    Verify(VerifyArgs),
    /// Print a single computation as JSON.
    Compute(ComputeArgs),
    /// Rebuild or check the golden files.
    Oracle(OracleArgs),
    #[command(hide = true)]
    Panic,
}

/// A comma-separated prime set such as `3,7`; empty means ∅.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PrimeSet(Vec<u64>);

impl std::str::FromStr for PrimeSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',').filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"))).collect::<Result<_, _>>().map(PrimeSet)
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// brumer-stark, class-number, kurihara, brumer-stark-unit or selmer-duality
    theorem: Option<String>,
    /// TOML or JSON file whose keys mirror these flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
    #[arg(long)]
    disc_max: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    d1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    d2: Option<i64>,
    #[arg(long)]
    biquadratic_max: Option<u64>,
    /// a smoothing set such as 3,7; repeat for several samples
    #[arg(long = "T")]
    t: Vec<PrimeSet>,
    /// finite primes of S (default: the ramified primes)
    #[arg(long = "S")]
    s: Option<PrimeSet>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
    /// split primes for the unit construction (default: all of norm ≤ 50)
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// worker threads
    #[arg(long)]
    parallel: Option<usize>,
    /// record wall-clock time in reports
    #[arg(long)]
    timings: bool,
}

impl VerifyArgs {
    fn task(&self) -> Task {
        Task {
            theorem: self.theorem.clone(),
            disc: self.disc,
            disc_max: self.disc_max,
            d1: self.d1,
            d2: self.d2,
            biquadratic_max: self.biquadratic_max,
            t: (!self.t.is_empty()).then(|| self.t.iter().map(|x| x.0.clone()).collect()),
            s: self.s.as_ref().map(|x| x.0.clone()),
            p: (!self.p.is_empty()).then(|| self.p.clone()),
            q: (!self.q.is_empty()).then(|| self.q.clone()),
        }
    }

    fn settings(&self) -> Settings {
        Settings { output_dir: self.output_dir.clone(), parallel: self.parallel, timings: self.timings.then_some(true) }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ComputeKind {
    Theta,
    Ks,
    Classgroup,
    Rayclass,
    Qexp,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    kind: ComputeKind,
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    d1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    d2: Option<i64>,
    /// the cyclotomic field Q(ζ_m)
    #[arg(long)]
    conductor: Option<u64>,
    #[arg(long = "S")]
    s: Option<PrimeSet>,
    #[arg(long = "T")]
    t: Option<PrimeSet>,
    #[arg(long)]
    p: Option<u64>,
    /// weight of the Eisenstein series
    #[arg(long)]
    k: Option<u64>,
    /// ψ = (D/·); without it (and without --modulus) ψ is trivial
    #[arg(long, allow_hyphen_values = true)]
    kronecker: Option<i64>,
    #[arg(long)]
    modulus: Option<u64>,
    /// exponents of ψ on the generators of (Z/modulus)^*
    #[arg(long, value_delimiter = ',')]
    exps: Vec<u64>,
    /// number of coefficients
    #[arg(long, default_value_t = 200)]
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleCommand {
    Rebuild,
    Check,
}

#[derive(Debug, Args)]
struct OracleArgs {
    command: OracleCommand,
    /// restrict to one golden file
    #[arg(long)]
    module: Option<String>,
    /// golden directory (overrides $STARK_ORACLE_DIR and the config)
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Outcome of a command: exit code, stdout document, optional stderr diagnostic.
struct Outcome {
    code: u8,
    stdout: Option<String>,
}

impl Outcome {
    fn ok(doc: &serde_json::Value) -> Self {
        Outcome { code: 0, stdout: Some(pretty(doc)) }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, ConfigError> {
    let file = match &args.config {
        Some(path) => config::load_file(path)?,
        None => FileConfig::default(),
    };
    let cfg = config::resolve(file, args.task(), args.settings())?;
    if cfg.cases.is_empty() {
        return Err(ConfigError::new("T", "no admissible case"));
    }
    let reports = run::execute(&cfg);
    let summary = run::write_reports(&cfg.output_dir, &reports, cfg.excluded).map_err(|e| ConfigError::new("output-dir", e.to_string()))?;
    let code = if reports.iter().any(|r| r.status == Status::Fail) { 1 } else { 0 };
    let stdout = match reports.as_slice() {
        [one] => one.to_canonical_json(),
        _ => summary.to_canonical_json(),
    };
    Ok(Outcome { code, stdout: Some(stdout) })
}

fn core(field: &'static str) -> impl Fn(stark_core::Error) -> ConfigError {
    move |e| ConfigError::new(field, e.to_string())
}

fn compute_field(args: &ComputeArgs) -> Result<AbelianFieldQ, ConfigError> {
    match (args.disc, args.d1, args.d2, args.conductor) {
        (Some(d), None, None, None) => AbelianFieldQ::quadratic(d).map_err(core("disc")),
        (None, Some(d1), Some(d2), None) => AbelianFieldQ::biquadratic(d1, d2).map_err(core("d1")),
        (None, None, None, Some(m)) => AbelianFieldQ::cyclotomic(m).map_err(core("conductor")),
        _ => Err(ConfigError::new("disc", "give exactly one of --disc, --d1/--d2, --conductor")),
    }
}

fn cmd_compute(args: &ComputeArgs) -> Result<Outcome, ConfigError> {
    let t = args.t.as_ref().map(|x| x.0.clone()).unwrap_or_default();
    let s = args.s.as_ref().map(|x| x.0.clone());
    let doc = match args.kind {
        ComputeKind::Theta => {
            let h = compute_field(args)?;
            let s = s.unwrap_or_else(|| h.ramified_primes());
            compute::theta_json(&h, &s, &t).map_err(core("S"))?
        }
        ComputeKind::Ks => compute::ks_json(&compute_field(args)?, &t, args.p).map_err(core("T"))?,
        ComputeKind::Classgroup => compute::classgroup_json(args.disc.ok_or_else(|| ConfigError::new("disc", "--disc is required"))?).map_err(core("disc"))?,
        ComputeKind::Rayclass => compute::rayclass_json(args.disc.ok_or_else(|| ConfigError::new("disc", "--disc is required"))?, &t).map_err(core("T"))?,
        ComputeKind::Qexp => {
            let k = args.k.ok_or_else(|| ConfigError::new("k", "--k is required"))?;
            let psi = match (args.kronecker, args.modulus) {
                (Some(d), None) => DirichletCharacter::kronecker(d).map_err(core("kronecker"))?,
                (None, Some(m)) => DirichletCharacter::new(m, args.exps.clone()).map_err(core("exps"))?,
                (None, None) => DirichletCharacter::trivial(1),
                _ => return Err(ConfigError::new("kronecker", "give at most one of --kronecker, --modulus")),
            };
            compute::qexp_json(k, &psi, &s.unwrap_or_default(), args.n).map_err(core("k"))?
        }
    };
    Ok(Outcome::ok(&doc))
}

fn oracle_dir(args: &OracleArgs) -> Result<PathBuf, ConfigError> {
    if let Some(d) = &args.dir {
        return Ok(d.clone());
    }
    if let Some(d) = std::env::var_os(ORACLE_DIR_ENV) {
        return Ok(PathBuf::from(d));
    }
    let from_file = match &args.config {
        Some(path) => config::load_file(path)?.oracle_dir,
        None => None,
    };
    Ok(from_file.unwrap_or_else(|| PathBuf::from("oracle")))
}

fn cmd_oracle(args: &OracleArgs) -> Result<Outcome, ConfigError> {
    let modules: Vec<OracleModule> = match &args.module {
        Some(m) => vec![m.parse().map_err(|e: String| ConfigError::new("module", e))?],
        None => OracleModule::ALL.to_vec(),
    };
    let dir = oracle_dir(args)?;
    if args.command == OracleCommand::Check && !dir.is_dir() {
        return Err(ConfigError::new("dir", format!("oracle directory {} does not exist", dir.display())));
    }
    let io = |e: std::io::Error| ConfigError::new("dir", e.to_string());
    let mut computed: Vec<(OracleModule, Goldens, Option<Goldens>)> = Vec::new();
    for m in modules {
        let fresh = m.compute().map_err(|e| ConfigError::new("module", format!("{m}: {e}")))?;
        let stored = read_goldens(&m.file(&dir)).map_err(io)?;
        computed.push((m, fresh, stored));
    }
    let mut divergent = Vec::new();
    let mut report = serde_json::Map::new();
    for (m, fresh, stored) in &computed {
        let diff = GoldenDiff::between(stored.as_ref().unwrap_or(&Goldens::new()), fresh);
        let keyed = |ks: &[String]| ks.iter().map(|k| format!("{m}:{k}")).collect::<Vec<_>>();
        match args.command {
            OracleCommand::Rebuild => divergent.extend(keyed(&diff.changed)),
            OracleCommand::Check if stored.is_none() => divergent.push(format!("{m}:<missing file>")),
            OracleCommand::Check => {
                divergent.extend(keyed(&diff.changed));
                divergent.extend(keyed(&diff.missing));
                divergent.extend(keyed(&diff.unexpected));
            }
        }
        report.insert(m.name().into(), json!({ "keys": fresh.len(), "changed": diff.changed, "added": diff.missing, "removed": diff.unexpected }));
    }
    divergent.sort();
    let wrote = args.command == OracleCommand::Rebuild && divergent.is_empty();
    if wrote {
        std::fs::create_dir_all(&dir).map_err(io)?;
        for (m, fresh, _) in &computed {
            write_goldens(&m.file(&dir), fresh).map_err(io)?;
        }
    }
    let doc = json!({ "command": format!("{:?}", args.command).to_lowercase(), "dir": dir.display().to_string(), "written": wrote, "divergent": divergent, "modules": report });
    Ok(Outcome { code: if divergent.is_empty() { 0 } else { 1 }, stdout: Some(pretty(&doc)) })
}

fn dispatch(cli: &Cli) -> Result<Outcome, ConfigError> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Compute(a) => cmd_compute(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Panic => panic!("requested panic"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let diag = json!({ "error": "invalid-config", "field": "arguments", "message": e.kind().to_string(), "detail": e.to_string() });
            eprint!("{}", pretty(&diag));
            return ExitCode::from(2);
        }
    };
    match catch_unwind(AssertUnwindSafe(|| dispatch(&cli))) {
        Ok(Ok(out)) => {
            if let Some(s) = out.stdout {
                print!("{s}");
            }
            ExitCode::from(out.code)
        }
        Ok(Err(e)) => {
            eprint!("{}", pretty(&e.diagnostic()));
            ExitCode::from(2)
        }
        Err(payload) => {
            let message = payload.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| payload.downcast_ref::<String>().cloned()).unwrap_or_default();
            eprint!("{}", pretty(&json!({ "error": "internal-panic", "message": message })));
            ExitCode::from(3)
        }
    }
}
