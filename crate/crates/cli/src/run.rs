use crate::config::RunConfig;
use serde::Serialize;
use stark_core::verify::{run_batch, Summary, VerificationReport};
use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub overall: Summary,
    pub by_theorem: BTreeMap<String, Summary>,
    /// range cases left out because T or q was inadmissible
    pub excluded: usize,
    pub report_files: Vec<String>,
}

impl RunSummary {
    pub fn of(reports: &[VerificationReport], excluded: usize) -> Self {
        let mut groups: BTreeMap<String, Vec<VerificationReport>> = BTreeMap::new();
        for r in reports {
            groups.entry(r.theorem.to_string()).or_default().push(r.clone());
        }
        RunSummary {
            overall: Summary::of(reports),
            by_theorem: groups.iter().map(|(k, v)| (k.clone(), Summary::of(v))).collect(),
            excluded,
            report_files: reports.iter().map(|r| report_file_name(&r.case_id)).collect(),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summaries serialize");
        s.push('\n');
        s
    }
}

/// File name for a case id; '/' becomes "__".
pub fn report_file_name(case_id: &str) -> String {
    format!("{}.json", case_id.replace('/', "__"))
}

pub fn execute(config: &RunConfig) -> Vec<VerificationReport> {
    if config.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(config.parallel).build().expect("thread pool");
        pool.install(|| run_batch(&config.cases, true))
    } else {
        run_batch(&config.cases, false)
    }
}

/// Writes one report per case plus summary.json and returns the summary.
pub fn write_reports(dir: &Path, reports: &[VerificationReport], excluded: usize) -> io::Result<RunSummary> {
    std::fs::create_dir_all(dir)?;
    for r in reports {
        std::fs::write(dir.join(report_file_name(&r.case_id)), r.to_canonical_json())?;
    }
    let summary = RunSummary::of(reports, excluded);
    std::fs::write(summary_path(dir), summary.to_canonical_json())?;
    Ok(summary)
}

pub fn summary_path(dir: &Path) -> PathBuf {
    dir.join("summary.json")
}
