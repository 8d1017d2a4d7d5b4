//! Verification of annihilation, class number, Fitting-ideal, unit and
//! duality statements on explicit imaginary quadratic and biquadratic fields.
//!
//! Biquadratic fields are never handled by degree-4 ideal arithmetic: every
//! check descends along the odd characters to imaginary quadratic subfields.

mod annihilation;
mod components;
mod kurihara;
mod report;
mod selmer;
mod unit;

pub use annihilation::{check_brumer_stark, check_cnf};
pub use kurihara::{check_kurihara, deduction_chain, DeductionChain};
pub use report::{FieldSpec, Status, Summary, Theorem, VerificationCase, VerificationReport, Witness};
pub use selmer::{auxiliary_primes, check_selmer_duality, selmer_module, AUXILIARY_PRIME_BOUND};
pub use unit::brumer_stark_unit;

use crate::error::Result;
use rayon::prelude::*;
use std::time::Instant;

/// Runs one case against a theorem, filling in the elapsed time when asked.
pub fn verify(theorem: Theorem, case: &VerificationCase) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = match theorem {
        Theorem::BrumerStark => check_brumer_stark(case),
        Theorem::ClassNumberFormula => check_cnf(case),
        Theorem::Kurihara => check_kurihara(case),
        Theorem::BrumerStarkUnit => brumer_stark_unit(case),
        Theorem::SelmerDuality => check_selmer_duality(case),
    }?;
    if case.timings {
        report.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    Ok(report)
}

/// Runs every case, turning computation errors into failing reports, and
/// returns the reports ordered by case id whatever the parallelism.
pub fn run_batch(cases: &[(Theorem, VerificationCase)], parallel: bool) -> Vec<VerificationReport> {
    let one = |(theorem, case): &(Theorem, VerificationCase)| {
        verify(*theorem, case).unwrap_or_else(|e| {
            let mut r = VerificationReport::new(*theorem, case);
            r.fail("error", e.to_string());
            r
        })
    };
    let mut reports: Vec<VerificationReport> = if parallel { cases.par_iter().map(one).collect() } else { cases.iter().map(one).collect() };
    reports.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    reports
}

/// Smoothing sets T from `candidates` that avoid the ramified primes of the
/// field and satisfy the root-of-unity condition.
pub fn admissible_smoothing_sets(field: &FieldSpec, candidates: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let h = field.abelian()?;
    Ok(candidates
        .iter()
        .filter(|t| t.iter().all(|&l| !h.is_ramified(l)) && crate::stickelberger::check_drcond(&h, t).holds)
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_is_deterministic() {
        let cases: Vec<(Theorem, VerificationCase)> = [-3i64, -4, -7, -8, -11, -15, -20, -23]
            .iter()
            .flat_map(|&d| [(Theorem::BrumerStark, VerificationCase::quadratic(d, &[13])), (Theorem::ClassNumberFormula, VerificationCase::quadratic(d, &[17]))])
            .collect();
        let a = run_batch(&cases, true);
        let b = run_batch(&cases, false);
        assert_eq!(a, b);
        let text: Vec<String> = a.iter().map(|r| r.to_canonical_json()).collect();
        let again: Vec<String> = run_batch(&cases, true).iter().map(|r| r.to_canonical_json()).collect();
        assert_eq!(text, again);
        assert!(a.iter().all(|r| r.status != Status::Fail), "{:#?}", a.iter().filter(|r| r.status == Status::Fail).collect::<Vec<_>>());
        assert_eq!(Summary::of(&a).total, cases.len());
    }

    #[test]
    fn report_schema() {
        let r = verify(Theorem::BrumerStark, &VerificationCase::quadratic(-23, &[3])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_canonical_json()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, ["case_id", "elapsed_ms", "inputs", "status", "theorem", "witnesses"]);
        assert_eq!(v["status"], "pass");
        assert_eq!(v["theorem"], "brumer-stark");
        assert_eq!(v["elapsed_ms"], 0);
        assert_eq!(v["inputs"]["field"]["disc"], "-23");
    }
}
