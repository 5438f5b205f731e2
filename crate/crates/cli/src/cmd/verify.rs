//! `verify`: the acceptance battery as a text table and a JSON report.

use std::path::Path;

use pa_urn::verify::{run_suite, SuiteBudget};

use crate::output::write_json;
use crate::UsageError;

pub fn parse_budget(s: &str) -> anyhow::Result<SuiteBudget> {
    match s {
        "full" => Ok(SuiteBudget::Full),
        "reduced" => Ok(SuiteBudget::Reduced),
        other => Err(UsageError(format!("unknown budget `{other}` (expected full or reduced)")).into()),
    }
}

/// Returns whether every executed check passed.
pub fn cmd_verify(budget: SuiteBudget, seed: u64, out: &Path) -> anyhow::Result<bool> {
    let report = run_suite(budget, seed);
    let text = report.render();
    std::fs::write(out.join("verify.txt"), format!("{text}\n"))?;
    write_json(&out.join("verify.json"), &report)?;
    say!("{text}");
    Ok(report.all_passed())
}
