//! `rate`: rate of a named or user-supplied path, as a JSON report.

use std::path::Path;

use anyhow::Context;
use pa_urn::rate::{path_rate_id, path_rate_iinf, preset_path, IinfOptions, Preset, RateReport};
use serde::Serialize;

use crate::config::Model;
use crate::output::{write_json, SCHEMA_VERSION};
use crate::UsageError;

#[derive(Serialize)]
struct RateOutput<'a> {
    schema_version: u32,
    source: String,
    functional: &'static str,
    #[serde(flatten)]
    report: &'a RateReport,
}

/// Path from a CSV of knots with header `t,x_0,...,x_d,x_bar`.
pub fn read_path_csv(path: &Path) -> anyhow::Result<pa_urn::Path> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        if nums.len() < 3 {
            return Err(UsageError("a path row needs t and at least two components".into()).into());
        }
        times.push(nums[0]);
        values.push(nums[1..].to_vec());
    }
    pa_urn::Path::new(times, values).map_err(|e| UsageError(e.to_string()).into())
}

pub fn cmd_rate(
    model: &Model,
    preset: Option<&str>,
    path_file: Option<&Path>,
    d: Option<usize>,
    out: &Path,
) -> anyhow::Result<()> {
    let (path, source, default_inf) = match (preset, path_file) {
        (Some(_), Some(_)) => {
            return Err(UsageError("give either --preset or --path, not both".into()).into())
        }
        (None, None) => return Err(UsageError("one of --preset or --path is required".into()).into()),
        (None, Some(f)) => (read_path_csv(f)?, f.display().to_string(), false),
        (Some(name), None) => {
            let p: Preset = name.parse().map_err(|e: pa_urn::Error| UsageError(e.to_string()))?;
            let depth = d.unwrap_or(p.default_depth()?).max(if p == Preset::Lln { 0 } else { 1 });
            (preset_path(p, depth, &model.schedule, &model.profile)?, name.to_string(), p != Preset::Lln)
        }
    };
    let (report, functional) = match d {
        Some(d) => (path_rate_id(&path, d.min(path.d()), &model.schedule, &model.profile, 1e-12)?, "I_d"),
        None if default_inf => {
            (path_rate_iinf(&path, &model.schedule, &model.profile, IinfOptions::default())?, "I_inf")
        }
        None => (path_rate_id(&path, path.d(), &model.schedule, &model.profile, 1e-12)?, "I_d"),
    };
    let doc = RateOutput { schema_version: SCHEMA_VERSION, source, functional, report: &report };
    write_json(&out.join("rate.json"), &doc)?;
    say!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}
