//! `simulate`: one trajectory plus an ensemble histogram of terminal counts.

use std::path::Path;

use pa_urn::model::realize_initial;
use pa_urn::simulator::{run, terminal_histogram};
use serde::Serialize;

use crate::config::Model;
use crate::output::{csv_writer, fmt_f64, write_json, SCHEMA_VERSION};
use crate::UsageError;

#[derive(Serialize)]
struct HistogramRow {
    counts: Vec<u64>,
    runs: u64,
}

#[derive(Serialize)]
struct Summary {
    schema_version: u32,
    n: usize,
    d: usize,
    seed: u64,
    samples: usize,
    initial_counts: Vec<u64>,
    terminal_counts: Vec<u64>,
    histogram: Vec<HistogramRow>,
}

pub fn header(d: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..=d).map(|i| format!("x_{i}")));
    h.push("x_bar".into());
    h
}

pub fn cmd_simulate(
    model: &Model,
    n: usize,
    d: usize,
    samples: usize,
    seed: u64,
    out: &Path,
) -> anyhow::Result<()> {
    if n == 0 {
        return Err(UsageError("--n must be at least 1".into()).into());
    }
    let init = realize_initial(&model.profile, n, d, model.seed_config.as_deref())
        .map_err(|e| UsageError(e.to_string()))?;
    let traj = run(n, &model.schedule, &init, seed)?;

    let mut w = csv_writer(&out.join("trajectory.csv"))?;
    w.write_record(header(d))?;
    for (t, x) in traj.interpolated.times().iter().zip(traj.interpolated.values()) {
        let mut row = vec![fmt_f64(*t)];
        row.extend(x.iter().map(|&v| fmt_f64(v)));
        w.write_record(row)?;
    }
    w.flush()?;

    let hist = if samples > 0 {
        terminal_histogram(n, &model.schedule, &init, samples, seed)?
    } else {
        Default::default()
    };
    let mut w = csv_writer(&out.join("histogram.csv"))?;
    let mut h: Vec<String> = (0..=d).map(|i| format!("z_{i}")).collect();
    h.push("z_bar".into());
    h.push("runs".into());
    w.write_record(&h)?;
    for (counts, runs) in &hist {
        let mut row: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
        row.push(runs.to_string());
        w.write_record(row)?;
    }
    w.flush()?;

    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        n,
        d,
        seed,
        samples,
        initial_counts: init.counts.clone(),
        terminal_counts: traj.trajectory.last().unwrap().counts.clone(),
        histogram: hist.into_iter().map(|(counts, runs)| HistogramRow { counts, runs }).collect(),
    };
    write_json(&out.join("summary.json"), &summary)?;
    say!("wrote trajectory.csv ({} rows), histogram.csv and summary.json", n + 1);
    Ok(())
}
