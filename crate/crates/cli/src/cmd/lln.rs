//! `lln` and `envelope`: time slices of the zero-cost trajectory and the
//! comparison solutions, in log-log ready columns.

use std::path::Path;

use pa_urn::lln::{power_law_envelopes, solve_lln_closed, ScheduleBounds};
use serde::Serialize;

use crate::config::Model;
use crate::output::{csv_writer, fmt_f64, write_json, SCHEMA_VERSION};
use crate::UsageError;

pub const LLN_HEADER: [&str; 7] =
    ["t", "k", "value", "cumulative_value", "complement", "envelope_low", "envelope_high"];

fn check_times(times: &[f64]) -> anyhow::Result<Vec<f64>> {
    if times.is_empty() || times.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(UsageError("times must be a nonempty list inside [0, 1]".into()).into());
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted.dedup();
    Ok(sorted)
}

fn partial_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

pub fn cmd_lln(model: &Model, d: usize, times: &[f64], out: &Path) -> anyhow::Result<()> {
    let times = check_times(times)?;
    let sol = solve_lln_closed(d, &model.schedule, &model.profile, &times)?;
    let env = power_law_envelopes(ScheduleBounds::from(&model.schedule), &model.profile, &times, d)?;
    let mut w = csv_writer(&out.join("lln.csv"))?;
    w.write_record(LLN_HEADER)?;
    for (k, &t) in times.iter().enumerate() {
        let total = t + model.profile.c_total();
        let cum = partial_sums(&sol.values[k][..=d]);
        let lo = partial_sums(&env.lower[k]);
        let hi = partial_sums(&env.upper[k]);
        for i in 0..=d {
            w.write_record([
                fmt_f64(t),
                i.to_string(),
                fmt_f64(sol.values[k][i]),
                fmt_f64(cum[i]),
                fmt_f64(total - cum[i]),
                fmt_f64(lo[i]),
                fmt_f64(hi[i]),
            ])?;
        }
    }
    w.flush()?;
    say!("wrote lln.csv: {} time slices, k = 0..{d}", times.len());
    Ok(())
}

#[derive(Serialize)]
struct EnvelopeSummary {
    schema_version: u32,
    d: usize,
    upper: [f64; 5],
    lower: [f64; 5],
    eta_exponent: f64,
    eta_prime_exponent: f64,
}

pub fn cmd_envelope(model: &Model, d: usize, times: &[f64], out: &Path) -> anyhow::Result<()> {
    let times = check_times(times)?;
    let env = power_law_envelopes(ScheduleBounds::from(&model.schedule), &model.profile, &times, d)?;
    let mut w = csv_writer(&out.join("envelope.csv"))?;
    w.write_record(["t", "k", "eta", "eta_prime", "upper", "lower", "cumulative_upper", "cumulative_lower"])?;
    for (k, &t) in times.iter().enumerate() {
        let hi = partial_sums(&env.upper[k]);
        let lo = partial_sums(&env.lower[k]);
        for i in 0..=d {
            w.write_record([
                fmt_f64(t),
                i.to_string(),
                fmt_f64(env.eta[i]),
                fmt_f64(env.eta_prime[i]),
                fmt_f64(env.upper[k][i]),
                fmt_f64(env.lower[k][i]),
                fmt_f64(hi[i]),
                fmt_f64(lo[i]),
            ])?;
        }
    }
    w.flush()?;
    let p = |e: &pa_urn::lln::EnvelopeParams| [e.o1, e.o2, e.o3, e.o4, e.o5];
    write_json(
        &out.join("envelope.json"),
        &EnvelopeSummary {
            schema_version: SCHEMA_VERSION,
            d,
            upper: p(&env.upper_params),
            lower: p(&env.lower_params),
            eta_exponent: env.eta_exponent,
            eta_prime_exponent: env.eta_prime_exponent,
        },
    )?;
    say!(
        "wrote envelope.csv and envelope.json: tail exponents {} (upper), {} (lower)",
        env.eta_exponent, env.eta_prime_exponent
    );
    Ok(())
}
