use super::{RateReport, RateStatus};
use crate::error::{Error, Result};
use crate::model::conventions::xlog_ratio;

const CONSTRAINT_TOL: f64 = 1e-9;

/// Rate of the linear path `xi(t) = t gamma` for the classical scheme
/// (`p = 0`, `beta = 1`, empty start):
///
/// `sum_i (1 - [gamma]_i) log((1 - [gamma]_i) / ((i + 1) gamma_i / 2))
///  + (1 - sum_i i gamma_i) log 2`.
///
/// `gamma` is taken to vanish beyond its stored entries. Tails
/// `1 - [gamma]_i` are accumulated from the end so finitely supported laws
/// give exact zeros.
pub fn linear_path_rate_classical(gamma: &[f64]) -> Result<RateReport> {
    if gamma.is_empty() {
        return Err(Error::InvalidDistribution("empty sequence".into()));
    }
    if let Some(x) = gamma.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("entry {x} is not a nonnegative number")));
    }
    let mass: f64 = gamma.iter().sum();
    if (mass - 1.0).abs() > CONSTRAINT_TOL {
        return Err(Error::InvalidDistribution(format!("sum gamma_i = {mass}, expected 1")));
    }
    let mut tails = vec![0.0; gamma.len()];
    let mut acc = 0.0;
    for i in (0..gamma.len()).rev() {
        tails[i] = acc;
        acc += gamma[i];
    }
    let first_moment: f64 = tails.iter().sum();
    if first_moment > 1.0 + CONSTRAINT_TOL {
        return Err(Error::InvalidDistribution(format!(
            "sum i gamma_i = {first_moment} exceeds 1"
        )));
    }
    let per_term: Vec<f64> = tails
        .iter()
        .zip(gamma)
        .enumerate()
        .map(|(i, (&tail, &g))| xlog_ratio(tail, (i as f64 + 1.0) * g / 2.0))
        .collect();
    let condensation_term = (1.0 - first_moment).max(0.0) * 2f64.ln();
    let value = per_term.iter().sum::<f64>() + condensation_term;
    let status = if value.is_finite() { RateStatus::Finite } else { RateStatus::Infinite };
    Ok(RateReport {
        value,
        status,
        d: gamma.len() - 1,
        per_term,
        condensation_term,
        truncation_trace: Vec::new(),
        quadrature_error_estimate: 0.0,
        escape_mass: Some(0.0),
        violations: Vec::new(),
    })
}
