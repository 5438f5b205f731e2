//! Zero-cost trajectories, comparison solutions and reference laws.

mod closed;
mod envelope;
mod numeric;
mod reference;

pub use closed::solve_lln_closed;
pub use envelope::{
    a_coefficients, b_coefficients, b_gamma_closed_form, constant_coefficient_residual,
    constant_coefficient_solution, power_law_envelopes, EnvelopeParams, Envelopes, ScheduleBounds,
};
pub use numeric::{solve_lln_numeric, NumericOptions};
pub use reference::{stretched_exponential, ReferenceKind, ReferenceLaw};

use crate::error::{Error, Result};
use crate::model::{InitialProfile, Path, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numeric,
}

/// `zeta^d` sampled on a grid; each value has `d + 2` components, the last
/// being the pooled tail `zeta_bar_{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LLNSolution {
    pub d: usize,
    pub grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub method: Method,
    /// `c` and `c_weighted` of the profile the solution started from.
    pub c_total: f64,
    pub c_weighted: f64,
    pub condensed: bool,
}

impl LLNSolution {
    /// Piecewise-linear interpolant through the grid values. The grid must
    /// span `[0, 1]`.
    pub fn to_path(&self) -> Result<Path> {
        Path::new(self.grid.clone(), self.values.clone())
    }

    /// `max_t |sum_i zeta_i(t) + zeta_bar(t) - (t + c)|`.
    pub fn mass_error(&self) -> f64 {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(t, v)| (v.iter().sum::<f64>() - (t + self.c_total)).abs())
            .fold(0.0, f64::max)
    }
}

/// Weight accounting of a truncated solution at one grid time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPoint {
    pub t: f64,
    /// `t + c_weighted - sum_{i<=d} i zeta_i(t)`: weight carried by urns above `d`.
    pub deficit: f64,
    /// `(d + 1) zeta_bar_{d+1}(t)`: weight those urns carry at minimum.
    pub tail_bound: f64,
    /// `deficit - tail_bound`: weight above the minimum, i.e. the part the
    /// truncated state cannot see.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightCheck {
    pub points: Vec<WeightPoint>,
    /// Largest deficit over the grid.
    pub max_deficit: f64,
    /// Condensed profiles carry a strictly positive deficit already at `t = 0`.
    pub condensed: bool,
}

/// Weighted-sum accounting against `t + c_weighted`, with the tail bound
/// `(d + 1) zeta_bar_{d+1}` reported next to each deficit.
pub fn weighted_sum_check(sol: &LLNSolution) -> WeightCheck {
    let d = sol.d;
    let mut points = Vec::with_capacity(sol.grid.len());
    let mut worst = 0.0f64;
    for (&t, v) in sol.grid.iter().zip(&sol.values) {
        let seen: f64 = v[..=d].iter().enumerate().map(|(i, z)| i as f64 * z).sum();
        let deficit = t + sol.c_weighted - seen;
        let tail_bound = (d as f64 + 1.0) * v[d + 1];
        let excess = deficit - tail_bound;
        worst = worst.max(deficit);
        points.push(WeightPoint { t, deficit, tail_bound, excess });
    }
    WeightCheck { points, max_deficit: worst, condensed: sol.condensed }
}

/// Linear start `zeta_i(t) = b_i t` of a small configuration, from the
/// comparison recursion with the schedule frozen at `t = 0`.
pub(crate) fn small_start_slopes(schedule: &Schedule, d: usize) -> Vec<f64> {
    let (p, b) = schedule.params_on(0, 0.0);
    let params = EnvelopeParams { o1: p, o2: p, o3: b, o4: b, o5: 0.0 };
    b_coefficients(&params, d)
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidArgument("grid points must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("grid must be sorted".into()));
    }
    Ok(())
}

pub(crate) fn finish(
    d: usize,
    grid: &[f64],
    mut zeta: Vec<Vec<f64>>,
    profile: &InitialProfile,
    method: Method,
) -> LLNSolution {
    for (t, v) in grid.iter().zip(zeta.iter_mut()) {
        let s: f64 = v.iter().sum();
        v.push(t + profile.c_total() - s);
    }
    LLNSolution {
        d,
        grid: grid.to_vec(),
        values: zeta,
        method,
        c_total: profile.c_total(),
        c_weighted: profile.c_weighted(),
        condensed: profile.is_condensed(),
    }
}
