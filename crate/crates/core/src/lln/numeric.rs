//! Zero-cost trajectory by direct integration of the ODE system.
//!
//! Classical fourth-order Runge-Kutta with step-doubling error control. Steps
//! end exactly on schedule breakpoints and grid points, and the right-hand
//! side uses the segment of the current step, so jumps are never smeared.

use super::{check_grid, solve_lln_closed, LLNSolution, Method};
use crate::error::{Error, Result};
use crate::model::{sigma_with, InitialProfile, Schedule};

#[derive(Debug, Clone, Copy)]
pub struct NumericOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Start time used when `sigma(0) = 0`.
    pub small_start: f64,
    pub max_steps: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { abs_tol: 1e-13, rel_tol: 1e-12, small_start: 1e-6, max_steps: 5_000_000 }
    }
}

struct Rhs<'a> {
    d: usize,
    schedule: &'a Schedule,
    profile: &'a InitialProfile,
    seg: usize,
}

impl Rhs<'_> {
    /// Derivative of `(zeta_0, ..., zeta_d, zeta_bar)`.
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let d = self.d;
        let (p, beta) = self.schedule.params_on(self.seg, t);
        let q = (1.0 - p) / sigma_with(beta, self.profile, t);
        let mut sum = 0.0;
        for i in 0..=d {
            let inflow = match i {
                0 => 1.0 - p,
                1 => p + q * beta * y[0],
                _ => q * (i as f64 - 1.0 + beta) * y[i - 1],
            };
            dy[i] = inflow - q * (i as f64 + beta) * y[i];
            sum += dy[i];
        }
        dy[d + 1] = 1.0 - sum;
    }
}

fn rk4(f: &Rhs, t: f64, y: &[f64], h: f64, out: &mut [f64], w: &mut [Vec<f64>; 5]) {
    let n = y.len();
    let [k1, k2, k3, k4, tmp] = w;
    f.eval(t, y, k1);
    for j in 0..n {
        tmp[j] = y[j] + 0.5 * h * k1[j];
    }
    f.eval(t + 0.5 * h, tmp, k2);
    for j in 0..n {
        tmp[j] = y[j] + 0.5 * h * k2[j];
    }
    f.eval(t + 0.5 * h, tmp, k3);
    for j in 0..n {
        tmp[j] = y[j] + h * k3[j];
    }
    f.eval(t + h, tmp, k4);
    for j in 0..n {
        out[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
}

/// Solves for `zeta^d` on `grid` with adaptive RK4.
pub fn solve_lln_numeric(
    d: usize,
    schedule: &Schedule,
    profile: &InitialProfile,
    grid: &[f64],
    opts: NumericOptions,
) -> Result<LLNSolution> {
    check_grid(grid)?;
    let n = d + 2;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    let mut next = 0;

    let (mut t, mut y) = if profile.is_small() {
        // the right-hand side is 0/0 at t = 0; start from the closed form
        let t0 = opts.small_start;
        let start = solve_lln_closed(d, schedule, profile, &[t0])?;
        while next < grid.len() && grid[next] < t0 {
            let lin = solve_lln_closed(d, schedule, profile, &[grid[next]])?;
            out.push(lin.values[0].clone());
            next += 1;
        }
        (t0, start.values[0].clone())
    } else {
        (0.0, profile.truncated(d))
    };

    // stopping points: breakpoints and grid points ahead of t
    let mut stops: Vec<f64> = schedule.breakpoints();
    stops.extend(grid[next..].iter().copied());
    stops.retain(|&s| s >= t);
    stops.sort_by(|a, b| a.total_cmp(b));
    stops.dedup();

    let mut w: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let mut full = vec![0.0; n];
    let mut mid = vec![0.0; n];
    let mut two = vec![0.0; n];
    let mut h = 1e-3f64.min(1e-2 * t.max(1e-6));
    let mut steps = 0usize;

    for &stop in &stops {
        while t < stop {
            let seg = schedule.segment_index(t);
            let rhs = Rhs { d, schedule, profile, seg };
            let remaining = stop - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            rk4(&rhs, t, &y, step, &mut full, &mut w);
            rk4(&rhs, t, &y, 0.5 * step, &mut mid, &mut w);
            rk4(&rhs, t + 0.5 * step, &mid.clone(), 0.5 * step, &mut two, &mut w);
            let mut err = 0.0f64;
            for j in 0..n {
                let scale = opts.abs_tol + opts.rel_tol * two[j].abs().max(y[j].abs());
                err = err.max((two[j] - full[j]).abs() / 15.0 / scale);
            }
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Ode { t, reason: "step budget exhausted".into() });
            }
            if err <= 1.0 {
                for j in 0..n {
                    y[j] = two[j] + (two[j] - full[j]) / 15.0;
                }
                t = if last { stop } else { t + step };
            }
            let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 4.0) };
            if !(last && err <= 1.0) {
                h = step * factor;
            }
            if h < 1e-15 * t.max(1e-300) {
                return Err(Error::Ode { t, reason: "step size underflow".into() });
            }
        }
        while next < grid.len() && grid[next] <= t {
            out.push(y.clone());
            next += 1;
        }
    }

    // the tail component is integrated, not recovered from mass balance
    Ok(LLNSolution {
        d,
        grid: grid.to_vec(),
        values: out,
        method: Method::Numeric,
        c_total: profile.c_total(),
        c_weighted: profile.c_weighted(),
        condensed: profile.is_condensed(),
    })
}
