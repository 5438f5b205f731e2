//! Closed-form zero-cost trajectory, integrated panel by panel.
//!
//! On a panel `[a, b]` the solution is
//! `zeta_i(x) = e^{-L_i(x)} (zeta_i(a) + int_a^x g_i e^{L_i})` with
//! `L_i(x) = int_a^x (1 - p)(i + beta) / sigma` and source `g_i` built from
//! `zeta_{i-1}`. Both integrals are taken spectrally on Chebyshev-Lobatto
//! nodes, panels being short enough that `L_i <= 1/2` and `sigma` varies by at
//! most half its value.

use super::{check_grid, finish, small_start_slopes, LLNSolution, Method};
use crate::error::Result;
use crate::model::{sigma_with, InitialProfile, Schedule};
use crate::numeric::cheb::Lobatto;

const NODES: usize = 17;
const H_MAX: f64 = 1.0 / 64.0;
const KAPPA: f64 = 0.5;
/// Length of the linear start for configurations with `sigma(0) = 0`.
const SMALL_START: f64 = 1e-8;

/// Solves for `zeta^d` on `grid` (sorted, inside `[0, 1]`).
pub fn solve_lln_closed(
    d: usize,
    schedule: &Schedule,
    profile: &InitialProfile,
    grid: &[f64],
) -> Result<LLNSolution> {
    check_grid(grid)?;
    let t_end = *grid.last().unwrap();
    let rule = Lobatto::new(NODES);
    let q = rule.len();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    let mut next = 0usize;

    let c = profile.truncated(d);
    let (mut t, mut z): (f64, Vec<f64>) = if profile.is_small() {
        let tau = schedule.breakpoints().first().map_or(SMALL_START, |b| SMALL_START.min(0.5 * b));
        let slopes = small_start_slopes(schedule, d);
        while next < grid.len() && grid[next] <= tau {
            out.push(slopes.iter().map(|b| b * grid[next]).collect());
            next += 1;
        }
        (tau, slopes.iter().map(|b| b * tau).collect())
    } else {
        while next < grid.len() && grid[next] == 0.0 {
            out.push(c[..=d].to_vec());
            next += 1;
        }
        (0.0, c[..=d].to_vec())
    };

    // rate bound for the panel width rule
    let rate = (1.0 + schedule.beta_max()) + (d as f64 + schedule.beta_max());
    let breaks = schedule.breakpoints();

    let mut alpha = vec![0.0; q];
    let mut gamma = vec![0.0; q];
    let mut da = vec![0.0; q];
    let mut db = vec![0.0; q];
    let mut lam = vec![0.0; q];
    let mut src = vec![0.0; q];
    let mut acc = vec![0.0; q];
    let mut nodal = vec![vec![0.0; q]; d + 1];
    let mut tn = vec![0.0; q];

    while next < grid.len() && t < t_end {
        let seg = schedule.segment_index(t);
        let seg_end = breaks.iter().copied().find(|&b| b > t).unwrap_or(1.0);
        let s_here = sigma_with(schedule.params_on(seg, t).1, profile, t);
        let mut h = H_MAX.min(KAPPA * s_here / rate);
        let mut b = t + h;
        if b >= seg_end - 1e-14 * seg_end {
            b = seg_end;
        }
        if b > t_end {
            b = t_end;
        }
        h = b - t;
        let half = 0.5 * h;

        for (m, x) in rule.nodes().iter().enumerate() {
            let tm = if m == q - 1 { b } else { t + (x + 1.0) * half };
            tn[m] = tm;
            let (p, beta) = schedule.params_on(seg, tm);
            let s = sigma_with(beta, profile, tm);
            alpha[m] = (1.0 - p) / s;
            gamma[m] = (1.0 - p) * beta / s;
        }
        rule.cumulative(&alpha, &mut da);
        rule.cumulative(&gamma, &mut db);
        for m in 0..q {
            da[m] *= half;
            db[m] *= half;
        }

        for i in 0..=d {
            for m in 0..q {
                lam[m] = i as f64 * da[m] + db[m];
                let (p, beta) = schedule.params_on(seg, tn[m]);
                let g = match i {
                    0 => 1.0 - p,
                    1 => p + gamma[m] * nodal[0][m],
                    _ => alpha[m] * (i as f64 - 1.0 + beta) * nodal[i - 1][m],
                };
                src[m] = g * lam[m].exp();
            }
            rule.cumulative(&src, &mut acc);
            for m in 0..q {
                nodal[i][m] = (-lam[m]).exp() * (z[i] + half * acc[m]);
            }
        }

        while next < grid.len() && grid[next] <= b {
            let x = ((grid[next] - t) / half - 1.0).clamp(-1.0, 1.0);
            out.push((0..=d).map(|i| rule.interp(&nodal[i], x)).collect());
            next += 1;
        }
        for i in 0..=d {
            z[i] = nodal[i][q - 1];
        }
        t = b;
    }

    Ok(finish(d, grid, out, profile, Method::ClosedForm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(m: usize) -> Vec<f64> {
        (0..=m).map(|k| k as f64 / m as f64).collect()
    }

    #[test]
    fn classical_small_configuration_is_linear() {
        let s = Schedule::homogeneous(0.0, 1.0).unwrap();
        let sol = solve_lln_closed(12, &s, &InitialProfile::zero(), &uniform(10)).unwrap();
        for (t, v) in sol.grid.iter().zip(&sol.values) {
            for i in 0..=12 {
                let b = 4.0 / ((i + 1) * (i + 2) * (i + 3)) as f64;
                assert!((v[i] - b * t).abs() < 1e-13, "i={i} t={t}: {} vs {}", v[i], b * t);
            }
        }
    }

    #[test]
    fn initial_condition_exact() {
        let s = Schedule::figure_one();
        let prof = InitialProfile::new(vec![0.3, 0.2, 0.1], None).unwrap();
        let sol = solve_lln_closed(4, &s, &prof, &[0.0, 0.5]).unwrap();
        assert_eq!(sol.values[0], prof.truncated(4));
    }

    #[test]
    fn scalar_case_matches_exact_solution() {
        // d = 0, p = 0.2, beta = 0.5, c_0 = 1: zeta_0' = 0.8 - 0.4 zeta_0 / (1.5 t + 0.5)
        let s = Schedule::homogeneous(0.2, 0.5).unwrap();
        let prof = InitialProfile::new(vec![1.0], None).unwrap();
        let grid = uniform(20);
        let sol = solve_lln_closed(0, &s, &prof, &grid).unwrap();
        // integrating factor (1.5 t + 0.5)^{k}, k = 0.4 / 1.5
        let k = 0.4 / 1.5;
        for (t, v) in grid.iter().zip(&sol.values) {
            let u = 1.5 * t + 0.5;
            let exact = (0.8 / 1.5) / (k + 1.0) * (u - 0.5f64.powf(k + 1.0) * u.powf(-k))
                + 0.5f64.powf(k) * u.powf(-k);
            assert!((v[0] - exact).abs() < 1e-13, "t={t}: {} vs {exact}", v[0]);
        }
    }
}
