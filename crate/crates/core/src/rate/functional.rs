use super::entropy::{cost_from, minimizer_nu0, natural_kernel};
use super::{RateReport, RateStatus};
use crate::error::{Error, Result};
use crate::model::{validate_path, InitialProfile, Path, Schedule};
use crate::numeric::quad::{integrate, QuadOptions};

const ADMISSIBLE_TOL: f64 = 1e-9;

/// `I_d(phi) = int_0^1 L(t, phi(t), phi'(t)) dt` for the projection of `path`
/// to level `d`.
///
/// Panels split at path knots and schedule breakpoints. The local cost is
/// integrated in its nonnegative form; the per-block entropy terms are
/// integrated on the same partition. A `+inf` node makes the whole integral
/// `+inf`: on each panel the path is linear and nonnegative, so a component
/// vanishing at an interior point vanishes on the whole panel.
pub fn path_rate_id(
    path: &Path,
    d: usize,
    schedule: &Schedule,
    profile: &InitialProfile,
    tol: f64,
) -> Result<RateReport> {
    if d > path.d() {
        return Err(Error::InvalidArgument(format!(
            "path is only resolved to level {}, asked for {d}",
            path.d()
        )));
    }
    let projected;
    let path = if d < path.d() {
        projected = path.project(d);
        &projected
    } else {
        path
    };

    let adm = validate_path(path, profile, ADMISSIBLE_TOL);
    if !adm.is_admissible {
        let mut r = RateReport::infinite(d, RateStatus::Inadmissible);
        r.violations = adm
            .violations
            .iter()
            .map(|v| format!("{} at t = {} by {:.3e}", v.condition, v.time, v.magnitude))
            .collect();
        return Ok(r);
    }

    let nus: Vec<Vec<f64>> =
        (0..path.num_segments()).map(|k| minimizer_nu0(&path.slope(k))).collect::<Result<_>>()?;

    let mut breaks: Vec<f64> = path.times().to_vec();
    breaks.extend(schedule.breakpoints());
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();

    let mut phi = vec![0.0; d + 2];
    let opts = QuadOptions { abs_tol: tol, rel_tol: tol, ..QuadOptions::default() };
    let out = integrate(
        |t, comps| {
            let k = path.segment_of(t);
            path.eval_on(k, t, &mut phi);
            let c = cost_from(&nus[k], natural_kernel(t, &phi, schedule, profile));
            comps.copy_from_slice(&c.terms);
            c.value
        },
        &breaks,
        d + 2,
        opts,
    )?;

    if out.infinite {
        let mut r = RateReport::infinite(d, RateStatus::Infinite);
        r.violations.push(format!(
            "increment law charges a null atom of the kernel on [{}, {}]",
            out.worst.0, out.worst.1
        ));
        return Ok(r);
    }
    Ok(RateReport {
        value: out.value,
        status: RateStatus::Finite,
        d,
        per_term: out.components[..=d].to_vec(),
        condensation_term: out.components[d + 1],
        truncation_trace: vec![out.value],
        quadrature_error_estimate: out.error,
        escape_mass: Some(escape_mass(path, d)),
        violations: Vec::new(),
    })
}

/// `int_0^1 (1 - [phi']_d) dt`: time-integrated rate of urns leaving size `d`.
fn escape_mass(path: &Path, d: usize) -> f64 {
    (0..path.num_segments())
        .map(|k| {
            let s = path.slope(k);
            let partial: f64 = s[..=d].iter().sum();
            (path.times()[k + 1] - path.times()[k]) * (1.0 - partial).max(0.0)
        })
        .sum()
}

#[derive(Debug, Clone, Copy)]
pub struct IinfOptions {
    /// Quadrature tolerance for every truncated rate.
    pub quad_tol: f64,
    /// Increment and escape-mass threshold of the stopping rule.
    pub tol: f64,
    /// Consecutive small increments required.
    pub window: usize,
    /// First level tried.
    pub d_min: usize,
}

impl Default for IinfOptions {
    fn default() -> Self {
        IinfOptions { quad_tol: 1e-12, tol: 1e-9, window: 3, d_min: 0 }
    }
}

/// `I^inf` from the truncated rates `I_d(p_d xi)`, `d = 0, 1, ...` up to the
/// resolution of `xi`.
///
/// Stops when `window` consecutive increments are below `tol` and the escape
/// mass at the current level is below `tol`. A `+inf` level ends the search
/// with `+inf`. Reaching the resolution limit returns the last value as a
/// lower bound with status `Unconverged`.
pub fn path_rate_iinf(
    xi: &Path,
    schedule: &Schedule,
    profile: &InitialProfile,
    opts: IinfOptions,
) -> Result<RateReport> {
    let top = xi.d();
    let mut trace = Vec::new();
    let mut small = 0usize;
    let mut last: Option<RateReport> = None;
    for d in opts.d_min.min(top)..=top {
        let r = path_rate_id(xi, d, schedule, profile, opts.quad_tol)?;
        if !r.is_finite() {
            trace.push(f64::INFINITY);
            let mut out = r;
            out.truncation_trace = trace;
            return Ok(out);
        }
        if let Some(prev) = trace.last() {
            if r.value - prev < opts.tol {
                small += 1;
            } else {
                small = 0;
            }
        }
        trace.push(r.value);
        let escape = r.escape_mass.unwrap_or(f64::INFINITY);
        let done = small >= opts.window && escape < opts.tol;
        last = Some(r);
        if done {
            break;
        }
    }
    let mut out = last.expect("at least one level evaluated");
    let converged = small >= opts.window && out.escape_mass.unwrap_or(f64::INFINITY) < opts.tol;
    out.status = if converged { RateStatus::Finite } else { RateStatus::Unconverged };
    out.truncation_trace = trace;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hom() -> Schedule {
        Schedule::homogeneous(0.0, 1.0).unwrap()
    }

    #[test]
    fn star_rate() {
        let z = InitialProfile::zero();
        let star = Path::linear(&z, &[1.0], 8).unwrap();
        for d in [0, 3, 8] {
            let r = path_rate_id(&star, d, &hom(), &z, 1e-12).unwrap();
            assert!((r.value - 2f64.ln()).abs() < 1e-12, "d={d}: {}", r.value);
            assert!((r.condensation_term - 2f64.ln()).abs() < 1e-12);
        }
        let r = path_rate_iinf(&star, &hom(), &z, IinfOptions::default()).unwrap();
        assert_eq!(r.status, RateStatus::Finite);
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn straight_road_infinite() {
        let z = InitialProfile::zero();
        let road = Path::linear(&z, &[0.0, 1.0], 4).unwrap();
        let r = path_rate_id(&road, 4, &hom(), &z, 1e-12).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        assert_eq!(r.status, RateStatus::Infinite);
    }

    #[test]
    fn inadmissible_path_is_infinite() {
        let z = InitialProfile::zero();
        let p = Path::affine(&[0.0, 0.0, 0.0], &[2.0, -1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let r = path_rate_id(&p, 1, &hom(), &z, 1e-12).unwrap();
        assert_eq!(r.status, RateStatus::Inadmissible);
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn geometric_rate_matches_series() {
        let z = InitialProfile::zero();
        let gamma: Vec<f64> = (0..60).map(|i| 0.5f64.powi(i + 1)).collect();
        let xi = Path::linear(&z, &gamma, 59).unwrap();
        let r = path_rate_iinf(&xi, &hom(), &z, IinfOptions::default()).unwrap();
        let series: f64 = (0..200)
            .map(|i| -0.5f64.powi(i + 1) * ((i as f64 + 1.0) / 2.0).ln())
            .sum();
        assert_eq!(r.status, RateStatus::Finite);
        assert!((r.value - series).abs() < 1e-8, "{} vs {series}", r.value);
    }
}
