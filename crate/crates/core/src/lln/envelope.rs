//! Constant-coefficient comparison systems and their power-law envelopes.

use statrs::function::gamma::ln_gamma;

use super::check_grid;
use crate::error::{Error, Result};
use crate::model::{InitialProfile, Schedule};

/// Coefficients of the comparison system: `o1`, `o2` play the roles of `p`
/// bounds, `o3`, `o4` of `beta` bounds and `o5` of the initial scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParams {
    pub o1: f64,
    pub o2: f64,
    pub o3: f64,
    pub o4: f64,
    pub o5: f64,
}

impl EnvelopeParams {
    pub fn new(o1: f64, o2: f64, o3: f64, o4: f64, o5: f64) -> Result<Self> {
        let p = EnvelopeParams { o1, o2, o3, o4, o5 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.o1, self.o2, self.o3, self.o4, self.o5];
        if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument("parameters must be finite and nonnegative".into()));
        }
        if self.o2 >= 1.0 {
            return Err(Error::InvalidArgument("o2 must be below 1".into()));
        }
        if self.o3 <= 0.0 || self.o4 <= 0.0 {
            return Err(Error::InvalidArgument("o3 and o4 must be positive".into()));
        }
        Ok(())
    }

    /// `(1 - o2) / (1 + o4)`.
    pub fn k(&self) -> f64 {
        (1.0 - self.o2) / (1.0 + self.o4)
    }

    /// Tail exponent `1 + (1 + o4) / (1 - o2)` of `b_i`.
    pub fn tail_exponent(&self) -> f64 {
        1.0 + 1.0 / self.k()
    }
}

/// Slopes `b_0, ..., b_d` by the product recursion.
pub fn b_coefficients(p: &EnvelopeParams, d: usize) -> Vec<f64> {
    let k = p.k();
    let mut b = Vec::with_capacity(d + 1);
    b.push((1.0 - p.o1) / (1.0 + k * p.o3));
    if d >= 1 {
        b.push((p.o1 + k * p.o3 * b[0]) / (1.0 + k * (1.0 + p.o3)));
    }
    for i in 2..=d {
        let fi = i as f64;
        let prev = b[i - 1];
        b.push(prev * k * (fi - 1.0 + p.o3) / (1.0 + k * (fi + p.o3)));
    }
    b
}

/// `b_i` for `i >= 1` through the Gamma-ratio form, in log space.
pub fn b_gamma_closed_form(p: &EnvelopeParams, b1: f64, i: usize) -> f64 {
    assert!(i >= 1);
    let inv_k = 1.0 / p.k();
    let fi = i as f64;
    let log_ratio = ln_gamma(2.0 + p.o3 + inv_k) - ln_gamma(1.0 + p.o3) + ln_gamma(fi + p.o3)
        - ln_gamma(fi + 1.0 + p.o3 + inv_k);
    b1 * log_ratio.exp()
}

/// Transient coefficients `a[i][l]`, `l <= i <= d`, for initial values `c`.
pub fn a_coefficients(p: &EnvelopeParams, c: &[f64], d: usize) -> Vec<Vec<f64>> {
    let b = b_coefficients(p, d);
    let ci = |i: usize| c.get(i).copied().unwrap_or(0.0);
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    a.push(vec![ci(0) - b[0] * p.o5]);
    for i in 1..=d {
        let mut row: Vec<f64> = (0..i)
            .map(|l| (i as f64 - 1.0 + p.o3) / (i - l) as f64 * a[i - 1][l])
            .collect();
        let s: f64 = row.iter().sum();
        row.push(ci(i) - b[i] * p.o5 - s);
        a.push(row);
    }
    a
}

/// `(o5 / (t + o5))^e` with the value-0 convention when `o5 = 0`.
fn transient(o5: f64, t: f64, e: f64) -> f64 {
    if o5 == 0.0 {
        0.0
    } else {
        (o5 / (t + o5)).powf(e)
    }
}

/// `chi_0..chi_d` on `grid`, started from the profile's first `d + 1` entries.
pub fn constant_coefficient_solution(
    params: &EnvelopeParams,
    profile: &InitialProfile,
    grid: &[f64],
    d: usize,
) -> Result<Vec<Vec<f64>>> {
    params.validate()?;
    check_grid(grid)?;
    let b = b_coefficients(params, d);
    let a = a_coefficients(params, profile.c(), d);
    let k = params.k();
    Ok(grid
        .iter()
        .map(|&t| {
            (0..=d)
                .map(|i| {
                    let tr: f64 = a[i]
                        .iter()
                        .enumerate()
                        .map(|(l, al)| al * transient(params.o5, t, k * (l as f64 + params.o3)))
                        .sum();
                    b[i] * (t + params.o5) + tr
                })
                .collect()
        })
        .collect())
}

/// Largest absolute residual of the comparison ODE at time `t > 0`.
pub fn constant_coefficient_residual(
    params: &EnvelopeParams,
    profile: &InitialProfile,
    t: f64,
    d: usize,
) -> f64 {
    let b = b_coefficients(params, d);
    let a = a_coefficients(params, profile.c(), d);
    let k = params.k();
    let u = t + params.o5;
    let mut chi = vec![0.0; d + 1];
    let mut dchi = vec![0.0; d + 1];
    for i in 0..=d {
        chi[i] = b[i] * u;
        dchi[i] = b[i];
        for (l, al) in a[i].iter().enumerate() {
            let e = k * (l as f64 + params.o3);
            let tr = transient(params.o5, t, e);
            chi[i] += al * tr;
            dchi[i] -= al * e * tr / u;
        }
    }
    let mut worst = 0.0f64;
    for i in 0..=d {
        let rhs = match i {
            0 => 1.0 - params.o1 - k * params.o3 * chi[0] / u,
            1 => params.o1 + k * params.o3 * chi[0] / u - k * (1.0 + params.o3) * chi[1] / u,
            _ => k * (i as f64 - 1.0 + params.o3) * chi[i - 1] / u
                - k * (i as f64 + params.o3) * chi[i] / u,
        };
        worst = worst.max((dchi[i] - rhs).abs());
    }
    worst
}

/// Range of the schedule parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleBounds {
    pub p_min: f64,
    pub p_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl From<&Schedule> for ScheduleBounds {
    fn from(s: &Schedule) -> Self {
        ScheduleBounds {
            p_min: s.p_min(),
            p_max: s.p_max(),
            beta_min: s.beta_min(),
            beta_max: s.beta_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelopes {
    /// Slopes of the upper comparison solution (lighter tail).
    pub eta: Vec<f64>,
    /// Slopes of the lower comparison solution (heavier tail).
    pub eta_prime: Vec<f64>,
    pub eta_exponent: f64,
    pub eta_prime_exponent: f64,
    /// Upper solution on the grid; partial sums dominate those of `zeta`.
    pub upper: Vec<Vec<f64>>,
    /// Lower solution on the grid; partial sums are dominated by those of `zeta`.
    pub lower: Vec<Vec<f64>>,
    pub upper_params: EnvelopeParams,
    pub lower_params: EnvelopeParams,
}

/// Comparison solutions bracketing the partial sums of `zeta^d`.
pub fn power_law_envelopes(
    bounds: ScheduleBounds,
    profile: &InitialProfile,
    grid: &[f64],
    d: usize,
) -> Result<Envelopes> {
    let (c, cw) = (profile.c_total(), profile.c_weighted());
    let upper_params = EnvelopeParams::new(
        bounds.p_min,
        bounds.p_max,
        bounds.beta_min,
        bounds.beta_max,
        cw.max(c),
    )?;
    let lower_params = EnvelopeParams::new(
        bounds.p_max,
        bounds.p_min,
        bounds.beta_max,
        bounds.beta_min,
        cw.min(c),
    )?;
    Ok(Envelopes {
        eta: b_coefficients(&upper_params, d),
        eta_prime: b_coefficients(&lower_params, d),
        eta_exponent: upper_params.tail_exponent(),
        eta_prime_exponent: lower_params.tail_exponent(),
        upper: constant_coefficient_solution(&upper_params, profile, grid, d)?,
        lower: constant_coefficient_solution(&lower_params, profile, grid, d)?,
        upper_params,
        lower_params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_slopes() {
        let p = EnvelopeParams::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        let b = b_coefficients(&p, 3);
        assert!((b[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((b[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!((b[2] - 1.0 / 15.0).abs() < 1e-15);
        assert!((b[3] - 4.0 / 120.0).abs() < 1e-15);
        assert_eq!(p.tail_exponent(), 3.0);
    }

    #[test]
    fn rejects_degenerate_o2() {
        assert!(EnvelopeParams::new(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn small_configuration_is_linear() {
        let p = EnvelopeParams::new(0.1, 0.2, 1.5, 2.0, 0.0).unwrap();
        let chi = constant_coefficient_solution(&p, &InitialProfile::zero(), &[0.0, 0.5], 4).unwrap();
        let b = b_coefficients(&p, 4);
        assert_eq!(chi[0], vec![0.0; 5]);
        for i in 0..=4 {
            assert!((chi[1][i] - 0.5 * b[i]).abs() < 1e-16);
        }
    }

    #[test]
    fn initial_values_recovered() {
        let p = EnvelopeParams::new(0.1, 0.2, 1.5, 2.0, 0.7).unwrap();
        let prof = InitialProfile::new(vec![0.3, 0.2, 0.1, 0.05], None).unwrap();
        let chi = constant_coefficient_solution(&p, &prof, &[0.0], 5).unwrap();
        for i in 0..=5 {
            assert!((chi[0][i] - prof.c_i(i)).abs() < 1e-13);
        }
    }
}
