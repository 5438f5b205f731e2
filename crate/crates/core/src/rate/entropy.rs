use crate::error::{Error, Result};
use crate::model::conventions::{div, entropy_term, xlog_ratio};
use crate::model::{sigma_with, InitialProfile, Schedule};

const NORM_TOL: f64 = 1e-12;
const ADMISSIBLE_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-12;
/// Masses below this are summation residue and are set to zero.
const ROUNDING_FLOOR: f64 = 1e-14;

fn check_distribution(v: &[f64], name: &str) -> Result<()> {
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("{name} has entry {x}")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidDistribution(format!("{name} sums to {s}")));
    }
    Ok(())
}

/// `R(mu || nu) = sum mu_i log(mu_i / nu_i)`, `+inf` when `mu` charges a
/// `nu`-null atom.
pub fn relative_entropy(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::InvalidDistribution("supports differ in size".into()));
    }
    check_distribution(mu, "mu")?;
    check_distribution(nu, "nu")?;
    Ok(mu.iter().zip(nu).map(|(&m, &n)| entropy_term(m, n)).sum())
}

/// Increment law with mean `phi_dot` that minimizes the local entropy:
/// mass `1 - [phi_dot]_i` on `f_i` for `i <= d` and the remainder on `f_{d+1}`.
/// Masses below `1e-14` are treated as rounding residue and set to zero.
pub fn minimizer_nu0(phi_dot: &[f64]) -> Result<Vec<f64>> {
    let d = phi_dot
        .len()
        .checked_sub(2)
        .ok_or_else(|| Error::InvalidArgument("derivative needs at least two components".into()))?;
    let total: f64 = phi_dot.iter().sum();
    if (total - 1.0).abs() > ADMISSIBLE_TOL {
        return Err(Error::Inadmissible {
            constraint: "unit speed".into(),
            magnitude: (total - 1.0).abs(),
        });
    }
    let mut nu = Vec::with_capacity(d + 2);
    let mut partial = 0.0;
    let mut used = 0.0;
    for &x in &phi_dot[..=d] {
        partial += x;
        if partial < -ADMISSIBLE_TOL {
            return Err(Error::Inadmissible {
                constraint: "partial derivative sum below 0".into(),
                magnitude: -partial,
            });
        }
        if partial > 1.0 + ADMISSIBLE_TOL {
            return Err(Error::Inadmissible {
                constraint: "partial derivative sum above 1".into(),
                magnitude: partial - 1.0,
            });
        }
        let mut m = (1.0 - partial).clamp(0.0, 1.0);
        if m < ROUNDING_FLOOR {
            m = 0.0;
        }
        used += m;
        nu.push(m);
    }
    let last = 1.0 - used;
    if last < -ADMISSIBLE_TOL {
        return Err(Error::Inadmissible { constraint: "escape budget".into(), magnitude: -last });
    }
    nu.push(if last < ROUNDING_FLOOR { 0.0 } else { last });
    Ok(nu)
}

/// Increment law of the chain at scaled state `phi` and time `t`.
///
/// `None` when no probability vector exists: `sigma = 0` with occupied
/// sizes, or the sizes up to `d` carry more weight than `sigma`.
pub fn natural_kernel(
    t: f64,
    phi: &[f64],
    schedule: &Schedule,
    profile: &InitialProfile,
) -> Option<Vec<f64>> {
    let d = phi.len() - 2;
    let (p, beta) = (schedule.p(t), schedule.beta(t));
    let s = sigma_with(beta, profile, t);
    let mut rho = Vec::with_capacity(d + 2);
    let mut weight = 0.0;
    for (i, &x) in phi[..=d].iter().enumerate() {
        let w = (i as f64 + beta) * x.max(0.0);
        weight += w;
        let frac = div(w, s);
        if frac.is_infinite() {
            return None;
        }
        rho.push(if i == 0 { p + (1.0 - p) * div(beta * x.max(0.0), s) } else { (1.0 - p) * frac });
    }
    let rest = 1.0 - div(weight, s);
    if rest < -WEIGHT_TOL {
        return None;
    }
    rho.push((1.0 - p) * rest.max(0.0));
    Some(rho)
}

/// Local cost with the raw entropy block of each increment.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCost {
    pub value: f64,
    /// `mu_i log(mu_i / rho_i)`; the last entry is the condensation block.
    pub terms: Vec<f64>,
}

/// `L = R(nu_0(phi_dot) || rho(t, phi))`; `+inf` on support violations.
pub fn local_cost(
    t: f64,
    phi: &[f64],
    phi_dot: &[f64],
    schedule: &Schedule,
    profile: &InitialProfile,
) -> Result<LocalCost> {
    if phi.len() != phi_dot.len() {
        return Err(Error::InvalidArgument("state and derivative differ in size".into()));
    }
    let nu = minimizer_nu0(phi_dot)?;
    Ok(cost_from(&nu, natural_kernel(t, phi, schedule, profile)))
}

pub(crate) fn cost_from(nu: &[f64], rho: Option<Vec<f64>>) -> LocalCost {
    let Some(rho) = rho else {
        return LocalCost { value: f64::INFINITY, terms: vec![f64::INFINITY; nu.len()] };
    };
    let mut value = 0.0;
    let terms = nu
        .iter()
        .zip(&rho)
        .map(|(&m, &r)| {
            value += entropy_term(m, r);
            xlog_ratio(m, r)
        })
        .collect();
    LocalCost { value, terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::increment;

    #[test]
    fn entropy_examples() {
        assert_eq!(relative_entropy(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let r = relative_entropy(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((r - 2f64.ln()).abs() < 1e-15);
        assert_eq!(relative_entropy(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&[0.6, 0.6], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn nu0_examples() {
        assert_eq!(minimizer_nu0(&increment(3, 1)).unwrap(), vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(minimizer_nu0(&[0.5, 0.25, 0.25]).unwrap(), vec![0.5, 0.25, 0.25]);
        let e = minimizer_nu0(&[2.0, -1.0, 0.0]).unwrap_err();
        assert!(matches!(e, Error::Inadmissible { ref constraint, .. } if constraint == "partial derivative sum above 1"));
    }

    #[test]
    fn star_cost_is_log_two() {
        let s = Schedule::homogeneous(0.0, 1.0).unwrap();
        let z = InitialProfile::zero();
        for &t in &[0.01, 0.3, 1.0] {
            let c = local_cost(t, &[t, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0], &s, &z).unwrap();
            assert!((c.value - 2f64.ln()).abs() < 1e-15);
            assert!((c.terms[3] - 2f64.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_sigma() {
        let s = Schedule::homogeneous(0.25, 1.0).unwrap();
        let z = InitialProfile::zero();
        assert_eq!(natural_kernel(0.0, &[0.0, 0.0, 0.0], &s, &z), Some(vec![0.25, 0.0, 0.75]));
        assert_eq!(natural_kernel(0.0, &[0.1, 0.0, 0.0], &s, &z), None);
        let c = local_cost(0.0, &[0.1, 0.0, 0.0], &[1.0, 0.0, 0.0], &s, &z).unwrap();
        assert_eq!(c.value, f64::INFINITY);
    }
}
