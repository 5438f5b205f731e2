//! Named deviation paths.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lln::{solve_lln_closed, stretched_exponential};
use crate::model::{InitialProfile, Path, Schedule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// Every ball joins one urn: `gamma = (1, 0, ...)`.
    Star,
    /// Every ball opens a fresh urn of size one: `gamma = (0, 1, 0, ...)`.
    StraightRoad,
    /// `gamma_i = 2^{-(i+1)}`.
    Geometric,
    /// `gamma_i = q(i + 1)` for the stretched-exponential law with exponent `r`.
    Stretched(f64),
    /// The zero-cost trajectory.
    Lln,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(Preset::Star),
            "straight-road" => Ok(Preset::StraightRoad),
            "geometric" => Ok(Preset::Geometric),
            "lln" => Ok(Preset::Lln),
            _ => {
                if let Some(r) = s.strip_prefix("stretched:") {
                    let r: f64 = r
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad exponent in {s}")))?;
                    Ok(Preset::Stretched(r))
                } else {
                    Err(Error::InvalidArgument(format!("unknown preset {s}")))
                }
            }
        }
    }
}

impl Preset {
    /// Slope sequence of linear presets; `None` for `Lln`.
    pub fn gamma(&self, len: usize) -> Result<Option<Vec<f64>>> {
        Ok(match *self {
            Preset::Star => Some(vec![1.0]),
            Preset::StraightRoad => Some(vec![0.0, 1.0]),
            Preset::Geometric => {
                let mut g: Vec<f64> = (0..len).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
                // put the remaining mass on the last entry so the sum is 1
                let rest = 0.5f64.powi(len as i32);
                *g.last_mut().unwrap() += rest;
                Some(g)
            }
            Preset::Stretched(r) => Some(stretched_exponential(r, 1e-15)?.shifted()),
            Preset::Lln => None,
        })
    }

    /// Natural resolution for the `I^inf` search.
    pub fn default_depth(&self) -> Result<usize> {
        Ok(match *self {
            Preset::Star | Preset::StraightRoad => 8,
            Preset::Geometric => 64,
            Preset::Stretched(r) => stretched_exponential(r, 1e-15)?.values.len().max(8),
            Preset::Lln => 5,
        })
    }
}

/// Knots for piecewise-linear approximations of the zero-cost trajectory:
/// `0`, every breakpoint, and geometric spacing `h = ratio * max(t - a, scale)`
/// inside each segment starting at `a`.
pub fn dense_lln_grid(schedule: &Schedule, profile: &InitialProfile, ratio: f64) -> Vec<f64> {
    let scale0 = if profile.is_small() {
        1e-6
    } else {
        (crate::model::sigma(schedule, profile, 0.0) / (1.0 + schedule.beta_max())).max(1e-6)
    };
    let mut grid = vec![0.0];
    let mut starts = vec![0.0];
    starts.extend(schedule.breakpoints());
    starts.push(1.0);
    for w in starts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let scale = if a == 0.0 { scale0 } else { a };
        let mut t = a;
        loop {
            t += ratio * t.max(scale);
            if t >= b * (1.0 - 1e-12) {
                break;
            }
            grid.push(t);
        }
        grid.push(b);
    }
    grid
}

/// Path for a preset at level `d`.
pub fn preset_path(
    preset: Preset,
    d: usize,
    schedule: &Schedule,
    profile: &InitialProfile,
) -> Result<Path> {
    match preset.gamma(d + 1)? {
        Some(g) => Path::linear(profile, &g, d),
        None => {
            let grid = dense_lln_grid(schedule, profile, 1e-3);
            solve_lln_closed(d, schedule, profile, &grid)?.to_path()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_presets() {
        assert_eq!("star".parse::<Preset>().unwrap(), Preset::Star);
        assert_eq!("stretched:0.5".parse::<Preset>().unwrap(), Preset::Stretched(0.5));
        assert!("nope".parse::<Preset>().is_err());
        assert!("stretched:x".parse::<Preset>().is_err());
    }

    #[test]
    fn dense_grid_has_breakpoints() {
        let s = Schedule::figure_one();
        let g = dense_lln_grid(&s, &InitialProfile::zero(), 1e-2);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.contains(&0.01));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
