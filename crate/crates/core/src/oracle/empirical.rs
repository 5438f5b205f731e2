//! Finite-`n` rate sequences `-(1/n) log P_n(event)`.

use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{
    child, enumerate_exact, enumerate_exact_filtered, initial_key, moves, params, tube_filter,
    Arithmetic, ExactOptions, StateKey, TerminalView,
};
use crate::error::{Error, Result};
use crate::model::{realize_initial, InitialProfile, Schedule};
use crate::simulator::{run_rng, TubeQuery};

/// Event on the trajectory of `X^{n,d}`.
#[derive(Clone)]
pub enum Event {
    /// One designated initially empty urn receives every ball.
    Star,
    /// Every ball lands in an empty urn: terminal state is `initial + n f_0`.
    StraightRoad,
    /// Predicate on the terminal state.
    Terminal(Arc<dyn Fn(&TerminalView) -> bool + Send + Sync>),
    /// The trajectory stays in the tube at every lattice time.
    Tube(TubeQuery),
}

impl std::fmt::Debug for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Event::Star => write!(f, "Star"),
            Event::StraightRoad => write!(f, "StraightRoad"),
            Event::Terminal(_) => write!(f, "Terminal(..)"),
            Event::Tube(q) => write!(f, "Tube(radius = {})", q.radius),
        }
    }
}

/// Where the initial urns come from at each `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// Urn multiplicities by size, fixed in `n`.
    Sizes(Vec<u64>),
    /// Profile discretized at scale `n`.
    Profile(InitialProfile),
}

impl InitialSpec {
    pub fn sizes(&self, n: usize) -> Result<Vec<u64>> {
        match self {
            InitialSpec::Sizes(s) => Ok(s.clone()),
            InitialSpec::Profile(profile) => {
                let deep = (profile.c_weighted() * n as f64).ceil() as usize + profile.c().len() + 1;
                let st = realize_initial(profile, n, deep, None)?;
                let mut sizes = st.counts;
                while sizes.last() == Some(&0) {
                    sizes.pop();
                }
                Ok(sizes)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateMode {
    Exact(Arithmetic),
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: usize,
    pub probability: f64,
    /// `-(1/n) log P_n`; for zero Monte Carlo hits, the one-sided bound.
    #[serde(with = "crate::ext_real")]
    pub value: f64,
    /// 95% interval in Monte Carlo mode; equal to `value` in exact mode.
    #[serde(with = "crate::ext_real")]
    pub lower: f64,
    #[serde(with = "crate::ext_real")]
    pub upper: f64,
    pub hits: Option<u64>,
    /// Zero hits: only `value <= rate` is known, from the rule of three.
    pub one_sided: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRate {
    pub points: Vec<RatePoint>,
    /// Richardson estimate from the last two finite points, assuming an
    /// `O(1/n)` correction.
    #[serde(with = "crate::ext_real::option")]
    pub extrapolated: Option<f64>,
    pub trend: Trend,
    pub increments: Vec<f64>,
}

/// Rate sequence of `event` along `n_list`.
pub fn empirical_rate(
    event: &Event,
    n_list: &[usize],
    d: usize,
    schedule: &Schedule,
    initial: &InitialSpec,
    mode: RateMode,
) -> Result<EmpiricalRate> {
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let sizes = initial.sizes(n)?;
        let point = match mode {
            RateMode::Exact(arithmetic) => exact_point(event, n, d, schedule, &sizes, arithmetic)?,
            RateMode::MonteCarlo { samples, seed } => {
                mc_point(event, n, d, schedule, &sizes, samples, seed)?
            }
        };
        points.push(point);
    }
    let increments: Vec<f64> = points.windows(2).map(|w| w[1].value - w[0].value).collect();
    let trend = classify(&points, &increments);
    let finite: Vec<&RatePoint> =
        points.iter().filter(|p| p.value.is_finite() && !p.one_sided).collect();
    let extrapolated = match finite.as_slice() {
        [.., a, b] if b.n != a.n => {
            let (n1, n2) = (a.n as f64, b.n as f64);
            Some((n2 * b.value - n1 * a.value) / (n2 - n1))
        }
        _ => None,
    };
    Ok(EmpiricalRate { points, extrapolated, trend, increments })
}

fn classify(points: &[RatePoint], inc: &[f64]) -> Trend {
    let scale = points.iter().map(|p| p.value.abs()).fold(1.0, f64::max);
    let tol = 1e-12 * scale;
    if inc.iter().all(|x| x.abs() <= tol) {
        Trend::Constant
    } else if inc.iter().all(|&x| x > tol) {
        Trend::Increasing
    } else if inc.iter().all(|&x| x < -tol) {
        Trend::Decreasing
    } else {
        Trend::Mixed
    }
}

fn star_tag(sizes: &[u64]) -> Result<Option<u64>> {
    if sizes.first().copied().unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument("the star event needs an initially empty urn".into()));
    }
    Ok(Some(0))
}

fn road_target(sizes: &[u64], d: usize, n: usize) -> Result<Vec<u64>> {
    if d == 0 {
        return Err(Error::InvalidArgument("the straight road needs d >= 1".into()));
    }
    let (key, _, _) = initial_key(sizes, d, None)?;
    let mut c = key.counts;
    c[1] += n as u64;
    Ok(c)
}

fn exact_point(
    event: &Event,
    n: usize,
    d: usize,
    schedule: &Schedule,
    sizes: &[u64],
    arithmetic: Arithmetic,
) -> Result<RatePoint> {
    let mut opts = ExactOptions { arithmetic, ..Default::default() };
    let prob = match event {
        Event::Star => {
            opts.tag = star_tag(sizes)?;
            enumerate_exact(n, d, schedule, sizes, &opts)?
                .probability_of(|v| v.tag == Some(n as u64))
        }
        Event::StraightRoad => {
            let target = road_target(sizes, d, n)?;
            enumerate_exact(n, d, schedule, sizes, &opts)?.probability_of(|v| v.counts == target)
        }
        Event::Terminal(pred) => {
            enumerate_exact(n, d, schedule, sizes, &opts)?.probability_of(|v| pred(v))
        }
        Event::Tube(q) => {
            if q.center.d() != d {
                return Err(Error::InvalidArgument("tube center and d differ".into()));
            }
            let f = tube_filter(q, n);
            enumerate_exact_filtered(n, d, schedule, sizes, &opts, &f)?.total()
        }
    };
    let value = -prob.ln() / n as f64;
    Ok(RatePoint {
        n,
        probability: prob.to_f64(),
        value,
        lower: value,
        upper: value,
        hits: None,
        one_sided: false,
    })
}

/// One sampled path of the count chain with the designated urn tracked.
fn sample_hit(
    event: &Event,
    n: usize,
    schedule: &Schedule,
    key0: &StateKey,
    totals: (u64, u64),
    target: Option<&[u64]>,
    seed: u64,
    index: u64,
) -> Result<bool> {
    let mut rng = run_rng(seed, index);
    let mut key = key0.clone();
    let tube = match event {
        Event::Tube(q) => Some(tube_filter(q, n)),
        _ => None,
    };
    if tube.as_ref().is_some_and(|f| !f(0, &key.counts)) {
        return Ok(false);
    }
    for j in 0..n {
        let (p, beta) = params::<f64>(schedule, n, j)?;
        let ms = moves(&key, totals.0 + j as u64, totals.1 + j as u64, &p, &beta, j)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = ms.len() - 1;
        for (k, m) in ms.iter().enumerate() {
            acc += m.weight;
            if u < acc {
                pick = k;
                break;
            }
        }
        key = child(&key, &ms[pick]);
        match event {
            Event::Star if key.tag != Some(j as u64 + 1) => return Ok(false),
            Event::StraightRoad if ms[pick].index != 0 => return Ok(false),
            Event::Tube(_) if !tube.as_ref().unwrap()(j + 1, &key.counts) => return Ok(false),
            _ => {}
        }
    }
    Ok(match event {
        Event::StraightRoad => Some(key.counts.as_slice()) == target,
        Event::Terminal(pred) => pred(&TerminalView { n, counts: &key.counts, tag: key.tag }),
        _ => true,
    })
}

fn mc_point(
    event: &Event,
    n: usize,
    d: usize,
    schedule: &Schedule,
    sizes: &[u64],
    samples: usize,
    seed: u64,
) -> Result<RatePoint> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let tag = match event {
        Event::Star => star_tag(sizes)?,
        _ => None,
    };
    let target = match event {
        Event::StraightRoad => Some(road_target(sizes, d, n)?),
        _ => None,
    };
    let (key0, urns, balls) = initial_key(sizes, d, tag)?;
    let hits = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            sample_hit(event, n, schedule, &key0, (urns, balls), target.as_deref(), seed, r)
                .map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let m = samples as f64;
    let nf = n as f64;
    let rate = |p: f64| if p > 0.0 { -p.ln() / nf } else { f64::INFINITY };
    if hits == 0 {
        // rule of three: P < 3/m at 95%
        let bound = rate(3.0 / m);
        return Ok(RatePoint {
            n,
            probability: 0.0,
            value: bound,
            lower: bound,
            upper: f64::INFINITY,
            hits: Some(0),
            one_sided: true,
        });
    }
    let p = hits.to_f64().unwrap() / m;
    let se = (p * (1.0 - p) / m).sqrt();
    Ok(RatePoint {
        n,
        probability: p,
        value: rate(p),
        lower: rate((p + 1.96 * se).min(1.0)),
        upper: rate(p - 1.96 * se),
        hits: Some(hits),
        one_sided: false,
    })
}
