//! Exact simulation of the truncated count chain.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Path, Schedule, TruncatedState};

/// One-step law over the increments `f_0, ..., f_{d+1}` at step `j`.
///
/// The last entry is the complement of the others, clamped at zero.
pub fn step_probabilities(
    state: &TruncatedState,
    schedule: &Schedule,
    n: usize,
    j: usize,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; state.counts.len()];
    fill_step_probabilities(state, schedule, n, j, &mut out)?;
    Ok(out)
}

pub(crate) fn fill_step_probabilities(
    state: &TruncatedState,
    schedule: &Schedule,
    n: usize,
    j: usize,
    out: &mut [f64],
) -> Result<()> {
    let t = j as f64 / n as f64;
    let (p, beta) = (schedule.p(t), schedule.beta(t));
    let s = state.ball_total as f64 + beta * state.urn_total as f64;
    if !(s > 0.0) {
        return Err(Error::ZeroWeight { step: j });
    }
    let d = state.counts.len() - 2;
    let q = (1.0 - p) / s;
    out[0] = p + q * beta * state.counts[0] as f64;
    let mut acc = out[0];
    for i in 1..=d {
        out[i] = q * (i as f64 + beta) * state.counts[i] as f64;
        acc += out[i];
    }
    out[d + 1] = (1.0 - acc).max(0.0);
    Ok(())
}

/// Picks an increment by the inverse cumulative distribution, complement last.
#[inline]
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let last = probs.len() - 1;
    let mut acc = 0.0;
    for (i, &p) in probs[..last].iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    last
}

/// RNG for run `index` of an ensemble seeded with `seed`.
pub fn run_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct SimRun {
    pub seed: u64,
    pub trajectory: Vec<TruncatedState>,
    pub interpolated: Path,
}

/// Simulates `n` steps from `initial`, truncated at `initial.d()`.
pub fn run(n: usize, schedule: &Schedule, initial: &TruncatedState, seed: u64) -> Result<SimRun> {
    run_indexed(n, schedule, initial, seed, 0)
}

pub fn run_indexed(
    n: usize,
    schedule: &Schedule,
    initial: &TruncatedState,
    seed: u64,
    index: u64,
) -> Result<SimRun> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut rng = run_rng(seed, index);
    let mut state = initial.clone();
    state.n = n;
    state.j = 0;
    let mut probs = vec![0.0; state.counts.len()];
    let mut trajectory = Vec::with_capacity(n + 1);
    trajectory.push(state.clone());
    for j in 0..n {
        fill_step_probabilities(&state, schedule, n, j, &mut probs)?;
        state.apply(sample_index(&probs, rng.random::<f64>()));
        trajectory.push(state.clone());
    }
    let times = (0..=n).map(|j| j as f64 / n as f64).collect();
    let values = trajectory.iter().map(|s| s.scaled()).collect();
    let interpolated = Path::new(times, values)?;
    Ok(SimRun { seed, trajectory, interpolated })
}

/// Terminal state only; avoids storing the trajectory.
pub fn run_terminal(
    n: usize,
    schedule: &Schedule,
    initial: &TruncatedState,
    seed: u64,
    index: u64,
) -> Result<TruncatedState> {
    let mut rng = run_rng(seed, index);
    let mut state = initial.clone();
    state.n = n;
    state.j = 0;
    let mut probs = vec![0.0; state.counts.len()];
    for j in 0..n {
        fill_step_probabilities(&state, schedule, n, j, &mut probs)?;
        state.apply(sample_index(&probs, rng.random::<f64>()));
    }
    Ok(state)
}

/// Histogram of terminal counts over `samples` independent runs.
pub fn terminal_histogram(
    n: usize,
    schedule: &Schedule,
    initial: &TruncatedState,
    samples: usize,
    seed: u64,
) -> Result<BTreeMap<Vec<u64>, u64>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|r| run_terminal(n, schedule, initial, seed, r).map(|s| s.counts))
        .try_fold(BTreeMap::new, |mut acc, counts| {
            *acc.entry(counts?).or_insert(0u64) += 1;
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

/// Open tube of radius `radius` around `center` in the sup-over-time L1 norm.
#[derive(Debug, Clone)]
pub struct TubeQuery {
    pub center: Path,
    pub radius: f64,
}

impl TubeQuery {
    pub fn new(center: Path, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("tube radius must be positive".into()));
        }
        Ok(TubeQuery { center, radius })
    }
}

/// Sup over the lattice times `j/n` of the L1 distance between the scaled
/// counts and `center`. For unit-Lipschitz paths this is within `2/n` of the
/// continuous-time sup.
pub fn lattice_distance(trajectory: &[TruncatedState], center: &Path) -> f64 {
    let n = trajectory.len() - 1;
    let mut buf = vec![0.0; center.d() + 2];
    let mut worst = 0.0f64;
    for (j, s) in trajectory.iter().enumerate() {
        let t = j as f64 / n as f64;
        center.eval_on(center.segment_of(t), t, &mut buf);
        let x = s.scaled();
        let dist: f64 = x.iter().zip(&buf).map(|(a, b)| (a - b).abs()).sum();
        worst = worst.max(dist);
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
}

/// Plain Monte Carlo estimate of `P(X^{n,d} stays in the tube)`.
pub fn estimate_tube_probability(
    query: &TubeQuery,
    n: usize,
    schedule: &Schedule,
    initial: &TruncatedState,
    num_samples: usize,
    seed: u64,
) -> Result<TubeEstimate> {
    if num_samples == 0 {
        return Err(Error::InvalidArgument("num_samples must be at least 1".into()));
    }
    if query.center.d() != initial.d() {
        return Err(Error::InvalidArgument("tube center and state differ in truncation".into()));
    }
    let hits = (0..num_samples as u64)
        .into_par_iter()
        .map(|r| {
            tube_hit(query, n, schedule, initial, seed, r).map(|h| h as u64)
        })
        .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
    let m = num_samples as f64;
    let est = hits as f64 / m;
    Ok(TubeEstimate { estimate: est, stderr: (est * (1.0 - est) / m).sqrt(), hits })
}

fn tube_hit(
    query: &TubeQuery,
    n: usize,
    schedule: &Schedule,
    initial: &TruncatedState,
    seed: u64,
    index: u64,
) -> Result<bool> {
    let mut rng = run_rng(seed, index);
    let mut state = initial.clone();
    state.n = n;
    state.j = 0;
    let center = &query.center;
    let mut buf = vec![0.0; center.d() + 2];
    let mut probs = vec![0.0; state.counts.len()];
    let inside = |state: &TruncatedState, buf: &mut [f64]| {
        let t = state.j as f64 / n as f64;
        center.eval_on(center.segment_of(t), t, buf);
        let dist: f64 = state
            .counts
            .iter()
            .zip(buf.iter())
            .map(|(&z, c)| (z as f64 / n as f64 - c).abs())
            .sum();
        dist < query.radius
    };
    if !inside(&state, &mut buf) {
        return Ok(false);
    }
    for j in 0..n {
        fill_step_probabilities(&state, schedule, n, j, &mut probs)?;
        state.apply(sample_index(&probs, rng.random::<f64>()));
        if !inside(&state, &mut buf) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Poly, Segment};

    fn hom() -> Schedule {
        Schedule::homogeneous(0.0, 1.0).unwrap()
    }

    #[test]
    fn kernel_two_empty_urns() {
        let s = TruncatedState::from_sizes(&[2], 4, 0).unwrap();
        assert_eq!(step_probabilities(&s, &hom(), 4, 0).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn kernel_after_one_step() {
        // three urns, sizes 0, 0, 1
        let mut s = TruncatedState::from_sizes(&[2], 4, 1).unwrap();
        s.apply(0);
        assert_eq!(s.counts, vec![2, 1, 0]);
        let pr = step_probabilities(&s, &hom(), 4, 1).unwrap();
        assert_eq!(pr, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn kernel_p_one_boundary() {
        let sched = Schedule::new_unchecked(vec![Segment {
            t_start: 0.0,
            p: Poly::constant(1.0),
            beta: Poly::constant(1.0),
        }])
        .unwrap();
        let s = TruncatedState::from_sizes(&[3, 2, 1], 4, 2).unwrap();
        let pr = step_probabilities(&s, &sched, 4, 0).unwrap();
        assert_eq!(pr, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_step_outcome() {
        let init = TruncatedState::from_sizes(&[2], 1, 0).unwrap();
        for seed in 0..20 {
            let r = run(1, &hom(), &init, seed).unwrap();
            assert_eq!(r.trajectory[1].counts, vec![2, 1]);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let init = TruncatedState::from_sizes(&[2], 50, 3).unwrap();
        let a = run(50, &hom(), &init, 7).unwrap();
        let b = run(50, &hom(), &init, 7).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.interpolated, b.interpolated);
    }

    #[test]
    fn interpolated_knots_are_scaled_counts() {
        let init = TruncatedState::from_sizes(&[2], 30, 2).unwrap();
        let r = run(30, &hom(), &init, 1).unwrap();
        for (j, st) in r.trajectory.iter().enumerate() {
            assert_eq!(r.interpolated.values()[j], st.scaled());
            assert_eq!(r.interpolated.times()[j], j as f64 / 30.0);
        }
    }

    #[test]
    fn full_tube_always_hit() {
        let init = TruncatedState::from_sizes(&[2], 20, 1).unwrap();
        let center = Path::affine(&[0.1, 0.0, 0.0], &[0.5, 0.3, 0.2], vec![0.0, 1.0]).unwrap();
        let q = TubeQuery::new(center, 10.0).unwrap();
        let e = estimate_tube_probability(&q, 20, &hom(), &init, 200, 3).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.hits, 200);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn inverse_cdf_complement_last() {
        let p = [0.25, 0.25, 0.5];
        assert_eq!(sample_index(&p, 0.0), 0);
        assert_eq!(sample_index(&p, 0.3), 1);
        assert_eq!(sample_index(&p, 0.999_999), 2);
    }
}
