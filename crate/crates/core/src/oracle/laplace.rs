//! Backward dynamic programming for `W^n = -(1/n) log E exp(-n h(X^n(1)))`.

use std::collections::{BTreeMap, BTreeSet};

use super::enumerate::{child, initial_key, log_sum_exp, moves, params, Budget, StateKey, TerminalView};
use crate::error::{Error, Result};
use crate::model::Schedule;

/// `W^n` by backward recursion over merged states.
///
/// `h` sees the terminal counts (and the designated urn's size when `tag` is
/// set). Log-space throughout, so `h` may be large.
pub fn laplace_functional(
    n: usize,
    d: usize,
    schedule: &Schedule,
    sizes: &[u64],
    tag: Option<u64>,
    budget: &Budget,
    h: impl Fn(&TerminalView) -> f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    budget.check(n, d)?;
    let (key0, urns0, balls0) = initial_key(sizes, d, tag)?;

    // forward reachability
    let mut layers: Vec<BTreeSet<StateKey>> = vec![BTreeSet::from([key0])];
    for j in 0..n {
        let (p, beta) = params::<f64>(schedule, n, j)?;
        let (urns, balls) = (urns0 + j as u64, balls0 + j as u64);
        let mut next = BTreeSet::new();
        for key in &layers[j] {
            for m in moves(key, urns, balls, &p, &beta, j)? {
                next.insert(child(key, &m));
            }
        }
        if next.len() > budget.max_states {
            return Err(Error::BudgetExceeded(format!(
                "{} states at step {}; use a smaller n or d",
                next.len(),
                j + 1
            )));
        }
        layers.push(next);
    }

    let nf = n as f64;
    let mut g: BTreeMap<StateKey, f64> = layers[n]
        .iter()
        .map(|k| {
            let v = TerminalView { n, counts: &k.counts, tag: k.tag };
            (k.clone(), -nf * h(&v))
        })
        .collect();
    let mut terms = Vec::new();
    for j in (0..n).rev() {
        let (p, beta) = params::<f64>(schedule, n, j)?;
        let (urns, balls) = (urns0 + j as u64, balls0 + j as u64);
        let mut prev = BTreeMap::new();
        for key in &layers[j] {
            terms.clear();
            for m in moves(key, urns, balls, &p, &beta, j)? {
                terms.push(m.weight.ln() + g[&child(key, &m)]);
            }
            prev.insert(key.clone(), log_sum_exp(&terms));
        }
        g = prev;
    }
    let g0 = g.into_values().next().expect("initial layer is a single state");
    Ok(-g0 / nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate::{enumerate_exact, Arithmetic, ExactOptions};

    fn hom() -> Schedule {
        Schedule::homogeneous(0.0, 1.0).unwrap()
    }

    #[test]
    fn single_step_is_deterministic() {
        let h = |v: &TerminalView| v.scaled().iter().sum::<f64>() * 0.7;
        let w = laplace_functional(1, 1, &hom(), &[2], None, &Budget::default(), h).unwrap();
        // the only outcome is (2, 1, 0)
        assert!((w - 3.0 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_function_gives_zero() {
        let w = laplace_functional(12, 2, &Schedule::figure_one(), &[2], None, &Budget::default(), |_| 0.0)
            .unwrap();
        assert!(w.abs() < 1e-14);
    }

    #[test]
    fn matches_direct_sum() {
        let sched = Schedule::figure_one();
        let opts = ExactOptions { arithmetic: Arithmetic::Float, tag: Some(1), ..Default::default() };
        let h = |v: &TerminalView| {
            let x = v.scaled();
            (x[0] - 0.4).powi(2) + 3.0 * x[2] + v.tag.unwrap() as f64 / v.n as f64
        };
        for n in [3, 7, 12] {
            let dist = enumerate_exact(n, 2, &sched, &[1, 1], &opts).unwrap();
            let direct = dist.laplace(h);
            let dp = laplace_functional(n, 2, &sched, &[1, 1], Some(1), &Budget::default(), h).unwrap();
            assert!((direct - dp).abs() < 1e-12, "n={n}: {direct} vs {dp}");
        }
    }

    #[test]
    fn star_penalty_gives_log_two() {
        // h = 0 on the star event and very large elsewhere
        let h = |v: &TerminalView| if v.tag == Some(v.n as u64) { 0.0 } else { 1e6 };
        for n in 8..=14 {
            let w = laplace_functional(n, 2, &hom(), &[2], Some(0), &Budget::default(), h).unwrap();
            assert!((w - 2f64.ln()).abs() < 1e-12, "n={n}: {w}");
        }
    }
}
