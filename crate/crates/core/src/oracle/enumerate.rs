//! Exact law of the truncated count chain by layer-wise state merging.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::mass::{ln_rational, Mass};
use crate::error::{Error, Result};
use crate::model::Schedule;
use crate::simulator::TubeQuery;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Rational,
    Float,
}

/// Limits on exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_n: usize,
    pub max_d: usize,
    /// Largest number of merged states allowed in one layer.
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_n: 14, max_d: 2, max_states: 1_000_000 }
    }
}

impl Budget {
    pub fn check(&self, n: usize, d: usize) -> Result<()> {
        if n > self.max_n || d > self.max_d {
            return Err(Error::BudgetExceeded(format!(
                "n = {n}, d = {d} exceeds n <= {}, d <= {}; use a smaller n or d",
                self.max_n, self.max_d
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOptions {
    pub arithmetic: Arithmetic,
    pub budget: Budget,
    /// Initial size of one designated urn whose exact size is tracked.
    pub tag: Option<u64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { arithmetic: Arithmetic::Rational, budget: Budget::default(), tag: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Rational(BigRational),
    Float(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Rational(r) => Mass::to_f64(r),
            Probability::Float(x) => *x,
        }
    }

    pub fn ln(&self) -> f64 {
        match self {
            Probability::Rational(r) => ln_rational(r),
            Probability::Float(x) => x.ln(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Probability::Rational(r) => Some(r),
            Probability::Float(_) => None,
        }
    }
}

/// Terminal counts and, when tracked, the size of the designated urn.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateKey {
    pub counts: Vec<u64>,
    pub tag: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub key: StateKey,
    pub probability: Probability,
}

/// Exact law of `Z^{n,d}(n)`, atoms sorted by state.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub n: usize,
    pub d: usize,
    pub arithmetic: Arithmetic,
    pub atoms: Vec<Atom>,
}

/// Read-only view of a terminal state handed to events and test functions.
#[derive(Debug, Clone, Copy)]
pub struct TerminalView<'a> {
    pub n: usize,
    pub counts: &'a [u64],
    pub tag: Option<u64>,
}

impl TerminalView<'_> {
    pub fn scaled(&self) -> Vec<f64> {
        self.counts.iter().map(|&z| z as f64 / self.n as f64).collect()
    }
}

impl ExactDistribution {
    /// Total mass; exactly one in rational mode unless paths were filtered.
    pub fn total(&self) -> Probability {
        self.sum_where(|_| true)
    }

    pub fn probability_of(&self, pred: impl Fn(&TerminalView) -> bool) -> Probability {
        self.sum_where(|a| pred(&self.view(&a.key)))
    }

    fn view<'a>(&self, key: &'a StateKey) -> TerminalView<'a> {
        TerminalView { n: self.n, counts: &key.counts, tag: key.tag }
    }

    fn sum_where(&self, keep: impl Fn(&Atom) -> bool) -> Probability {
        match self.arithmetic {
            Arithmetic::Rational => {
                let mut acc = BigRational::zero();
                for a in self.atoms.iter().filter(|a| keep(a)) {
                    acc += a.probability.as_rational().expect("rational atom");
                }
                Probability::Rational(acc)
            }
            Arithmetic::Float => Probability::Float(
                self.atoms
                    .iter()
                    .filter(|a| keep(a))
                    .map(|a| a.probability.to_f64())
                    .collect::<crate::numeric::NeumaierSum>()
                    .value(),
            ),
        }
    }

    /// Law of the counts alone, with the designated urn forgotten.
    pub fn counts_marginal(&self) -> BTreeMap<Vec<u64>, f64> {
        let mut out: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for a in &self.atoms {
            *out.entry(a.key.counts.clone()).or_insert(0.0) += a.probability.to_f64();
        }
        out
    }

    /// `-(1/n) log sum_x P(x) exp(-n h(x))`, evaluated directly from the atoms.
    pub fn laplace(&self, h: impl Fn(&TerminalView) -> f64) -> f64 {
        let n = self.n as f64;
        let terms: Vec<f64> =
            self.atoms.iter().map(|a| a.probability.ln() - n * h(&self.view(&a.key))).collect();
        -log_sum_exp(&terms) / n
    }

    /// Total-variation distance to an empirical histogram of counts.
    pub fn tv_distance(&self, histogram: &BTreeMap<Vec<u64>, u64>) -> f64 {
        let m: u64 = histogram.values().sum();
        let exact = self.counts_marginal();
        let mut keys: Vec<&Vec<u64>> = exact.keys().chain(histogram.keys()).collect();
        keys.sort();
        keys.dedup();
        0.5 * keys
            .into_iter()
            .map(|k| {
                let p = exact.get(k).copied().unwrap_or(0.0);
                let q = histogram.get(k).copied().unwrap_or(0) as f64 / m as f64;
                (p - q).abs()
            })
            .sum::<f64>()
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return m;
    }
    m + terms.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// One-step transition out of a state: increment index, whether the
/// designated urn receives the ball, and the probability.
pub(crate) struct Move<M> {
    pub index: usize,
    pub tagged: bool,
    pub weight: M,
}

/// Kernel entries at one state, with the designated urn split off its class.
///
/// The overflow entry is computed from the balls held above `d` rather than
/// as a complement, so zero entries are exact in both fields.
pub(crate) fn moves<M: Mass>(
    key: &StateKey,
    urns: u64,
    balls: u64,
    p: &M,
    beta: &M,
    step: usize,
) -> Result<Vec<Move<M>>> {
    let d = key.counts.len() - 2;
    let s = M::from_f64(balls as f64)? + beta.clone() * M::from_f64(urns as f64)?;
    if s.is_zero() {
        return Err(Error::ZeroWeight { step });
    }
    let q = (M::one() - p.clone()) / s;
    let mut w = Vec::with_capacity(d + 2);
    w.push(p.clone() + q.clone() * beta.clone() * M::from_f64(key.counts[0] as f64)?);
    for i in 1..=d {
        w.push(
            q.clone() * (M::from_f64(i as f64)? + beta.clone()) * M::from_f64(key.counts[i] as f64)?,
        );
    }
    // overflow weight from the balls held by urns larger than d
    let low: u64 = key.counts[..=d].iter().enumerate().map(|(i, &z)| i as u64 * z).sum();
    let over_balls = M::from_f64((balls - low) as f64)?;
    let over_urns = M::from_f64(key.counts[d + 1] as f64)?;
    w.push(q.clone() * (over_balls + beta.clone() * over_urns));
    let mut out = Vec::with_capacity(d + 3);
    let tag_class = key.tag.map(|a| (a as usize).min(d + 1));
    for (i, wi) in w.into_iter().enumerate() {
        if tag_class == Some(i) {
            let a = key.tag.unwrap();
            let wt = q.clone() * (M::from_f64(a as f64)? + beta.clone());
            let rest = (wi - wt.clone()).clamp_nonneg();
            if !wt.is_zero() {
                out.push(Move { index: i, tagged: true, weight: wt });
            }
            if !rest.is_zero() {
                out.push(Move { index: i, tagged: false, weight: rest });
            }
        } else if !wi.is_zero() {
            out.push(Move { index: i, tagged: false, weight: wi });
        }
    }
    Ok(out)
}

pub(crate) fn child(key: &StateKey, m: &Move<impl Mass>) -> StateKey {
    let d = key.counts.len() - 2;
    let mut counts = key.counts.clone();
    counts[0] += 1;
    if m.index == 0 {
        counts[0] -= 1;
        counts[1] += 1;
    } else if m.index <= d {
        counts[m.index] -= 1;
        counts[m.index + 1] += 1;
    }
    let tag = key.tag.map(|a| if m.tagged { a + 1 } else { a });
    StateKey { counts, tag }
}

/// Initial key and totals from urn multiplicities by exact size.
pub(crate) fn initial_key(sizes: &[u64], d: usize, tag: Option<u64>) -> Result<(StateKey, u64, u64)> {
    let mut counts = vec![0u64; d + 2];
    for (i, &m) in sizes.iter().enumerate() {
        counts[i.min(d + 1)] += m;
    }
    let urns: u64 = sizes.iter().sum();
    let balls: u64 = sizes.iter().enumerate().map(|(i, &m)| i as u64 * m).sum();
    if urns == 0 {
        return Err(Error::EmptyConfiguration(
            "the initial configuration must contain at least one urn".into(),
        ));
    }
    if let Some(a) = tag {
        if sizes.get(a as usize).copied().unwrap_or(0) == 0 {
            return Err(Error::InvalidArgument(format!("no initial urn of size {a} to designate")));
        }
    }
    Ok((StateKey { counts, tag }, urns, balls))
}

/// Schedule values at step `j` converted to the mass field.
pub(crate) fn params<M: Mass>(schedule: &Schedule, n: usize, j: usize) -> Result<(M, M)> {
    let t = j as f64 / n as f64;
    Ok((M::from_f64(schedule.p(t))?, M::from_f64(schedule.beta(t))?))
}

/// Layer predicate on `(j, counts)`; paths failing it are dropped.
pub type PathFilter<'a> = dyn Fn(usize, &[u64]) -> bool + 'a;

pub(crate) fn propagate<M: Mass>(
    n: usize,
    d: usize,
    schedule: &Schedule,
    sizes: &[u64],
    opts: &ExactOptions,
    filter: Option<&PathFilter>,
) -> Result<BTreeMap<StateKey, M>> {
    opts.budget.check(n, d)?;
    let (key0, urns0, balls0) = initial_key(sizes, d, opts.tag)?;
    let mut layer: BTreeMap<StateKey, M> = BTreeMap::new();
    if filter.is_none_or(|f| f(0, &key0.counts)) {
        layer.insert(key0, M::one());
    }
    for j in 0..n {
        let (p, beta) = params::<M>(schedule, n, j)?;
        let (urns, balls) = (urns0 + j as u64, balls0 + j as u64);
        let mut next: BTreeMap<StateKey, M::Acc> = BTreeMap::new();
        for (key, mass) in &layer {
            for m in moves(key, urns, balls, &p, &beta, j)? {
                let c = child(key, &m);
                if filter.is_some_and(|f| !f(j + 1, &c.counts)) {
                    continue;
                }
                let acc = next.entry(c).or_insert_with(M::acc_new);
                M::acc_add(acc, mass.clone() * m.weight);
            }
        }
        if next.len() > opts.budget.max_states {
            return Err(Error::BudgetExceeded(format!(
                "{} states at step {}; use a smaller n or d",
                next.len(),
                j + 1
            )));
        }
        layer = next.iter().map(|(k, a)| (k.clone(), M::acc_value(a))).collect();
    }
    Ok(layer)
}

fn finish_distribution(
    n: usize,
    d: usize,
    schedule: &Schedule,
    sizes: &[u64],
    opts: &ExactOptions,
    filter: Option<&PathFilter>,
) -> Result<ExactDistribution> {
    let atoms = match opts.arithmetic {
        Arithmetic::Rational => propagate::<BigRational>(n, d, schedule, sizes, opts, filter)?
            .into_iter()
            .map(|(key, m)| Atom { key, probability: Probability::Rational(m) })
            .collect(),
        Arithmetic::Float => propagate::<f64>(n, d, schedule, sizes, opts, filter)?
            .into_iter()
            .map(|(key, m)| Atom { key, probability: Probability::Float(m) })
            .collect(),
    };
    Ok(ExactDistribution { n, d, arithmetic: opts.arithmetic, atoms })
}

/// Exact terminal law after `n` steps from urns with multiplicities `sizes`
/// (`sizes[i]` urns of size `i`), truncated at `d`.
pub fn enumerate_exact(
    n: usize,
    d: usize,
    schedule: &Schedule,
    sizes: &[u64],
    opts: &ExactOptions,
) -> Result<ExactDistribution> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    finish_distribution(n, d, schedule, sizes, opts, None)
}

/// Exact sub-law of paths satisfying `filter` at every lattice time.
pub fn enumerate_exact_filtered(
    n: usize,
    d: usize,
    schedule: &Schedule,
    sizes: &[u64],
    opts: &ExactOptions,
    filter: &PathFilter,
) -> Result<ExactDistribution> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    finish_distribution(n, d, schedule, sizes, opts, Some(filter))
}

/// Membership in a tube at lattice time `j`, matching the simulator's test.
pub fn tube_filter(query: &TubeQuery, n: usize) -> impl Fn(usize, &[u64]) -> bool + '_ {
    move |j, counts| {
        let t = j as f64 / n as f64;
        let c = query.center.eval(t);
        let dist: f64 =
            counts.iter().zip(&c).map(|(&z, c)| (z as f64 / n as f64 - c).abs()).sum();
        dist < query.radius
    }
}

/// Exact probability that the whole trajectory stays in the tube.
pub fn tube_probability_exact(
    query: &TubeQuery,
    n: usize,
    schedule: &Schedule,
    sizes: &[u64],
    opts: &ExactOptions,
) -> Result<Probability> {
    let d = query.center.d();
    let f = tube_filter(query, n);
    Ok(enumerate_exact_filtered(n, d, schedule, sizes, opts, &f)?.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::mass::{factorial_inv, pow2_inv};
    use num_bigint::BigInt;

    fn hom() -> Schedule {
        Schedule::homogeneous(0.0, 1.0).unwrap()
    }

    fn rat(a: i64, b: i64) -> Probability {
        Probability::Rational(BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    #[test]
    fn two_steps_by_hand() {
        let dist = enumerate_exact(2, 1, &hom(), &[2], &ExactOptions::default()).unwrap();
        assert_eq!(dist.atoms.len(), 2);
        assert_eq!(dist.atoms[0].key.counts, vec![2, 2, 0]);
        assert_eq!(dist.atoms[0].probability, rat(1, 2));
        assert_eq!(dist.atoms[1].key.counts, vec![3, 0, 1]);
        assert_eq!(dist.atoms[1].probability, rat(1, 2));
        assert_eq!(dist.total(), rat(1, 1));
    }

    #[test]
    fn star_is_two_to_minus_n() {
        let opts = ExactOptions { tag: Some(0), ..Default::default() };
        for n in 2..=10 {
            let dist = enumerate_exact(n, 2, &hom(), &[2], &opts).unwrap();
            let p = dist.probability_of(|v| v.tag == Some(n as u64));
            assert_eq!(p, Probability::Rational(pow2_inv(n as u32)));
        }
    }

    #[test]
    fn straight_road_is_inverse_factorial() {
        for n in 2..=8 {
            let dist = enumerate_exact(n, 2, &hom(), &[2], &ExactOptions::default()).unwrap();
            let p = dist.probability_of(|v| v.counts == [2, n as u64, 0, 0]);
            assert_eq!(p, Probability::Rational(factorial_inv(n as u32)));
        }
    }

    #[test]
    fn float_mode_matches_rational() {
        let sched = Schedule::figure_one();
        let r = enumerate_exact(8, 2, &sched, &[1, 1], &ExactOptions::default()).unwrap();
        let f = enumerate_exact(
            8,
            2,
            &sched,
            &[1, 1],
            &ExactOptions { arithmetic: Arithmetic::Float, ..Default::default() },
        )
        .unwrap();
        assert_eq!(r.atoms.len(), f.atoms.len());
        for (a, b) in r.atoms.iter().zip(&f.atoms) {
            assert_eq!(a.key, b.key);
            assert!((a.probability.to_f64() - b.probability.to_f64()).abs() < 1e-15);
        }
        assert!((f.total().to_f64() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn budget_is_enforced() {
        let e = enumerate_exact(15, 2, &hom(), &[2], &ExactOptions::default());
        assert!(matches!(e, Err(Error::BudgetExceeded(_))));
        let e = enumerate_exact(4, 3, &hom(), &[2], &ExactOptions::default());
        assert!(matches!(e, Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn missing_designated_urn() {
        let opts = ExactOptions { tag: Some(3), ..Default::default() };
        assert!(enumerate_exact(3, 2, &hom(), &[2], &opts).is_err());
    }

    /// Urn-level enumeration: every urn tracked individually, no merging.
    fn brute_force(n: usize, d: usize, p: f64, beta: f64, urns: Vec<u64>) -> BTreeMap<Vec<u64>, f64> {
        fn rec(
            j: usize,
            n: usize,
            d: usize,
            p: f64,
            beta: f64,
            urns: &mut Vec<u64>,
            prob: f64,
            out: &mut BTreeMap<Vec<u64>, f64>,
        ) {
            if j == n {
                let mut c = vec![0u64; d + 2];
                for &b in urns.iter() {
                    c[(b as usize).min(d + 1)] += 1;
                }
                *out.entry(c).or_insert(0.0) += prob;
                return;
            }
            let total: f64 = urns.iter().map(|&b| b as f64 + beta).sum();
            let k = urns.len();
            if p > 0.0 {
                urns.push(1);
                rec(j + 1, n, d, p, beta, urns, prob * p, out);
                urns.pop();
            }
            for x in 0..k {
                let w = (1.0 - p) * (urns[x] as f64 + beta) / total;
                urns[x] += 1;
                urns.push(0);
                rec(j + 1, n, d, p, beta, urns, prob * w, out);
                urns.pop();
                urns[x] -= 1;
            }
        }
        let mut out = BTreeMap::new();
        let mut u = urns;
        rec(0, n, d, p, beta, &mut u, 1.0, &mut out);
        out
    }

    #[test]
    fn merged_equals_brute_force() {
        for &(p, beta) in &[(0.0, 1.0), (0.3, 0.5), (0.7, 2.5)] {
            let sched = Schedule::homogeneous(p, beta).unwrap();
            for n in 1..=6 {
                for d in 0..=2 {
                    let bf = brute_force(n, d, p, beta, vec![0, 1, 3]);
                    let ex = enumerate_exact(n, d, &sched, &[1, 1, 0, 1], &ExactOptions::default())
                        .unwrap()
                        .counts_marginal();
                    assert_eq!(bf.len(), ex.len(), "n={n} d={d}");
                    for (k, v) in &bf {
                        assert!((ex[k] - v).abs() < 1e-12, "n={n} d={d} {k:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn filtered_mass_is_subprobability() {
        let center = crate::model::Path::affine(&[0.2, 0.0, 0.0], &[0.5, 0.3, 0.2], vec![0.0, 1.0])
            .unwrap();
        let q = TubeQuery::new(center, 0.6).unwrap();
        let opts = ExactOptions { arithmetic: Arithmetic::Float, ..Default::default() };
        let p = tube_probability_exact(&q, 10, &hom(), &[2], &opts).unwrap().to_f64();
        assert!(p > 0.0 && p < 1.0);
        let wide = TubeQuery::new(q.center.clone(), 100.0).unwrap();
        let p = tube_probability_exact(&wide, 10, &hom(), &[2], &opts).unwrap().to_f64();
        assert!((p - 1.0).abs() < 1e-14);
    }
}
