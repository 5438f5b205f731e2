use super::InitialProfile;
use crate::error::{Error, Result};

/// Counts `(Z_0, ..., Z_d, Zbar_{d+1})` at step `j` of a scheme of size `n`,
/// with the exact numbers of urns and balls.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedState {
    pub n: usize,
    pub j: usize,
    pub counts: Vec<u64>,
    pub urn_total: u64,
    pub ball_total: u64,
}

impl TruncatedState {
    /// Builds the initial state from urn multiplicities by exact size:
    /// `sizes[i]` urns holding `i` balls.
    pub fn from_sizes(sizes: &[u64], n: usize, d: usize) -> Result<Self> {
        let mut counts = vec![0u64; d + 2];
        let mut balls = 0u64;
        for (i, &m) in sizes.iter().enumerate() {
            counts[i.min(d + 1)] += m;
            balls += i as u64 * m;
        }
        let urns: u64 = sizes.iter().sum();
        if urns == 0 {
            return Err(Error::EmptyConfiguration(
                "the initial configuration must contain at least one urn".into(),
            ));
        }
        Ok(TruncatedState { n, j: 0, counts, urn_total: urns, ball_total: balls })
    }

    pub fn d(&self) -> usize {
        self.counts.len() - 2
    }

    /// Applies increment `f_i`; `i = d + 1` is the overflow increment.
    pub fn apply(&mut self, i: usize) {
        let d = self.d();
        self.counts[0] += 1;
        if i == 0 {
            // ball lands in an empty urn: net one more urn of size one
            self.counts[0] -= 1;
            self.counts[1] += 1;
        } else if i <= d {
            self.counts[i] -= 1;
            self.counts[i + 1] += 1;
        }
        self.j += 1;
        self.urn_total += 1;
        self.ball_total += 1;
    }

    /// `counts / n` as floats.
    pub fn scaled(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&z| z as f64 / n).collect()
    }

    /// Checks the count identities; returns a description of the first failure.
    pub fn check_invariants(&self, initial: &TruncatedState) -> std::result::Result<(), String> {
        let urns: u64 = self.counts.iter().sum();
        if urns != initial.urn_total + self.j as u64 || urns != self.urn_total {
            return Err(format!("urn count {urns} != {} + {}", initial.urn_total, self.j));
        }
        if self.ball_total != initial.ball_total + self.j as u64 {
            return Err("ball total drifted".into());
        }
        let d = self.d() as u64;
        let lower: u64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &z)| (i as u64).min(d + 1) * z)
            .sum();
        if lower > self.ball_total {
            return Err(format!("weighted count {lower} exceeds balls {}", self.ball_total));
        }
        Ok(())
    }
}

/// Discretizes a profile at scale `n` by largest-remainder apportionment.
///
/// The total number of urns is `round(n c)`; each `Z_i(0)` is within one of
/// `n c_i`. A condensed profile receives one extra urn holding the missing
/// weight. `seed` (urn multiplicities by size) replaces the profile entirely.
pub fn realize_initial(
    profile: &InitialProfile,
    n: usize,
    d: usize,
    seed: Option<&[u64]>,
) -> Result<TruncatedState> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if let Some(sizes) = seed {
        return TruncatedState::from_sizes(sizes, n, d);
    }
    let nf = n as f64;
    let targets: Vec<f64> = profile.c().iter().map(|&c| c * nf).collect();
    let mut sizes: Vec<u64> = targets.iter().map(|x| x.floor() as u64).collect();
    let total = (profile.c_total() * nf).round() as u64;
    let assigned: u64 = sizes.iter().sum();
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = targets[a] - targets[a].floor();
        let fb = targets[b] - targets[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned) as usize) {
        sizes[i] += 1;
    }
    if profile.is_condensed() {
        let balls: u64 = sizes.iter().enumerate().map(|(i, &m)| i as u64 * m).sum();
        let want = (profile.c_weighted() * nf).round() as u64;
        if want > balls {
            let giant = (want - balls) as usize;
            if sizes.len() <= giant {
                sizes.resize(giant + 1, 0);
            }
            sizes[giant] += 1;
        }
    }
    if sizes.iter().all(|&m| m == 0) {
        return Err(Error::EmptyConfiguration(format!(
            "profile has no urns at n = {n}; supply a seed configuration"
        )));
    }
    TruncatedState::from_sizes(&sizes, n, d)
}
