use super::InitialProfile;
use crate::error::{Error, Result};

/// Increment vector `f_i` in `R^{d+2}`.
///
/// `f_0` puts the ball into an empty urn (net: one more urn of size one).
/// `f_i`, `1 <= i <= d`, moves an urn from size `i` to `i+1` and adds an empty
/// urn. `f_{d+1}` feeds an urn already above `d`, so only the new empty urn
/// shows.
pub fn increment(d: usize, i: usize) -> Vec<f64> {
    assert!(i <= d + 1, "increment index {i} out of range for d = {d}");
    let mut f = vec![0.0; d + 2];
    if i == 0 {
        f[1] = 1.0;
    } else {
        f[0] = 1.0;
        if i <= d {
            f[i] -= 1.0;
            f[i + 1] += 1.0;
        }
    }
    f
}

/// All `d + 2` increment vectors.
pub fn increments(d: usize) -> Vec<Vec<f64>> {
    (0..=d + 1).map(|i| increment(d, i)).collect()
}

/// Piecewise-linear trajectory in `R^{d+2}` through the given knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    d: usize,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

const SPAN_TOL: f64 = 1e-12;

impl Path {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::MalformedPath("need at least two knots".into()));
        }
        if times.len() != values.len() {
            return Err(Error::MalformedPath("times and values differ in length".into()));
        }
        let dim = values[0].len();
        if dim < 2 {
            return Err(Error::MalformedPath("knot vectors need at least two components".into()));
        }
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::MalformedPath("knot vectors differ in length".into()));
        }
        if values.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::MalformedPath("non-finite knot value".into()));
        }
        if let Some(k) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::MalformedPath(format!(
                "knot times not strictly increasing at index {}",
                k + 1
            )));
        }
        if times[0].abs() > SPAN_TOL || (times[times.len() - 1] - 1.0).abs() > SPAN_TOL {
            return Err(Error::MalformedPath("knots must span [0, 1]".into()));
        }
        Ok(Path { d: dim - 2, times, values })
    }

    /// `phi(t) = base + t * slope`, sampled at `times`.
    pub fn affine(base: &[f64], slope: &[f64], times: Vec<f64>) -> Result<Self> {
        let values = times
            .iter()
            .map(|&t| base.iter().zip(slope).map(|(b, s)| b + t * s).collect())
            .collect();
        Self::new(times, values)
    }

    /// The linear path `c^d + t gamma^d` where `gamma^d` keeps the first `d+1`
    /// entries of `gamma` and pools the rest.
    pub fn linear(profile: &InitialProfile, gamma: &[f64], d: usize) -> Result<Self> {
        let base = profile.truncated(d);
        let mut slope: Vec<f64> = (0..=d).map(|i| gamma.get(i).copied().unwrap_or(0.0)).collect();
        slope.push(gamma.iter().skip(d + 1).sum());
        Self::affine(&base, &slope, vec![0.0, 1.0])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn num_segments(&self) -> usize {
        self.times.len() - 1
    }

    /// Index `k` of the linear piece `[t_k, t_{k+1}]` containing `t`.
    pub fn segment_of(&self, t: f64) -> usize {
        let last = self.num_segments() - 1;
        match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            k => (k - 1).min(last),
        }
    }

    /// Constant derivative on piece `k`.
    pub fn slope(&self, k: usize) -> Vec<f64> {
        let h = self.times[k + 1] - self.times[k];
        self.values[k + 1]
            .iter()
            .zip(&self.values[k])
            .map(|(b, a)| (b - a) / h)
            .collect()
    }

    /// Value on piece `k` at time `t` (may lie on either endpoint).
    pub fn eval_on(&self, k: usize, t: f64, out: &mut [f64]) {
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        for (o, (a, b)) in out.iter_mut().zip(self.values[k].iter().zip(&self.values[k + 1])) {
            *o = a + w * (b - a);
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.d + 2];
        self.eval_on(self.segment_of(t), t, &mut out);
        out
    }

    /// Projection to truncation level `r <= d`: components above `r` are summed
    /// into the last slot.
    pub fn project(&self, r: usize) -> Path {
        assert!(r <= self.d, "cannot project to a finer level");
        let values = self.values.iter().map(|v| project_vec(v, r)).collect();
        Path { d: r, times: self.times.clone(), values }
    }
}

/// Keeps components `0..=r` and sums the rest into slot `r + 1`.
pub(crate) fn project_vec(v: &[f64], r: usize) -> Vec<f64> {
    let mut out = v[..=r].to_vec();
    out.push(v[r + 1..].iter().sum());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: String,
    pub time: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdmissibilityReport {
    pub is_admissible: bool,
    pub violations: Vec<Violation>,
}

/// Checks membership in the admissible set on every linear piece:
/// initial value equals the truncated profile, components are nonnegative,
/// partial sums of the derivative lie in `[0, 1]`, the derivative sums to one
/// and `sum_{i<=d} (1 - [phi']_i) <= 1`.
pub fn validate_path(path: &Path, profile: &InitialProfile, tol: f64) -> AdmissibilityReport {
    let d = path.d;
    let mut violations = Vec::new();
    let mut flag = |condition: &str, time: f64, magnitude: f64| {
        if magnitude > tol {
            violations.push(Violation { condition: condition.to_string(), time, magnitude });
        }
    };

    let c = profile.truncated(d);
    let init_err = c.iter().zip(&path.values[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    flag("initial value", 0.0, init_err);

    for (t, v) in path.times.iter().zip(&path.values) {
        let neg = v.iter().fold(0.0f64, |m, &x| m.max(-x));
        flag("nonnegativity", *t, neg);
    }

    for k in 0..path.num_segments() {
        let t = path.times[k];
        let s = path.slope(k);
        let mut partial = 0.0;
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        let mut escape = 0.0;
        for &x in &s[..=d] {
            partial += x;
            lo = lo.max(-partial);
            hi = hi.max(partial - 1.0);
            escape += 1.0 - partial;
        }
        flag("partial derivative sum below 0", t, lo);
        flag("partial derivative sum above 1", t, hi);
        let total: f64 = s.iter().sum();
        flag("unit speed", t, (total - 1.0).abs());
        flag("escape budget", t, escape - 1.0);
    }

    AdmissibilityReport { is_admissible: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increment_table() {
        assert_eq!(increments(0), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(increment(2, 0), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(increment(2, 1), vec![1.0, -1.0, 1.0, 0.0]);
        assert_eq!(increment(2, 2), vec![1.0, 0.0, -1.0, 1.0]);
        assert_eq!(increment(2, 3), vec![1.0, 0.0, 0.0, 0.0]);
        for f in increments(4) {
            assert_eq!(f.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn star_path_admissible() {
        let p = Path::linear(&InitialProfile::zero(), &[1.0], 3).unwrap();
        let r = validate_path(&p, &InitialProfile::zero(), 1e-9);
        assert!(r.is_admissible, "{:?}", r.violations);
    }

    #[test]
    fn over_speed_flagged() {
        let p = Path::affine(&[0.0, 0.0, 0.0], &[2.0, -1.0, 0.0], vec![0.0, 0.5, 1.0]).unwrap();
        let r = validate_path(&p, &InitialProfile::zero(), 1e-9);
        assert!(!r.is_admissible);
        assert!(r.violations.iter().any(|v| v.condition == "partial derivative sum above 1"));
    }

    #[test]
    fn malformed_paths_rejected() {
        assert!(Path::new(vec![0.0], vec![vec![0.0, 0.0]]).is_err());
        assert!(Path::new(vec![0.0, 0.6, 0.5, 1.0], vec![vec![0.0, 0.0]; 4]).is_err());
        assert!(Path::new(vec![0.0, 0.5], vec![vec![0.0, 0.0]; 2]).is_err());
    }

    #[test]
    fn projection_pools_tail() {
        let p = Path::affine(&[0.0; 5], &[0.5, 0.25, 0.125, 0.125, 0.0], vec![0.0, 1.0]).unwrap();
        let q = p.project(1);
        assert_eq!(q.values()[1], vec![0.5, 0.25, 0.25]);
    }

    #[test]
    fn eval_interpolates() {
        let p = Path::affine(&[1.0, 0.0], &[0.0, 1.0], vec![0.0, 0.25, 1.0]).unwrap();
        assert_eq!(p.eval(0.5), vec![1.0, 0.5]);
        assert_eq!(p.segment_of(1.0), 1);
        assert_eq!(p.segment_of(0.25), 1);
    }
}
