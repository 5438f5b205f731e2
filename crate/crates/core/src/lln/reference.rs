//! Reference size laws `q(k)`, `k >= 1`, used as deviation targets.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceKind {
    Geometric,
    Stretched { r: f64, mu: f64 },
    PowerLaw,
    Custom,
}

/// `values[k - 1] = q(k)` up to a truncation `K`; `tail` is the mass beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLaw {
    pub kind: ReferenceKind,
    pub values: Vec<f64>,
    pub tail: f64,
}

impl ReferenceLaw {
    /// `q(k) = 2^{-k}`.
    pub fn geometric(k_max: usize) -> Self {
        let values = (1..=k_max).map(|k| 0.5f64.powi(k as i32)).collect();
        ReferenceLaw { kind: ReferenceKind::Geometric, values, tail: 0.5f64.powi(k_max as i32) }
    }

    /// Degree law of the classical scheme, `q(k) = 4 / (k (k+1) (k+2))`.
    pub fn classical_power_law(k_max: usize) -> Self {
        let values = (1..=k_max)
            .map(|k| {
                let k = k as f64;
                4.0 / (k * (k + 1.0) * (k + 2.0))
            })
            .collect();
        let kf = k_max as f64;
        ReferenceLaw {
            kind: ReferenceKind::PowerLaw,
            values,
            tail: 2.0 / ((kf + 1.0) * (kf + 2.0)),
        }
    }

    pub fn custom(values: Vec<f64>, tol: f64) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDistribution("entries must be finite and nonnegative".into()));
        }
        let s: f64 = values.iter().sum();
        if (s - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!("mass {s} differs from 1")));
        }
        Ok(ReferenceLaw { kind: ReferenceKind::Custom, values, tail: 0.0 })
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `gamma_i = q(i + 1)`, the urn-size law of the matching linear path.
    pub fn shifted(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// `sum_i i gamma_i` over the stored support.
    pub fn shifted_mean_partial(&self) -> f64 {
        self.values.iter().enumerate().map(|(i, g)| i as f64 * g).sum()
    }
}

/// `sum_k prod_{j<=k} (1 + mu / j^r)^{-1}` compared with 1, stopping as soon as
/// the comparison is decided.
fn compare_with_one(mu: f64, r: f64) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    let mut prod = 1.0;
    let mut sum = 0.0;
    let mut k = 0u64;
    loop {
        k += 1;
        let kr = (k as f64).powf(r);
        prod /= 1.0 + mu / kr;
        sum += prod;
        if sum > 1.0 {
            return Greater;
        }
        // successive ratios only grow, so this overshoots the remaining mass
        let tail = prod * (1.0 + 2.0 * kr / mu);
        if sum + tail < 1.0 {
            return Less;
        }
        if prod < 1e-18 * sum || k > 200_000_000 {
            return if sum < 1.0 { Less } else { Equal };
        }
    }
}

/// Stretched-exponential degree law of sublinear selection `w(k) = k^r`.
///
/// `mu` solves `1 = sum_k prod_{j<=k} (1 + mu / j^r)^{-1}` by bisection and
/// `q(k) = (mu / k^r) prod_{j<=k} (1 + mu / j^r)^{-1}`, truncated once the
/// remaining mass is below `tol / 10`.
pub fn stretched_exponential(r: f64, tol: f64) -> Result<ReferenceLaw> {
    use std::cmp::Ordering::*;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument("stretched exponent r must lie in (0, 1)".into()));
    }
    // the map is decreasing in mu and exceeds 1 at mu = 1 for r > 0
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut widen = 0;
    while compare_with_one(hi, r) == Greater {
        lo = hi;
        hi *= 2.0;
        widen += 1;
        if widen > 60 {
            return Err(Error::Bracket(format!("no root below {hi} for r = {r}")));
        }
    }
    if compare_with_one(lo, r) == Less {
        return Err(Error::Bracket(format!("map already below 1 at mu = {lo} for r = {r}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match compare_with_one(mid, r) {
            Greater => lo = mid,
            Less => hi = mid,
            Equal => {
                lo = mid;
                hi = mid;
                break;
            }
        }
    }
    let mu = 0.5 * (lo + hi);

    let cut = 0.1 * tol;
    let mut values = Vec::new();
    let mut prod = 1.0;
    let mut k = 0u64;
    while prod >= cut {
        k += 1;
        let kr = (k as f64).powf(r);
        prod /= 1.0 + mu / kr;
        values.push(mu / kr * prod);
        if k > 200_000_000 {
            return Err(Error::Bracket("truncation did not terminate".into()));
        }
    }
    Ok(ReferenceLaw { kind: ReferenceKind::Stretched { r, mu }, values, tail: prod })
}

impl ReferenceLaw {
    /// `sum_i i gamma_i` including an estimate of the truncated tail.
    ///
    /// For the stretched law, with `P_K` the remaining mass,
    /// `sum_{k>K} (k-1) q(k) = K P_K + sum_{k>K} P_k`; the last sum is
    /// approximated by `P_K K^r / mu`.
    pub fn shifted_mean_extrapolated(&self) -> f64 {
        let partial = self.shifted_mean_partial();
        let kk = self.values.len() as f64;
        match self.kind {
            ReferenceKind::Stretched { r, mu } => {
                partial + kk * self.tail + self.tail * kk.powf(r) / mu
            }
            ReferenceKind::Geometric => {
                // sum_{k>K} (k - 1) 2^{-k} = K 2^{-K}
                partial + kk * self.tail
            }
            ReferenceKind::PowerLaw => {
                // sum_{k>K} (k - 1) 4 / (k (k+1) (k+2)) by partial fractions
                partial + (4.0 * kk + 2.0) / ((kk + 1.0) * (kk + 2.0))
            }
            ReferenceKind::Custom => partial,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stretched_normalizes() {
        for &r in &[0.3, 0.5, 0.7] {
            let law = stretched_exponential(r, 1e-12).unwrap();
            assert!((law.mass() - 1.0).abs() < 1e-12, "r={r}: {}", law.mass());
            assert!((law.shifted_mean_extrapolated() - 1.0).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn stretched_tail_slope() {
        let r = 0.5;
        let law = stretched_exponential(r, 1e-14).unwrap();
        let ReferenceKind::Stretched { mu, .. } = law.kind else { unreachable!() };
        // log q(k) + (mu/(1-r)) k^{1-r} grows only logarithmically
        let f = |k: usize| law.values[k - 1].ln() + mu / (1.0 - r) * (k as f64).powf(1.0 - r);
        let slope = (f(200) - f(50)) / (200f64.ln() - 50f64.ln());
        assert!(slope.abs() < 2.0, "slope {slope}");
    }

    #[test]
    fn geometric_law() {
        let g = ReferenceLaw::geometric(60);
        assert!((g.mass() - 1.0).abs() < 1e-15);
        assert!((g.shifted_mean_extrapolated() - 1.0).abs() < 1e-15);
        let p = ReferenceLaw::classical_power_law(500);
        assert!((p.mass() + p.tail - 1.0).abs() < 1e-14);
        assert!((p.shifted_mean_extrapolated() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(stretched_exponential(1.0, 1e-10).is_err());
        assert!(stretched_exponential(0.0, 1e-10).is_err());
    }
}
