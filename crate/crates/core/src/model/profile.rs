use crate::error::{Error, Result};

/// Limiting initial size distribution: `c_i` urns of size `i` per unit of
/// scale, total mass `c` and total weight `c_weighted`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialProfile {
    c: Vec<f64>,
    c_total: f64,
    c_weighted: f64,
    condensed: bool,
}

const WEIGHT_TOL: f64 = 1e-12;

impl InitialProfile {
    /// `c_weighted` defaults to `sum i c_i`. A larger value marks the profile
    /// as condensed.
    pub fn new(c: Vec<f64>, c_weighted: Option<f64>) -> Result<Self> {
        if let Some((i, v)) = c.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidProfile(format!("c_{i} = {v} is not a finite nonnegative number")));
        }
        let c_total: f64 = c.iter().sum();
        let first_moment: f64 = c.iter().enumerate().map(|(i, v)| i as f64 * v).sum();
        let c_weighted = c_weighted.unwrap_or(first_moment);
        if !c_weighted.is_finite() {
            return Err(Error::InvalidProfile("c_weighted is not finite".into()));
        }
        if c_weighted < first_moment - WEIGHT_TOL * (1.0 + first_moment) {
            return Err(Error::InvalidProfile(format!(
                "c_weighted = {c_weighted} is below sum i c_i = {first_moment}"
            )));
        }
        let condensed = c_weighted > first_moment + WEIGHT_TOL * (1.0 + first_moment);
        Ok(InitialProfile { c, c_total, c_weighted, condensed })
    }

    /// The small configuration `c = 0`.
    pub fn zero() -> Self {
        InitialProfile { c: Vec::new(), c_total: 0.0, c_weighted: 0.0, condensed: false }
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// `c_i`, zero beyond the stored support.
    #[inline]
    pub fn c_i(&self, i: usize) -> f64 {
        self.c.get(i).copied().unwrap_or(0.0)
    }

    pub fn c_total(&self) -> f64 {
        self.c_total
    }

    pub fn c_weighted(&self) -> f64 {
        self.c_weighted
    }

    pub fn is_condensed(&self) -> bool {
        self.condensed
    }

    /// `sigma(0) = 0` exactly.
    pub fn is_small(&self) -> bool {
        self.c_total == 0.0 && self.c_weighted == 0.0
    }

    /// `sum i c_i`.
    pub fn first_moment(&self) -> f64 {
        self.c.iter().enumerate().map(|(i, v)| i as f64 * v).sum()
    }

    /// `(c_0, ..., c_d, sum_{i > d} c_i)`.
    pub fn truncated(&self, d: usize) -> Vec<f64> {
        let mut out: Vec<f64> = (0..=d).map(|i| self.c_i(i)).collect();
        out.push(self.c.iter().skip(d + 1).sum());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_truncation() {
        let p = InitialProfile::new(vec![0.5, 0.25, 0.125, 0.125], None).unwrap();
        assert_eq!(p.c_total(), 1.0);
        assert_eq!(p.c_weighted(), 0.25 + 0.25 + 0.375);
        assert!(!p.is_condensed());
        assert_eq!(p.truncated(1), vec![0.5, 0.25, 0.25]);
        assert_eq!(p.truncated(5), vec![0.5, 0.25, 0.125, 0.125, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn condensed_flag() {
        let p = InitialProfile::new(vec![1.0], Some(0.5)).unwrap();
        assert!(p.is_condensed());
        assert!(!p.is_small());
        assert!(InitialProfile::new(vec![0.0, 1.0], Some(0.5)).is_err());
        assert!(InitialProfile::new(vec![-0.1], None).is_err());
        assert!(InitialProfile::zero().is_small());
    }
}
