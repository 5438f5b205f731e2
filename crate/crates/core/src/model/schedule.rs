use crate::error::{Error, Result};

/// Polynomial in absolute time, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(v: f64) -> Self {
        Poly(vec![v])
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().skip(1).all(|&c| c == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub p: Poly,
    pub beta: Poly,
}

/// Piecewise-polynomial selection parameters `p(t)` and `beta(t)` on `[0, 1]`.
///
/// Evaluation is right-continuous: at a breakpoint the later segment applies.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    segments: Vec<Segment>,
    p_min: f64,
    p_max: f64,
    beta_min: f64,
    beta_max: f64,
}

const CHECK_GRID: usize = 10_000;

impl Schedule {
    /// Validates breakpoints and the bounds `0 <= p <= p_max < 1`,
    /// `0 < beta_min <= beta <= beta_max < inf` on a dense grid plus every
    /// segment endpoint.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let mut s = Self::new_unchecked(segments)?;
        let (mut p_lo, mut p_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut b_lo, mut b_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (k, seg) in s.segments.iter().enumerate() {
            let end = s.segment_end(k);
            let m = ((end - seg.t_start) * CHECK_GRID as f64).ceil().max(1.0) as usize;
            for q in 0..=m {
                let t = seg.t_start + (end - seg.t_start) * q as f64 / m as f64;
                let (p, b) = (seg.p.eval(t), seg.beta.eval(t));
                if !p.is_finite() || p < 0.0 || p >= 1.0 {
                    return Err(Error::InvalidSchedule(format!(
                        "p({t}) = {p} outside [0, 1)"
                    )));
                }
                if !b.is_finite() || b <= 0.0 {
                    return Err(Error::InvalidSchedule(format!(
                        "beta({t}) = {b} not in (0, inf)"
                    )));
                }
                p_lo = p_lo.min(p);
                p_hi = p_hi.max(p);
                b_lo = b_lo.min(b);
                b_hi = b_hi.max(b);
            }
        }
        s.p_min = p_lo;
        s.p_max = p_hi;
        s.beta_min = b_lo;
        s.beta_max = b_hi;
        Ok(s)
    }

    /// Structural checks only; parameter bounds are not enforced. Used to
    /// exercise boundary kernels such as `p = 1`.
    pub(crate) fn new_unchecked(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments".into()));
        }
        if segments[0].t_start != 0.0 {
            return Err(Error::InvalidSchedule(format!(
                "first segment starts at {} instead of 0",
                segments[0].t_start
            )));
        }
        for w in segments.windows(2) {
            if !(w[1].t_start > w[0].t_start) {
                return Err(Error::InvalidSchedule(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
        }
        if let Some(last) = segments.last() {
            if !(last.t_start < 1.0) && segments.len() > 1 {
                return Err(Error::InvalidSchedule(format!(
                    "breakpoint {} not inside [0, 1)",
                    last.t_start
                )));
            }
        }
        for seg in &segments {
            if seg.p.0.is_empty() || seg.beta.0.is_empty() {
                return Err(Error::InvalidSchedule("empty polynomial".into()));
            }
        }
        Ok(Schedule {
            p_min: segments[0].p.eval(0.0),
            p_max: segments[0].p.eval(0.0),
            beta_min: segments[0].beta.eval(0.0),
            beta_max: segments[0].beta.eval(0.0),
            segments,
        })
    }

    pub fn homogeneous(p: f64, beta: f64) -> Result<Self> {
        Self::new(vec![Segment {
            t_start: 0.0,
            p: Poly::constant(p),
            beta: Poly::constant(beta),
        }])
    }

    /// `p = 0`, `beta = 8` before `t = 0.01` and `beta = 1` afterwards.
    pub fn figure_one() -> Self {
        Self::new(vec![
            Segment {
                t_start: 0.0,
                p: Poly::constant(0.0),
                beta: Poly::constant(8.0),
            },
            Segment {
                t_start: 0.01,
                p: Poly::constant(0.0),
                beta: Poly::constant(1.0),
            },
        ])
        .expect("static schedule is valid")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Index of the segment governing `t` (right-continuous).
    #[inline]
    pub fn segment_index(&self, t: f64) -> usize {
        match self
            .segments
            .binary_search_by(|s| s.t_start.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(k) => k,
            Err(0) => 0,
            Err(k) => k - 1,
        }
    }

    pub fn segment_end(&self, k: usize) -> f64 {
        self.segments.get(k + 1).map_or(1.0, |s| s.t_start)
    }

    /// Interior breakpoints in `(0, 1)`.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.t_start).collect()
    }

    #[inline]
    pub fn p(&self, t: f64) -> f64 {
        self.segments[self.segment_index(t)].p.eval(t)
    }

    #[inline]
    pub fn beta(&self, t: f64) -> f64 {
        self.segments[self.segment_index(t)].beta.eval(t)
    }

    /// `(p, beta)` evaluated with segment `k`, regardless of where `t` lies.
    #[inline]
    pub fn params_on(&self, k: usize, t: f64) -> (f64, f64) {
        let s = &self.segments[k];
        (s.p.eval(t), s.beta.eval(t))
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }
    pub fn p_max(&self) -> f64 {
        self.p_max
    }
    pub fn beta_min(&self) -> f64 {
        self.beta_min
    }
    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.segments
            .iter()
            .all(|s| s.p.is_constant() && s.beta.is_constant())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_continuous_at_breakpoint() {
        let s = Schedule::figure_one();
        assert_eq!(s.beta(0.0), 8.0);
        assert_eq!(s.beta(0.009_999), 8.0);
        assert_eq!(s.beta(0.01), 1.0);
        assert_eq!(s.beta(1.0), 1.0);
        assert_eq!(s.breakpoints(), vec![0.01]);
        assert_eq!((s.beta_min(), s.beta_max()), (1.0, 8.0));
        assert_eq!((s.p_min(), s.p_max()), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Schedule::homogeneous(1.0, 1.0).is_err());
        assert!(Schedule::homogeneous(-0.1, 1.0).is_err());
        assert!(Schedule::homogeneous(0.0, 0.0).is_err());
        // p(t) = 0.5 + 0.6 t crosses 1 before t = 1
        let bad = Schedule::new(vec![Segment {
            t_start: 0.0,
            p: Poly(vec![0.5, 0.6]),
            beta: Poly::constant(1.0),
        }]);
        assert!(bad.is_err());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        let seg = |t| Segment {
            t_start: t,
            p: Poly::constant(0.0),
            beta: Poly::constant(1.0),
        };
        assert!(Schedule::new(vec![seg(0.1)]).is_err());
        assert!(Schedule::new(vec![seg(0.0), seg(0.5), seg(0.5)]).is_err());
        assert!(Schedule::new(vec![seg(0.0), seg(0.6), seg(0.3)]).is_err());
        assert!(Schedule::new(vec![]).is_err());
    }

    #[test]
    fn polynomial_bounds_found_on_grid() {
        let s = Schedule::new(vec![Segment {
            t_start: 0.0,
            p: Poly(vec![0.1, 0.2]),
            beta: Poly(vec![2.0, -1.0]),
        }])
        .unwrap();
        assert!((s.p_max() - 0.3).abs() < 1e-12);
        assert!((s.beta_min() - 1.0).abs() < 1e-12);
        assert!((s.beta_max() - 2.0).abs() < 1e-12);
    }
}
