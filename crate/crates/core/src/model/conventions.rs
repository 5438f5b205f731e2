//! Extended-real arithmetic used by every entropy term.
//!
//! `0 log 0 = 0`, `0/0 = 0`, `0 * inf = 0`, `a/0 = inf` for `a > 0`.

/// `a / b` with `0/0 = 0` and `a/0 = +-inf`.
#[inline]
pub fn div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            a.signum() * f64::INFINITY
        }
    } else {
        a / b
    }
}

/// `a * b` with `0 * inf = 0`.
#[inline]
pub fn mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// `mu log(mu / nu)`; zero when `mu = 0`, `+inf` when `mu > 0 = nu`.
#[inline]
pub fn xlog_ratio(mu: f64, nu: f64) -> f64 {
    if mu <= 0.0 {
        0.0
    } else if nu <= 0.0 {
        f64::INFINITY
    } else {
        mu * (mu / nu).ln()
    }
}

/// `mu log(mu / nu) - mu + nu`, the nonnegative form of one entropy term.
///
/// Summing these over a pair of probability vectors gives the same relative
/// entropy as the plain terms, without cancellation.
#[inline]
pub fn entropy_term(mu: f64, nu: f64) -> f64 {
    if mu <= 0.0 {
        return nu.max(0.0);
    }
    if nu <= 0.0 {
        return f64::INFINITY;
    }
    let r = mu / nu;
    // x log x - x + 1 scaled by nu; ln_1p keeps precision when r is near 1
    let v = if (r - 1.0).abs() < 0.5 {
        let e = r - 1.0;
        nu * ((1.0 + e) * e.ln_1p() - e)
    } else {
        mu * r.ln() - mu + nu
    };
    v.max(0.0)
}
