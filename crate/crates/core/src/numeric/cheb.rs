//! Chebyshev-Lobatto interpolation on `[-1, 1]`.

use std::f64::consts::PI;

/// Nodes, cumulative integration matrix and barycentric weights for `q`
/// Chebyshev-Lobatto points in ascending order.
#[derive(Debug, Clone)]
pub struct Lobatto {
    q: usize,
    nodes: Vec<f64>,
    /// Row-major `q x q`: `(S f)_i = int_{-1}^{x_i} p_f(x) dx`.
    integ: Vec<f64>,
    bary: Vec<f64>,
}

impl Lobatto {
    pub fn new(q: usize) -> Self {
        assert!(q >= 3, "need at least three nodes");
        let n = q - 1;
        // ascending: x_m = -cos(pi m / n) = cos(pi (n - m) / n)
        let nodes: Vec<f64> = (0..q).map(|m| -(PI * m as f64 / n as f64).cos()).collect();
        let angle = |m: usize| PI * (n - m) as f64 / n as f64;

        let mut integ = vec![0.0; q * q];
        for j in 0..q {
            // Chebyshev coefficients of the Lagrange basis function l_j
            let mut c = vec![0.0; n + 3];
            for (k, ck) in c.iter_mut().enumerate().take(n + 1) {
                let mut a = (k as f64 * angle(j)).cos();
                if j == 0 || j == n {
                    a *= 0.5;
                }
                a *= 2.0 / n as f64;
                if k == 0 || k == n {
                    a *= 0.5;
                }
                *ck = a;
            }
            let mut big = vec![0.0; n + 2];
            for k in 1..=n + 1 {
                let lo = if k == 1 { 2.0 * c[0] } else { c[k - 1] };
                big[k] = (lo - c[k + 1]) / (2.0 * k as f64);
            }
            let at_minus_one: f64 =
                big.iter().enumerate().map(|(k, b)| if k % 2 == 0 { *b } else { -*b }).sum();
            for i in 0..q {
                let th = angle(i);
                let v: f64 = big.iter().enumerate().map(|(k, b)| b * (k as f64 * th).cos()).sum();
                integ[i * q + j] = v - at_minus_one;
            }
        }

        let bary = (0..q)
            .map(|m| {
                let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                if m == 0 || m == n {
                    0.5 * s
                } else {
                    s
                }
            })
            .collect();
        Lobatto { q, nodes, integ, bary }
    }

    pub fn len(&self) -> usize {
        self.q
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `out_i = int_{-1}^{x_i}` of the interpolant of `f`.
    pub fn cumulative(&self, f: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.q) {
            let row = &self.integ[i * self.q..(i + 1) * self.q];
            *o = row.iter().zip(f).map(|(a, b)| a * b).sum();
        }
    }

    /// Barycentric evaluation of the interpolant at `x in [-1, 1]`.
    pub fn interp(&self, f: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for m in 0..self.q {
            let dx = x - self.nodes[m];
            if dx == 0.0 {
                return f[m];
            }
            let w = self.bary[m] / dx;
            num += w * f[m];
            den += w;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let l = Lobatto::new(9);
        let x = l.nodes().to_vec();
        let f: Vec<f64> = x.iter().map(|x| 3.0 * x * x + 1.0).collect();
        let mut out = vec![0.0; 9];
        l.cumulative(&f, &mut out);
        for (xi, oi) in x.iter().zip(&out) {
            let exact = xi.powi(3) + xi + 2.0;
            assert!((oi - exact).abs() < 1e-14, "{oi} vs {exact}");
        }
    }

    #[test]
    fn integrates_exponential_spectrally() {
        let l = Lobatto::new(17);
        let f: Vec<f64> = l.nodes().iter().map(|x| x.exp()).collect();
        let mut out = vec![0.0; 17];
        l.cumulative(&f, &mut out);
        for (xi, oi) in l.nodes().iter().zip(&out) {
            assert!((oi - (xi.exp() - (-1f64).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn barycentric_interpolation() {
        let l = Lobatto::new(17);
        let f: Vec<f64> = l.nodes().iter().map(|x| (2.0 * x).sin()).collect();
        for &x in &[-0.93, -0.2, 0.0, 0.41, 0.999] {
            assert!((l.interp(&f, x) - (2.0 * x as f64).sin()).abs() < 1e-13);
        }
        assert_eq!(l.interp(&f, 1.0), f[16]);
    }
}
