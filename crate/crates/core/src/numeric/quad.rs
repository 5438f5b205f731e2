//! Global adaptive Gauss-Kronrod (7/15) quadrature for vector integrands.
//!
//! The scalar return value drives refinement; auxiliary components written to
//! the output slice are integrated on the same partition. Nodes are interior,
//! so integrable endpoint singularities are never evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-11, rel_tol: 1e-10, max_panels: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadOutput {
    pub value: f64,
    pub error: f64,
    pub components: Vec<f64>,
    pub panels: usize,
    /// Set when some node evaluated to `+inf`; `value` is then `+inf`.
    pub infinite: bool,
    /// Panel with the largest error estimate (or the first infinite panel).
    pub worst: (f64, f64),
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    comps: Vec<f64>,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

enum Rule {
    Finite(Panel),
    Infinite,
}

fn apply_rule<F>(f: &mut F, a: f64, b: f64, m: usize, buf: &mut [f64]) -> Rule
where
    F: FnMut(f64, &mut [f64]) -> f64,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    let mut comps = vec![0.0; m];
    for k in 0..15 {
        let (x, wk, wg) = if k < 7 {
            (c - h * XGK[k], WGK[k], if k % 2 == 1 { WG[k / 2] } else { 0.0 })
        } else if k == 7 {
            (c, WGK[7], WG[3])
        } else {
            let r = 14 - k;
            (c + h * XGK[r], WGK[r], if r % 2 == 1 { WG[r / 2] } else { 0.0 })
        };
        let v = f(x, buf);
        if v == f64::INFINITY || buf.iter().any(|x| x.is_infinite()) {
            return Rule::Infinite;
        }
        kron += wk * v;
        gauss += wg * v;
        for (s, y) in comps.iter_mut().zip(buf.iter()) {
            *s += wk * y;
        }
    }
    for s in comps.iter_mut() {
        *s *= h;
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).abs();
    Rule::Finite(Panel { a, b, value, error, comps })
}

/// Integrates over `[breaks[0], breaks[last]]`, never straddling an interior
/// break. The integrand returns the scalar to control and fills `m` components.
pub fn integrate<F>(mut f: F, breaks: &[f64], m: usize, opts: QuadOptions) -> Result<QuadOutput>
where
    F: FnMut(f64, &mut [f64]) -> f64,
{
    assert!(breaks.len() >= 2, "need an interval");
    let mut buf = vec![0.0; m];
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if !(w[1] > w[0]) {
            continue;
        }
        match apply_rule(&mut f, w[0], w[1], m, &mut buf) {
            Rule::Finite(p) => heap.push(p),
            Rule::Infinite => return Ok(infinite(m, w[0], w[1], heap.len())),
        }
    }

    let span = breaks[breaks.len() - 1] - breaks[0];
    let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
    let mut total_val: f64 = heap.iter().map(|p| p.value).sum();
    let mut since_resum = 0usize;
    loop {
        since_resum += 1;
        if since_resum == 256 {
            // running sums drift; refresh them now and then
            total_err = heap.iter().map(|p| p.error).sum();
            total_val = heap.iter().map(|p| p.value).sum();
            since_resum = 0;
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total_val.abs());
        if total_err <= tol {
            break;
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a) < 1e-15 * span.max(1e-300) || heap.len() + 2 > opts.max_panels {
            let (a, b, e) = (worst.a, worst.b, worst.error);
            heap.push(worst);
            if heap.len() + 1 > opts.max_panels || e > tol {
                return Err(Error::Quadrature { error: total_err, a, b });
            }
            break;
        }
        total_err -= worst.error;
        total_val -= worst.value;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            match apply_rule(&mut f, a, b, m, &mut buf) {
                Rule::Finite(p) => {
                    total_err += p.error;
                    total_val += p.value;
                    heap.push(p);
                }
                Rule::Infinite => return Ok(infinite(m, a, b, heap.len())),
            }
        }
    }

    let worst = heap.peek().map_or((breaks[0], breaks[1]), |p| (p.a, p.b));
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut components = vec![0.0; m];
    let mut value = 0.0;
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
        for (s, c) in components.iter_mut().zip(&p.comps) {
            *s += c;
        }
    }
    Ok(QuadOutput { value, error, components, panels: panels.len(), infinite: false, worst })
}

fn infinite(m: usize, a: f64, b: f64, panels: usize) -> QuadOutput {
    QuadOutput {
        value: f64::INFINITY,
        error: 0.0,
        components: vec![f64::NAN; m],
        panels,
        infinite: true,
        worst: (a, b),
    }
}
