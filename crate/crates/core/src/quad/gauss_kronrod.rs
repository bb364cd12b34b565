use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and work limit for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 2000 }
    }
}

impl QuadratureSettings {
    fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be > 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be >= 1"));
        }
        Ok(())
    }
}

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with the usual QUADPACK error heuristic.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hab = h.abs();
    let value = resk * h;
    resabs *= hab;
    resasc *= hab;
    let mut error = ((resk - resg) * h).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Segment { a, b, value, error }
}

fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, s: &QuadratureSettings) -> Result<f64> {
    s.check()?;
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let first = gk15(&mut f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        if err <= s.abs_tol.max(s.rel_tol * total.abs()) && total.is_finite() {
            return Ok(total);
        }
        if heap.len() >= s.max_subdivisions {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            break;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum periodically so cancellation in the running totals does not drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|g| g.value).sum();
            err = heap.iter().map(|g| g.error).sum();
        }
    }
    total = heap.iter().map(|g| g.value).sum();
    err = heap.iter().map(|g| g.error).sum();
    if err <= s.abs_tol.max(s.rel_tol * total.abs()) && total.is_finite() {
        return Ok(total);
    }
    Err(Error::Convergence { estimate: total, error: err })
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]`. Endpoint
/// singularities that are integrable are handled because the rule never
/// samples the endpoints.
pub fn integrate_finite<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<f64> {
    adaptive(f, a, b, settings)
}

/// Integral of `f` over `[a, ∞)`: `[a, a + 1]` directly plus the tail through
/// `t = a + 1/v`, `v ∈ (0, 1]`. Infinity maps to `v = 0`, where doubles keep
/// full resolution, so slowly decaying algebraic tails are not cut off.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(mut f: F, a: f64, settings: &QuadratureSettings) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::domain("lower limit must be finite"));
    }
    let head = adaptive(&mut f, a, a + 1.0, settings)?;
    let g = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let t = a + 1.0 / v;
        if !t.is_finite() {
            return 0.0;
        }
        f(t) / (v * v)
    };
    let tail = adaptive(g, 0.0, 1.0, settings)?;
    Ok(head + tail)
}
