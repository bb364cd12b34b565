//! Fixed double-exponential rules. They are used where an integrand must
//! stay analytic in a complex parameter: the nodes do not depend on the
//! integrand, so the quadrature sum is itself an analytic function.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul};

/// Values a fixed rule can integrate (`f64` and `Complex64`).
pub trait QuadValue: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>> QuadValue for T {}

/// Unit-scale nodes and weights of a double-exponential rule.
///
/// Nodes sit at `t = k h` for a contiguous range of integers `k`; the nodes
/// with even `k` form the rule with step `2h`, which gives a free error
/// estimate.
#[derive(Debug, Clone)]
pub struct DeRule {
    /// Offset from the lower endpoint (unit scale).
    pub x: Vec<f64>,
    /// Offset from the upper endpoint for finite rules, otherwise unused.
    pub x_rev: Vec<f64>,
    pub w: Vec<f64>,
    even: Vec<bool>,
}

/// Sum of a fixed rule together with the same sum at double step.
#[derive(Debug, Clone, Copy)]
pub struct DeSum<T> {
    pub value: T,
    pub coarse: T,
}

impl DeRule {
    /// Rule for `∫_0^∞ g(x) dx` with `x = exp(π/2 sinh t)`, `t ∈ [t_min, t_max]`.
    pub fn exp_sinh(h: f64, t_min: f64, t_max: f64) -> Self {
        let k_lo = (t_min / h).floor() as i64;
        let k_hi = (t_max / h).ceil() as i64;
        let mut x = Vec::new();
        let mut w = Vec::new();
        let mut even = Vec::new();
        for k in k_lo..=k_hi {
            let t = k as f64 * h;
            let e = (FRAC_PI_2 * t.sinh()).exp();
            x.push(e);
            w.push(h * FRAC_PI_2 * t.cosh() * e);
            even.push(k % 2 == 0);
        }
        DeRule { x_rev: Vec::new(), x, w, even }
    }

    /// Exp-sinh rule whose right end reaches far enough that a tail decaying
    /// like `x^{-(1+p)}` is below roughly `e^{-30}` of the bulk.
    pub fn exp_sinh_for_decay(h: f64, p: f64) -> Self {
        let target = (30.0 / p.max(1e-3)).min(650.0);
        let t_max = (target / FRAC_PI_2).asinh();
        DeRule::exp_sinh(h, -4.0, t_max)
    }

    /// Rule for `∫_0^1 g(x) dx` with `x = (1 + tanh(π/2 sinh t))/2`. Distances
    /// to both endpoints are stored without cancellation.
    pub fn tanh_sinh(h: f64, t_max: f64) -> Self {
        let k_max = (t_max / h).ceil() as i64;
        let mut x = Vec::new();
        let mut x_rev = Vec::new();
        let mut w = Vec::new();
        let mut even = Vec::new();
        for k in -k_max..=k_max {
            let t = k as f64 * h;
            let v = FRAC_PI_2 * t.sinh();
            let left = 1.0 / (1.0 + (-2.0 * v).exp());
            let right = 1.0 / (1.0 + (2.0 * v).exp());
            let sech = 1.0 / v.cosh();
            let wt = h * FRAC_PI_2 * t.cosh() * 0.5 * sech * sech;
            if wt == 0.0 || left == 0.0 || right == 0.0 {
                continue;
            }
            x.push(left);
            x_rev.push(right);
            w.push(wt);
            even.push(k % 2 == 0);
        }
        DeRule { x, x_rev, w, even }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `∫_a^∞ f` with nodes `a + scale·x_k`.
    pub fn integrate_from<T: QuadValue, F: FnMut(f64) -> T>(&self, a: f64, scale: f64, mut f: F) -> DeSum<T> {
        let mut full = T::default();
        let mut coarse = T::default();
        for k in 0..self.x.len() {
            let v = f(a + scale * self.x[k]) * (self.w[k] * scale);
            full = full + v;
            if self.even[k] {
                coarse = coarse + v * 2.0;
            }
        }
        DeSum { value: full, coarse }
    }

    /// `∫_a^b f` for a tanh-sinh rule; `f` receives the node and its
    /// distances to `a` and to `b`.
    pub fn integrate_between<T: QuadValue, F: FnMut(f64, f64, f64) -> T>(&self, a: f64, b: f64, mut f: F) -> DeSum<T> {
        let len = b - a;
        let mut full = T::default();
        let mut coarse = T::default();
        for k in 0..self.x.len() {
            let da = len * self.x[k];
            let db = len * self.x_rev[k];
            let node = if da <= db { a + da } else { b - db };
            let v = f(node, da, db) * (self.w[k] * len);
            full = full + v;
            if self.even[k] {
                coarse = coarse + v * 2.0;
            }
        }
        DeSum { value: full, coarse }
    }
}
