//! Taylor data of analytic functions from samples on a circle.
//!
//! Both routines assume `f` is real on the real axis, so `f(z̄) = conj f(z)`
//! and only the upper half of the circle is sampled.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSettings {
    /// Circle radius around the expansion point.
    pub radius: f64,
    /// Trapezoid nodes of the coarse rule; the fine rule uses twice as many.
    pub nodes: usize,
    pub rel_tol: f64,
}

impl ContourSettings {
    /// Default circle for a point on the positive axis: radius `0.4·point`.
    pub fn around(point: f64) -> Self {
        let radius = if point == 0.0 { 0.4 } else { 0.4 * point.abs() };
        ContourSettings { radius, nodes: 64, rel_tol: 1e-8 }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Samples `f(center + r e^{iθ_j})` for `θ_j = 2πj/m`, `j = 0..=m/2`.
fn half_circle<F: Fn(Complex64) -> Complex64>(f: &F, center: f64, radius: f64, m: usize) -> Vec<Complex64> {
    (0..=m / 2)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / m as f64;
            f(Complex64::new(center, 0.0) + Complex64::from_polar(radius, th))
        })
        .collect()
}

/// Trapezoid mean of `Re[g_j]` over the full circle from the half-circle
/// samples, using `stride` to select a sub-grid.
fn symmetric_mean(vals: &[Complex64], m: usize, stride: usize, weight: impl Fn(usize) -> Complex64) -> f64 {
    let half = m / 2;
    let mut acc = 0.0;
    let mut j = 0;
    while j <= half {
        let term = (vals[j] * weight(j)).re;
        acc += if j == 0 || j == half { term } else { 2.0 * term };
        j += stride;
    }
    acc / (m / stride) as f64
}

/// `order`-th derivative of `f` at the real `point` via the Cauchy integral
/// formula on a circle. The coarse and fine trapezoid rules are compared and
/// a convergence error is returned when they disagree.
pub fn cauchy_derivative<F: Fn(Complex64) -> Complex64>(
    f: F,
    order: usize,
    point: f64,
    settings: &ContourSettings,
) -> Result<f64> {
    if !(settings.radius > 0.0) || settings.nodes < 2 || !settings.nodes.is_multiple_of(2) {
        return Err(Error::domain("contour needs a positive radius and an even node count"));
    }
    if order == 0 {
        return Ok(f(Complex64::new(point, 0.0)).re);
    }
    let m = 2 * settings.nodes;
    let vals = half_circle(&f, point, settings.radius, m);
    let scale = (ln_factorial(order) - order as f64 * settings.radius.ln()).exp();
    let kern = |j: usize| Complex64::from_polar(1.0, -(order as f64) * 2.0 * PI * j as f64 / m as f64);
    let fine = scale * symmetric_mean(&vals, m, 1, kern);
    let coarse = scale * symmetric_mean(&vals, m, 2, kern);
    let fmax = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = settings.rel_tol * scale * fmax;
    let err = (fine - coarse).abs();
    if !fine.is_finite() || err > settings.rel_tol * fine.abs() + floor {
        return Err(Error::Convergence { estimate: fine, error: err });
    }
    Ok(fine)
}

/// Result of [`taylor_partial_sum`]. `error` compares the full node set with
/// every other node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorSum {
    pub value: f64,
    pub error: f64,
}

/// `Σ_{k<terms} c_k step^k` where `c_k` are the Taylor coefficients of `f`
/// about the real `center`, extracted from `nodes` samples on the circle of
/// the given radius. With `step = -center` this evaluates the order-`terms`
/// Taylor polynomial at the origin, which is how finite-array coverage is
/// computed from a Laplace transform.
pub fn taylor_partial_sum<F: Fn(Complex64) -> Complex64>(
    f: F,
    center: f64,
    radius: f64,
    nodes: usize,
    terms: usize,
    step: f64,
) -> Result<TaylorSum> {
    if !(radius > 0.0) || nodes < 4 || !nodes.is_multiple_of(4) {
        return Err(Error::domain("contour needs a positive radius and a node count divisible by 4"));
    }
    if terms == 0 {
        return Ok(TaylorSum { value: 0.0, error: 0.0 });
    }
    let m = nodes;
    let vals = half_circle(&f, center, radius, m);
    let q0 = step / radius;
    let kern = |j: usize| {
        let th = 2.0 * PI * j as f64 / m as f64;
        let q = Complex64::from_polar(q0, -th);
        let mut pw = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..terms {
            acc += pw;
            pw *= q;
        }
        acc
    };
    let fine = symmetric_mean(&vals, m, 1, kern);
    let coarse = symmetric_mean(&vals, m, 2, kern);
    Ok(TaylorSum { value: fine, error: (fine - coarse).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivative() {
        // d^{N-1}/dτ^{N-1} τ^N = N! τ
        for n in [3usize, 8, 12] {
            let tau = 0.7;
            let v = cauchy_derivative(|z| z.powu(n as u32), n - 1, tau, &ContourSettings::around(tau)).unwrap();
            let exact = (1..=n).map(|k| k as f64).product::<f64>() * tau;
            assert!((v - exact).abs() <= 1e-9 * exact, "n={n} {v} {exact}");
        }
    }

    #[test]
    fn exp_and_identity() {
        let s = ContourSettings { radius: 1.0, nodes: 64, rel_tol: 1e-10 };
        let v = cauchy_derivative(|z| z.exp(), 5, 0.0, &s).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = cauchy_derivative(|z| z.exp(), 0, 0.3, &s).unwrap();
        assert_eq!(v, 0.3f64.exp());
    }

    #[test]
    fn too_few_nodes_is_reported() {
        // 1/(1.05 - z) has a pole just outside the unit circle.
        let s = ContourSettings { radius: 1.0, nodes: 8, rel_tol: 1e-10 };
        let r = cauchy_derivative(|z| 1.0 / (Complex64::new(1.05, 0.0) - z), 4, 0.0, &s);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }

    #[test]
    fn taylor_sum_of_exponential() {
        // Taylor polynomial of e^{-s} about t, evaluated at 0, equals the
        // Poisson tail probability P[Poisson(t) < n].
        let t = 6.0;
        let n = 5;
        let v = taylor_partial_sum(|z| (-z).exp(), t, 0.8 * t, 256, n, -t).unwrap();
        let mut term = 1.0;
        let mut exact = 0.0;
        for k in 0..n {
            if k > 0 {
                term *= t / k as f64;
            }
            exact += term;
        }
        exact *= (-t).exp();
        assert!((v.value - exact).abs() < 1e-12, "{} {}", v.value, exact);
        assert!(v.error < 1e-8);
    }
}
