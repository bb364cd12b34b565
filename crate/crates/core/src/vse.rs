//! Volume spectral efficiency of the UAV tier.
//!
//! `V_u = λ_u p_g E[log(1 + γ_u)] / h_max` (nats/sec/Hz/m³). With
//! `γ_u = G/Z` and `G` independent of `Z`,
//! `E[log(1 + G/Z)] = ∫_0^∞ (1 - L_G(s))/s · L_Z(s) ds`.

use crate::coverage::{coverage_from_transform, ground_coverage, ground_coverage_limit};
use crate::error::{Error, Result};
use crate::netmodel::NetworkConfig;
use crate::quad::DeRule;
use crate::shotprocess::{ShotContext, UavIsrTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VseMethod {
    FiniteAntenna,
    MassiveLimit,
}

impl VseMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            VseMethod::FiniteAntenna => "finite_antenna",
            VseMethod::MassiveLimit => "massive_limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VseResult {
    pub value: f64,
    pub p_g_used: f64,
    pub method: VseMethod,
}

/// Serving-gain factor `(1 - (1 + s/N)^{-N})/s` for a Gamma(N, N) gain;
/// `n = None` gives the deterministic-gain limit `(1 - e^{-s})/s`.
pub fn fading_kernel(s: f64, n: Option<u32>) -> f64 {
    match n {
        None => {
            if s < 1e-4 {
                1.0 - s / 2.0 + s * s / 6.0
            } else {
                -(-s).exp_m1() / s
            }
        }
        Some(n) => {
            let nf = n as f64;
            if s < 1e-3 * nf {
                // 1 - (1+u)^{-N} = Σ_{k≥1} (-1)^{k+1} C(N+k-1, k) u^k with u = s/N;
                // consecutive terms shrink by about s/(k+1).
                let u = s / nf;
                let mut term = nf * u;
                let mut sum = term;
                for k in 1..200 {
                    term *= -(nf + k as f64) / (k as f64 + 1.0) * u;
                    sum += term;
                    if term.abs() <= 1e-17 * sum.abs() {
                        break;
                    }
                }
                sum / s
            } else {
                -(-nf * (s / nf).ln_1p()).exp_m1() / s
            }
        }
    }
}

/// `∫_0^∞ kernel(s) L(s) ds` with a fixed exp-sinh rule.
pub fn shannon_integral<L: Fn(f64) -> f64, K: Fn(f64) -> f64>(lz: L, kernel: K) -> Result<f64> {
    let rule = DeRule::exp_sinh(1.0 / 16.0, -6.0, 5.0);
    let s = rule.integrate_from(0.0, 1.0, |x: f64| {
        let k = kernel(x);
        if k == 0.0 {
            return 0.0;
        }
        k * lz(x)
    });
    let err = (s.value - s.coarse).abs();
    if !s.value.is_finite() || err > 1e-4 * s.value.abs() + 1e-14 {
        return Err(Error::Convergence { estimate: s.value, error: err });
    }
    Ok(s.value)
}

fn uav_transform(cfg: &NetworkConfig) -> Result<UavIsrTransform> {
    UavIsrTransform::new(&ShotContext::new(cfg, 1)?)
}

/// `E[log(1 + γ_u)]` for the configured array size (`limit` selects the
/// deterministic serving gain).
pub fn mean_log_sinr(cfg: &NetworkConfig, limit: bool) -> Result<f64> {
    let tr = uav_transform(cfg)?;
    let n = if limit { None } else { Some(cfg.uav.n_antennas) };
    shannon_integral(|s| tr.eval_real(s), |s| fading_kernel(s, n))
}

fn assemble(cfg: &NetworkConfig, rate: f64, p_g: f64, method: VseMethod) -> VseResult {
    VseResult { value: cfg.lambda_u * p_g * rate / cfg.placement.h_max, p_g_used: p_g, method }
}

pub fn volume_spectral_efficiency(cfg: &NetworkConfig) -> Result<VseResult> {
    let rate = mean_log_sinr(cfg, false)?;
    let p_g = ground_coverage(cfg)?;
    Ok(assemble(cfg, rate, p_g, VseMethod::FiniteAntenna))
}

pub fn volume_spectral_efficiency_limit(cfg: &NetworkConfig) -> Result<VseResult> {
    let rate = mean_log_sinr(cfg, true)?;
    let p_g = ground_coverage_limit(cfg)?;
    Ok(assemble(cfg, rate, p_g, VseMethod::MassiveLimit))
}

/// Mean rate `E[log(1 + γ_u) 1(γ_g ≥ β)] = p_g E[log(1 + γ_u)]` in nats/sec/Hz.
pub fn mean_link_rate(cfg: &NetworkConfig) -> Result<f64> {
    Ok(ground_coverage(cfg)? * mean_log_sinr(cfg, false)?)
}

/// The same mean rate from `p_g ∫_0^∞ P[γ_u ≥ x]/(1 + x) dx` on a coarse
/// grid; an independent check of [`mean_link_rate`].
pub fn mean_link_rate_ccdf(cfg: &NetworkConfig) -> Result<f64> {
    let tr = uav_transform(cfg)?;
    let n = cfg.uav.n_antennas;
    let rule = DeRule::exp_sinh(1.0 / 8.0, -4.5, 4.0);
    let mut failure = None;
    let s = rule.integrate_from(0.0, 1.0, |x: f64| match coverage_from_transform(|s| tr.eval(s), n, x) {
        Ok(p) => p / (1.0 + x),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ground_coverage(cfg)? * s.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NetworkConfig {
        NetworkConfig::reference().with_undetectable_uav_nlos().0
    }

    #[test]
    fn kernel_branches_are_continuous() {
        for n in [1u32, 8, 64] {
            let s0 = 1e-3 * n as f64;
            let a = fading_kernel(s0 * (1.0 - 1e-12), Some(n));
            let b = fading_kernel(s0 * (1.0 + 1e-12), Some(n));
            assert!((a - b).abs() < 1e-9, "n={n}: {a} {b}");
            assert!((fading_kernel(1e-12, Some(n)) - 1.0).abs() < 1e-9);
        }
        // N = 1: (1 - 1/(1+s))/s = 1/(1+s)
        for s in [1e-6, 1e-4, 0.5, 3.0] {
            assert!((fading_kernel(s, Some(1)) - 1.0 / (1.0 + s)).abs() < 1e-12);
        }
        assert!((fading_kernel(2.0, None) - (1.0 - (-2f64).exp()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_s_branch_matches_series() {
        // series of (1 - (1+s/N)^{-N})/s from the binomial expansion, more terms
        let n = 16u32;
        let nf = n as f64;
        for s in [1e-6, 1e-4, 1e-2] {
            let u = s / nf;
            let mut coef = 1.0;
            let mut sum = 0.0;
            for k in 1..12 {
                coef *= (nf + k as f64 - 1.0) / k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sum += sign * coef * u.powi(k);
            }
            let series = sum / s;
            assert!((fading_kernel(s, Some(n)) - series).abs() < 1e-8 * series);
        }
    }

    #[test]
    fn deterministic_unit_sinr() {
        // Z = 1 a.s. and G = 1 a.s.: log 2
        let v = shannon_integral(|s| (-s).exp(), |s| fading_kernel(s, None)).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn rate_and_vse_are_consistent() {
        let mut c = cfg();
        c.placement.h_o = 20.0;
        let v = volume_spectral_efficiency(&c).unwrap();
        let r = mean_link_rate(&c).unwrap();
        assert!((c.placement.h_max * v.value / c.lambda_u - r).abs() <= 1e-12 * r);
        let ccdf = mean_link_rate_ccdf(&c).unwrap();
        assert!((ccdf - r).abs() < 1e-3 * r, "{ccdf} {r}");
    }

    #[test]
    fn fixed_angle_linearity_and_paths() {
        let mut c = cfg();
        c.placement.nu = -1.0;
        c.placement.h_o = 1.0;
        let a = volume_spectral_efficiency(&c).unwrap().value;
        c.lambda_u *= 2.0;
        let b = volume_spectral_efficiency(&c).unwrap().value;
        assert!((b / a - 2.0).abs() < 1e-12);
        let ctx = ShotContext::new(&c, 1).unwrap();
        let general = UavIsrTransform::general(&ctx).unwrap();
        let g = shannon_integral(|s| general.eval_real(s), |s| fading_kernel(s, Some(8))).unwrap();
        let sp = mean_log_sinr(&c, false).unwrap();
        assert!((g - sp).abs() < 1e-5 * sp, "{g} {sp}");
    }

    #[test]
    fn limit_dominates_finite() {
        let mut c = cfg();
        c.placement.h_o = 10.0;
        let lim = volume_spectral_efficiency_limit(&c).unwrap().value;
        let mut prev = 0.0;
        for n in [1u32, 4, 16, 64] {
            c.uav.n_antennas = n;
            c.ground.n_antennas = n;
            let v = volume_spectral_efficiency(&c).unwrap().value;
            assert!(v >= prev && v <= lim * 1.01, "n={n} {v} {lim}");
            prev = v;
        }
    }
}
