//! Analytic coverage probabilities of the UAV tier, the ground tier and the
//! plane-split pair.
//!
//! With a Gamma(N, N) serving gain and `t = Nβ`,
//! `P[G ≥ βZ] = Σ_{k<N} (-t)^k L_Z^{(k)}(t)/k!`. Every term is
//! `E[(tZ)^k e^{-tZ}]/k! ≥ 0`, so the sum has no cancellation; the Taylor
//! coefficients come from samples of `L_Z` on a circle around `t`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netmodel::NetworkConfig;
use crate::quad::{
    cauchy_derivative, integrate_semi_infinite, inverse_laplace, inverse_laplace_euler, taylor_partial_sum,
    ContourSettings, EulerSettings, LaplaceSettings, QuadratureSettings,
};
use crate::shotprocess::{frak_i_u, pdf_y_uk, GroundIsrTransform, ShotContext, UavIsrTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageMethod {
    FiniteAntenna,
    SisoClosedForm,
    MassiveLimit,
}

impl CoverageMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverageMethod::FiniteAntenna => "finite_antenna",
            CoverageMethod::SisoClosedForm => "siso_closed_form",
            CoverageMethod::MassiveLimit => "massive_limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub p_u: f64,
    pub p_g: f64,
    pub p_cov: f64,
    pub method: CoverageMethod,
}

impl CoverageResult {
    fn new(p_u: f64, p_g: f64, method: CoverageMethod) -> Self {
        CoverageResult { p_u, p_g, p_cov: p_u * p_g, method }
    }
}

/// Accepted error of the contour sum.
const CONTOUR_TOL: f64 = 1e-8;

/// Circle radius fraction and node count for order `n`. Roundoff grows like
/// `(1/frac)^{n-1}` and aliasing shrinks like `frac^{nodes}`.
fn contour_plan(n: u32) -> (f64, usize) {
    let frac = if n <= 1 { 0.5 } else { 10f64.powf(-3.0 / (n - 1) as f64).clamp(0.5, 0.95) };
    let nodes = (16 * n as usize).max(64).next_multiple_of(4);
    (frac, nodes)
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&p) {
        return Err(Error::Convergence { estimate: p, error: f64::NAN });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `P[G ≥ βZ]` for `G ~ Gamma(n, n)` given the Laplace transform of `Z`.
pub fn coverage_from_transform<F: Fn(Complex64) -> Complex64>(f: F, n: u32, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain("SINR threshold must be finite and > 0"));
    }
    if n == 0 {
        return Err(Error::domain("antenna count must be >= 1"));
    }
    if n == 1 {
        return clamp_probability(f(Complex64::new(beta, 0.0)).re);
    }
    let t = n as f64 * beta;
    let (frac, nodes) = contour_plan(n);
    let s = taylor_partial_sum(f, t, frac * t, nodes, n as usize, -t)?;
    if s.error > CONTOUR_TOL {
        return Err(Error::Convergence { estimate: s.value, error: s.error });
    }
    clamp_probability(s.value)
}

fn uav_transform(cfg: &NetworkConfig) -> Result<UavIsrTransform> {
    UavIsrTransform::new(&ShotContext::new(cfg, 1)?)
}

/// UAV coverage `p_u` for the configured array size.
pub fn uav_coverage(cfg: &NetworkConfig) -> Result<f64> {
    let tr = uav_transform(cfg)?;
    coverage_from_transform(|s| tr.eval(s), cfg.uav.n_antennas, cfg.beta)
}

/// `p_u` from the order-(N-1) derivative of `τ^{N-1} L_Z(N/τ)/(N-1)!` at
/// `τ = 1/β`. Kept as an independent check of [`uav_coverage`]; the
/// derivative loses about `log10(3.5)` digits per order, so it is only
/// reliable up to roughly N = 16.
pub fn uav_coverage_tau(cfg: &NetworkConfig) -> Result<f64> {
    let tr = uav_transform(cfg)?;
    tau_form(|s| tr.eval(s), cfg.uav.n_antennas, cfg.beta)
}

fn tau_form<F: Fn(Complex64) -> Complex64>(f: F, n: u32, beta: f64) -> Result<f64> {
    let order = (n - 1) as usize;
    let ln_fact: f64 = (2..n).map(|k| (k as f64).ln()).sum();
    let inv_fact = (-ln_fact).exp();
    let g = |tau: Complex64| tau.powu(n - 1) * f(n as f64 / tau) * inv_fact;
    let point = 1.0 / beta;
    let settings = ContourSettings::around(point);
    clamp_probability(cauchy_derivative(g, order, point, &settings)?)
}

/// Single-antenna, noise-free UAV coverage as one integral over the serving
/// distance, evaluated with adaptive quadrature.
pub fn uav_coverage_siso(cfg: &NetworkConfig) -> Result<f64> {
    if cfg.uav.n_antennas != 1 {
        return Err(Error::domain("the single-antenna form needs uav.n_antennas = 1"));
    }
    if cfg.noise_uav != 0.0 {
        return Err(Error::domain("the single-antenna form is noise-free"));
    }
    let ctx = ShotContext::new(cfg, 1)?;
    let pl = std::f64::consts::PI * cfg.lambda_u;
    let settings = QuadratureSettings { rel_tol: 1e-11, abs_tol: 1e-13, max_subdivisions: 2000 };
    let mut failure = None;
    let v = integrate_semi_infinite(
        |z| {
            let dens = pdf_y_uk(&ctx, z);
            if dens == 0.0 {
                return 0.0;
            }
            match frak_i_u(&ctx, cfg.beta * ctx.dist_alpha(z), z) {
                Ok(i) => dens * (-pl * i).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        &settings,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    clamp_probability(v?)
}

/// Ground coverage `p_g`; independent of both intensities.
pub fn ground_coverage(cfg: &NetworkConfig) -> Result<f64> {
    cfg.validate()?;
    let g = GroundIsrTransform::new(cfg.ground.alpha)?;
    coverage_from_transform(|s| g.eval(s), cfg.ground.n_antennas, cfg.beta)
}

/// Ground coverage through the τ-derivative form (check path, N ≤ 16).
pub fn ground_coverage_tau(cfg: &NetworkConfig) -> Result<f64> {
    cfg.validate()?;
    let g = GroundIsrTransform::new(cfg.ground.alpha)?;
    tau_form(|s| g.eval(s), cfg.ground.n_antennas, cfg.beta)
}

/// Single-antenna ground coverage `[1 + 𝕴_g(β, 2/α_g)]^{-1}`.
pub fn ground_coverage_siso(cfg: &NetworkConfig) -> Result<f64> {
    cfg.validate()?;
    let i = crate::shotprocess::frak_i_g(cfg.beta, 2.0 / cfg.ground.alpha)?;
    Ok(1.0 / (1.0 + i))
}

pub fn multicell_coverage(cfg: &NetworkConfig) -> Result<CoverageResult> {
    let p_u = uav_coverage(cfg)?;
    let p_g = ground_coverage(cfg)?;
    let method = if cfg.uav.n_antennas == 1 && cfg.ground.n_antennas == 1 {
        CoverageMethod::SisoClosedForm
    } else {
        CoverageMethod::FiniteAntenna
    };
    Ok(CoverageResult::new(p_u, p_g, method))
}

/// `lim_{N_u→∞} p_u = P[Z ≤ 1/β] = L⁻¹{L_Z(s)/s}(1/β)`.
///
/// The UAV transform cannot be sampled deep in the left half-plane (the
/// interference exponent blows up there), so the Bromwich line is used with
/// Euler summation instead of a Talbot contour.
pub fn uav_coverage_limit(cfg: &NetworkConfig) -> Result<f64> {
    let tr = uav_transform(cfg)?;
    uav_limit_with(&tr, cfg.beta)
}

pub(crate) fn uav_limit_with(tr: &UavIsrTransform, beta: f64) -> Result<f64> {
    let v = inverse_laplace_euler(|s| tr.eval(s) / s, 1.0 / beta, &EulerSettings::default())?;
    clamp_probability(v)
}

/// `lim_{N_g→∞} p_g = L⁻¹{(1 + 𝕴_g(s))^{-1}/s}(1/β)` by fixed Talbot.
pub fn ground_coverage_limit(cfg: &NetworkConfig) -> Result<f64> {
    cfg.validate()?;
    let g = GroundIsrTransform::new(cfg.ground.alpha)?;
    let v = inverse_laplace(|s| g.eval(s) / s, 1.0 / cfg.beta, &LaplaceSettings::default())?;
    clamp_probability(v)
}

pub fn multicell_coverage_limit(cfg: &NetworkConfig) -> Result<CoverageResult> {
    let p_u = uav_coverage_limit(cfg)?;
    let p_g = ground_coverage_limit(cfg)?;
    Ok(CoverageResult::new(p_u, p_g, CoverageMethod::MassiveLimit))
}

/// UAV coverage for several array sizes and thresholds from one transform.
pub fn uav_coverage_grid(cfg: &NetworkConfig, ns: &[u32], betas: &[f64]) -> Result<Vec<Vec<f64>>> {
    let tr = uav_transform(cfg)?;
    ns.iter().map(|&n| betas.iter().map(|&b| coverage_from_transform(|s| tr.eval(s), n, b)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> NetworkConfig {
        let mut c = NetworkConfig::reference().with_undetectable_uav_nlos().0;
        c.lambda_u = 50.0 * c.lambda_g;
        c
    }

    #[test]
    fn ground_siso_closed_form() {
        let mut c = cfg();
        c.ground.n_antennas = 1;
        let exact = 1.0 / (1.0 + PI / 2.0 - 1f64.atan());
        assert!((ground_coverage(&c).unwrap() - exact).abs() < 1e-12);
        assert!((ground_coverage_siso(&c).unwrap() - exact).abs() < 1e-12);
        c.beta = 2.0;
        let sb = 2f64.sqrt();
        let exact = 1.0 / (1.0 + sb * (PI / 2.0 - (1.0 / sb).atan()));
        assert!((ground_coverage(&c).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn ground_is_intensity_free() {
        let mut c = cfg();
        let a = ground_coverage(&c).unwrap();
        c.lambda_g *= 100.0;
        assert_eq!(a, ground_coverage(&c).unwrap());
    }

    #[test]
    fn contour_and_tau_forms_agree() {
        let mut c = cfg();
        c.placement.h_o = 15.0;
        let a = uav_coverage(&c).unwrap();
        let b = uav_coverage_tau(&c).unwrap();
        assert!((a - b).abs() < 1e-7, "{a} {b}");
        let a = ground_coverage(&c).unwrap();
        let b = ground_coverage_tau(&c).unwrap();
        assert!((a - b).abs() < 1e-7, "{a} {b}");
    }

    #[test]
    fn siso_paths_agree() {
        let mut c = cfg();
        c.uav.n_antennas = 1;
        c.placement.h_o = 40.0;
        let a = uav_coverage(&c).unwrap();
        let b = uav_coverage_siso(&c).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn no_interference_no_noise_is_full_coverage() {
        let mut c = cfg();
        c.pattern.delta_s = 0.0;
        c.pattern.theta0 = 0.0;
        assert!((uav_coverage(&c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_reduces_coverage() {
        let mut c = cfg();
        c.placement.h_o = 15.0;
        let a = uav_coverage(&c).unwrap();
        c.noise_uav = 1e-12;
        let b = uav_coverage(&c).unwrap();
        assert!(b < a, "{a} {b}");
        // noisy general path matches the τ form too
        let t = uav_coverage_tau(&c).unwrap();
        assert!((b - t).abs() < 1e-7);
    }

    #[test]
    fn fixed_angle_invariance() {
        let mut c = cfg();
        c.placement.nu = -1.0;
        c.placement.h_o = 1.0;
        let a = uav_coverage(&c).unwrap();
        c.lambda_u *= 10.0;
        c.placement.h_o = 3.0;
        assert!((uav_coverage(&c).unwrap() - a).abs() < 1e-12);
    }

    #[test]
    fn finite_nlos_is_rejected() {
        let c = NetworkConfig::reference();
        assert!(matches!(uav_coverage(&c), Err(Error::Unsupported(_))));
    }

    #[test]
    fn limits_bound_finite_values() {
        let c = cfg();
        let lim = ground_coverage_limit(&c).unwrap();
        let mut big = c;
        big.ground.n_antennas = 256;
        let p256 = ground_coverage(&big).unwrap();
        assert!(p256 <= lim + 1e-6 && lim - p256 < 0.01, "{p256} {lim}");
        let ul = uav_coverage_limit(&c).unwrap();
        let mut u = c;
        u.uav.n_antennas = 64;
        let p64 = uav_coverage(&u).unwrap();
        assert!(p64 <= ul + 1e-3, "{p64} {ul}");
    }

    #[test]
    fn threshold_limits() {
        let mut c = cfg();
        c.beta = 1e-6;
        assert!(multicell_coverage(&c).unwrap().p_cov > 0.99);
        c.beta = 1e8;
        assert!(uav_coverage_limit(&c).unwrap() < 1e-3);
    }
}
