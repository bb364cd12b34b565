//! Analytic values against the Monte Carlo oracle at one configuration.

use crate::coverage::{ground_coverage_limit, multicell_coverage, uav_coverage_limit};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_all, Estimate, SimOptions};
use crate::netmodel::NetworkConfig;
use crate::vse::volume_spectral_efficiency;

pub const MIN_VALIDATION_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricCheck {
    pub name: &'static str,
    /// Analytic value, or the error that prevented it.
    pub analytic: std::result::Result<f64, String>,
    pub mc: Estimate,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `p_cov` against the product of the marginal estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependenceCheck {
    pub p_cov: f64,
    pub product: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Finite-array coverage next to its massive-array limit. Coverage grows with
/// the array, so a finite value above its limit flags an inconsistency in
/// whatever reference numbers are being compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCheck {
    pub p_u: f64,
    pub p_u_limit: f64,
    pub p_g: f64,
    pub p_g_limit: f64,
    /// Both finite values are at most their limits (within 1e-3).
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub metrics: Vec<MetricCheck>,
    pub independence: IndependenceCheck,
    /// Informational; does not enter `pass`.
    pub limits: std::result::Result<LimitCheck, String>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance_floor: f64,
    pub opts: SimOptions,
    pub infinite_sinr_trials: usize,
    pub pass: bool,
}

/// Compare `p_u`, `p_g`, `p_cov` and `V_u` with Monte Carlo. Both sides use an
/// infinite UAV NLoS intercept. A probability passes when the gap is at most
/// `max(tolerance_floor, 3 × half-width)`; `V_u` uses `tolerance_floor`
/// relative to its analytic value as the floor.
pub fn run_validate(
    cfg: &NetworkConfig,
    trials: usize,
    seed: u64,
    tolerance_floor: f64,
    radius: Option<f64>,
) -> Result<ValidationReport> {
    if trials < MIN_VALIDATION_TRIALS {
        return Err(Error::domain(format!("validation needs at least {MIN_VALIDATION_TRIALS} trials")));
    }
    if !(tolerance_floor >= 0.0) {
        return Err(Error::domain("tolerance floor must be >= 0"));
    }
    let (c, _) = cfg.with_undetectable_uav_nlos();
    let opts = SimOptions::with_radius(&c, radius);
    let (cov, v) = estimate_all(&c, trials, &opts, seed)?;
    let analytic_cov = multicell_coverage(&c).map_err(|e| e.to_string());
    let analytic_vse = volume_spectral_efficiency(&c).map(|r| r.value).map_err(|e| e.to_string());
    let pick = |f: fn(&crate::coverage::CoverageResult) -> f64| analytic_cov.as_ref().map(f).map_err(|e| e.clone());
    let entries = [
        ("p_u", pick(|r| r.p_u), cov.p_u, false),
        ("p_g", pick(|r| r.p_g), cov.p_g, false),
        ("p_cov", pick(|r| r.p_cov), cov.p_cov, false),
        ("V_u", analytic_vse, v.vse, true),
    ];
    let metrics: Vec<MetricCheck> = entries
        .into_iter()
        .map(|(name, analytic, mc, relative)| match analytic {
            Ok(x) => {
                let floor = if relative { tolerance_floor * x.abs() } else { tolerance_floor };
                let tolerance = floor.max(3.0 * mc.half_width_95);
                let gap = (x - mc.mean).abs();
                MetricCheck { name, analytic: Ok(x), mc, gap, tolerance, pass: gap <= tolerance }
            }
            Err(e) => MetricCheck { name, analytic: Err(e), mc, gap: f64::NAN, tolerance: f64::NAN, pass: false },
        })
        .collect();
    let product = cov.p_u.mean * cov.p_g.mean;
    let combined = (cov.p_cov.half_width_95.powi(2)
        + (cov.p_g.mean * cov.p_u.half_width_95).powi(2)
        + (cov.p_u.mean * cov.p_g.half_width_95).powi(2))
    .sqrt();
    let gap = (cov.p_cov.mean - product).abs();
    let independence = IndependenceCheck {
        p_cov: cov.p_cov.mean,
        product,
        gap,
        tolerance: 3.0 * combined,
        pass: gap <= 3.0 * combined,
    };
    let limits = analytic_cov.as_ref().map_err(|e| e.clone()).and_then(|r| {
        let (lu, lg) = (uav_coverage_limit(&c), ground_coverage_limit(&c));
        let (p_u_limit, p_g_limit) = (lu.map_err(|e| e.to_string())?, lg.map_err(|e| e.to_string())?);
        let consistent = r.p_u <= p_u_limit + 1e-3 && r.p_g <= p_g_limit + 1e-3;
        Ok(LimitCheck { p_u: r.p_u, p_u_limit, p_g: r.p_g, p_g_limit, consistent })
    });
    let pass = independence.pass && metrics.iter().all(|m| m.pass);
    Ok(ValidationReport {
        metrics,
        independence,
        limits,
        trials,
        seed,
        tolerance_floor,
        opts,
        infinite_sinr_trials: v.infinite_sinr_trials,
        pass,
    })
}
