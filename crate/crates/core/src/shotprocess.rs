//! Stochastic-geometry transforms of the UAV and ground tiers.
//!
//! Coordinates: `z`, `y` and `r` are squared ground distances (m²). For a
//! planar PPP of intensity `λ` the LoS UAVs form a Poisson process on the
//! half line with intensity `πλρ(r)`, so `ζ(z) = ∫_0^z ρ` is its mean
//! measure divided by `πλ`.
//!
//! The unit-gain interference(-plus-noise)-to-signal ratio of a tier is
//! `Z = ξ(serving) (I + σ²) / (P δ)`; coverage with a Gamma(N, N) serving
//! gain is `P[G ≥ βZ]`, so every coverage and rate metric is a functional of
//! the Laplace transform of `Z`. Those transforms are built here with fixed
//! quadrature rules so they stay analytic in the complex transform variable.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netmodel::{main_lobe_probability, AntennaPattern, NetworkConfig};
use crate::quad::{CumulativeInterpolant, DeRule};

/// Grid size of the ζ interpolant.
const ZETA_GRID: usize = 4096;
/// Mass of `Y_{u,1}` left beyond the ζ grid is about `e^{-ZETA_TAIL}`.
const ZETA_TAIL: f64 = 25.0;
/// Default step of the double-exponential rules.
pub const DEFAULT_STEP: f64 = 1.0 / 16.0;

/// Precomputed data for the UAV tier of one configuration.
#[derive(Debug, Clone)]
pub struct ShotContext {
    cfg: NetworkConfig,
    k: u32,
    zeta: Option<CumulativeInterpolant>,
    rho_const: Option<f64>,
    p_main: f64,
    side: f64,
    r_rule: DeRule,
    r_rule_fine: DeRule,
    step: f64,
}

impl ShotContext {
    pub fn new(cfg: &NetworkConfig, k: u32) -> Result<Self> {
        Self::with_step(cfg, k, DEFAULT_STEP)
    }

    /// Same as [`ShotContext::new`] with a custom double-exponential step,
    /// used to check discretisation error.
    pub fn with_step(cfg: &NetworkConfig, k: u32, step: f64) -> Result<Self> {
        cfg.validate()?;
        if cfg.uav.psi_nlos.is_finite() {
            return Err(Error::Unsupported(
                "the analytic UAV expressions assume undetectable NLoS links (uav.psi_nlos = inf); \
                 use the Monte Carlo path for a finite NLoS intercept"
                    .into(),
            ));
        }
        if k == 0 {
            return Err(Error::domain("incompleteness order K must be >= 1"));
        }
        let place = cfg.placement;
        let env = cfg.env;
        let (zeta, rho_const) = if place.nu == -1.0 || place.h_o == 0.0 {
            (None, Some(env.rho(place.elevation_ratio(1.0))))
        } else {
            let rho_min = env.rho(0.0);
            let z_max = ZETA_TAIL / (PI * cfg.lambda_u * rho_min);
            let lo = z_max * 1e-12;
            let n = ZETA_GRID - 1;
            let mut grid = Vec::with_capacity(ZETA_GRID);
            grid.push(0.0);
            for i in 0..n {
                grid.push(lo * (z_max / lo).powf(i as f64 / (n - 1) as f64));
            }
            let f = move |r: f64| env.rho(place.elevation_ratio(r));
            (Some(CumulativeInterpolant::on_grid(f, grid)?), None)
        };
        Ok(ShotContext {
            cfg: *cfg,
            k,
            zeta,
            rho_const,
            p_main: main_lobe_probability(&cfg.pattern),
            side: cfg.pattern.side_ratio(),
            r_rule: DeRule::exp_sinh_for_decay(step, cfg.uav.alpha / 2.0 - 1.0),
            r_rule_fine: DeRule::exp_sinh_for_decay(step / 2.0, cfg.uav.alpha / 2.0 - 1.0),
            step,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// LoS probability of a UAV at squared ground distance `r`.
    #[inline]
    pub fn rho_at(&self, r: f64) -> f64 {
        match self.rho_const {
            Some(c) => c,
            None => self.cfg.env.rho(self.cfg.placement.elevation_ratio(r)),
        }
    }

    /// Path-loss factor without intercept, `(r + H²)^{α_u/2}`.
    #[inline]
    pub fn dist_alpha(&self, r: f64) -> f64 {
        self.cfg.placement.distance_sq(r).powf(self.cfg.uav.alpha / 2.0)
    }

    fn zeta_value(&self, z: f64) -> f64 {
        match (self.rho_const, &self.zeta) {
            (Some(c), _) => c * z,
            (None, Some(interp)) => interp.eval(z),
            (None, None) => unreachable!("context has either a constant or an interpolant"),
        }
    }

    /// Squared distance at which `πλ_u ζ(z) = 1`; a natural scale for the
    /// serving-distance integrals.
    fn serving_scale(&self) -> f64 {
        let target = 1.0 / (PI * self.cfg.lambda_u);
        if let Some(c) = self.rho_const {
            return target / c;
        }
        let (mut lo, mut hi) = (0.0, target);
        while self.zeta_value(hi) < target {
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.zeta_value(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Sum over the r nodes of `∫_y^∞ ρ(r) g(D(r)) dr` with a complex `g`.
    fn interference_sum(&self, y: f64, scale: f64, mut g: impl FnMut(f64) -> Complex64) -> Complex64 {
        self.r_rule
            .integrate_from(y, scale, |r: f64| {
                let rho = self.rho_at(r);
                if rho == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                g(self.dist_alpha(r)) * rho
            })
            .value
    }

    /// Lobe-mixture kernel `p_m x/(D+x) + (1-p_m) ε x/(D+εx)`.
    #[inline]
    fn lobe_kernel(&self, x: Complex64, d: f64) -> Complex64 {
        if d.is_infinite() {
            return Complex64::new(0.0, 0.0);
        }
        let main = x / (x + d);
        if self.side == 0.0 {
            return main * self.p_main;
        }
        let ex = x * self.side;
        main * self.p_main + ex / (ex + d) * (1.0 - self.p_main)
    }

    /// `𝕴_u` at complex `x`; `scale` fixes the node placement so the result
    /// is analytic in `x`.
    pub fn frak_i_u_complex(&self, x: Complex64, y: f64, scale: f64) -> Complex64 {
        self.interference_sum(y, scale, |d| self.lobe_kernel(x, d))
    }
}

fn node_scale(y: f64) -> f64 {
    y.max(1.0)
}

pub fn zeta(ctx: &ShotContext, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    ctx.zeta_value(z)
}

/// Density of `Y_{u,K}`, the squared ground distance of the K-th nearest LoS
/// UAV.
pub fn pdf_y_uk(ctx: &ShotContext, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let pl = PI * ctx.cfg.lambda_u;
    let k = ctx.k as f64;
    let zt = ctx.zeta_value(z);
    let rho = ctx.rho_at(z);
    if rho == 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (2..ctx.k).map(|j| (j as f64).ln()).sum();
    let mut ln = k * pl.ln() - ln_fact + rho.ln() - pl * zt;
    if ctx.k > 1 {
        if zt <= 0.0 {
            return 0.0;
        }
        ln += (k - 1.0) * zt.ln();
    }
    ln.exp()
}

/// `𝕴_u(x, y) = ∫_y^∞ ρ(r) [p_m x/(D(r)+x) + (1-p_m) ε x/(D(r)+εx)] dr` with
/// `D(r) = (r + h_o² r^{-ν})^{α_u/2}`, `p_m` the main-lobe probability and
/// `ε = δ_s/δ_m`.
pub fn frak_i_u(ctx: &ShotContext, x: f64, y: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 || y.is_nan() || y < 0.0 {
        return Err(Error::domain("frak_i_u needs x >= 0 and y >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    let xc = Complex64::new(x, 0.0);
    let scale = node_scale(y);
    // Half-step rule; its error is far below the difference to the
    // default-step sum, which serves as a conservative bound.
    let s = ctx.r_rule_fine.integrate_from(y, scale, |r: f64| {
        let rho = ctx.rho_at(r);
        if rho == 0.0 {
            return 0.0;
        }
        ctx.lobe_kernel(xc, ctx.dist_alpha(r)).re * rho
    });
    let err = (s.value - s.coarse).abs();
    if !s.value.is_finite() || err > 1e-4 * s.value.abs() + 1e-300 {
        return Err(Error::Convergence { estimate: s.value, error: err });
    }
    Ok(s.value)
}

/// Shared rules for the ground interference integral.
struct GroundRules {
    tail: DeRule,
    unit: DeRule,
}

fn ground_rules(y: f64) -> GroundRules {
    GroundRules {
        tail: DeRule::exp_sinh_for_decay(DEFAULT_STEP, 1.0 / y - 1.0),
        unit: DeRule::tanh_sinh(DEFAULT_STEP, 3.5),
    }
}

fn frak_i_g_first(x: Complex64, y: f64, rules: &GroundRules) -> Complex64 {
    let a = 1.0 / y;
    rules.tail.integrate_from(1.0, 1.0, |u: f64| x / (x + u.powf(a))).value
}

fn frak_i_g_second(x: Complex64, y: f64, rules: &GroundRules) -> Complex64 {
    let a = 1.0 / y;
    let whole = x.powf(y) * (PI * y / (PI * y).sin());
    let head = rules.unit.integrate_between(0.0, 1.0, |u: f64, _, _| x / (x + u.powf(a))).value;
    whole - head
}

fn frak_i_g_with(x: Complex64, y: f64, rules: &GroundRules) -> Complex64 {
    if x.norm() <= 1.0 {
        frak_i_g_first(x, y, rules)
    } else {
        frak_i_g_second(x, y, rules)
    }
}

/// `𝕴_g(x, y) = ∫_{x^{-y}}^∞ x^y/(1 + t^{1/y}) dt = ∫_1^∞ x/(x + u^{1/y}) du`.
pub fn frak_i_g(x: f64, y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain(format!("frak_i_g needs y in (0, 1), got {y}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("frak_i_g needs x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let rules = ground_rules(y);
    let xc = Complex64::new(x, 0.0);
    let first = frak_i_g_first(xc, y, &rules).re;
    // The subtracted form cannot resolve its head integrand for tiny x, so the
    // cross-check only runs where both forms are accurate.
    if cfg!(debug_assertions) && (1e-3..=1e3).contains(&x) {
        let second = frak_i_g_second(xc, y, &rules).re;
        debug_assert!(
            (first - second).abs() <= 1e-8 * first.abs().max(1e-300),
            "the two forms of the ground integral disagree: {first} vs {second}"
        );
    }
    Ok(first)
}

/// Both forms of `𝕴_g`, for cross-checking.
pub fn frak_i_g_forms(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain(format!("frak_i_g needs y in (0, 1), got {y}")));
    }
    let rules = ground_rules(y);
    let xc = Complex64::new(x, 0.0);
    Ok((frak_i_g_first(xc, y, &rules).re, frak_i_g_second(xc, y, &rules).re))
}

/// Laplace transform of the interference beyond the K-th LoS UAV given
/// `Y_{u,K} = y_uk`.
pub fn laplace_iuk_conditional(ctx: &ShotContext, s: f64, y_uk: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::domain("transform variable must be >= 0"));
    }
    let c = &ctx.cfg;
    let x = s * c.pattern.delta_m * c.uav.tx_power / c.uav.psi_los;
    let i = frak_i_u(ctx, x, y_uk)?;
    Ok((-PI * c.lambda_u * i).exp())
}

/// Laplace transform of the ground interference beyond the K-th BS given the
/// effective squared distance `y_gk`.
pub fn laplace_igk_conditional(cfg: &NetworkConfig, s: f64, y_gk: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::domain("transform variable must be >= 0"));
    }
    if !(y_gk > 0.0) {
        return Err(Error::domain("y_gk must be > 0"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let lg = crate::netmodel::effective_ground_intensity(cfg)?;
    let a = cfg.ground.alpha;
    let x = s * cfg.ground.tx_power / y_gk.powf(a / 2.0);
    let i = frak_i_g(x, 2.0 / a)?;
    Ok((-PI * lg * y_gk * i).exp())
}

/// `(1 + p_m ∫_1^∞ dz/(1 + z^{α_u/2}))^{-K}`, exact `(1 + ϑ₀φ₀/(8π))^{-K}`
/// at `α_u = 4`.
pub fn scaled_laplace_uav_closed(k: u32, alpha_u: f64, pattern: &AntennaPattern) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let inner = if alpha_u == 4.0 {
        pattern.theta0 * pattern.phi0 / (8.0 * PI)
    } else {
        let rule = DeRule::exp_sinh_for_decay(DEFAULT_STEP, alpha_u / 2.0 - 1.0);
        let j = rule.integrate_from(1.0, 1.0, |z: f64| 1.0 / (1.0 + z.powf(alpha_u / 2.0))).value;
        main_lobe_probability(pattern) * j
    };
    (1.0 + inner).powi(-(k as i32))
}

/// `[1 + 𝕴_g(1, 2/α_g)]^{-K}`.
pub fn scaled_laplace_ground(k: u32, alpha_g: f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let i = frak_i_g(1.0, 2.0 / alpha_g)?;
    Ok((1.0 + i).powi(-(k as i32)))
}

/// Laplace transform of the unit-gain ISR of the ground tier,
/// `1/(1 + 𝕴_g(s, 2/α_g))`.
#[derive(Debug, Clone)]
pub struct GroundIsrTransform {
    y: f64,
    rules_tail: DeRule,
    rules_unit: DeRule,
}

impl GroundIsrTransform {
    pub fn new(alpha_g: f64) -> Result<Self> {
        if !(alpha_g > 2.0 && alpha_g.is_finite()) {
            return Err(Error::domain("alpha_g must be > 2"));
        }
        let y = 2.0 / alpha_g;
        let r = ground_rules(y);
        Ok(GroundIsrTransform { y, rules_tail: r.tail, rules_unit: r.unit })
    }

    pub fn frak_i_g(&self, x: Complex64) -> Complex64 {
        let rules = GroundRules { tail: self.rules_tail.clone(), unit: self.rules_unit.clone() };
        frak_i_g_with(x, self.y, &rules)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        if s == Complex64::new(0.0, 0.0) {
            return Complex64::new(1.0, 0.0);
        }
        let a = 1.0 / self.y;
        let i = if s.norm() <= 1.0 {
            self.rules_tail.integrate_from(1.0, 1.0, |u: f64| s / (s + u.powf(a))).value
        } else {
            let whole = s.powf(self.y) * (PI * self.y / (PI * self.y).sin());
            let head = self.rules_unit.integrate_between(0.0, 1.0, |u: f64, _, _| s / (s + u.powf(a))).value;
            whole - head
        };
        1.0 / (1.0 + i)
    }
}

/// Node of the serving-distance integral.
#[derive(Debug, Clone)]
struct ServingNode {
    weight: f64,
    d: f64,
    noise: f64,
    r_d: Vec<f64>,
    r_w: Vec<f64>,
}

/// Laplace transform `L_Z(s)` of the unit-gain UAV ISR:
/// `E_Y[exp(-πλ_u 𝕴_u(s D(Y), Y) - s a D(Y))]` with `Y = Y_{u,1}` and
/// `a = ψ_{u,L} σ²/(P_u δ_m)`.
#[derive(Debug, Clone)]
pub struct UavIsrTransform {
    kind: IsrKind,
}

#[derive(Debug, Clone)]
enum IsrKind {
    General {
        nodes: Vec<ServingNode>,
        pi_lambda: f64,
        p_main: f64,
        side: f64,
    },
    /// Fixed elevation angle without noise: `1/(1 + J(s))`, independent of
    /// `h_o` and `λ_u`.
    Elevation {
        w: Vec<f64>,
        wt: Vec<f64>,
        p_main: f64,
        side: f64,
    },
}

impl UavIsrTransform {
    pub fn new(ctx: &ShotContext) -> Result<Self> {
        let c = ctx.config();
        if c.placement.nu == -1.0 && c.noise_uav == 0.0 {
            Self::elevation(ctx)
        } else {
            Self::general(ctx)
        }
    }

    /// True when the closed fixed-angle form is in use.
    pub fn is_fixed_angle(&self) -> bool {
        matches!(self.kind, IsrKind::Elevation { .. })
    }

    /// The general construction, also used for the fixed-angle model when a
    /// cross-check is wanted.
    pub fn general(ctx: &ShotContext) -> Result<Self> {
        let c = ctx.config();
        let pl = PI * c.lambda_u;
        let noise_scale = c.uav_noise_scale();
        let lz = ctx.serving_scale();
        let z_rule = DeRule::exp_sinh(ctx.step, -4.5, 4.5);
        let mut nodes = Vec::with_capacity(z_rule.len());
        for k in 0..z_rule.len() {
            let z = lz * z_rule.x[k];
            let dens = pl * ctx.rho_at(z) * (-pl * ctx.zeta_value(z)).exp();
            let weight = lz * z_rule.w[k] * dens;
            if !(weight > 1e-18) {
                continue;
            }
            let scale = node_scale(z);
            let mut r_d = Vec::with_capacity(ctx.r_rule.len());
            let mut r_w = Vec::with_capacity(ctx.r_rule.len());
            for j in 0..ctx.r_rule.len() {
                let r = z + scale * ctx.r_rule.x[j];
                let rho = ctx.rho_at(r);
                let d = ctx.dist_alpha(r);
                let w = rho * scale * ctx.r_rule.w[j];
                if w == 0.0 || d.is_infinite() {
                    continue;
                }
                r_d.push(d);
                r_w.push(w);
            }
            let d = ctx.dist_alpha(z);
            nodes.push(ServingNode { weight, d, noise: noise_scale * d, r_d, r_w });
        }
        if nodes.is_empty() {
            return Err(Error::domain("serving-distance integral has no mass"));
        }
        Ok(UavIsrTransform { kind: IsrKind::General { nodes, pi_lambda: pl, p_main: ctx.p_main, side: ctx.side } })
    }

    fn elevation(ctx: &ShotContext) -> Result<Self> {
        let a = ctx.config().uav.alpha / 2.0;
        let rule = DeRule::exp_sinh_for_decay(ctx.step, a - 1.0);
        let w: Vec<f64> = rule.x.iter().map(|&x| (1.0 + x).powf(a)).collect();
        Ok(UavIsrTransform { kind: IsrKind::Elevation { w, wt: rule.w.clone(), p_main: ctx.p_main, side: ctx.side } })
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        match &self.kind {
            IsrKind::General { nodes, pi_lambda, p_main, side } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in nodes {
                    let x = s * n.d;
                    let ex = x * *side;
                    let mut i = Complex64::new(0.0, 0.0);
                    if *side == 0.0 {
                        for (d, w) in n.r_d.iter().zip(&n.r_w) {
                            i += x / (x + *d) * *w;
                        }
                        i *= *p_main;
                    } else {
                        let mut im = Complex64::new(0.0, 0.0);
                        let mut is = Complex64::new(0.0, 0.0);
                        for (d, w) in n.r_d.iter().zip(&n.r_w) {
                            im += x / (x + *d) * *w;
                            is += ex / (ex + *d) * *w;
                        }
                        i = im * *p_main + is * (1.0 - *p_main);
                    }
                    acc += (-(i * *pi_lambda) - s * n.noise).exp() * n.weight;
                }
                acc
            }
            IsrKind::Elevation { w, wt, p_main, side } => {
                let mut j = Complex64::new(0.0, 0.0);
                for (wa, q) in w.iter().zip(wt) {
                    let main = s / (s + *wa);
                    let t = if *side == 0.0 {
                        main * *p_main
                    } else {
                        let es = s * *side;
                        main * *p_main + es / (es + *wa) * (1.0 - *p_main)
                    };
                    j += t * *q;
                }
                1.0 / (1.0 + j)
            }
        }
    }

    pub fn eval_real(&self, s: f64) -> f64 {
        self.eval(Complex64::new(s, 0.0)).re
    }
}
