//! Monte Carlo oracle: realize the two-tier network around a typical user at
//! the origin, associate by minimum path loss and sample both SINRs.
//!
//! Trials draw from ChaCha8 with key `seed` and stream `trial`, so each trial
//! is reproducible on its own and the thread count never changes results.
//! Within a trial, each squared-distance bin of each tier reads a fixed slice
//! of the keystream; a wider window therefore contains the same realization
//! plus the nodes of the extra annulus.
//!
//! When the UAV NLoS intercept is infinite, NLoS UAVs neither serve nor
//! interfere. The sampler then draws only the LoS UAVs, thinning a Poisson
//! process in squared-distance coordinates; this is the same point process
//! as marking every UAV and discarding the NLoS ones, at a fraction of the
//! cost.
//!
//! Interference from outside the window is added as its mean. At mmWave
//! path-loss exponents the truncated interference decays only like
//! `R^{1 - α_u/2}`, while its variance decays like `R^{2 - α_u}`, so the mean
//! removes the leading truncation bias.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};

use crate::error::{Error, Result};
use crate::netmodel::{main_lobe_probability, NetworkConfig};
use crate::quad::DeRule;

pub const MIN_TRIALS: usize = 100;

/// Sample mean with a normal 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, half_width_95: f64::NAN, trials: 0 };
        }
        let mean = pairwise_sum(xs) / n as f64;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        Estimate { mean, half_width_95: 1.96 * (var / n as f64).sqrt(), trials: n }
    }

    pub fn scaled(self, c: f64) -> Self {
        Estimate { mean: self.mean * c, half_width_95: self.half_width_95 * c.abs(), ..self }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width_95
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavNode {
    pub position: [f64; 2],
    pub height: f64,
    pub los: bool,
    pub main_lobe: bool,
    /// Fading times lobe gain.
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundNode {
    pub position: [f64; 2],
    pub los: bool,
    pub gain: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Realization {
    pub uavs: Vec<UavNode>,
    pub ground_bs: Vec<GroundNode>,
    pub serving_uav: Option<usize>,
    pub serving_gbs: Option<usize>,
    /// Mean interference power from UAVs outside the window.
    pub tail_uav: f64,
    /// Same for ground BSs, at unit transmit power.
    pub tail_ground: f64,
}

/// Simulation window and serving-gain model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub radius_uav: f64,
    pub radius_ground: f64,
    /// Serving gains fixed at their means (the massive-array limit).
    pub deterministic_serving_gain: bool,
    /// Add the mean interference from outside the window.
    pub tail_correction: bool,
}

impl SimOptions {
    pub fn for_config(cfg: &NetworkConfig) -> Self {
        let (ru, rg) = default_radii(cfg);
        SimOptions { radius_uav: ru, radius_ground: rg, deterministic_serving_gain: false, tail_correction: true }
    }

    pub fn with_radius(cfg: &NetworkConfig, radius: Option<f64>) -> Self {
        let mut o = SimOptions::for_config(cfg);
        if let Some(r) = radius {
            o.radius_uav = r;
            o.radius_ground = r;
        }
        o
    }

    fn validate(&self) -> Result<()> {
        for r in [self.radius_uav, self.radius_ground] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::domain(format!("simulation radius must be finite and > 0, got {r}")));
            }
        }
        Ok(())
    }
}

/// Default window radii `(uav, ground)` in meters: ten mean nearest-neighbour
/// distances and at least 5 km. When many UAVs are LoS (flat or rising
/// heights) the UAV window shrinks towards 2.5 km to keep the expected LoS
/// count near 2000; the tail term keeps that unbiased.
pub fn default_radii(cfg: &NetworkConfig) -> (f64, f64) {
    let span = |lambda: f64| (10.0 / (PI * lambda).sqrt()).max(5000.0);
    let mut ru = span(cfg.lambda_u);
    let floor = (10.0 / (PI * cfg.lambda_u).sqrt()).max(2500.0);
    while ru * 0.9 >= floor && expected_uavs(cfg, ru) > UAV_BUDGET {
        ru *= 0.9;
    }
    (ru, span(cfg.lambda_g))
}

const UAV_BUDGET: f64 = 2000.0;

/// Mean interference power `(uav, ground)` received from nodes outside the
/// windows of `opts`; UAV power includes `P_u`, ground power is per unit
/// transmit power.
pub fn tail_interference(cfg: &NetworkConfig, opts: &SimOptions) -> Result<(f64, f64)> {
    let p_main = main_lobe_probability(&cfg.pattern);
    let mean_gain = p_main * cfg.pattern.delta_m + (1.0 - p_main) * cfg.pattern.delta_s;
    let (u, g) = (&cfg.uav, &cfg.ground);
    let r2 = opts.radius_uav * opts.radius_uav;
    let inv_nlos = if u.psi_nlos.is_finite() { 1.0 / u.psi_nlos } else { 0.0 };
    let per_r2 = |t: f64| {
        let r = r2 * t;
        let rho = uav_los_prob(cfg, r);
        let h = height_at(cfg, r);
        (rho / u.psi_los + (1.0 - rho) * inv_nlos) * (r + h * h).powf(-u.alpha / 2.0)
    };
    let edge = per_r2(1.0);
    let tail_u = if edge > 0.0 {
        // far-field decay exponent of per_r2, minus one
        let decay = u.alpha / 2.0 * cfg.placement.nu.min(-1.0).abs() - 1.0;
        let sum = DeRule::exp_sinh_for_decay(1.0 / 16.0, decay).integrate_from(1.0, 1.0, |t| per_r2(t) / edge);
        let err = (sum.value - sum.coarse).abs();
        if !(err <= 1e-6 * sum.value) {
            return Err(Error::Convergence { estimate: sum.value, error: err });
        }
        let shape = sum.value;
        PI * cfg.lambda_u * u.tx_power * mean_gain * r2 * edge * shape
    } else {
        0.0
    };
    // ∫_{R²}^∞ r^{-α/2} dr in closed form
    let p0 = cfg.env.rho(0.0);
    let rg2 = opts.radius_ground * opts.radius_ground;
    let mean_inv_psi = p0 / g.psi_los + (1.0 - p0) / g.psi_nlos;
    let tail_g = PI * cfg.lambda_g * mean_inv_psi * rg2.powf(1.0 - g.alpha / 2.0) / (g.alpha / 2.0 - 1.0);
    Ok((tail_u, tail_g))
}

/// Mean number of UAVs the sampler draws within `radius`: all of them with a
/// finite NLoS intercept, the LoS ones otherwise.
pub fn expected_uavs(cfg: &NetworkConfig, radius: f64) -> f64 {
    if cfg.uav.psi_nlos.is_finite() {
        return PI * cfg.lambda_u * radius * radius;
    }
    let mut total = 0.0;
    for_each_bin(radius * radius, |a, b| {
        // midpoint is enough for a budget
        total += PI * cfg.lambda_u * uav_los_prob(cfg, 0.5 * (a + b)) * (b - a);
    });
    total
}

/// Bins `[0, 1], [1, 1.25], ...` of squared distance up to `r2_max`.
fn for_each_bin<F: FnMut(f64, f64)>(r2_max: f64, mut f: F) {
    let mut a = 0.0;
    let mut b = r2_max.min(1.0);
    while a < r2_max {
        f(a, b);
        a = b;
        b = (b * 1.25).min(r2_max);
    }
}

pub fn sample_ppp_disc<R: Rng + ?Sized>(intensity: f64, radius: f64, rng: &mut R) -> Result<Vec<[f64; 2]>> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::domain("intensity must be finite and >= 0"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain("radius must be finite and > 0"));
    }
    let n = poisson(intensity * PI * radius * radius, rng);
    Ok((0..n).map(|_| uniform_in_annulus(0.0, radius * radius, rng)).collect())
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

/// Uniform point with squared radius in `[a, b]`.
fn uniform_in_annulus<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> [f64; 2] {
    let r2 = a + (b - a) * rng.random::<f64>();
    point_at(r2, rng)
}

fn point_at<R: Rng + ?Sized>(r2: f64, rng: &mut R) -> [f64; 2] {
    let r = r2.sqrt();
    let t = 2.0 * PI * rng.random::<f64>();
    [r * t.cos(), r * t.sin()]
}

fn norm_sq(p: [f64; 2]) -> f64 {
    p[0] * p[0] + p[1] * p[1]
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Unit-mean Gamma(N, 1/N).
fn gamma_unit<R: Rng + ?Sized>(n: u32, rng: &mut R) -> f64 {
    if n == 1 {
        return exp1(rng);
    }
    Gamma::new(n as f64, 1.0 / n as f64).expect("valid gamma parameters").sample(rng)
}

fn uav_path_loss(cfg: &NetworkConfig, u: &UavNode) -> f64 {
    let psi = if u.los { cfg.uav.psi_los } else { cfg.uav.psi_nlos };
    if psi.is_infinite() {
        return f64::INFINITY;
    }
    psi * (norm_sq(u.position) + u.height * u.height).powf(cfg.uav.alpha / 2.0)
}

fn ground_path_loss(cfg: &NetworkConfig, g: &GroundNode) -> f64 {
    let psi = if g.los { cfg.ground.psi_los } else { cfg.ground.psi_nlos };
    psi * norm_sq(g.position).powf(cfg.ground.alpha / 2.0)
}

fn height_at(cfg: &NetworkConfig, r2: f64) -> f64 {
    let p = &cfg.placement;
    if p.nu == 0.0 {
        p.h_o
    } else if r2 == 0.0 {
        0.0
    } else {
        p.h_o * r2.powf(-p.nu / 2.0)
    }
}

fn uav_los_prob(cfg: &NetworkConfig, r2: f64) -> f64 {
    cfg.env.rho(cfg.placement.elevation_ratio(r2))
}

fn interferer_lobe<R: Rng + ?Sized>(cfg: &NetworkConfig, p_main: f64, rng: &mut R) -> (bool, f64) {
    let main = rng.random::<f64>() < p_main;
    let delta = if main { cfg.pattern.delta_m } else { cfg.pattern.delta_s };
    (main, delta * exp1(rng))
}

/// Squared-distance bins `[0, 1], [1, 1.25], ...` in m², each passed whole
/// with its index, until one reaches past `r2_max`. The bins do not depend on
/// the window, so nested windows share their inner bins.
fn for_each_full_bin<F: FnMut(u128, f64, f64)>(r2_max: f64, mut f: F) {
    let (mut k, mut a, mut b) = (0u128, 0.0, 1.0);
    while a < r2_max {
        f(k, a, b);
        k += 1;
        a = b;
        b *= 1.25;
    }
}

/// Random streams of one trial. Every bin of each tier and the serving gains
/// read their own slice of the trial's ChaCha8 keystream, so growing the
/// window adds nodes without moving any existing one.
#[derive(Clone)]
struct TrialStreams {
    base: ChaCha8Rng,
}

/// Keystream words per slice; far more than any bin consumes.
const SLICE_SHIFT: u32 = 36;

impl TrialStreams {
    fn new(seed: u64, trial: u64) -> Self {
        TrialStreams { base: trial_rng(seed, trial) }
    }

    fn slice(&self, index: u128) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_word_pos(index << SLICE_SHIFT);
        rng
    }

    fn serving(&self) -> ChaCha8Rng {
        self.slice(0)
    }

    fn uav_bin(&self, k: u128) -> ChaCha8Rng {
        self.slice(1 + 2 * k)
    }

    fn ground_bin(&self, k: u128) -> ChaCha8Rng {
        self.slice(2 + 2 * k)
    }
}

/// Positions and LoS marks of the UAVs. With an infinite NLoS intercept only
/// LoS UAVs are produced.
fn sample_uavs(cfg: &NetworkConfig, radius: f64, streams: &TrialStreams) -> Vec<UavNode> {
    let p_main = main_lobe_probability(&cfg.pattern);
    let los_only = !cfg.uav.psi_nlos.is_finite();
    let density = PI * cfg.lambda_u;
    let r2_max = radius * radius;
    let mut out = Vec::new();
    for_each_full_bin(r2_max, |k, a, b| {
        let mut rng = streams.uav_bin(k);
        // ρ is monotone in r² for fixed ν, so each bin's bound is an endpoint.
        let bound = if los_only { uav_los_prob(cfg, a).max(uav_los_prob(cfg, b)) } else { 1.0 };
        let n = poisson(density * bound * (b - a), &mut rng);
        for _ in 0..n {
            // every draw happens whether or not the point is kept
            let r2 = a + (b - a) * rng.random::<f64>();
            let mark = rng.random::<f64>();
            let (main_lobe, gain) = interferer_lobe(cfg, p_main, &mut rng);
            let position = point_at(r2, &mut rng);
            let p = uav_los_prob(cfg, r2);
            let los = if los_only { mark * bound < p } else { mark < p };
            if r2 > r2_max || (los_only && !los) {
                continue;
            }
            out.push(UavNode { position, height: height_at(cfg, r2), los, main_lobe, gain });
        }
    });
    out
}

fn sample_ground(cfg: &NetworkConfig, radius: f64, streams: &TrialStreams) -> Vec<GroundNode> {
    let p0 = cfg.env.rho(0.0);
    let density = PI * cfg.lambda_g;
    let r2_max = radius * radius;
    let mut out = Vec::new();
    for_each_full_bin(r2_max, |k, a, b| {
        let mut rng = streams.ground_bin(k);
        let n = poisson(density * (b - a), &mut rng);
        for _ in 0..n {
            let position = uniform_in_annulus(a, b, &mut rng);
            let los = rng.random::<f64>() < p0;
            let gain = exp1(&mut rng);
            if norm_sq(position) <= r2_max {
                out.push(GroundNode { position, los, gain });
            }
        }
    });
    out
}

/// Minimum path-loss association in each tier.
pub fn associate(realization: &Realization, cfg: &NetworkConfig) -> (Option<usize>, Option<usize>) {
    let argmin = |losses: &mut dyn Iterator<Item = f64>| {
        let mut best: Option<(usize, f64)> = None;
        for (i, l) in losses.enumerate() {
            if l.is_finite() && best.is_none_or(|b| l < b.1) {
                best = Some((i, l));
            }
        }
        best.map(|b| b.0)
    };
    let u = argmin(&mut realization.uavs.iter().map(|u| uav_path_loss(cfg, u)));
    let g = argmin(&mut realization.ground_bs.iter().map(|g| ground_path_loss(cfg, g)));
    (u, g)
}

/// Draw the realization of trial `trial`, associate the user and give the
/// serving nodes their beamforming gains.
/// `tails` is the output of [`tail_interference`], or zeros.
pub fn realize_network(
    cfg: &NetworkConfig,
    opts: &SimOptions,
    tails: (f64, f64),
    seed: u64,
    trial: u64,
) -> Realization {
    let streams = TrialStreams::new(seed, trial);
    let mut r = Realization {
        uavs: sample_uavs(cfg, opts.radius_uav, &streams),
        ground_bs: sample_ground(cfg, opts.radius_ground, &streams),
        serving_uav: None,
        serving_gbs: None,
        tail_uav: tails.0,
        tail_ground: tails.1,
    };
    let (u, g) = associate(&r, cfg);
    r.serving_uav = u;
    r.serving_gbs = g;
    let (fade_u, fade_g) = if opts.deterministic_serving_gain {
        (1.0, 1.0)
    } else {
        let mut rng = streams.serving();
        let fu = gamma_unit(cfg.uav.n_antennas, &mut rng);
        (fu, gamma_unit(cfg.ground.n_antennas, &mut rng))
    };
    if let Some(i) = u {
        r.uavs[i].main_lobe = true;
        r.uavs[i].gain = cfg.pattern.delta_m * fade_u;
    }
    if let Some(i) = g {
        r.ground_bs[i].gain = fade_g;
    }
    r
}

/// `(γ_u, γ_g)` of an associated realization; `None` when the tier has no
/// serving node and `+∞` when there is neither interference nor noise.
pub fn sample_sinrs(realization: &Realization, cfg: &NetworkConfig) -> (Option<f64>, Option<f64>) {
    let gamma_u = realization.serving_uav.map(|s| {
        let p = cfg.uav.tx_power;
        let mut interference = realization.tail_uav;
        for (i, u) in realization.uavs.iter().enumerate() {
            if i != s {
                let l = uav_path_loss(cfg, u);
                if l.is_finite() {
                    interference += p * u.gain / l;
                }
            }
        }
        let su = &realization.uavs[s];
        ratio(p * su.gain / uav_path_loss(cfg, su), interference + cfg.noise_uav)
    });
    let gamma_g = realization.serving_gbs.map(|s| {
        let mut interference = realization.tail_ground;
        for (i, g) in realization.ground_bs.iter().enumerate() {
            if i != s {
                interference += g.gain / ground_path_loss(cfg, g);
            }
        }
        let sg = &realization.ground_bs[s];
        ratio(sg.gain / ground_path_loss(cfg, sg), interference)
    });
    (gamma_u, gamma_g)
}

fn ratio(signal: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        f64::INFINITY
    } else {
        signal / denominator
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// SINR pair of trial `trial`.
pub fn simulate_trial(
    cfg: &NetworkConfig,
    opts: &SimOptions,
    tails: (f64, f64),
    seed: u64,
    trial: u64,
) -> (Option<f64>, Option<f64>) {
    let r = realize_network(cfg, opts, tails, seed, trial);
    sample_sinrs(&r, cfg)
}

fn run_trials(
    cfg: &NetworkConfig,
    opts: &SimOptions,
    trials: usize,
    seed: u64,
) -> Result<Vec<(Option<f64>, Option<f64>)>> {
    if trials < MIN_TRIALS {
        return Err(Error::domain(format!("at least {MIN_TRIALS} trials are required, got {trials}")));
    }
    cfg.validate()?;
    opts.validate()?;
    let tails = if opts.tail_correction { tail_interference(cfg, opts)? } else { (0.0, 0.0) };
    let one = |t: usize| simulate_trial(cfg, opts, tails, seed, t as u64);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..trials).into_par_iter().map(one).collect())
    }
    #[cfg(not(feature = "parallel"))]
    Ok((0..trials).map(one).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimate {
    pub p_u: Estimate,
    pub p_g: Estimate,
    /// Joint indicator `1{γ_u ≥ β} 1{γ_g ≥ β}`, not a product of marginals.
    pub p_cov: Estimate,
    /// Trials in which some tier had no serving node.
    pub empty_tier_trials: usize,
}

pub fn estimate_coverage(cfg: &NetworkConfig, trials: usize, opts: &SimOptions, seed: u64) -> Result<CoverageEstimate> {
    let out = run_trials(cfg, opts, trials, seed)?;
    Ok(coverage_of(cfg, &out))
}

type Outcome = (Option<f64>, Option<f64>);

fn coverage_of(cfg: &NetworkConfig, out: &[Outcome]) -> CoverageEstimate {
    let hit = |g: Option<f64>| g.is_some_and(|g| g >= cfg.beta);
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let pu: Vec<f64> = out.iter().map(|o| ind(hit(o.0))).collect();
    let pg: Vec<f64> = out.iter().map(|o| ind(hit(o.1))).collect();
    let pc: Vec<f64> = out.iter().map(|o| ind(hit(o.0) && hit(o.1))).collect();
    CoverageEstimate {
        p_u: Estimate::from_samples(&pu),
        p_g: Estimate::from_samples(&pg),
        p_cov: Estimate::from_samples(&pc),
        empty_tier_trials: out.iter().filter(|o| o.0.is_none() || o.1.is_none()).count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VseEstimate {
    /// nats/sec/Hz/m³
    pub vse: Estimate,
    /// Trials dropped because `γ_u` was infinite.
    pub infinite_sinr_trials: usize,
}

pub fn estimate_vse(cfg: &NetworkConfig, trials: usize, opts: &SimOptions, seed: u64) -> Result<VseEstimate> {
    let out = run_trials(cfg, opts, trials, seed)?;
    vse_of(cfg, &out)
}

fn vse_of(cfg: &NetworkConfig, out: &[Outcome]) -> Result<VseEstimate> {
    let mut infinite = 0;
    let mut rate = Vec::with_capacity(out.len());
    for &(gu, gg) in out {
        match gu {
            Some(g) if g.is_infinite() => infinite += 1,
            _ => {
                let covered = gg.is_some_and(|g| g >= cfg.beta);
                rate.push(gu.filter(|_| covered).map_or(0.0, |g| g.ln_1p()));
            }
        }
    }
    if rate.is_empty() {
        return Err(Error::domain("every trial had an infinite UAV SINR"));
    }
    let vse = Estimate::from_samples(&rate).scaled(cfg.lambda_u / cfg.placement.h_max);
    Ok(VseEstimate { vse, infinite_sinr_trials: infinite })
}

/// Coverage and VSE estimates from one set of trials.
pub fn estimate_all(
    cfg: &NetworkConfig,
    trials: usize,
    opts: &SimOptions,
    seed: u64,
) -> Result<(CoverageEstimate, VseEstimate)> {
    let out = run_trials(cfg, opts, trials, seed)?;
    Ok((coverage_of(cfg, &out), vse_of(cfg, &out)?))
}
