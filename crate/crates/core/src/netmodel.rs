//! Deterministic building blocks shared by the analytic and simulated paths:
//! LoS probability, the UAV height law, path loss, the sectored antenna
//! pattern and the parameter bundle describing a two-tier network.
//!
//! Lengths are in meters. Many helpers work with the squared ground distance
//! `r = ‖X‖²`, which is the natural coordinate of a planar Poisson process
//! (its image on the half line has constant intensity `πλ`).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Sigmoid LoS model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub c1: f64,
    pub c2: f64,
}

impl Environment {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        let env = Environment { c1, c2 };
        env.validate()?;
        Ok(env)
    }

    /// Dense urban constants used in the reference scenario.
    pub fn urban() -> Self {
        Environment { c1: 0.43, c2: 4.88 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::config("environment.c1 must be a positive number"));
        }
        if !(self.c2 > 0.0 && self.c2.is_finite()) {
            return Err(Error::config("environment.c2 must be a positive number"));
        }
        Ok(())
    }

    /// LoS probability for a height-to-ground-distance ratio, without
    /// argument checks. `ratio = +∞` (directly overhead) is allowed.
    #[inline]
    pub fn rho(&self, ratio: f64) -> f64 {
        let angle_deg = ratio.atan().to_degrees();
        1.0 / (1.0 + self.c2 * (self.c1 * (self.c2 - angle_deg)).exp())
    }
}

/// Height law `H = h_o ‖X‖^{-ν}` and the altitude cap used to normalise
/// volume metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavPlacement {
    pub h_o: f64,
    pub nu: f64,
    pub h_max: f64,
}

impl UavPlacement {
    pub fn validate(&self) -> Result<()> {
        if !(self.h_o >= 0.0 && self.h_o.is_finite()) {
            return Err(Error::config("placement.h_o must be finite and >= 0"));
        }
        if !self.nu.is_finite() {
            return Err(Error::config("placement.nu must be finite"));
        }
        if !(self.h_max > 0.0 && self.h_max.is_finite()) {
            return Err(Error::config("placement.h_max must be finite and > 0"));
        }
        Ok(())
    }

    /// Height-to-ground-distance ratio `h_o r^{-(ν+1)/2}` at squared ground
    /// distance `r`. Returns `+∞` at `r = 0` when the UAV sits overhead.
    #[inline]
    pub fn elevation_ratio(&self, r: f64) -> f64 {
        if self.h_o == 0.0 {
            return 0.0;
        }
        let e = -(self.nu + 1.0) / 2.0;
        if e == 0.0 {
            self.h_o
        } else {
            self.h_o * r.powf(e)
        }
    }

    /// Squared 3-D distance `r + h_o² r^{-ν}` at squared ground distance `r`.
    #[inline]
    pub fn distance_sq(&self, r: f64) -> f64 {
        if self.h_o == 0.0 {
            return r;
        }
        if self.nu == 0.0 {
            r + self.h_o * self.h_o
        } else {
            r + self.h_o * self.h_o * r.powf(-self.nu)
        }
    }
}

/// Radio parameters of one tier. Intercepts are linear; `psi_nlos` may be
/// `f64::INFINITY` to mark NLoS links as undetectable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierRadio {
    pub tx_power: f64,
    pub alpha: f64,
    pub psi_los: f64,
    pub psi_nlos: f64,
    pub n_antennas: u32,
}

impl TierRadio {
    pub fn validate(&self, tier: &str) -> Result<()> {
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return Err(Error::config(format!("{tier}.tx_power must be finite and > 0")));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::config(format!("{tier}.alpha must be finite and > 2")));
        }
        if !(self.psi_los > 0.0 && self.psi_los.is_finite()) {
            return Err(Error::config(format!("{tier}.psi_los must be finite and > 0")));
        }
        if self.psi_nlos.is_nan() || self.psi_nlos < self.psi_los {
            return Err(Error::config(format!("{tier}.psi_nlos must be >= {tier}.psi_los")));
        }
        if self.n_antennas == 0 {
            return Err(Error::config(format!("{tier}.n_antennas must be >= 1")));
        }
        Ok(())
    }

    pub fn nlos_detectable(&self) -> bool {
        self.psi_nlos.is_finite()
    }
}

/// Two-level sectored pattern of the UAV arrays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    pub theta0: f64,
    pub phi0: f64,
    pub delta_m: f64,
    pub delta_s: f64,
}

impl AntennaPattern {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0 * PI).contains(&self.theta0) {
            return Err(Error::config("pattern.theta0 must lie in [0, 2π]"));
        }
        if !(0.0..=PI).contains(&self.phi0) {
            return Err(Error::config("pattern.phi0 must lie in [0, π]"));
        }
        if !(self.delta_m > 0.0 && self.delta_m.is_finite()) {
            return Err(Error::config("pattern.delta_m must be finite and > 0"));
        }
        if !(self.delta_s >= 0.0 && self.delta_s <= self.delta_m) {
            return Err(Error::config("pattern.delta_s must lie in [0, delta_m]"));
        }
        Ok(())
    }

    /// Side-to-main lobe gain ratio.
    pub fn side_ratio(&self) -> f64 {
        self.delta_s / self.delta_m
    }
}

/// Complete parameter set of the two-tier network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub lambda_g: f64,
    pub lambda_u: f64,
    pub ground: TierRadio,
    pub uav: TierRadio,
    pub pattern: AntennaPattern,
    pub placement: UavPlacement,
    pub env: Environment,
    pub beta: f64,
    pub noise_uav: f64,
}

impl NetworkConfig {
    /// Reference scenario: UHF ground BSs plus 28 GHz UAVs at a common
    /// height of 40 m. The UAV NLoS intercept is the finite 100 dB value.
    pub fn reference() -> Self {
        NetworkConfig {
            lambda_g: 1e-6,
            lambda_u: 6e-5,
            ground: TierRadio {
                tx_power: 25.0,
                alpha: 4.0,
                psi_los: db_to_linear(37.2),
                psi_nlos: db_to_linear(38.7),
                n_antennas: 16,
            },
            uav: TierRadio {
                tx_power: 2.0,
                alpha: 2.5,
                psi_los: db_to_linear(61.4),
                psi_nlos: db_to_linear(100.0),
                n_antennas: 8,
            },
            pattern: AntennaPattern { theta0: 2.0 * PI / 3.0, phi0: PI / 3.0, delta_m: 1.0, delta_s: 0.1 },
            placement: UavPlacement { h_o: 40.0, nu: 0.0, h_max: 200.0 },
            env: Environment::urban(),
            beta: 1.0,
            noise_uav: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_g > 0.0 && self.lambda_g.is_finite()) {
            return Err(Error::config("lambda_g must be finite and > 0"));
        }
        if !(self.lambda_u > 0.0 && self.lambda_u.is_finite()) {
            return Err(Error::config("lambda_u must be finite and > 0"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config("beta must be finite and > 0"));
        }
        if !(self.noise_uav >= 0.0 && self.noise_uav.is_finite()) {
            return Err(Error::config("noise_uav must be finite and >= 0"));
        }
        self.ground.validate("ground")?;
        self.uav.validate("uav")?;
        self.pattern.validate()?;
        self.placement.validate()?;
        self.env.validate()
    }

    /// Copy with the UAV NLoS intercept set to infinity, which is what the
    /// analytic expressions assume. The flag reports whether anything changed.
    pub fn with_undetectable_uav_nlos(&self) -> (Self, bool) {
        let mut c = *self;
        let changed = c.uav.psi_nlos.is_finite();
        c.uav.psi_nlos = f64::INFINITY;
        (c, changed)
    }

    /// Noise term `ψ_{u,L} σ² / (P_u δ_m)` of the unit-gain
    /// interference-plus-noise to signal ratio.
    pub fn uav_noise_scale(&self) -> f64 {
        self.uav.psi_los * self.noise_uav / (self.uav.tx_power * self.pattern.delta_m)
    }
}

pub fn los_probability(env: &Environment, ratio: f64) -> Result<f64> {
    if ratio.is_nan() || ratio < 0.0 {
        return Err(Error::domain(format!("elevation ratio must be >= 0, got {ratio}")));
    }
    Ok(env.rho(ratio))
}

pub fn rho0(env: &Environment) -> f64 {
    env.rho(0.0)
}

pub fn uav_height(placement: &UavPlacement, ground_distance: f64) -> Result<f64> {
    if ground_distance.is_nan() || ground_distance < 0.0 {
        return Err(Error::domain("ground distance must be >= 0"));
    }
    if placement.nu == 0.0 {
        return Ok(placement.h_o);
    }
    if ground_distance == 0.0 {
        if placement.nu > 0.0 && placement.h_o > 0.0 {
            return Err(Error::domain("height law is singular at zero distance for nu > 0"));
        }
        return Ok(0.0);
    }
    Ok(placement.h_o * ground_distance.powf(-placement.nu))
}

pub fn path_loss(psi: f64, alpha: f64, distance: f64) -> Result<f64> {
    if distance.is_nan() || distance <= 0.0 {
        return Err(Error::domain(format!("distance must be > 0, got {distance}")));
    }
    if psi.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(psi * distance.powf(alpha))
}

pub fn main_lobe_probability(pattern: &AntennaPattern) -> f64 {
    pattern.theta0 * pattern.phi0 / (2.0 * PI * PI)
}

/// Ground intensity rescaled so that the ground tier behaves like a
/// unit-intercept homogeneous network.
pub fn effective_ground_intensity(cfg: &NetworkConfig) -> Result<f64> {
    let g = &cfg.ground;
    if !g.psi_nlos.is_finite() {
        return Err(Error::config("ground.psi_nlos must be finite"));
    }
    let p0 = rho0(&cfg.env);
    let e = -2.0 / g.alpha;
    Ok(cfg.lambda_g * (p0 * g.psi_los.powf(e) + (1.0 - p0) * g.psi_nlos.powf(e)))
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}
