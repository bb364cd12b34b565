//! TOML configuration files.
//!
//! Keys mirror the [`NetworkConfig`] fields: `lambda_g`, `lambda_u`, `beta`
//! and `noise_uav` at the top level, the rest under `[ground]`, `[uav]`,
//! `[pattern]`, `[placement]` and `[env]`. A key may carry a unit suffix
//! instead: `_db` (linear ratio), `_dbm` (watts) or `_deg` (radians). The
//! string `"inf"` stands for an infinite value.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::netmodel::{db_to_linear, AntennaPattern, Environment, NetworkConfig, TierRadio, UavPlacement};

/// The bundled reference configuration.
pub const TABLE1_TOML: &str = include_str!("../configs/table1.toml");

const FIELDS: &[&str] = &[
    "lambda_g",
    "lambda_u",
    "beta",
    "noise_uav",
    "ground.tx_power",
    "ground.alpha",
    "ground.psi_los",
    "ground.psi_nlos",
    "ground.n_antennas",
    "uav.tx_power",
    "uav.alpha",
    "uav.psi_los",
    "uav.psi_nlos",
    "uav.n_antennas",
    "pattern.theta0",
    "pattern.phi0",
    "pattern.delta_m",
    "pattern.delta_s",
    "placement.h_o",
    "placement.nu",
    "placement.h_max",
    "env.c1",
    "env.c2",
];

const SUFFIXES: &[(&str, fn(f64) -> f64)] = &[("_db", db_to_linear), ("_dbm", dbm_to_watts), ("_deg", f64::to_radians)];

fn dbm_to_watts(x: f64) -> f64 {
    db_to_linear(x - 30.0)
}

/// Key/value pairs of a parsed document, before unit conversion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, f64>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config(e.to_string()))?;
        let mut raw = RawConfig::default();
        for (key, value) in &table {
            match value {
                toml::Value::Table(section) => {
                    for (k, v) in section {
                        raw.insert_value(&format!("{key}.{k}"), v)?;
                    }
                }
                v => raw.insert_value(key, v)?,
            }
        }
        Ok(raw)
    }

    fn insert_value(&mut self, key: &str, value: &toml::Value) -> Result<()> {
        let x = match value {
            toml::Value::Integer(i) => *i as f64,
            toml::Value::Float(f) => *f,
            toml::Value::String(s) => {
                parse_number(s).ok_or_else(|| Error::config(format!("`{key}`: expected a number, got \"{s}\"")))?
            }
            _ => return Err(Error::config(format!("`{key}`: expected a number"))),
        };
        self.insert(key, x)
    }

    fn insert(&mut self, key: &str, value: f64) -> Result<()> {
        let field = canonical(key)?;
        if let Some(other) = self.entries.keys().find(|k| canonical(k).ok() == Some(field) && *k != key) {
            return Err(Error::config(format!("`{key}` and `{other}` set the same field")));
        }
        self.entries.insert(key.to_string(), value);
        Ok(())
    }

    /// Apply a `key=value` override; the key may use any unit suffix and
    /// replaces whatever spelling set the same field before.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override `{assignment}` is not key=value")))?;
        let key = key.trim();
        let x = parse_number(value.trim())
            .ok_or_else(|| Error::config(format!("override `{key}`: `{}` is not a number", value.trim())))?;
        let field = canonical(key)?;
        self.entries.retain(|k, _| canonical(k).ok() != Some(field));
        self.insert(key, x)
    }

    fn get(&self, field: &str) -> Result<f64> {
        if let Some(v) = self.entries.get(field) {
            return Ok(*v);
        }
        for (suffix, convert) in SUFFIXES {
            if let Some(v) = self.entries.get(&format!("{field}{suffix}")) {
                return Ok(convert(*v));
            }
        }
        Err(Error::config(format!("missing key `{field}`")))
    }

    pub fn build(&self) -> Result<NetworkConfig> {
        let g = |f: &str| self.get(f);
        let count = |f: &str| -> Result<u32> {
            let v = g(f)?;
            if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(Error::config(format!("`{f}` must be a positive integer")))
            }
        };
        let tier = |t: &str| -> Result<TierRadio> {
            Ok(TierRadio {
                tx_power: g(&format!("{t}.tx_power"))?,
                alpha: g(&format!("{t}.alpha"))?,
                psi_los: g(&format!("{t}.psi_los"))?,
                psi_nlos: g(&format!("{t}.psi_nlos"))?,
                n_antennas: count(&format!("{t}.n_antennas"))?,
            })
        };
        let cfg = NetworkConfig {
            lambda_g: g("lambda_g")?,
            lambda_u: g("lambda_u")?,
            ground: tier("ground")?,
            uav: tier("uav")?,
            pattern: AntennaPattern {
                theta0: g("pattern.theta0")?,
                phi0: g("pattern.phi0")?,
                delta_m: g("pattern.delta_m")?,
                delta_s: g("pattern.delta_s")?,
            },
            placement: UavPlacement { h_o: g("placement.h_o")?, nu: g("placement.nu")?, h_max: g("placement.h_max")? },
            env: Environment { c1: g("env.c1")?, c2: g("env.c2")? },
            beta: g("beta")?,
            noise_uav: g("noise_uav")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Field a possibly suffixed key refers to.
fn canonical(key: &str) -> Result<&'static str> {
    if let Some(f) = FIELDS.iter().find(|f| **f == key) {
        return Ok(f);
    }
    for (suffix, _) in SUFFIXES {
        if let Some(stem) = key.strip_suffix(suffix) {
            if let Some(f) = FIELDS.iter().find(|f| **f == stem) {
                return Ok(f);
            }
        }
    }
    Err(Error::config(format!("unknown key `{key}`")))
}

fn parse_number(s: &str) -> Option<f64> {
    match s.trim().trim_matches('"').to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        t => t.parse::<f64>().ok().filter(|x| !x.is_nan()),
    }
}

pub fn parse_config(text: &str) -> Result<NetworkConfig> {
    RawConfig::parse(text)?.build()
}

pub fn load_config(path: &Path) -> Result<NetworkConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn table1() -> NetworkConfig {
    parse_config(TABLE1_TOML).expect("bundled configuration is valid")
}

/// Linear-unit TOML rendering that [`parse_config`] reads back exactly.
pub fn render_config(cfg: &NetworkConfig) -> String {
    let num = |x: f64| {
        if x.is_infinite() {
            "\"inf\"".to_string()
        } else {
            format!("{x:?}")
        }
    };
    let tier = |name: &str, t: &TierRadio| {
        format!(
            "[{name}]\ntx_power = {}\nalpha = {}\npsi_los = {}\npsi_nlos = {}\nn_antennas = {}\n",
            num(t.tx_power),
            num(t.alpha),
            num(t.psi_los),
            num(t.psi_nlos),
            t.n_antennas
        )
    };
    let p = &cfg.pattern;
    let h = &cfg.placement;
    format!(
        "lambda_g = {}\nlambda_u = {}\nbeta = {}\nnoise_uav = {}\n\n{}\n{}\n[pattern]\ntheta0 = {}\nphi0 = {}\ndelta_m = {}\ndelta_s = {}\n\n[placement]\nh_o = {}\nnu = {}\nh_max = {}\n\n[env]\nc1 = {}\nc2 = {}\n",
        num(cfg.lambda_g),
        num(cfg.lambda_u),
        num(cfg.beta),
        num(cfg.noise_uav),
        tier("ground", &cfg.ground),
        tier("uav", &cfg.uav),
        num(p.theta0),
        num(p.phi0),
        num(p.delta_m),
        num(p.delta_s),
        num(h.h_o),
        num(h.nu),
        num(h.h_max),
        num(cfg.env.c1),
        num(cfg.env.c2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_matches_reference() {
        let c = table1();
        let r = NetworkConfig::reference();
        assert_eq!(c.lambda_g, 1e-6);
        assert_eq!(c.lambda_u, 6e-5);
        assert_eq!((c.ground.n_antennas, c.uav.n_antennas), (16, 8));
        assert_eq!((c.ground.alpha, c.uav.alpha, c.beta), (4.0, 2.5, 1.0));
        assert_eq!(c.ground, r.ground);
        assert_eq!(c.uav, r.uav);
        assert_eq!((c.placement, c.env, c.noise_uav), (r.placement, r.env, r.noise_uav));
        assert!((c.pattern.theta0 - r.pattern.theta0).abs() < 1e-15);
        assert!((c.pattern.phi0 - r.pattern.phi0).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let mut c = table1();
        c.uav.psi_nlos = f64::INFINITY;
        assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
    }

    #[test]
    fn errors_name_the_key() {
        let text = TABLE1_TOML.replace("alpha = 2.5", "");
        assert!(parse_config(&text).unwrap_err().to_string().contains("uav.alpha"));
        let text = TABLE1_TOML.replace("alpha = 4.0", "alpha = 1.5");
        assert!(parse_config(&text).is_err());
        let text = format!("bogus = 1\n{TABLE1_TOML}");
        assert!(parse_config(&text).unwrap_err().to_string().contains("bogus"));
        let text = TABLE1_TOML.replace("[env]", "[env]\nc1_db = 1.0");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn overrides_and_infinity() {
        let mut raw = RawConfig::parse(TABLE1_TOML).unwrap();
        raw.set("uav.psi_nlos=inf").unwrap();
        raw.set("placement.h_o = 15").unwrap();
        raw.set("beta_db=3").unwrap();
        let c = raw.build().unwrap();
        assert!(c.uav.psi_nlos.is_infinite());
        assert_eq!(c.placement.h_o, 15.0);
        assert!((c.beta - 1.9952623149688795).abs() < 1e-15);
        assert!(raw.set("uav.nope=1").is_err());
        assert!(raw.set("beta").is_err());
        let text = TABLE1_TOML.replace("psi_nlos_db = 100.0", "psi_nlos = \"inf\"");
        assert!(parse_config(&text).unwrap().uav.psi_nlos.is_infinite());
        let text = TABLE1_TOML.replace("noise_uav = 0.0", "noise_uav_dbm = 30.0");
        assert_eq!(parse_config(&text).unwrap().noise_uav, 1.0);
    }
}
