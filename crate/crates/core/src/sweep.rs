//! Sweep axes and objectives shared by the optimizers and the CLI.

use std::fmt;
use std::str::FromStr;

use crate::coverage::{ground_coverage, multicell_coverage, uav_coverage};
use crate::error::{Error, Result};
use crate::netmodel::NetworkConfig;
use crate::vse::volume_spectral_efficiency;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    HO,
    Nu,
    /// `λ_u/λ_g` with `λ_g` held at its configured value.
    LambdaRatio,
    LambdaU,
    Beta,
    NAntennasU,
    NAntennasG,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 7] = [
        SweepParameter::HO,
        SweepParameter::Nu,
        SweepParameter::LambdaRatio,
        SweepParameter::LambdaU,
        SweepParameter::Beta,
        SweepParameter::NAntennasU,
        SweepParameter::NAntennasG,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::HO => "h_o",
            SweepParameter::Nu => "nu",
            SweepParameter::LambdaRatio => "lambda_ratio",
            SweepParameter::LambdaU => "lambda_u",
            SweepParameter::Beta => "beta",
            SweepParameter::NAntennasU => "n_antennas_u",
            SweepParameter::NAntennasG => "n_antennas_g",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            SweepParameter::HO => "m",
            SweepParameter::LambdaU => "1/m^2",
            _ => "1",
        }
    }

    /// Copy of `cfg` with this parameter set to `value`.
    pub fn apply(&self, cfg: &NetworkConfig, value: f64) -> Result<NetworkConfig> {
        let mut c = *cfg;
        let as_count = |v: f64| -> Result<u32> {
            if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(Error::config(format!("{} must be a positive integer, got {v}", self.name())))
            }
        };
        match self {
            SweepParameter::HO => c.placement.h_o = value,
            SweepParameter::Nu => c.placement.nu = value,
            SweepParameter::LambdaRatio => c.lambda_u = value * c.lambda_g,
            SweepParameter::LambdaU => c.lambda_u = value,
            SweepParameter::Beta => c.beta = value,
            SweepParameter::NAntennasU => c.uav.n_antennas = as_count(value)?,
            SweepParameter::NAntennasG => c.ground.n_antennas = as_count(value)?,
        }
        c.validate()?;
        Ok(c)
    }
}

impl FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::config(format!("unknown sweep parameter `{s}`")))
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    PU,
    PG,
    PCov,
    VU,
    All,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::PU => "p_u",
            Objective::PG => "p_g",
            Objective::PCov => "p_cov",
            Objective::VU => "V_u",
            Objective::All => "all",
        }
    }

    /// The scalar objectives this selection expands to.
    pub fn expand(&self) -> Vec<Objective> {
        match self {
            Objective::All => vec![Objective::PU, Objective::PG, Objective::PCov, Objective::VU],
            o => vec![*o],
        }
    }

    /// Analytic value of a scalar objective.
    pub fn evaluate(&self, cfg: &NetworkConfig) -> Result<f64> {
        match self {
            Objective::PU => uav_coverage(cfg),
            Objective::PG => ground_coverage(cfg),
            Objective::PCov => Ok(multicell_coverage(cfg)?.p_cov),
            Objective::VU => Ok(volume_spectral_efficiency(cfg)?.value),
            Objective::All => Err(Error::domain("`all` is not a scalar objective")),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p_u" => Ok(Objective::PU),
            "p_g" => Ok(Objective::PG),
            "p_cov" => Ok(Objective::PCov),
            "V_u" | "v_u" | "vse" => Ok(Objective::VU),
            "all" => Ok(Objective::All),
            _ => Err(Error::config(format!("unknown objective `{s}`"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub objective: Objective,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, grid: Vec<f64>, objective: Objective) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::config("sweep grid is empty"));
        }
        if grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("sweep grid values must be finite"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("sweep grid must be strictly increasing"));
        }
        Ok(SweepSpec { parameter, grid, objective })
    }
}

/// Parse a grid description:
/// `a,b,c` (explicit), `start:stop:step` (inclusive), `lin:start:stop:n` or
/// `log:start:stop:n`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::config(format!("bad number `{s}` in grid `{text}`")))
    };
    let count = |s: &str| -> Result<usize> {
        match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::config(format!("bad point count `{s}` in grid `{text}`"))),
        }
    };
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [single] => single.split(',').map(num).collect::<Result<Vec<_>>>()?,
        [kind @ ("lin" | "log"), a, b, n] => {
            let (a, b, n) = (num(a)?, num(b)?, count(n)?);
            if n == 1 {
                vec![a]
            } else if *kind == "lin" {
                (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
            } else {
                if !(a > 0.0 && b > 0.0) {
                    return Err(Error::config("log grids need positive bounds"));
                }
                let (la, lb) = (a.ln(), b.ln());
                (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
            }
        }
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::config(format!("grid `{text}` needs start <= stop and step > 0")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            (0..=n).map(|k| a + step * k as f64).collect()
        }
        _ => return Err(Error::config(format!("cannot parse grid `{text}`"))),
    };
    SweepSpec::new(SweepParameter::HO, grid.clone(), Objective::PU)?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1,2,5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert_eq!(parse_grid("1:3:1").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("0:1:0.25").unwrap().len(), 5);
        let g = parse_grid("log:1e-7:1e-3:5").unwrap();
        assert!((g[2] - 1e-5).abs() < 1e-18);
        assert_eq!(parse_grid("lin:-1:1:3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(parse_grid("3,2").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn apply_parameters() {
        let c = NetworkConfig::reference();
        let d = SweepParameter::LambdaRatio.apply(&c, 50.0).unwrap();
        assert!((d.lambda_u - 5e-5).abs() < 1e-18);
        assert!(SweepParameter::NAntennasU.apply(&c, 2.5).is_err());
        assert_eq!(SweepParameter::NAntennasG.apply(&c, 4.0).unwrap().ground.n_antennas, 4);
        assert!(SweepParameter::Beta.apply(&c, -1.0).is_err());
        assert_eq!("nu".parse::<SweepParameter>().unwrap(), SweepParameter::Nu);
        assert_eq!("V_u".parse::<Objective>().unwrap(), Objective::VU);
    }
}
