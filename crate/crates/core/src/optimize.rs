//! One-dimensional maximisation of the analytic objectives and 2-D surfaces.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::netmodel::NetworkConfig;
use crate::sweep::{Objective, SweepParameter};

const PRESCAN_POINTS: usize = 17;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub argmax: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Final bracket around `argmax`, in the caller's units.
    pub bracket: (f64, f64),
    /// The pre-scan saw another local maximum away from the chosen bracket.
    pub multimodal: bool,
}

/// Maximise `f` on `[lo, hi]` to an absolute tolerance `tol` in `x`.
///
/// A uniform pre-scan picks the best cell, golden-section refines inside its
/// neighbours, and the result is compared against both endpoints so that
/// monotone objectives return the boundary.
pub fn maximize_scalar<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<OptResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!("invalid search interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut eval = |x: f64| -> Result<f64> {
        if let Some(v) = cache.get(&x.to_bits()) {
            return Ok(*v);
        }
        let v = f(x)?;
        if v.is_nan() {
            return Err(Error::domain(format!("objective is NaN at {x}")));
        }
        cache.insert(x.to_bits(), v);
        Ok(v)
    };

    let n = PRESCAN_POINTS;
    let xs: Vec<f64> =
        (0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect();
    let mut ys = Vec::with_capacity(n);
    for &x in &xs {
        ys.push(eval(x)?);
    }
    let best = (0..n).fold(0, |b, k| if ys[k] > ys[b] { k } else { b });
    let multimodal = (0..n).any(|k| k.abs_diff(best) > 1 && local_peak(&ys, k));

    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(n - 1)];
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (mut argmax, mut value) = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi, xs[best]] {
        let v = eval(x)?;
        if v > value {
            argmax = x;
            value = v;
        }
    }
    let bracket = if argmax == lo || argmax == hi { (argmax, argmax) } else { (a, b) };
    Ok(OptResult { argmax, value, evaluations: cache.len(), bracket, multimodal })
}

fn local_peak(ys: &[f64], k: usize) -> bool {
    let left = k == 0 || ys[k] > ys[k - 1];
    let right = k + 1 == ys.len() || ys[k] > ys[k + 1];
    left && right
}

/// Maximise an analytic objective over one configuration parameter.
/// Intensity parameters are searched in log space; `tol` is then a relative
/// tolerance.
pub fn maximize(
    cfg: &NetworkConfig,
    parameter: SweepParameter,
    objective: Objective,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<OptResult> {
    if objective == Objective::All {
        return Err(Error::domain("`all` is not a scalar objective"));
    }
    if matches!(parameter, SweepParameter::NAntennasU | SweepParameter::NAntennasG) {
        return Err(Error::Unsupported("antenna counts are integers; use a sweep".into()));
    }
    if parameter == SweepParameter::HO && cfg.placement.nu == -1.0 && objective != Objective::PG {
        return Err(Error::Unsupported("the UAV tier does not depend on h_o when nu = -1".into()));
    }
    let log = matches!(parameter, SweepParameter::LambdaU | SweepParameter::LambdaRatio);
    if log {
        if !(lo > 0.0) {
            return Err(Error::domain("intensity search needs a positive lower bound"));
        }
        let r =
            maximize_scalar(|t| objective.evaluate(&parameter.apply(cfg, t.exp())?), lo.ln(), hi.ln(), tol.min(0.5))?;
        Ok(OptResult { argmax: r.argmax.exp(), bracket: (r.bracket.0.exp(), r.bracket.1.exp()), ..r })
    } else {
        maximize_scalar(|x| objective.evaluate(&parameter.apply(cfg, x)?), lo, hi, tol)
    }
}

/// `argmax_{h_o} p_u` on `[lo, hi]` meters.
pub fn maximize_coverage_over_height(cfg: &NetworkConfig, lo: f64, hi: f64, tol: f64) -> Result<OptResult> {
    maximize(cfg, SweepParameter::HO, Objective::PU, lo, hi, tol)
}

/// `argmax_{λ_u} p_u` on `[lo, hi]` per m², `tol` relative.
pub fn maximize_coverage_over_intensity(cfg: &NetworkConfig, lo: f64, hi: f64, tol: f64) -> Result<OptResult> {
    maximize(cfg, SweepParameter::LambdaU, Objective::PU, lo, hi, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VseVariable {
    Height,
    Intensity,
}

/// `argmax V_u` over the UAV height or the UAV intensity.
pub fn maximize_vse(cfg: &NetworkConfig, variable: VseVariable, lo: f64, hi: f64, tol: f64) -> Result<OptResult> {
    let parameter = match variable {
        VseVariable::Height => SweepParameter::HO,
        VseVariable::Intensity => SweepParameter::LambdaU,
    };
    maximize(cfg, parameter, Objective::VU, lo, hi, tol)
}

/// Objective values on a rectangular grid; failed cells keep their error.
#[derive(Debug, Clone)]
pub struct Surface {
    pub axis1: (SweepParameter, Vec<f64>),
    pub axis2: (SweepParameter, Vec<f64>),
    pub objective: Objective,
    /// `values[i][j]` at `(axis1[i], axis2[j])`.
    pub values: Vec<Vec<std::result::Result<f64, String>>>,
}

impl Surface {
    /// Largest finite cell as `(i, j, value)`.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Ok(v) = v {
                    if best.is_none_or(|b| *v > b.2) {
                        best = Some((i, j, *v));
                    }
                }
            }
        }
        best
    }

    pub fn failures(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_err()).count()
    }
}

pub fn grid_surface(
    cfg: &NetworkConfig,
    axis1: (SweepParameter, &[f64]),
    axis2: (SweepParameter, &[f64]),
    objective: Objective,
) -> Result<Surface> {
    if objective == Objective::All {
        return Err(Error::domain("`all` is not a scalar objective"));
    }
    if axis1.0 == axis2.0 {
        return Err(Error::domain("surface axes must differ"));
    }
    let cell = |x: f64, y: f64| -> std::result::Result<f64, String> {
        let c = axis1.0.apply(cfg, x).and_then(|c| axis2.0.apply(&c, y)).map_err(|e| e.to_string())?;
        objective.evaluate(&c).map_err(|e| e.to_string())
    };
    let row = |x: f64| axis2.1.iter().map(|&y| cell(x, y)).collect::<Vec<_>>();
    #[cfg(feature = "parallel")]
    let values = {
        use rayon::prelude::*;
        axis1.1.par_iter().map(|&x| row(x)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values = axis1.1.iter().map(|&x| row(x)).collect();
    Ok(Surface { axis1: (axis1.0, axis1.1.to_vec()), axis2: (axis2.0, axis2.1.to_vec()), objective, values })
}
