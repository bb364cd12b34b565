use crate::error::{Error, Result};

use super::gauss_kronrod::{integrate_finite, QuadratureSettings};

/// Monotone piecewise-cubic Hermite interpolant of `z ↦ ∫_{z_0}^z f`.
///
/// Node values come from adaptive quadrature over each panel and node slopes
/// are the exact integrand values, limited where needed so the interpolant
/// stays nondecreasing. Beyond the last node it continues linearly with the
/// last integrand value.
#[derive(Debug, Clone)]
pub struct CumulativeInterpolant {
    z: Vec<f64>,
    v: Vec<f64>,
    d: Vec<f64>,
}

/// Interpolant on a uniform grid of `grid_points` nodes over `[0, grid_max]`.
pub fn cumulative_interpolant<F: Fn(f64) -> f64>(
    f: F,
    grid_max: f64,
    grid_points: usize,
) -> Result<CumulativeInterpolant> {
    if grid_points < 2 {
        return Err(Error::domain("cumulative interpolant needs at least 2 grid points"));
    }
    if !(grid_max > 0.0 && grid_max.is_finite()) {
        return Err(Error::domain("grid_max must be finite and > 0"));
    }
    let n = grid_points - 1;
    let grid: Vec<f64> = (0..=n).map(|k| grid_max * k as f64 / n as f64).collect();
    CumulativeInterpolant::on_grid(f, grid)
}

impl CumulativeInterpolant {
    /// Build on an arbitrary strictly increasing grid; the integral is taken
    /// from the first node.
    pub fn on_grid<F: Fn(f64) -> f64>(f: F, grid: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::domain("cumulative interpolant needs at least 2 grid points"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("interpolation grid must be strictly increasing"));
        }
        let settings = QuadratureSettings { rel_tol: 1e-12, abs_tol: 1e-300, max_subdivisions: 200 };
        let mut v = Vec::with_capacity(grid.len());
        v.push(0.0);
        let mut acc = 0.0;
        for w in grid.windows(2) {
            let piece = match integrate_finite(&f, w[0], w[1], &settings) {
                Ok(x) => x,
                Err(Error::Convergence { estimate, .. }) => estimate,
                Err(e) => return Err(e),
            };
            acc += piece.max(0.0);
            v.push(acc);
        }
        let mut d: Vec<f64> = grid.iter().map(|&z| f(z).max(0.0)).collect();
        // Fritsch–Carlson limiter.
        for k in 0..grid.len() - 1 {
            let delta = (v[k + 1] - v[k]) / (grid[k + 1] - grid[k]);
            if delta == 0.0 {
                d[k] = 0.0;
                d[k + 1] = 0.0;
                continue;
            }
            let a = d[k] / delta;
            let b = d[k + 1] / delta;
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                d[k] = tau * a * delta;
                d[k + 1] = tau * b * delta;
            }
        }
        Ok(CumulativeInterpolant { z: grid, v, d })
    }

    pub fn grid_max(&self) -> f64 {
        *self.z.last().expect("grid is non-empty")
    }

    pub fn eval(&self, z: f64) -> f64 {
        let n = self.z.len();
        if z <= self.z[0] {
            return self.d[0] * (z - self.z[0]);
        }
        if z >= self.z[n - 1] {
            return self.v[n - 1] + self.d[n - 1] * (z - self.z[n - 1]);
        }
        let k = self.z.partition_point(|&x| x <= z) - 1;
        let h = self.z[k + 1] - self.z[k];
        let t = (z - self.z[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.v[k] + h10 * h * self.d[k] + h01 * self.v[k + 1] + h11 * h * self.d[k + 1]
    }
}
