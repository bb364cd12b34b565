//! Browser bindings for three analytic curves of the reference scenario.
//! Every function returns a flat `Float64Array` of rows.

use wasm_bindgen::prelude::*;

use uavnet::coverage::{ground_coverage, ground_coverage_limit, multicell_coverage};
use uavnet::netmodel::{db_to_linear, NetworkConfig};
use uavnet::vse::volume_spectral_efficiency;

fn reference() -> NetworkConfig {
    NetworkConfig::reference().with_undetectable_uav_nlos().0
}

fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    if !((2..=400).contains(&points) && lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(JsValue::from_str("need 2..=400 points on a finite interval lo < hi"));
    }
    Ok((0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect())
}

fn js(e: uavnet::error::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Rows `[h_o, p_u, p_g, p_cov]` for `h_o` on `[h_lo, h_hi]` at
/// `λ_u = lambda_ratio · λ_g`.
#[wasm_bindgen]
pub fn coverage_vs_height(lambda_ratio: f64, h_lo: f64, h_hi: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    let mut cfg = reference();
    cfg.lambda_u = lambda_ratio * cfg.lambda_g;
    let mut out = Vec::with_capacity(4 * points);
    for h in grid(h_lo, h_hi, points)? {
        cfg.placement.h_o = h;
        cfg.validate().map_err(js)?;
        let r = multicell_coverage(&cfg).map_err(js)?;
        out.extend([h, r.p_u, r.p_g, r.p_cov]);
    }
    Ok(out)
}

/// Rows `[ν, V_u]` for `ν` on `[-1, 1]` with `H = h_o ‖X‖^{-ν}`.
#[wasm_bindgen]
pub fn vse_vs_nu(h_o: f64, lambda_ratio: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    let mut cfg = reference();
    cfg.placement.h_o = h_o;
    cfg.lambda_u = lambda_ratio * cfg.lambda_g;
    let mut out = Vec::with_capacity(2 * points);
    for nu in grid(-1.0, 1.0, points)? {
        cfg.placement.nu = nu;
        cfg.validate().map_err(js)?;
        out.extend([nu, volume_spectral_efficiency(&cfg).map_err(js)?.value]);
    }
    Ok(out)
}

/// Rows `[N_g, p_g, p_g limit]` for `N_g = 1..=n_max` at threshold `beta_db`.
#[wasm_bindgen]
pub fn ground_coverage_vs_antennas(beta_db: f64, n_max: u32) -> Result<Vec<f64>, JsValue> {
    if !(1..=64).contains(&n_max) {
        return Err(JsValue::from_str("n_max must be in 1..=64"));
    }
    let mut cfg = reference();
    cfg.beta = db_to_linear(beta_db);
    cfg.validate().map_err(js)?;
    let limit = ground_coverage_limit(&cfg).map_err(js)?;
    let mut out = Vec::with_capacity(3 * n_max as usize);
    for n in 1..=n_max {
        cfg.ground.n_antennas = n;
        out.extend([n as f64, ground_coverage(&cfg).map_err(js)?, limit]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_expected_shape() {
        let c = coverage_vs_height(50.0, 5.0, 40.0, 3).unwrap();
        assert_eq!(c.len(), 12);
        assert!(c.chunks(4).all(|r| (0.0..=1.0).contains(&r[1])));
        let v = vse_vs_nu(20.0, 50.0, 3).unwrap();
        assert_eq!(v.len(), 6);
        let g = ground_coverage_vs_antennas(0.0, 4).unwrap();
        assert!(g.chunks(3).all(|r| r[1] <= r[2] + 1e-3));
        assert!((g[1] - 0.5601).abs() < 1e-4);
    }
}
