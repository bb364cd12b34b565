use uavnet::coverage::{
    ground_coverage, ground_coverage_limit, ground_coverage_siso, multicell_coverage, uav_coverage, uav_coverage_limit,
    uav_coverage_siso,
};
use uavnet::netmodel::NetworkConfig;
use uavnet::optimize::{grid_surface, maximize_coverage_over_height, maximize_scalar};
use uavnet::sweep::{Objective, SweepParameter};
use uavnet::vse::{mean_link_rate, volume_spectral_efficiency, volume_spectral_efficiency_limit};

fn base() -> NetworkConfig {
    NetworkConfig::reference().with_undetectable_uav_nlos().0
}

fn with(f: impl FnOnce(&mut NetworkConfig)) -> NetworkConfig {
    let mut c = base();
    f(&mut c);
    c
}

#[test]
fn coverage_grows_with_antennas_up_to_the_limit() {
    let c = base();
    let lim_u = uav_coverage_limit(&c).unwrap();
    let lim_g = ground_coverage_limit(&c).unwrap();
    let mut prev = (0.0, 0.0);
    for n in [1u32, 2, 4, 8, 16, 32] {
        let cfg = with(|c| {
            c.uav.n_antennas = n;
            c.ground.n_antennas = n;
        });
        let (pu, pg) = (uav_coverage(&cfg).unwrap(), ground_coverage(&cfg).unwrap());
        assert!(pu >= prev.0 && pg >= prev.1, "N={n}: {pu} {pg} after {prev:?}");
        assert!(pu <= lim_u + 1e-3 && pg <= lim_g + 1e-3, "N={n}");
        prev = (pu, pg);
    }
}

#[test]
fn coverage_falls_with_threshold() {
    let mut prev = (1.0, 1.0);
    for beta in [0.1, 0.5, 1.0, 2.0, 8.0] {
        let cfg = with(|c| c.beta = beta);
        let r = multicell_coverage(&cfg).unwrap();
        assert!(r.p_u <= prev.0 && r.p_g <= prev.1, "beta={beta}");
        assert!((r.p_cov - r.p_u * r.p_g).abs() <= 1e-12);
        for p in [r.p_u, r.p_g, r.p_cov] {
            assert!((0.0..=1.0).contains(&p));
        }
        prev = (r.p_u, r.p_g);
    }
    let r = multicell_coverage(&with(|c| c.beta = 1e-9)).unwrap();
    assert!(r.p_cov > 1.0 - 1e-4, "{r:?}");
}

#[test]
fn fixed_angle_coverage_ignores_intensity_and_height() {
    let value = |lam: f64, h: f64| {
        uav_coverage(&with(|c| {
            c.placement.nu = -1.0;
            c.lambda_u = lam;
            c.placement.h_o = h;
        }))
        .unwrap()
    };
    let reference = value(6e-5, 1.0);
    for (lam, h) in [(6e-6, 0.3), (6e-4, 1.0), (2e-5, 3.7)] {
        let v = value(lam, h);
        assert!((v - reference).abs() < 1e-5, "lambda={lam} h={h}: {v} vs {reference}");
    }
}

#[test]
fn coverage_is_unimodal_in_intensity() {
    let cfg = with(|c| c.placement.h_o = 15.0);
    let ps: Vec<f64> = (0..25)
        .map(|k| {
            let lam = 1e-7 * 10f64.powf(4.0 * k as f64 / 24.0);
            uav_coverage(&with(|c| {
                *c = cfg;
                c.lambda_u = lam;
            }))
            .unwrap()
        })
        .collect();
    let interior_minima = (1..ps.len() - 1).filter(|&k| ps[k] < ps[k - 1] && ps[k] < ps[k + 1]).count();
    assert_eq!(interior_minima, 0, "{ps:?}");
}

#[test]
fn siso_closed_forms_match_general_path() {
    for h in [5.0, 40.0] {
        let cfg = with(|c| {
            c.placement.h_o = h;
            c.uav.n_antennas = 1;
            c.ground.n_antennas = 1;
        });
        let (a, b) = (uav_coverage(&cfg).unwrap(), uav_coverage_siso(&cfg).unwrap());
        assert!((a - b).abs() < 1e-8, "h={h}: {a} {b}");
        let (a, b) = (ground_coverage(&cfg).unwrap(), ground_coverage_siso(&cfg).unwrap());
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn vse_properties() {
    let c = base();
    let lim = volume_spectral_efficiency_limit(&c).unwrap().value;
    let mut prev = 0.0;
    let mut last = 0.0;
    for n in [1u32, 4, 16, 64] {
        // the limit takes both arrays to infinity
        let v = volume_spectral_efficiency(&with(|c| {
            c.uav.n_antennas = n;
            c.ground.n_antennas = n;
        }))
        .unwrap()
        .value;
        assert!(v >= prev && v >= 0.0, "N_u={n}");
        prev = v;
        last = v;
    }
    assert!((last - lim).abs() <= 0.01 * lim, "{last} vs {lim}");

    // V_u follows p_g through the ground tier and nothing else
    let mut prev = (0.0, 0.0);
    for n in [1u32, 4, 16] {
        let r = volume_spectral_efficiency(&with(|c| c.ground.n_antennas = n)).unwrap();
        assert!(r.value >= prev.0);
        if prev.1 > 0.0 {
            assert!((r.value / r.p_g_used - prev.0 / prev.1).abs() <= 1e-12 * r.value / r.p_g_used);
        }
        prev = (r.value, r.p_g_used);
    }

    let v = volume_spectral_efficiency(&c).unwrap().value;
    let rate = mean_link_rate(&c).unwrap();
    assert!((c.placement.h_max * v / c.lambda_u - rate).abs() <= 1e-12 * rate);
}

#[test]
fn vse_has_interior_height_maximum() {
    let hs: Vec<f64> = (0..=40).map(|k| 0.5 + 99.5 * k as f64 / 40.0).collect();
    let vs: Vec<f64> =
        hs.iter().map(|&h| volume_spectral_efficiency(&with(|c| c.placement.h_o = h)).unwrap().value).collect();
    let best = (0..vs.len()).fold(0, |b, k| if vs[k] > vs[b] { k } else { b });
    assert!(best > 0 && best < vs.len() - 1, "argmax at {} m", hs[best]);
}

#[test]
fn height_optimum_is_stable_under_tolerance() {
    let c = base();
    let coarse = maximize_coverage_over_height(&c, 1.0, 100.0, 0.1).unwrap();
    let fine = maximize_coverage_over_height(&c, 1.0, 100.0, 0.05).unwrap();
    assert!((coarse.argmax - fine.argmax).abs() < 0.1, "{coarse:?} {fine:?}");
    assert!((uav_coverage(&with(|x| x.placement.h_o = fine.argmax)).unwrap() - fine.value).abs() < 1e-12);
}

#[test]
fn surface_argmax_is_consistent_with_scalar_search() {
    let c = base();
    let hs: Vec<f64> = (0..12).map(|k| 1.0 + 99.0 * k as f64 / 11.0).collect();
    let surface = grid_surface(&c, (SweepParameter::HO, &hs), (SweepParameter::Beta, &[1.0]), Objective::PU).unwrap();
    assert_eq!(surface.failures(), 0);
    let (_, _, best_cell) = surface.argmax().unwrap();
    let column: Vec<f64> = surface.values.iter().map(|r| *r[0].as_ref().unwrap()).collect();
    let variation = column.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let scalar = maximize_coverage_over_height(&c, 1.0, 100.0, 1e-3).unwrap();
    assert!(best_cell <= scalar.value + variation);
    assert!(scalar.value >= best_cell - 1e-12);

    let single =
        grid_surface(&c, (SweepParameter::HO, &[40.0]), (SweepParameter::Beta, &[1.0]), Objective::PU).unwrap();
    assert_eq!(*single.values[0][0].as_ref().unwrap(), uav_coverage(&c).unwrap());
}

#[test]
fn fixed_angle_surface_row_is_flat() {
    let c = with(|c| c.placement.nu = -1.0);
    let ratios = [5.0, 50.0, 500.0];
    let surface =
        grid_surface(&c, (SweepParameter::Nu, &[-1.0]), (SweepParameter::LambdaRatio, &ratios), Objective::PU).unwrap();
    let row: Vec<f64> = surface.values[0].iter().map(|v| *v.as_ref().unwrap()).collect();
    for v in &row {
        assert!((v - row[0]).abs() < 1e-5, "{row:?}");
    }
}

#[test]
fn scalar_search_returns_boundaries_for_monotone_objectives() {
    let r = maximize_scalar(|x| Ok(x * x), 0.0, 2.0, 1e-9).unwrap();
    assert_eq!((r.argmax, r.value), (2.0, 4.0));
}
