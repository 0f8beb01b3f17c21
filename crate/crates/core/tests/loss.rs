use kerrkit::loss::{cross_kerr, kerr_scaling, q3_bound, qi_of_power, KerrCalibration};
use kerrkit::stats::fit_power_law;
use kerrkit::{KerrGeometry, TlsParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn geometry(width_m: f64) -> KerrGeometry {
    KerrGeometry {
        width_m,
        thickness_m: 20e-9,
        j_c: 2e10,
        l_k: 1e-9,
        omega0: 2.0 * std::f64::consts::PI * 95.1e9,
    }
}

#[test]
fn kerr_scaling_exponent_survives_noise() {
    let cal = KerrCalibration::from_reference(&geometry(100e-9), 1.21e3).unwrap();
    let widths: Vec<f64> = (0..10).map(|i| 60e-9 * 1.25f64.powi(i)).collect();
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ks: Vec<f64> = widths
        .iter()
        .map(|&w| kerr_scaling(&geometry(w), &cal).unwrap() * (1.0 + noise.sample(&mut rng)))
        .collect();
    let fit = fit_power_law(&widths, &ks).unwrap();
    assert!((fit.exponent + 2.0).abs() < 0.1, "exponent {}", fit.exponent);
}

#[test]
fn halving_width_quadruples_kerr() {
    let cal = KerrCalibration::from_reference(&geometry(100e-9), 1.21e3).unwrap();
    let k1 = kerr_scaling(&geometry(100e-9), &cal).unwrap();
    let k2 = kerr_scaling(&geometry(50e-9), &cal).unwrap();
    assert!((k1 - 1.21e3).abs() < 1e-9);
    assert!((k2 / k1 - 4.0).abs() < 1e-12);
}

#[test]
fn tls_quality_is_monotone_and_bounded() {
    let tls = TlsParams { q_tls0: 8e3, n_c: 1e3, beta_exp: 0.8, q_other: 5e4 };
    let mut last = 0.0;
    for i in 0..80 {
        let q = qi_of_power(&tls, 10f64.powf(-2.0 + i as f64 / 8.0)).unwrap();
        assert!(q >= last && q <= tls.q_other);
        last = q;
    }
    assert!((qi_of_power(&tls, 0.0).unwrap() - tls.qi_low_power()).abs() < 1e-9);
}

#[test]
fn cross_kerr_and_ceiling() {
    let g = geometry(100e-9);
    let self_term = cross_kerr(&g, 0, 0, -1.21e3).unwrap();
    let cross = cross_kerr(&g, 0, 1, -1.21e3).unwrap();
    assert!(cross.abs() > self_term.abs());
    assert!(q3_bound(&g, -1.21e3).unwrap() > 1e7);
}
