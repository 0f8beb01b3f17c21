mod common;

use common::matsubara_gap_ratio;
use kerrkit::bcs::{
    bcs_gap_ratio, freq_shift_ratio, freq_shift_ratio_with, gap_of_t, gap_of_t_with, mattis_bardeen,
    penetration_depth_ratio, q_total,
};
use kerrkit::constants::{gap_zero, photon_energy};
use kerrkit::{BcsParams, GapModel};

fn nbn() -> BcsParams {
    BcsParams { tc_k: 13.8, alpha: 0.9, q_i_max: 2.5e4, f0_hz: 95e9 }
}

#[test]
fn gap_equation_matches_matsubara_sum() {
    for t in [0.1, 0.3, 0.5, 0.7, 0.9, 0.97] {
        let ours = bcs_gap_ratio(t).unwrap();
        let oracle = matsubara_gap_ratio(t);
        assert!((ours - oracle).abs() < 1e-6, "t = {t}: {ours} vs {oracle}");
    }
}

#[test]
fn interpolated_gap_tracks_self_consistent_solution() {
    let tc = 13.8;
    for t in [0.2, 0.5, 0.8] {
        let a = gap_of_t(t * tc, tc).unwrap();
        let b = gap_of_t_with(t * tc, tc, GapModel::SelfConsistent).unwrap();
        assert!((a / b - 1.0).abs() < 0.02, "t = {t}: {}", a / b);
    }
    assert_eq!(gap_of_t(0.0, tc).unwrap(), gap_zero(tc));
    assert_eq!(gap_of_t(tc, tc).unwrap(), 0.0);
}

#[test]
fn gap_is_non_increasing() {
    let tc = 9.0;
    let mut last = f64::INFINITY;
    for i in 0..=200 {
        let g = gap_of_t(tc * i as f64 / 190.0, tc).unwrap();
        assert!(g <= last);
        last = g;
    }
}

#[test]
fn zero_temperature_conductivity_limit() {
    let tc = 13.8;
    let f = 100e9;
    let s = mattis_bardeen(0.01 * tc, f, tc).unwrap();
    let limit = std::f64::consts::PI * gap_zero(tc) / photon_energy(f);
    assert!((s.sigma2_over_n / limit - 1.0).abs() < 0.01);
    assert!(s.sigma1_over_n < 1e-12);
}

#[test]
fn frequency_shift_is_inverse_penetration_depth() {
    let p = nbn();
    for i in 1..40 {
        let t = p.tc_k * i as f64 / 40.0;
        let f = freq_shift_ratio(t, &p).unwrap();
        let l = penetration_depth_ratio(t, p.tc_k).unwrap();
        assert!((f * l - 1.0).abs() < 1e-10);
    }
    let a = freq_shift_ratio_with(0.5 * p.tc_k, &p, GapModel::SelfConsistent).unwrap();
    assert!(a < 1.0 && a > 0.9);
}

#[test]
fn quality_factor_drops_with_temperature() {
    let p = nbn();
    let mut last = f64::INFINITY;
    for t in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
        let q = q_total(t * p.tc_k, &p).unwrap();
        assert!(q < last && q <= p.q_i_max);
        last = q;
    }
    assert!((q_total(0.1 * p.tc_k, &p).unwrap() / p.q_i_max - 1.0).abs() < 1e-4);
}

#[test]
fn pair_breaking_drive_is_rejected() {
    let mut p = nbn();
    p.f0_hz = 2e12;
    assert!(p.validate().is_err());
    assert!(mattis_bardeen(1.0, 2e12, 13.8).is_err());
}
