//! Physical constants (CODATA 2018 exact/recommended values) and unit helpers.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Zero-temperature gap over `kB·Tc` used for NbN films.
pub const GAP_RATIO: f64 = 2.08;

/// Angular frequency (rad/s) for a frequency in hertz.
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

/// Photon energy `ħω` in joules.
#[inline]
pub fn photon_energy(f_hz: f64) -> f64 {
    HBAR * angular(f_hz)
}

/// Zero-temperature superconducting gap `Δ0 = 2.08·kB·Tc`, in joules.
#[inline]
pub fn gap_zero(tc_k: f64) -> f64 {
    GAP_RATIO * BOLTZMANN * tc_k
}

/// `10^((dBm − 30)/10)` watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversion() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(-90.0) - 1e-12).abs() < 1e-27);
        assert!((watts_to_dbm(dbm_to_watts(-73.5)) + 73.5).abs() < 1e-12);
    }

    #[test]
    fn hbar_matches_planck() {
        assert!((HBAR * 2.0 * PI / PLANCK - 1.0).abs() < 1e-9);
    }
}
