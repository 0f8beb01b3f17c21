//! Power-dependent internal loss and the geometric scaling of the Kerr
//! nonlinearity.

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Two-level-system loss that saturates with intracavity photon number,
/// `1/Qi(n) = (1/Q_tls0)·(1 + n/n_c)^(−β/2) + 1/Q_other`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlsParams {
    pub q_tls0: f64,
    pub n_c: f64,
    pub beta_exp: f64,
    pub q_other: f64,
}

impl TlsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_tls0 > 0.0 && self.n_c > 0.0 && self.q_other > 0.0) {
            return Err(Error::domain(format!(
                "TLS parameters must be positive: q_tls0 = {}, n_c = {}, q_other = {}",
                self.q_tls0, self.n_c, self.q_other
            )));
        }
        if !(self.beta_exp > 0.0 && self.beta_exp <= 2.0) {
            return Err(Error::domain(format!("beta_exp must lie in (0, 2], got {}", self.beta_exp)));
        }
        Ok(())
    }

    /// Low-power limit `(1/Q_tls0 + 1/Q_other)⁻¹`.
    pub fn qi_low_power(&self) -> f64 {
        1.0 / (1.0 / self.q_tls0 + 1.0 / self.q_other)
    }

    /// High-power limit, `Q_other`.
    pub fn qi_high_power(&self) -> f64 {
        self.q_other
    }
}

pub fn qi_of_power(tls: &TlsParams, n_ph: f64) -> Result<f64> {
    tls.validate()?;
    if !(n_ph >= 0.0) {
        return Err(Error::domain(format!("n_ph must be ≥ 0, got {n_ph}")));
    }
    let tls_loss = (1.0 + n_ph / tls.n_c).powf(-tls.beta_exp / 2.0) / tls.q_tls0;
    Ok(1.0 / (tls_loss + 1.0 / tls.q_other))
}

/// Nanowire geometry entering the Kerr scaling law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrGeometry {
    pub width_m: f64,
    pub thickness_m: f64,
    /// Critical current density, A/m².
    pub j_c: f64,
    /// Linear kinetic inductance, H.
    pub l_k: f64,
    /// Angular resonance frequency, rad/s.
    pub omega0: f64,
}

impl KerrGeometry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("width_m", self.width_m),
            ("thickness_m", self.thickness_m),
            ("j_c", self.j_c),
            ("l_k", self.l_k),
            ("omega0", self.omega0),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Critical current `Jc·w·t`.
    pub fn critical_current(&self) -> f64 {
        self.j_c * self.width_m * self.thickness_m
    }

    /// `ħω0²Lk/(Jc w t)²`, the geometric part of the Kerr coefficient.
    pub fn kerr_factor(&self) -> f64 {
        HBAR * self.omega0 * self.omega0 * self.l_k / self.critical_current().powi(2)
    }
}

/// Proportionality constant `C` in `|K| = C·ħω0²Lk/(Jc w t)²`.
///
/// `C` absorbs the mode-profile integral and the unit conversion, so that
/// [`kerr_scaling`] returns `|K|/2π` in hertz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KerrCalibration {
    pub c: f64,
}

impl KerrCalibration {
    /// Pins `C` to one device with known Kerr shift.
    pub fn from_reference(g: &KerrGeometry, kerr_hz: f64) -> Result<Self> {
        g.validate()?;
        if kerr_hz == 0.0 || !kerr_hz.is_finite() {
            return Err(Error::domain("reference Kerr shift must be finite and non-zero"));
        }
        Ok(KerrCalibration {
            c: 2.0 * PI * kerr_hz.abs() / g.kerr_factor(),
        })
    }
}

/// Self-Kerr magnitude `|K|/2π` in hertz.
pub fn kerr_scaling(g: &KerrGeometry, cal: &KerrCalibration) -> Result<f64> {
    g.validate()?;
    Ok(cal.c * g.kerr_factor() / (2.0 * PI))
}

/// Nonlinear-resistance quality ceiling, evaluated as the angular ratio
/// `ω0/|K|`.
pub fn q3_bound(g: &KerrGeometry, kerr_hz: f64) -> Result<f64> {
    g.validate()?;
    if kerr_hz == 0.0 || !kerr_hz.is_finite() {
        return Err(Error::domain("q3_bound needs a finite, non-zero Kerr shift"));
    }
    Ok(g.omega0 / (2.0 * PI * kerr_hz.abs()))
}

/// Order-of-magnitude cross-Kerr shift `χmn/2π` between harmonics `m`, `n`
/// of a quarter-wave resonator (`ωm = (2m+1)ω0`).
///
/// Scales the self-Kerr input by `3·(ωmωn/ω0²)` and by the overlap of the
/// squared cosine mode profiles relative to the fundamental (1 for `m = n`,
/// 2/3 otherwise). The sign follows `kerr_hz`.
pub fn cross_kerr(g: &KerrGeometry, m: u32, n: u32, kerr_hz: f64) -> Result<f64> {
    g.validate()?;
    let freq = ((2 * m + 1) * (2 * n + 1)) as f64;
    let overlap = if m == n { 1.0 } else { 2.0 / 3.0 };
    Ok(3.0 * kerr_hz * freq * overlap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tls() -> TlsParams {
        TlsParams {
            q_tls0: 2e4,
            n_c: 1e3,
            beta_exp: 1.0,
            q_other: 1e5,
        }
    }

    fn device() -> KerrGeometry {
        KerrGeometry {
            width_m: 0.5e-6,
            thickness_m: 29e-9,
            j_c: 2e10,
            l_k: 1e-9,
            omega0: 2.0 * PI * 95e9,
        }
    }

    #[test]
    fn tls_limits() {
        let t = tls();
        assert!((qi_of_power(&t, 0.0).unwrap() - t.qi_low_power()).abs() < 1e-9);
        assert!((qi_of_power(&t, 1e30).unwrap() / t.q_other - 1.0).abs() < 1e-6);
        let mut last = 0.0;
        for i in 0..100 {
            let q = qi_of_power(&t, 10f64.powf(i as f64 / 10.0 - 2.0)).unwrap();
            assert!(q >= last && q <= t.q_other);
            last = q;
        }
        assert!(qi_of_power(&t, -1.0).is_err());
        assert!(qi_of_power(&TlsParams { beta_exp: 2.5, ..t }, 1.0).is_err());
    }

    #[test]
    fn kerr_homogeneity() {
        let g = device();
        let cal = KerrCalibration::from_reference(&g, -1.21e3).unwrap();
        let k0 = kerr_scaling(&g, &cal).unwrap();
        assert!((k0 - 1.21e3).abs() < 1e-9);
        let narrow = KerrGeometry { width_m: g.width_m / 2.0, ..g };
        assert!((kerr_scaling(&narrow, &cal).unwrap() / k0 - 4.0).abs() < 1e-12);
        let fast = KerrGeometry { omega0: 2.0 * g.omega0, ..g };
        assert!((kerr_scaling(&fast, &cal).unwrap() / k0 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn q3_values() {
        let g = device();
        let q = q3_bound(&g, -1.21e3).unwrap();
        assert!((q - 95e9 / 1.21e3).abs() < 1e-3);
        assert!((q3_bound(&g, 2.42e3).unwrap() - q / 2.0).abs() < 1e-6);
        assert!(q3_bound(&g, 0.0).is_err());
    }

    #[test]
    fn cross_kerr_scaling() {
        let g = device();
        let k = -1.21e3;
        let self_term = cross_kerr(&g, 0, 0, k).unwrap();
        assert!(self_term < 0.0);
        let c01 = cross_kerr(&g, 0, 1, k).unwrap();
        assert!((c01 / self_term - 3.0 * 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(cross_kerr(&g, 1, 0, k).unwrap(), c01);
    }
}
