//! Degenerate four-wave mixing in the stiff-pump approximation.
//!
//! A strong pump at reduced detuning `δ` fixes the intracavity field `u0`;
//! a weak signal offset by `Δ = (ωs − ωp)/(κ+γ)` couples to its idler at
//! `−Δ` through the linearized Kerr response. The response poles are
//! `λ± = 1/2 ± sqrt((ξn)² − (δ − 2ξn)²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonator::{steady_state_reduced, Branch, ResonatorParams, SweepDirection};

/// Denominators below this magnitude count as sitting on the oscillation pole.
pub const THRESHOLD_GUARD: f64 = 1e-15;

const J: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpPoint {
    pub delta_p: f64,
    pub xi: f64,
    pub n_pump: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub branch: Branch,
    /// κ/(κ+γ) of the resonator the pump drives.
    pub coupling_fraction: f64,
}

impl PumpPoint {
    /// Kerr pull `ξn` of the pumped resonance.
    pub fn pull(&self) -> f64 {
        self.xi * self.n_pump
    }

    /// Reduced intracavity pump amplitude, taking the drive phase as real.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(0.5f64.sqrt(), 0.0) / Complex64::new(0.5, self.delta_p - self.pull())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalDetuning {
    pub delta_s: f64,
}

impl SignalDetuning {
    pub fn new(delta_s: f64) -> Result<Self> {
        if !delta_s.is_finite() {
            return Err(Error::domain("signal detuning must be finite"));
        }
        Ok(SignalDetuning { delta_s })
    }

    /// Signal offset from the pump given in hertz.
    pub fn from_offset_hz(params: &ResonatorParams, offset_hz: f64) -> Result<Self> {
        SignalDetuning::new(offset_hz / params.linewidth_hz())
    }
}

pub fn pump_point(
    params: &ResonatorParams,
    delta_p: f64,
    xi: f64,
    direction: SweepDirection,
) -> Result<PumpPoint> {
    params.validate()?;
    let state = steady_state_reduced(delta_p, xi, direction)?;
    let pull = xi * state.n_reduced;
    let detuned = delta_p - 2.0 * pull;
    let split = Complex64::new(pull * pull - detuned * detuned, 0.0).sqrt();
    Ok(PumpPoint {
        delta_p,
        xi,
        n_pump: state.n_reduced,
        lambda_plus: 0.5 + split,
        lambda_minus: 0.5 - split,
        branch: state.branch,
        coupling_fraction: params.coupling_fraction(),
    })
}

fn pole_product(pp: &PumpPoint, d: &SignalDetuning) -> Result<Complex64> {
    let jd = J * d.delta_s;
    let den = (jd + pp.lambda_plus) * (jd + pp.lambda_minus);
    if !(den.norm() >= THRESHOLD_GUARD) {
        return Err(Error::OscillationThreshold { denominator: den.norm() });
    }
    Ok(den)
}

fn signal_numerator(pp: &PumpPoint, d: &SignalDetuning) -> Complex64 {
    Complex64::new(0.5, -(pp.delta_p - 2.0 * pp.pull() - d.delta_s))
}

/// Reflected signal gain of the equivalent one-port,
/// `g_s = 1 − κ/(κ+γ) · (1/2 − i(δ−2ξn−Δ)) / ((iΔ+λ+)(iΔ+λ−))`.
pub fn gain_one_port(pp: &PumpPoint, d: &SignalDetuning) -> Result<Complex64> {
    let den = pole_product(pp, d)?;
    Ok(1.0 - pp.coupling_fraction * signal_numerator(pp, d) / den)
}

/// Idler response at `−Δ` per unit signal input at `+Δ`.
///
/// Not printed alongside the signal gain; it is the off-diagonal element of
/// the same linearized 2×2 response, `i·κ/(κ+γ)·ξ·(u0*)² / ((iΔ+λ+)(iΔ+λ−))`.
pub fn gain_idler(pp: &PumpPoint, d: &SignalDetuning) -> Result<Complex64> {
    let den = pole_product(pp, d)?;
    let u0 = pp.amplitude();
    Ok(J * pp.coupling_fraction * pp.xi * u0.conj() * u0.conj() / den)
}

/// Signal gain in transmission (port 1 to port 2), normalized like
/// [`crate::resonator::s21_linear`].
pub fn gain_forward(params: &ResonatorParams, pp: &PumpPoint, d: &SignalDetuning) -> Result<Complex64> {
    let den = pole_product(pp, d)?;
    let rotation = Complex64::from_polar(1.0, params.phi_rad) / params.phi_rad.cos();
    Ok(1.0 - params.coupling_fraction() * rotation * signal_numerator(pp, d) / (2.0 * den))
}

/// One row of a gain sweep; `gain` is `None` on an oscillation pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub xi: f64,
    pub delta: f64,
    pub gain: Option<Complex64>,
}

impl GainRow {
    pub fn gain_db(&self) -> Option<f64> {
        self.gain.map(|g| 20.0 * g.norm().log10())
    }
}

/// Forward gain over a `(ξ, δ)` grid, ξ outer and δ inner. Pole hits are
/// reported per point instead of aborting the sweep.
pub fn gain_sweep(
    params: &ResonatorParams,
    xi_list: &[f64],
    delta_grid: &[f64],
    d: &SignalDetuning,
    direction: SweepDirection,
) -> Result<Vec<GainRow>> {
    params.validate()?;
    let mut rows = Vec::with_capacity(xi_list.len() * delta_grid.len());
    for &xi in xi_list {
        for &delta in delta_grid {
            let pp = pump_point(params, delta, xi, direction)?;
            let gain = match gain_forward(params, &pp, d) {
                Ok(g) => Some(g),
                Err(Error::OscillationThreshold { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(GainRow { xi, delta, gain });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonator::{reflection_from_pull, s21_linear};

    fn params(gamma_hz: f64) -> ResonatorParams {
        ResonatorParams {
            f0_hz: 95.1e9,
            kappa_hz: 20e6,
            gamma_hz,
            phi_rad: 0.2,
            kerr_hz: -1.21e3,
        }
    }

    #[test]
    fn pump_off_eigenrates() {
        let p = params(2e6);
        for &d in &[-1.3, 0.0, 0.4] {
            let pp = pump_point(&p, d, 0.0, SweepDirection::Up).unwrap();
            assert!((pp.lambda_plus - Complex64::new(0.5, d.abs())).norm() < 1e-15);
            assert!((pp.lambda_minus - Complex64::new(0.5, -d.abs())).norm() < 1e-15);
        }
    }

    #[test]
    fn eigenrate_identities() {
        let p = params(2e6);
        let pp = pump_point(&p, -0.3, -0.3, SweepDirection::Up).unwrap();
        let pull = pp.pull();
        let det = pp.delta_p - 2.0 * pull;
        assert!((pp.lambda_plus + pp.lambda_minus - 1.0).norm() < 1e-15);
        let prod = 0.25 - (pull * pull - det * det);
        assert!((pp.lambda_plus * pp.lambda_minus - prod).norm() < 1e-12);
    }

    #[test]
    fn pump_off_reductions() {
        let p = params(2e6);
        let d = SignalDetuning::new(0.37).unwrap();
        let pp = pump_point(&p, -0.8, 0.0, SweepDirection::Up).unwrap();
        let g = gain_one_port(&pp, &d).unwrap();
        let gamma = reflection_from_pull(p.coupling_fraction(), -0.8 + 0.37, 0.0);
        assert!((g - gamma).norm() < 1e-12);

        let gf = gain_forward(&p, &pp, &d).unwrap();
        let f_signal = p.frequency_at(-0.8 + 0.37);
        assert!((gf - s21_linear(&p, f_signal)).norm() < 1e-12);
        assert_eq!(gain_idler(&pp, &d).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lossless_symplectic() {
        let p = params(0.0);
        let d = SignalDetuning::new(0.05).unwrap();
        let pp = pump_point(&p, -0.5, -0.3, SweepDirection::Up).unwrap();
        let gs = gain_one_port(&pp, &d).unwrap();
        let gi = gain_idler(&pp, &d).unwrap();
        assert!((gs.norm_sqr() - gi.norm_sqr() - 1.0).abs() < 1e-9);

        let lossy = params(2e6);
        let pp = pump_point(&lossy, -0.5, -0.3, SweepDirection::Up).unwrap();
        let gs = gain_one_port(&pp, &d).unwrap();
        let gi = gain_idler(&pp, &d).unwrap();
        assert!(gs.norm_sqr() - gi.norm_sqr() < 1.0);
    }

    #[test]
    fn pole_is_reported() {
        let p = params(0.0);
        let mut pp = pump_point(&p, 0.0, 0.0, SweepDirection::Up).unwrap();
        pp.lambda_plus = Complex64::new(0.0, 0.0);
        let d = SignalDetuning::new(0.0).unwrap();
        assert!(matches!(
            gain_one_port(&pp, &d),
            Err(Error::OscillationThreshold { .. })
        ));
    }

    #[test]
    fn sweep_layout() {
        let p = params(2e6);
        let d = SignalDetuning::new(0.02).unwrap();
        let deltas: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
        let rows = gain_sweep(&p, &[0.0, -0.2], &deltas, &d, SweepDirection::Up).unwrap();
        assert_eq!(rows.len(), 22);
        assert_eq!(rows[0].xi, 0.0);
        assert_eq!(rows[11].xi, -0.2);
        assert_eq!(rows[12].delta, deltas[1]);
        for row in &rows[..11] {
            let f = p.frequency_at(row.delta + 0.02);
            assert!((row.gain.unwrap() - s21_linear(&p, f)).norm() < 1e-12);
        }
    }
}
