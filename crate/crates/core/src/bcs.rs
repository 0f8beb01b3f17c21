//! Temperature-dependent superconductor response in the dirty limit: the gap
//! `Δ(T)`, Mattis-Bardeen complex conductivity, the conduction-limited
//! quality factor and the kinetic-inductance frequency shift.
//!
//! The Mattis-Bardeen integrals are evaluated in units of `Δ(T)` with the
//! inverse-square-root band-edge singularities removed by `E = Δ·cosh u`
//! (lower edges) and `E = Δ·cos θ` (upper edge of the `σ2` window).

use serde::{Deserialize, Serialize};

use crate::constants::{gap_zero, photon_energy, BOLTZMANN};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};

/// How `Δ(T)` is computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapModel {
    /// `Δ0·tanh(1.74·sqrt(Tc/T − 1))`.
    #[default]
    Interpolated,
    /// Weak-coupling BCS gap equation, solved numerically and rescaled to
    /// `Δ0 = 2.08·kB·Tc`.
    SelfConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcsParams {
    pub tc_k: f64,
    /// Kinetic inductance fraction, `0 < α ≤ 1`.
    pub alpha: f64,
    /// Temperature-independent internal quality factor ceiling.
    pub q_i_max: f64,
    /// Resonance frequency at zero temperature.
    pub f0_hz: f64,
}

impl BcsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tc_k.is_finite() && self.tc_k > 0.0) {
            return Err(Error::domain(format!("tc_k must be positive, got {}", self.tc_k)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.q_i_max > 0.0) {
            return Err(Error::domain(format!("q_i_max must be positive, got {}", self.q_i_max)));
        }
        if !(self.f0_hz.is_finite() && self.f0_hz > 0.0) {
            return Err(Error::domain(format!("f0_hz must be positive, got {}", self.f0_hz)));
        }
        if photon_energy(self.f0_hz) >= 2.0 * gap_zero(self.tc_k) {
            return Err(Error::UnsupportedRegime(format!(
                "f0 = {} Hz is above the pair-breaking edge for Tc = {} K",
                self.f0_hz, self.tc_k
            )));
        }
        Ok(())
    }
}

/// Complex conductivity `σ1 − iσ2` normalized to the normal-state value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexConductivity {
    pub sigma1_over_n: f64,
    pub sigma2_over_n: f64,
}

// kB·Tc / Δ_BCS(0) in weak coupling is e^γ/π.
const WEAK_COUPLING_KTC: f64 = 0.566_932_958_655_548_8;

fn check_temperatures(t_k: f64, tc_k: f64) -> Result<()> {
    if !(tc_k.is_finite() && tc_k > 0.0) {
        return Err(Error::domain(format!("tc_k must be positive, got {tc_k}")));
    }
    if !(t_k.is_finite() && t_k >= 0.0) {
        return Err(Error::domain(format!("temperature must be non-negative, got {t_k}")));
    }
    Ok(())
}

/// Superconducting gap at temperature `t_k`, in joules (interpolated form).
pub fn gap_of_t(t_k: f64, tc_k: f64) -> Result<f64> {
    gap_of_t_with(t_k, tc_k, GapModel::Interpolated)
}

pub fn gap_of_t_with(t_k: f64, tc_k: f64, model: GapModel) -> Result<f64> {
    check_temperatures(t_k, tc_k)?;
    if t_k >= tc_k {
        return Ok(0.0);
    }
    let delta0 = gap_zero(tc_k);
    if t_k == 0.0 {
        return Ok(delta0);
    }
    let ratio = match model {
        GapModel::Interpolated => (1.74 * (tc_k / t_k - 1.0).sqrt()).tanh(),
        GapModel::SelfConsistent => bcs_gap_ratio(t_k / tc_k)?,
    };
    Ok(delta0 * ratio)
}

fn fermi(e: f64, kt: f64) -> f64 {
    1.0 / ((e / kt).exp() + 1.0)
}

/// `Δ(T)/Δ(0)` from the weak-coupling gap equation
/// `ln(Δ(0)/Δ) = 2∫₀^∞ f(E)/E dξ`, `E = sqrt(ξ² + Δ²)`, at `t = T/Tc`.
pub fn bcs_gap_ratio(t_reduced: f64) -> Result<f64> {
    if !(t_reduced >= 0.0) {
        return Err(Error::domain(format!("reduced temperature must be ≥ 0, got {t_reduced}")));
    }
    if t_reduced >= 1.0 {
        return Ok(0.0);
    }
    if t_reduced == 0.0 {
        return Ok(1.0);
    }
    let kt = t_reduced * WEAK_COUPLING_KTC;
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        ..Default::default()
    };
    // ξ = r·sinh(u) turns dξ/E into du
    let residual = |r: f64| -> Result<f64> {
        let upper = (46.0 * kt / r).max(1.0) + 1.0;
        let u_max = upper.acosh();
        let thermal = integrate(|u| 2.0 * fermi(r * u.cosh(), kt), 0.0, u_max, &cfg)?;
        Ok((1.0 / r).ln() - thermal.value)
    };
    let (mut lo, mut hi) = (1e-12, 1.0);
    if residual(hi)? >= 0.0 {
        return Ok(1.0);
    }
    if residual(lo)? <= 0.0 {
        return Ok(0.0);
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mattis-Bardeen integrals in reduced units: `w = ħω/Δ`, `tau = kT/Δ`.
/// Requires `0 < w < 2`; `tau = 0` gives the zero-temperature limit.
fn mattis_bardeen_reduced(w: f64, tau: f64) -> Result<(f64, f64)> {
    let cfg = QuadConfig {
        rel_tol: 1e-8,
        abs_tol: 1e-300,
        max_intervals: 4000,
    };
    let coherence = |x: f64| x * x + 1.0 + w * x;

    let sigma1 = if tau == 0.0 {
        0.0
    } else {
        // x = cosh u on [1, 1 + 46τ]; the Fermi factors are < 1e-20 beyond
        let u_max = (1.0 + 46.0 * tau).acosh();
        let integrand = |u: f64| {
            let x = u.cosh();
            let occupation = fermi(x, tau) - fermi(x + w, tau);
            occupation * coherence(x) / ((x + w).powi(2) - 1.0).sqrt()
        };
        2.0 / w * integrate(integrand, 0.0, u_max, &cfg)?.value
    };

    // σ2 window x ∈ [1 − w, 1], split at its midpoint
    let pair = |x: f64| 1.0 - 2.0 * fermi(x + w, tau);
    let mid = 1.0 - 0.5 * w;
    let upper = integrate(
        |theta: f64| {
            let x = theta.cos();
            pair(x) * coherence(x) / ((x + w).powi(2) - 1.0).sqrt()
        },
        0.0,
        mid.acos(),
        &cfg,
    )?;
    let lower = integrate(
        |v: f64| {
            let x = v.cosh() - w;
            pair(x) * coherence(x) / (1.0 - x * x).sqrt()
        },
        0.0,
        (mid + w).acosh(),
        &cfg,
    )?;
    let sigma2 = (upper.value + lower.value) / w;
    Ok((sigma1, sigma2))
}

fn photon_over_gap(f_hz: f64, gap: f64) -> Result<f64> {
    if !(f_hz.is_finite() && f_hz > 0.0) {
        return Err(Error::domain(format!("frequency must be positive, got {f_hz}")));
    }
    let hw = photon_energy(f_hz);
    if gap <= 0.0 || hw >= 2.0 * gap {
        return Err(Error::UnsupportedRegime(format!(
            "photon energy {hw:e} J is not below 2Δ = {:e} J (pair breaking is not modeled)",
            2.0 * gap
        )));
    }
    Ok(hw / gap)
}

/// Dirty-limit Mattis-Bardeen conductivity ratios `σ1/σn`, `σ2/σn`.
pub fn mattis_bardeen(t_k: f64, f_hz: f64, tc_k: f64) -> Result<ComplexConductivity> {
    mattis_bardeen_with(t_k, f_hz, tc_k, GapModel::Interpolated)
}

pub fn mattis_bardeen_with(
    t_k: f64,
    f_hz: f64,
    tc_k: f64,
    model: GapModel,
) -> Result<ComplexConductivity> {
    check_temperatures(t_k, tc_k)?;
    if t_k == 0.0 {
        return Err(Error::domain("mattis_bardeen needs t_k > 0; use sigma2_zero_temperature"));
    }
    let gap = gap_of_t_with(t_k, tc_k, model)?;
    let w = photon_over_gap(f_hz, gap)?;
    let (s1, s2) = mattis_bardeen_reduced(w, BOLTZMANN * t_k / gap)?;
    Ok(ComplexConductivity {
        sigma1_over_n: s1,
        sigma2_over_n: s2,
    })
}

/// `σ2/σn` at `T = 0`.
pub fn sigma2_zero_temperature(f_hz: f64, tc_k: f64) -> Result<f64> {
    check_temperatures(0.0, tc_k)?;
    let w = photon_over_gap(f_hz, gap_zero(tc_k))?;
    Ok(mattis_bardeen_reduced(w, 0.0)?.1)
}

/// Conduction-limited quality factor `(1/α)·σ2/σ1` at `params.f0_hz`.
///
/// Returns `+∞` when `σ1` underflows to zero.
pub fn q_conduction(t_k: f64, params: &BcsParams) -> Result<f64> {
    q_conduction_with(t_k, params, GapModel::Interpolated)
}

pub fn q_conduction_with(t_k: f64, params: &BcsParams, model: GapModel) -> Result<f64> {
    params.validate()?;
    let s = mattis_bardeen_with(t_k, params.f0_hz, params.tc_k, model)?;
    if s.sigma1_over_n == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s.sigma2_over_n / s.sigma1_over_n / params.alpha)
}

/// Internal quality factor `(1/Qi,max + 1/Qσ)⁻¹`.
pub fn q_total(t_k: f64, params: &BcsParams) -> Result<f64> {
    q_total_with(t_k, params, GapModel::Interpolated)
}

pub fn q_total_with(t_k: f64, params: &BcsParams, model: GapModel) -> Result<f64> {
    let q_sigma = q_conduction_with(t_k, params, model)?;
    Ok(1.0 / (1.0 / params.q_i_max + 1.0 / q_sigma))
}

fn london_factor(t_k: f64, tc_k: f64, model: GapModel) -> Result<f64> {
    check_temperatures(t_k, tc_k)?;
    if !(t_k > 0.0 && t_k < tc_k) {
        return Err(Error::domain(format!(
            "temperature {t_k} K outside (0, Tc = {tc_k} K)"
        )));
    }
    let delta0 = gap_zero(tc_k);
    let gap = gap_of_t_with(t_k, tc_k, model)?;
    Ok(gap / delta0 * (delta0 / (2.0 * BOLTZMANN * t_k)).tanh())
}

/// `f0(T)/f0(0) = sqrt(Δ(T)/Δ0 · tanh(Δ0/2kBT))`, the `Lk ≫ Lg` limit.
///
/// For partial kinetic inductance fractions combine [`sigma2_ratio`] with
/// the geometric inductance yourself.
pub fn freq_shift_ratio(t_k: f64, params: &BcsParams) -> Result<f64> {
    freq_shift_ratio_with(t_k, params, GapModel::Interpolated)
}

pub fn freq_shift_ratio_with(t_k: f64, params: &BcsParams, model: GapModel) -> Result<f64> {
    Ok(london_factor(t_k, params.tc_k, model)?.sqrt())
}

/// Dirty-limit penetration depth ratio `λ(T)/λ(0)`.
pub fn penetration_depth_ratio(t_k: f64, tc_k: f64) -> Result<f64> {
    Ok(1.0 / london_factor(t_k, tc_k, GapModel::Interpolated)?.sqrt())
}

/// `σ2(T)/σ2(0)` at `params.f0_hz`.
pub fn sigma2_ratio(t_k: f64, params: &BcsParams) -> Result<f64> {
    let s = mattis_bardeen(t_k, params.f0_hz, params.tc_k)?;
    Ok(s.sigma2_over_n / sigma2_zero_temperature(params.f0_hz, params.tc_k)?)
}

/// One row of a temperature sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcsRow {
    pub t_k: f64,
    pub qi: f64,
    pub f0_ratio: f64,
}

/// `Qi(T)` and `f0(T)/f0(0)` over a list of temperatures.
pub fn bcs_sweep(params: &BcsParams, temperatures: &[f64]) -> Result<Vec<BcsRow>> {
    params.validate()?;
    temperatures
        .iter()
        .map(|&t_k| {
            Ok(BcsRow {
                t_k,
                qi: q_total(t_k, params)?,
                f0_ratio: freq_shift_ratio(t_k, params)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TC: f64 = 13.8;

    fn params() -> BcsParams {
        BcsParams {
            tc_k: TC,
            alpha: 0.9,
            q_i_max: 2.5e4,
            f0_hz: 95e9,
        }
    }

    #[test]
    fn gap_boundaries() {
        assert_eq!(gap_of_t(0.0, TC).unwrap(), 2.08 * BOLTZMANN * TC);
        assert_eq!(gap_of_t(TC, TC).unwrap(), 0.0);
        assert_eq!(gap_of_t(2.0 * TC, TC).unwrap(), 0.0);
        assert!(gap_of_t(-0.1, TC).is_err());
        assert_eq!(gap_of_t_with(0.0, TC, GapModel::SelfConsistent).unwrap(), gap_zero(TC));
        assert_eq!(gap_of_t_with(TC, TC, GapModel::SelfConsistent).unwrap(), 0.0);
    }

    #[test]
    fn gap_is_monotone() {
        for model in [GapModel::Interpolated, GapModel::SelfConsistent] {
            let mut prev = f64::INFINITY;
            for i in 0..=40 {
                let t = TC * i as f64 / 40.0;
                let g = gap_of_t_with(t, TC, model).unwrap();
                assert!(g <= prev, "{model:?} at {t}");
                prev = g;
            }
        }
    }

    #[test]
    fn zero_temperature_sigma2_limit() {
        let s = mattis_bardeen(0.01 * TC, 100e9, TC).unwrap();
        let limit = PI * gap_zero(TC) / photon_energy(100e9);
        assert!((s.sigma2_over_n / limit - 1.0).abs() < 0.01, "{} vs {limit}", s.sigma2_over_n);
        assert!(s.sigma1_over_n < 1e-6);
        assert!(s.sigma1_over_n >= 0.0);
    }

    #[test]
    fn pair_breaking_rejected() {
        let edge = 2.0 * gap_zero(TC) / (crate::constants::HBAR * 2.0 * PI);
        assert!(matches!(
            mattis_bardeen(0.1 * TC, 1.01 * edge, TC),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(mattis_bardeen(0.0, 95e9, TC).is_err());
    }

    #[test]
    fn sigma2_ratio_matches_london_relation_at_low_t() {
        let p = params();
        let ratio = sigma2_ratio(0.15 * TC, &p).unwrap();
        let lambda = penetration_depth_ratio(0.15 * TC, TC).unwrap();
        assert!((ratio * lambda * lambda - 1.0).abs() < 0.01, "{ratio} {lambda}");
    }

    #[test]
    fn alpha_scaling_of_q_conduction() {
        let t = 0.3 * TC;
        let mut p = params();
        p.alpha = 1.0;
        let s = mattis_bardeen(t, p.f0_hz, TC).unwrap();
        assert_eq!(q_conduction(t, &p).unwrap(), s.sigma2_over_n / s.sigma1_over_n);
        let q1 = q_conduction(t, &p).unwrap();
        p.alpha = 0.5;
        assert!((q_conduction(t, &p).unwrap() / q1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn q_total_limits() {
        let p = params();
        // deep in the quasiparticle-free regime the ceiling dominates
        let q = q_total(0.15 * TC, &p).unwrap();
        assert!(q_conduction(0.15 * TC, &p).unwrap() > 1e6);
        assert!((q / p.q_i_max - 1.0).abs() < 0.02);
        let colder = q_total(0.1 * TC, &p).unwrap();
        assert!((colder / p.q_i_max - 1.0).abs() < 1e-4);
        assert!(q <= p.q_i_max);
        // equal rates halve the ceiling
        let t = 0.4 * TC;
        let mut p2 = p;
        p2.q_i_max = q_conduction(t, &p).unwrap();
        assert!((q_total(t, &p2).unwrap() / p2.q_i_max - 0.5).abs() < 1e-12);
    }

    #[test]
    fn q_total_decreases_with_temperature() {
        let p = params();
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let t = TC * (0.1 + 0.5 * i as f64 / 50.0);
            let q = q_total(t, &p).unwrap();
            assert!(q < prev || (prev - q).abs() < 1e-9 * q, "at T = {t}: {q} after {prev}");
            assert!(q <= p.q_i_max);
            prev = q;
        }
        let qc1 = q_conduction(0.2 * TC, &p).unwrap();
        let qc2 = q_conduction(0.4 * TC, &p).unwrap();
        assert!(qc2 < qc1);
    }

    #[test]
    fn frequency_shift() {
        let p = params();
        assert!((freq_shift_ratio(1e-3 * TC, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!(freq_shift_ratio(0.0, &p).is_err());
        assert!(freq_shift_ratio(TC, &p).is_err());

        // direct substitution at T = Tc/2: tanh(Δ0/kB·Tc)
        let t = 0.5 * TC;
        let d0 = gap_zero(TC);
        let expected = (gap_of_t(t, TC).unwrap() / d0 * (d0 / (BOLTZMANN * TC)).tanh()).sqrt();
        assert!((freq_shift_ratio(t, &p).unwrap() - expected).abs() < 1e-15);

        // f0(T)/f0(0) = λ(0)/λ(T)
        for i in 1..20 {
            let t = TC * i as f64 / 20.0;
            let f = freq_shift_ratio(t, &p).unwrap();
            assert!((f * penetration_depth_ratio(t, TC).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn frequency_shift_strictly_decreasing() {
        let p = params();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let t = TC * (0.05 + 0.949 * i as f64 / 199.0);
            let r = freq_shift_ratio(t, &p).unwrap();
            assert!(r < prev && r > 0.0 && r <= 1.0, "at {t}");
            prev = r;
        }
    }

    #[test]
    fn conductivity_signs_and_sigma2_monotone() {
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let t = TC * (0.1 + 0.8 * i as f64 / 39.0);
            let s = mattis_bardeen(t, 95e9, TC).unwrap();
            assert!(s.sigma1_over_n >= 0.0);
            assert!(s.sigma2_over_n > 0.0 && s.sigma2_over_n < prev, "at {t}");
            prev = s.sigma2_over_n;
        }
    }

    #[test]
    fn quadrature_tolerance_convergence() {
        // halving the tolerance moves the result by less than 10× tolerance
        let w = photon_energy(95e9) / gap_of_t(0.4 * TC, TC).unwrap();
        let tau = BOLTZMANN * 0.4 * TC / gap_of_t(0.4 * TC, TC).unwrap();
        let (s1, s2) = mattis_bardeen_reduced(w, tau).unwrap();
        let cfg = QuadConfig {
            rel_tol: 0.5e-8,
            abs_tol: 1e-300,
            max_intervals: 4000,
        };
        let u_max = (1.0 + 46.0 * tau).acosh();
        let f = |e: f64| 1.0 / ((e / tau).exp() + 1.0);
        let tight = 2.0 / w
            * integrate(
                |u: f64| {
                    let x = u.cosh();
                    (f(x) - f(x + w)) * (x * x + 1.0 + w * x) / ((x + w).powi(2) - 1.0).sqrt()
                },
                0.0,
                u_max,
                &cfg,
            )
            .unwrap()
            .value;
        assert!(((s1 - tight) / tight).abs() < 1e-7);
        assert!(s2 > 0.0);
    }

    #[test]
    fn params_validation() {
        let mut p = params();
        assert!(p.validate().is_ok());
        p.alpha = 0.0;
        assert!(p.validate().is_err());
        p.alpha = 1.5;
        assert!(p.validate().is_err());
        let mut p = params();
        p.f0_hz = 2e12;
        assert!(p.validate().is_err());
    }
}
