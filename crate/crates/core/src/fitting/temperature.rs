use super::{propagate, real_rms, FitKind, FitResult};
use crate::bcs::{mattis_bardeen, BcsParams};
use crate::error::{Error, Result};
use crate::optimize::{levenberg_marquardt, LmConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperaturePoint {
    pub t_k: f64,
    pub qi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureFit {
    pub params: BcsParams,
    pub result: FitResult,
}

// 1/Qi,max is fitted as u·INV_Q_SCALE with u ≥ 1e-7, i.e. 1/Qi,max ≥ 1e-12.
const INV_Q_SCALE: f64 = 1e-5;
const U_MIN: f64 = 1e-7;
// the model is trusted up to this fraction of Tc
const MAX_REDUCED_T: f64 = 0.95;

/// `σ2/σ1` at each temperature, or `None` where σ1 underflows.
fn conduction_ratios(points: &[TemperaturePoint], tc_k: f64, f0_hz: f64) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            let s = mattis_bardeen(p.t_k, f0_hz, tc_k)?;
            Ok(if s.sigma1_over_n > 0.0 {
                s.sigma2_over_n / s.sigma1_over_n
            } else {
                f64::INFINITY
            })
        })
        .collect()
}

fn log_residuals(points: &[TemperaturePoint], ratios: &[f64], alpha: f64, inv_qmax: f64) -> Vec<f64> {
    points
        .iter()
        .zip(ratios)
        .map(|(p, r)| {
            let model = 1.0 / (inv_qmax + alpha / r);
            model.ln() - p.qi.ln()
        })
        .collect()
}

/// Fits `(α, Tc, Qi,max)` of the Mattis-Bardeen loss model to `Qi(T)` by
/// least squares on `ln Qi`. A coarse grid over `(Tc, α)` seeds the
/// damped least-squares refinement.
pub fn fit_qi_vs_temperature(points: &[TemperaturePoint], f0_hz: f64) -> Result<TemperatureFit> {
    if points.len() < 5 {
        return Err(Error::fit(format!(
            "temperature fit needs ≥ 5 points, got {}",
            points.len()
        )));
    }
    for p in points {
        if !(p.t_k.is_finite() && p.t_k > 0.0 && p.qi.is_finite() && p.qi > 0.0) {
            return Err(Error::fit(format!("invalid temperature point {p:?}")));
        }
    }
    let t_min = points.iter().map(|p| p.t_k).fold(f64::INFINITY, f64::min);
    let t_max = points.iter().map(|p| p.t_k).fold(0.0, f64::max);
    let q_peak = points.iter().map(|p| p.qi).fold(0.0, f64::max);
    let tc_lo = t_max / MAX_REDUCED_T;
    let tc_hi = (t_min / 0.02).max(1.5 * tc_lo);

    // coarse grid: σ2/σ1 only depends on Tc, so α and Qi,max are cheap
    let u_start = INV_Q_SCALE.recip() / (1.2 * q_peak);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..24 {
        let tc = tc_lo * (tc_hi / tc_lo).powf(i as f64 / 23.0);
        let Ok(ratios) = conduction_ratios(points, tc, f0_hz) else {
            continue;
        };
        for j in 0..13 {
            let alpha = 10f64.powf(-3.0 + 0.25 * j as f64);
            let r = log_residuals(points, &ratios, alpha, u_start * INV_Q_SCALE);
            let cost: f64 = r.iter().map(|v| v * v).sum();
            if cost < best.0 {
                best = (cost, tc, alpha);
            }
        }
    }
    if !best.0.is_finite() {
        return Err(Error::fit("temperatures lie outside the supported Mattis-Bardeen regime"));
    }

    let residuals = |x: &[f64]| -> Result<Vec<f64>> {
        let ratios = conduction_ratios(points, x[1], f0_hz)?;
        Ok(log_residuals(points, &ratios, x[0], x[2] * INV_Q_SCALE))
    };
    let bounds = [(1e-6, 1.0), (tc_lo, 100.0 * tc_hi), (U_MIN, 1e3)];
    let x0 = [best.2, best.1, u_start];
    // the conductivity integrals carry ~1e-8 relative quadrature noise, so
    // difference steps must be much coarser than that
    let cfg = LmConfig {
        fd_step: 1e-4,
        ..LmConfig::default()
    };
    let out = levenberg_marquardt(residuals, &x0, Some(&bounds), &cfg)?;
    if !out.converged {
        return Err(Error::NotConverged {
            iterations: out.iterations,
        });
    }
    let (alpha, tc, u) = (out.x[0], out.x[1], out.x[2]);
    let q_i_max = 1.0 / (u * INV_Q_SCALE);
    let params = BcsParams {
        tc_k: tc,
        alpha,
        q_i_max,
        f0_hz,
    };
    params.validate()?;
    let sig = out.sigma();
    let mut result = FitResult::new(FitKind::Temperature);
    result.set("alpha", alpha, sig[0]);
    result.set("tc_k", tc, sig[1]);
    let qmax_of = |x: &[f64]| 1.0 / (x[2] * INV_Q_SCALE);
    result.set("q_i_max", q_i_max, propagate(qmax_of, &out.x, &out.covariance).sqrt());
    result.set("f0_hz", f0_hz, 0.0);
    if u <= U_MIN * (1.0 + 1e-9) {
        result.lower_bounds.push("q_i_max".into());
    }
    result.set_covariance(&["alpha", "tc_k", "inv_q_i_max_e5"], &out.covariance);
    result.residual_rms = real_rms(&out.residuals);
    result.converged = out.converged;
    result.n_iterations = out.iterations;
    Ok(TemperatureFit { params, result })
}
