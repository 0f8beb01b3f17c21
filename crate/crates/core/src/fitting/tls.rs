use super::{real_rms, FitKind, FitResult};
use crate::error::{Error, Result};
use crate::loss::{qi_of_power, TlsParams};
use crate::optimize::{levenberg_marquardt, LmConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlsPoint {
    pub n_ph: f64,
    pub qi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TlsFit {
    pub params: TlsParams,
    /// `Q_other` is not resolved by the data; `params.q_other` then holds the
    /// largest observed Qi, a lower bound.
    pub q_other_is_lower_bound: bool,
    pub result: FitResult,
}

const INV_Q_SCALE: f64 = 1e-5;

fn model(n: f64, x: &[f64]) -> f64 {
    let tls = (1.0 + n / x[1].exp()).powf(-x[2] / 2.0) / x[0].exp();
    1.0 / (tls + x[3] * INV_Q_SCALE)
}

/// Fits the saturable TLS loss model on `ln Qi`.
///
/// Parameters are `(ln Q_tls0, ln n_c, β, 1/Q_other)`. When the power-
/// independent channel carries less than half of the loss at the highest
/// measured power, or its rate is not resolved, `Q_other` is reported as a
/// lower bound rather than a point estimate.
pub fn fit_tls(points: &[TlsPoint]) -> Result<TlsFit> {
    if points.len() < 5 {
        return Err(Error::fit(format!("TLS fit needs ≥ 5 points, got {}", points.len())));
    }
    for p in points {
        if !(p.n_ph.is_finite() && p.n_ph >= 0.0 && p.qi.is_finite() && p.qi > 0.0) {
            return Err(Error::fit(format!("invalid TLS point {p:?}")));
        }
    }
    let q_lo = points.iter().map(|p| p.qi).fold(f64::INFINITY, f64::min);
    let q_hi = points.iter().map(|p| p.qi).fold(0.0, f64::max);
    if q_hi <= q_lo * (1.0 + 1e-9) {
        return Err(Error::fit("Qi shows no power dependence; the TLS model is unidentifiable"));
    }
    let n_max = points.iter().map(|p| p.n_ph).fold(0.0, f64::max);
    let n_min = points
        .iter()
        .map(|p| p.n_ph)
        .filter(|&n| n > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(n_max);

    let residuals = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(points.iter().map(|p| model(p.n_ph, x).ln() - p.qi.ln()).collect())
    };
    let cost = |x: &[f64]| residuals(x).map_or(f64::INFINITY, |r| r.iter().map(|v| v * v).sum());

    let v0 = 1.0 / (1.05 * q_hi * INV_Q_SCALE);
    let tls0 = (1.0 / q_lo - 1.0 / (1.05 * q_hi)).max(1e-3 / q_lo);
    let mut best = (f64::INFINITY, [0.0; 4]);
    for i in 0..31 {
        let nc = (n_min / 10.0) * (100.0 * n_max / n_min).powf(i as f64 / 30.0);
        for beta in [0.5, 1.0, 1.5] {
            let x = [-(tls0.ln()), nc.ln(), beta, v0];
            let c = cost(&x);
            if c < best.0 {
                best = (c, x);
            }
        }
    }
    let bounds = [(0.0, 60.0), (-30.0, 60.0), (0.01, 2.0), (0.0, 1e3)];
    let out = levenberg_marquardt(residuals, &best.1, Some(&bounds), &LmConfig::default())?;
    if !out.converged {
        return Err(Error::NotConverged {
            iterations: out.iterations,
        });
    }
    let x = &out.x;
    let sig = out.sigma();
    let inv_other = x[3] * INV_Q_SCALE;
    let q_top = model(n_max, x);
    let other_fraction = inv_other * q_top;
    let unresolved = x[3] <= 0.0 || sig[3] > 0.5 * x[3];
    let lower_bound = other_fraction < 0.5 || unresolved;

    let q_other = if lower_bound { q_hi } else { 1.0 / inv_other };
    let params = TlsParams {
        q_tls0: x[0].exp(),
        n_c: x[1].exp(),
        beta_exp: x[2],
        q_other,
    };
    // guard the public invariants
    qi_of_power(&params, 0.0)?;

    let mut result = FitResult::new(FitKind::Tls);
    result.set("q_tls0", params.q_tls0, params.q_tls0 * sig[0]);
    result.set("n_c", params.n_c, params.n_c * sig[1]);
    result.set("beta_exp", params.beta_exp, sig[2]);
    if lower_bound {
        result.params.insert("q_other".into(), q_other);
    } else {
        result.set("q_other", q_other, q_other * sig[3] / x[3]);
    }
    result.set("qi_low_power", params.qi_low_power(), 0.0);
    result.set("qi_high_power", params.qi_high_power(), 0.0);
    if lower_bound {
        result.lower_bounds.push("q_other".into());
        result.lower_bounds.push("qi_high_power".into());
    }
    result.set_covariance(&["ln_q_tls0", "ln_n_c", "beta_exp", "inv_q_other_e5"], &out.covariance);
    result.residual_rms = real_rms(&out.residuals);
    result.converged = out.converged;
    result.n_iterations = out.iterations;
    Ok(TlsFit {
        params,
        q_other_is_lower_bound: lower_bound,
        result,
    })
}
