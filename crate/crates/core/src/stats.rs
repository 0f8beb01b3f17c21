//! Small regression and order-statistics helpers shared by the fitting code.

use crate::error::{Error, Result};

/// Ordinary least-squares line `y = intercept + slope·x` with its covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub intercept_err: f64,
    pub slope_err: f64,
    /// Covariance of (intercept, slope).
    pub cov_intercept_slope: f64,
    pub residual_rms: f64,
}

/// Fits a straight line by ordinary least squares.
///
/// Needs at least three points with distinct abscissas; the 1σ errors use
/// the residual variance with `n − 2` degrees of freedom.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::fit("abscissa/ordinate length mismatch"));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::fit(format!("need at least 3 points, got {n}")));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::fit("non-finite sample"));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let spread = xs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    if sxx <= (1e-12 * spread).powi(2) * nf {
        return Err(Error::fit("degenerate abscissas"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let s2 = ssr / (nf - 2.0);
    let var_slope = s2 / sxx;
    let var_intercept = s2 * (1.0 / nf + mx * mx / sxx);
    Ok(LineFit {
        intercept,
        slope,
        intercept_err: var_intercept.sqrt(),
        slope_err: var_slope.sqrt(),
        cov_intercept_slope: -mx * var_slope,
        residual_rms: (ssr / nf).sqrt(),
    })
}

/// Power law `y = prefactor · x^exponent` fitted as a line in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub prefactor_err: f64,
    pub exponent_err: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.iter().chain(ys).any(|v| *v <= 0.0) {
        return Err(Error::fit("power-law fit needs strictly positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let line = fit_line(&lx, &ly)?;
    let prefactor = line.intercept.exp();
    Ok(PowerLawFit {
        prefactor,
        exponent: line.slope,
        prefactor_err: prefactor * line.intercept_err,
        exponent_err: line.slope_err,
    })
}

/// Median of a slice (NaNs sort last). Panics on an empty slice.
pub fn median(values: &[f64]) -> f64 {
    percentile(values, 50.0)
}

/// Linear-interpolated percentile, `p` in [0, 100].
pub fn percentile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of empty slice");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = (p / 100.0).clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    v[lo] * (1.0 - w) + v[hi] * w
}
