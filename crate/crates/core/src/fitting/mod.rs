//! Inverse problems: recover resonator, Kerr, BCS and TLS parameters from
//! complex traces and summary data.
//!
//! Every fit returns a typed record together with a [`FitResult`], the
//! serializable summary of parameters, 1σ errors and the covariance.

mod kerr_shift;
mod linear;
mod nonlinear;
mod temperature;
mod tls;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use kerr_shift::{fit_kerr_from_shift, KerrShiftFit, KerrShiftPoint, PhotonCalibrationError};
pub use linear::{fit_linear_trace, LinearFit};
pub use nonlinear::{fit_nonlinear_trace, NonlinearFit, NonlinearOptions, TraceDrive};
pub use temperature::{fit_qi_vs_temperature, TemperatureFit, TemperaturePoint};
pub use tls::{fit_tls, TlsFit, TlsPoint};

use crate::stats::median;
use crate::trace::ComplexTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Linear,
    Nonlinear,
    KerrShift,
    Temperature,
    Tls,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub params: BTreeMap<String, f64>,
    pub sigma: BTreeMap<String, f64>,
    pub residual_rms: f64,
    pub converged: bool,
    pub n_iterations: usize,
    /// Names of the fitted parameters, in covariance order.
    #[serde(default)]
    pub covariance_labels: Vec<String>,
    #[serde(default)]
    pub covariance: Vec<Vec<f64>>,
    /// Asymmetric confidence intervals `(low, high)`, where reported.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub intervals: BTreeMap<String, (f64, f64)>,
    /// Parameters reported only as lower bounds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lower_bounds: Vec<String>,
}

impl FitResult {
    pub(crate) fn new(kind: FitKind) -> Self {
        FitResult {
            kind,
            params: BTreeMap::new(),
            sigma: BTreeMap::new(),
            residual_rms: 0.0,
            converged: false,
            n_iterations: 0,
            covariance_labels: Vec::new(),
            covariance: Vec::new(),
            intervals: BTreeMap::new(),
            lower_bounds: Vec::new(),
        }
    }

    pub(crate) fn set(&mut self, name: &str, value: f64, sigma: f64) {
        self.params.insert(name.to_string(), value);
        self.sigma.insert(name.to_string(), sigma);
    }

    pub(crate) fn set_covariance(&mut self, labels: &[&str], cov: &DMatrix<f64>) {
        self.covariance_labels = labels.iter().map(|s| s.to_string()).collect();
        self.covariance = (0..cov.nrows())
            .map(|i| (0..cov.ncols()).map(|j| cov[(i, j)]).collect())
            .collect();
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn sigma_of(&self, name: &str) -> Option<f64> {
        self.sigma.get(name).copied()
    }
}

/// Component-wise median of the outer 10% of samples (5% at each end, at
/// least one point per side): the off-resonant plateau level.
pub fn plateau_level(trace: &ComplexTrace) -> Complex64 {
    let vals = trace.values();
    let k = (vals.len() / 20).max(1).min(vals.len());
    let outer: Vec<Complex64> = vals[..k]
        .iter()
        .chain(vals[vals.len() - k..].iter())
        .copied()
        .collect();
    let re: Vec<f64> = outer.iter().map(|z| z.re).collect();
    let im: Vec<f64> = outer.iter().map(|z| z.im).collect();
    Complex64::new(median(&re), median(&im))
}

/// Trace divided by its plateau level.
pub fn normalize_trace(trace: &ComplexTrace) -> (ComplexTrace, Complex64) {
    let level = plateau_level(trace);
    (trace.scaled(1.0 / level), level)
}

/// `sqrt(Σ|r|²/N)` for residuals packed as `[re, im]` pairs.
pub(crate) fn complex_rms(residuals: &[f64]) -> f64 {
    let n = residuals.len() / 2;
    if n == 0 {
        return 0.0;
    }
    (residuals.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt()
}

pub(crate) fn real_rms(residuals: &[f64]) -> f64 {
    if residuals.is_empty() {
        return 0.0;
    }
    (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt()
}

/// Delta-method variance of `g(x)` given the covariance of `x`.
pub(crate) fn propagate<G: Fn(&[f64]) -> f64>(g: G, x: &[f64], cov: &DMatrix<f64>) -> f64 {
    let n = x.len();
    let mut grad = vec![0.0; n];
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1e-3);
        probe[j] = x[j] + h;
        let up = g(&probe);
        probe[j] = x[j] - h;
        let down = g(&probe);
        probe[j] = x[j];
        grad[j] = (up - down) / (2.0 * h);
    }
    let mut var = 0.0;
    for i in 0..n {
        for j in 0..n {
            var += grad[i] * cov[(i, j)] * grad[j];
        }
    }
    var.max(0.0)
}
