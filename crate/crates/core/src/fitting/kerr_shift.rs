use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{real_rms, FitKind, FitResult};
use crate::error::{Error, Result};
use crate::stats::percentile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrShiftPoint {
    pub n_ph: f64,
    /// Frequency of maximum occupation.
    pub f_peak_hz: f64,
    /// Optional 1σ on the peak frequency; unit weights when absent.
    pub sigma_hz: Option<f64>,
}

/// Global (common-mode) uncertainty of the photon-number calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhotonCalibrationError {
    /// `n_ph` off by `10^u`, `u` uniform in `[−decades, decades]`.
    LogUniform { decades: f64 },
    /// Incident power off by a Gaussian error in dB.
    PowerDb { sigma_db: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KerrShiftFit {
    pub kerr_hz: f64,
    pub kerr_sigma_hz: f64,
    /// 15.87/84.13 percentile band of the slope under the calibration error.
    pub band_hz: Option<(f64, f64)>,
    pub result: FitResult,
}

const MC_SAMPLES: usize = 20_000;

/// Weighted straight-line fit of `f_peak − f0` against `n_ph` through the
/// origin; the slope is K/2π.
pub fn fit_kerr_from_shift(
    points: &[KerrShiftPoint],
    f0_hz: f64,
    calibration: Option<PhotonCalibrationError>,
    seed: u64,
) -> Result<KerrShiftFit> {
    if points.len() < 3 {
        return Err(Error::fit(format!("Kerr shift fit needs ≥ 3 points, got {}", points.len())));
    }
    for p in points {
        if !(p.n_ph.is_finite() && p.n_ph >= 0.0 && p.f_peak_hz.is_finite()) {
            return Err(Error::fit(format!("invalid shift point {p:?}")));
        }
        if let Some(s) = p.sigma_hz {
            if !(s > 0.0) {
                return Err(Error::fit(format!("sigma_hz must be positive, got {s}")));
            }
        }
    }
    let positive: Vec<f64> = points.iter().map(|p| p.n_ph).filter(|&n| n > 0.0).collect();
    let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positive.iter().copied().fold(0.0, f64::max);
    if positive.is_empty() || hi == lo {
        return Err(Error::fit("degenerate photon numbers: all abscissas equal"));
    }
    if hi / lo < 10.0 {
        return Err(Error::fit(format!(
            "photon numbers span {:.2} decades, need at least one",
            (hi / lo).log10()
        )));
    }

    let weights: Vec<f64> = points
        .iter()
        .map(|p| p.sigma_hz.map_or(1.0, |s| 1.0 / (s * s)))
        .collect();
    let shifts: Vec<f64> = points.iter().map(|p| p.f_peak_hz - f0_hz).collect();
    let slope_for = |scale: f64| {
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for ((p, w), y) in points.iter().zip(&weights).zip(&shifts) {
            let x = p.n_ph * scale;
            sxy += w * x * y;
            sxx += w * x * x;
        }
        sxy / sxx
    };
    let slope = slope_for(1.0);
    let resid: Vec<f64> = points
        .iter()
        .zip(&shifts)
        .map(|(p, y)| y - slope * p.n_ph)
        .collect();
    let sxx: f64 = points.iter().zip(&weights).map(|(p, w)| w * p.n_ph * p.n_ph).sum();
    let dof = (points.len() - 1) as f64;
    let var = if points.iter().any(|p| p.sigma_hz.is_some()) {
        let chi2: f64 = resid.iter().zip(&weights).map(|(r, w)| w * r * r).sum();
        (chi2 / dof).max(1.0) / sxx
    } else {
        resid.iter().map(|r| r * r).sum::<f64>() / dof / sxx
    };
    let sigma = var.sqrt();

    let band = calibration.map(|cal| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gauss = Normal::new(0.0, 1.0).expect("unit normal");
        let samples: Vec<f64> = (0..MC_SAMPLES)
            .map(|_| {
                let scale = match cal {
                    PhotonCalibrationError::LogUniform { decades } => {
                        10f64.powf(rng.random_range(-decades..=decades))
                    }
                    PhotonCalibrationError::PowerDb { sigma_db } => {
                        10f64.powf(sigma_db * gauss.sample(&mut rng) / 10.0)
                    }
                };
                slope_for(scale)
            })
            .collect();
        (percentile(&samples, 15.87), percentile(&samples, 84.13))
    });

    let mut result = FitResult::new(FitKind::KerrShift);
    result.set("kerr_hz", slope, sigma);
    result.set_covariance(&["kerr_hz"], &DMatrix::from_element(1, 1, var));
    if let Some(b) = band {
        result.intervals.insert("kerr_hz".into(), b);
    }
    result.residual_rms = real_rms(&resid);
    result.converged = true;
    result.n_iterations = 1;
    Ok(KerrShiftFit {
        kerr_hz: slope,
        kerr_sigma_hz: sigma,
        band_hz: band,
        result,
    })
}
