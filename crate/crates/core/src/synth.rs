//! Synthetic traces from the forward model, with reproducible noise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonator::{s21_linear, s21_nonlinear, DriveCondition, ResonatorParams, SweepDirection};
use crate::trace::ComplexTrace;

/// Default seed when none is configured.
pub const DEFAULT_SEED: u64 = 0x6b65_7272;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NoiseModel {
    #[default]
    None,
    /// Additive circular complex Gaussian noise; SNR relative to a unit
    /// off-resonant baseline.
    Snr { snr_db: f64 },
}

impl NoiseModel {
    fn sigma(&self) -> Result<Option<f64>> {
        match *self {
            NoiseModel::None => Ok(None),
            NoiseModel::Snr { snr_db } if snr_db.is_infinite() && snr_db > 0.0 => Ok(None),
            NoiseModel::Snr { snr_db } if snr_db.is_finite() => {
                Ok(Some((10f64.powf(-snr_db / 10.0) / 2.0).sqrt()))
            }
            NoiseModel::Snr { snr_db } => Err(Error::domain(format!("invalid SNR {snr_db} dB"))),
        }
    }
}

/// `n` evenly spaced frequencies spanning `±half_span` linewidths about f0.
pub fn frequency_grid(params: &ResonatorParams, half_span: f64, n: usize) -> Vec<f64> {
    let lw = params.linewidth_hz();
    if n == 1 {
        return vec![params.f0_hz];
    }
    (0..n)
        .map(|i| params.f0_hz + lw * half_span * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
        .collect()
}

/// One trace per drive power. Zero power evaluates the linear response.
/// The noise stream runs through the traces in order, so the whole ladder
/// is fixed by `seed`.
pub fn synth_trace(
    params: &ResonatorParams,
    freqs: &[f64],
    powers_w: &[f64],
    direction: SweepDirection,
    noise: NoiseModel,
    seed: u64,
) -> Result<Vec<ComplexTrace>> {
    params.validate()?;
    let sigma = noise.sigma()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = match sigma {
        Some(s) => Some(Normal::new(0.0, s).map_err(|e| Error::domain(e.to_string()))?),
        None => None,
    };
    let mut out = Vec::with_capacity(powers_w.len());
    for &p in powers_w {
        let mut values = Vec::with_capacity(freqs.len());
        for &f in freqs {
            let clean = if p == 0.0 {
                s21_linear(params, f)
            } else {
                s21_nonlinear(params, &DriveCondition::new(p, f)?, direction)?
            };
            let noisy = match &normal {
                Some(n) => clean + Complex64::new(n.sample(&mut rng), n.sample(&mut rng)),
                None => clean,
            };
            values.push(noisy);
        }
        out.push(
            ComplexTrace::from_samples(freqs, &values)?
                .with_power(p)
                .with_direction(direction),
        );
    }
    Ok(out)
}
