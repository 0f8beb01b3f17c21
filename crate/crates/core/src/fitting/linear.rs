use num_complex::Complex64;

use super::{complex_rms, normalize_trace, propagate, FitKind, FitResult};
use crate::error::{Error, Result};
use crate::optimize::{levenberg_marquardt, LmConfig};
use crate::resonator::ResonatorParams;
use crate::trace::ComplexTrace;

/// Low-power resonance fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    /// Recovered parameters with `kerr_hz = 0`.
    pub resonator: ResonatorParams,
    pub q_loaded: f64,
    pub qe_star: f64,
    pub qi: f64,
    /// Complex off-resonant baseline in the units of the input trace.
    pub baseline: Complex64,
    pub result: FitResult,
}

const MIN_POINTS: usize = 50;
const MIN_SPAN_LINEWIDTHS: f64 = 3.0;

pub(crate) fn model(f: f64, f0: f64, q: f64, qe: f64, phi: f64, b: Complex64) -> Complex64 {
    let dip = Complex64::from_polar(q / qe, phi) / Complex64::new(1.0, 2.0 * q * (f - f0) / f0);
    b * (1.0 - dip)
}

fn moving_average(y: &[f64], half: usize) -> Vec<f64> {
    (0..y.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(y.len());
            y[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

struct Guess {
    f0: f64,
    q: f64,
    qe: f64,
    phi: f64,
}

/// f0 from the transmission minimum, Q from the half-maximum width of
/// `|1 − S21|²`, φ from the phase of `1 − S21` at the dip and Qe* from the
/// dip depth.
fn initial_guess(freqs: &[f64], s: &[Complex64]) -> Result<Guess> {
    let depth: Vec<f64> = s.iter().map(|z| (1.0 - z).norm_sqr()).collect();
    let smooth = moving_average(&depth, if s.len() >= 100 { 2 } else { 1 });
    let peak = smooth
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("trace is non-empty");
    let edge = (s.len() / 20).max(1);
    let mut floor: Vec<f64> = smooth[..edge].iter().chain(&smooth[s.len() - edge..]).copied().collect();
    floor.sort_by(|a, b| a.total_cmp(b));
    let half = 0.5 * (smooth[peak] + floor[floor.len() / 2]);

    let crossing = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = peak;
        for i in range {
            if smooth[i] < half {
                let t = (smooth[prev] - half) / (smooth[prev] - smooth[i]);
                return Some(freqs[prev] + t * (freqs[i] - freqs[prev]));
            }
            prev = i;
        }
        None
    };
    let left = crossing(&mut (0..peak).rev());
    let right = crossing(&mut (peak + 1..s.len()));
    let (Some(left), Some(right)) = (left, right) else {
        return Err(Error::fit("trace too narrow: the resonance half-width is not covered"));
    };
    let f0 = freqs[peak];
    let q = f0 / (right - left);
    let dip = 1.0 - s[peak];
    let phi = dip.arg().clamp(-1.4, 1.4);
    let qe = q / dip.norm().max(1e-6);
    Ok(Guess { f0, q, qe, phi })
}

/// Complex least-squares fit of
/// `S21 = b·(1 − (Q/Qe*)e^{iφ}/(1 + 2iQ(f−f0)/f0))`.
///
/// The trace is first divided by its off-resonant plateau level; the
/// residual complex baseline `b` is a nuisance parameter. The internal
/// quality factor follows from `1/Q = 1/Qi + cos φ/Qe*`.
pub fn fit_linear_trace(trace: &ComplexTrace) -> Result<LinearFit> {
    if trace.len() < MIN_POINTS {
        return Err(Error::fit(format!(
            "linear fit needs at least {MIN_POINTS} points, got {}",
            trace.len()
        )));
    }
    let (norm, level) = normalize_trace(trace);
    let freqs = norm.frequencies();
    let s = norm.values();
    let guess = initial_guess(&freqs, &s)?;
    let width = guess.f0 / guess.q;
    if trace.span_hz() < MIN_SPAN_LINEWIDTHS * width {
        return Err(Error::fit(format!(
            "trace too narrow: spans {:.2} linewidths, need {MIN_SPAN_LINEWIDTHS}",
            trace.span_hz() / width
        )));
    }

    let unpack = |x: &[f64]| {
        (
            guess.f0 + x[0] * width,
            x[1].exp(),
            x[2].exp(),
            x[3],
            Complex64::new(x[4], x[5]),
        )
    };
    let residuals = |x: &[f64]| -> Result<Vec<f64>> {
        let (f0, q, qe, phi, b) = unpack(x);
        let mut r = Vec::with_capacity(2 * freqs.len());
        for (&f, &z) in freqs.iter().zip(&s) {
            let d = model(f, f0, q, qe, phi, b) - z;
            r.push(d.re);
            r.push(d.im);
        }
        Ok(r)
    };
    let x0 = [0.0, guess.q.ln(), guess.qe.ln(), guess.phi, 1.0, 0.0];
    let bounds = [
        (-1e3, 1e3),
        (0.0, 50.0),
        (0.0, 50.0),
        (-1.55, 1.55),
        (-10.0, 10.0),
        (-10.0, 10.0),
    ];
    let out = levenberg_marquardt(residuals, &x0, Some(&bounds), &LmConfig::default())?;
    if !out.converged {
        return Err(Error::NotConverged {
            iterations: out.iterations,
        });
    }
    let (f0, q, qe, phi, b) = unpack(&out.x);
    let qi_of = |x: &[f64]| 1.0 / (1.0 / x[1].exp() - x[3].cos() / x[2].exp());
    let qi = qi_of(&out.x);
    if !(qi.is_finite() && qi > 0.0) {
        return Err(Error::fit(format!(
            "fitted Q = {q:.4e}, Qe* = {qe:.4e}, φ = {phi:.4} imply a non-physical internal Q"
        )));
    }
    let resonator = ResonatorParams::from_quality_factors(f0, qi, qe, phi, 0.0)?;
    let sig = out.sigma();
    let cov = &out.covariance;

    let mut result = FitResult::new(FitKind::Linear);
    result.set("f0_hz", f0, sig[0] * width);
    result.set("q_loaded", q, q * sig[1]);
    result.set("qe_star", qe, qe * sig[2]);
    result.set("phi_rad", phi, sig[3]);
    result.set("qi", qi, propagate(qi_of, &out.x, cov).sqrt());
    let kappa_of = |x: &[f64]| (guess.f0 + x[0] * width) * x[3].cos() / x[2].exp();
    let gamma_of = |x: &[f64]| (guess.f0 + x[0] * width) / qi_of(x);
    result.set("kappa_hz", resonator.kappa_hz, propagate(kappa_of, &out.x, cov).sqrt());
    result.set("gamma_hz", resonator.gamma_hz, propagate(gamma_of, &out.x, cov).sqrt());
    let baseline = level * b;
    result.set("baseline_re", baseline.re, (level * Complex64::new(sig[4], 0.0)).norm());
    result.set("baseline_im", baseline.im, (level * Complex64::new(0.0, sig[5])).norm());
    result.residual_rms = complex_rms(&out.residuals);
    result.converged = out.converged;
    result.n_iterations = out.iterations;
    result.set_covariance(
        &["f0_offset_linewidths", "ln_q_loaded", "ln_qe_star", "phi_rad", "b_re", "b_im"],
        cov,
    );

    Ok(LinearFit {
        resonator,
        q_loaded: q,
        qe_star: qe,
        qi,
        baseline,
        result,
    })
}
