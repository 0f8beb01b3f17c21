use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{complex_rms, normalize_trace, propagate, FitKind, FitResult, LinearFit};
use crate::error::{Error, Result};
use crate::optimize::{levenberg_marquardt, LmConfig};
use crate::resonator::{bistable_interval, s21_reduced, DriveCondition, ResonatorParams};
use crate::trace::ComplexTrace;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NonlinearOptions {
    /// Also refit f0, κ and φ jointly across the power ladder instead of
    /// holding them at their low-power values.
    pub free_linear: bool,
}

/// Per-trace outcome of a nonlinear fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceDrive {
    pub p_in_w: f64,
    /// Reduced drive at f0.
    pub xi: f64,
    pub xi_sigma: f64,
    pub gamma_hz: f64,
    pub kerr_hz: f64,
    pub kerr_sigma_hz: f64,
    /// Three steady states coexist somewhere in the trace.
    pub bifurcated: bool,
    /// Drive is resolved above noise; only these traces enter the Kerr estimate.
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearFit {
    pub resonator: ResonatorParams,
    pub kerr_hz: f64,
    pub kerr_sigma_hz: f64,
    pub traces: Vec<TraceDrive>,
    pub result: FitResult,
}

struct Prepared {
    freqs: Vec<f64>,
    values: Vec<Complex64>,
    power: f64,
    trace: ComplexTrace,
    b0: Complex64,
}

/// Shared linear parameters `(f0, κ, φ)`.
#[derive(Clone, Copy)]
struct Shared {
    f0: f64,
    kappa: f64,
    phi: f64,
}

fn trace_residuals(
    p: &Prepared,
    shared: Shared,
    xi_ref: f64,
    gamma: f64,
    b: Complex64,
    out: &mut Vec<f64>,
) -> Result<()> {
    let params = ResonatorParams {
        f0_hz: shared.f0,
        kappa_hz: shared.kappa,
        gamma_hz: gamma,
        phi_rad: shared.phi,
        kerr_hz: 0.0,
    };
    let lw = params.linewidth_hz();
    for (&f, &z) in p.freqs.iter().zip(&p.values) {
        let delta = (f - shared.f0) / lw;
        // ξ scales as 1/ω through the photon flux
        let xi = xi_ref * shared.f0 / f;
        let (s, _) = s21_reduced(&params, delta, xi, p.trace.sweep_direction)?;
        let d = b * s - z;
        out.push(d.re);
        out.push(d.im);
    }
    Ok(())
}

/// Kerr shift in hertz implied by `ξ` at f0 for a given drive and γ.
fn kerr_from_xi(shared: Shared, gamma: f64, power: f64, xi: f64) -> f64 {
    let unit = ResonatorParams {
        f0_hz: shared.f0,
        kappa_hz: shared.kappa,
        gamma_hz: gamma,
        phi_rad: shared.phi,
        kerr_hz: 1.0,
    };
    let per_hz = DriveCondition {
        p_in_w: power,
        f_drive_hz: shared.f0,
    }
    .xi(&unit);
    xi / per_hz
}

/// Per-trace parameters `(ξ, ln γ, Re b, Im b)`.
fn fit_single(p: &Prepared, shared: Shared, gamma0: f64) -> Result<(Vec<f64>, DMatrix<f64>, usize, bool)> {
    let cost = |xi: f64| -> f64 {
        let mut r = Vec::with_capacity(2 * p.freqs.len());
        match trace_residuals(p, shared, xi, gamma0, p.b0, &mut r) {
            Ok(()) => r.iter().map(|v| v * v).sum(),
            Err(_) => f64::INFINITY,
        }
    };
    let best = (0..=300)
        .map(|i| -1.5 + 3.0 * i as f64 / 300.0)
        .map(|xi| (xi, cost(xi)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(xi, _)| xi)
        .unwrap_or(0.0);

    let residuals = |x: &[f64]| -> Result<Vec<f64>> {
        let mut r = Vec::with_capacity(2 * p.freqs.len());
        trace_residuals(p, shared, x[0], x[1].exp(), Complex64::new(x[2], x[3]), &mut r)?;
        Ok(r)
    };
    let lg = gamma0.ln();
    let x0 = [best, lg, p.b0.re, p.b0.im];
    let bounds = [(-3.0, 3.0), (lg - 12.0, lg + 12.0), (-10.0, 10.0), (-10.0, 10.0)];
    let out = levenberg_marquardt(residuals, &x0, Some(&bounds), &LmConfig::default())?;
    Ok((out.x.clone(), out.covariance.clone(), out.iterations, out.converged))
}

/// Fits a power ladder with the Kerr model.
///
/// Each trace gets its own reduced drive `ξ`, internal loss `γ` and complex
/// baseline; `(f0, κ, φ)` stay at the low-power values unless
/// `opts.free_linear` is set. Only the branch selected by each trace's sweep
/// direction enters the residuals. The Kerr shift is the inverse-variance
/// mean of the per-trace estimates whose `ξ` is resolved above noise.
pub fn fit_nonlinear_trace(
    traces: &[ComplexTrace],
    low_power: &LinearFit,
    opts: NonlinearOptions,
) -> Result<NonlinearFit> {
    if traces.is_empty() {
        return Err(Error::fit("nonlinear fit needs at least one trace"));
    }
    let lp = low_power.resonator;
    let gamma0 = lp.gamma_hz.max(1e-6 * lp.kappa_hz);
    let mut prepared = Vec::with_capacity(traces.len());
    for (i, t) in traces.iter().enumerate() {
        let power = match t.p_in_w {
            Some(p) if p > 0.0 && p.is_finite() => p,
            _ => return Err(Error::fit(format!("trace {i} has no positive drive power"))),
        };
        let (norm, level) = normalize_trace(t);
        prepared.push(Prepared {
            freqs: norm.frequencies(),
            values: norm.values(),
            power,
            trace: norm,
            b0: low_power.baseline / level,
        });
    }
    let mut shared = Shared {
        f0: lp.f0_hz,
        kappa: lp.kappa_hz,
        phi: lp.phi_rad,
    };

    let mut per_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = true;
    for p in &prepared {
        let (x, cov, it, ok) = fit_single(p, shared, gamma0)?;
        iterations += it;
        converged &= ok;
        per_trace.push((x, cov));
    }

    let mut joint_cov: Option<DMatrix<f64>> = None;
    if opts.free_linear {
        let width = lp.linewidth_hz();
        let unpack_shared = |x: &[f64]| Shared {
            f0: lp.f0_hz + x[0] * width,
            kappa: x[1].exp(),
            phi: x[2],
        };
        let residuals = |x: &[f64]| -> Result<Vec<f64>> {
            let sh = unpack_shared(x);
            let mut r = Vec::new();
            for (k, p) in prepared.iter().enumerate() {
                let o = 3 + 4 * k;
                trace_residuals(p, sh, x[o], x[o + 1].exp(), Complex64::new(x[o + 2], x[o + 3]), &mut r)?;
            }
            Ok(r)
        };
        let mut x0 = vec![0.0, lp.kappa_hz.ln(), lp.phi_rad];
        let mut bounds = vec![(-100.0, 100.0), (lp.kappa_hz.ln() - 5.0, lp.kappa_hz.ln() + 5.0), (-1.55, 1.55)];
        for (x, _) in &per_trace {
            x0.extend_from_slice(x);
            bounds.extend([(-3.0, 3.0), (x[1] - 12.0, x[1] + 12.0), (-10.0, 10.0), (-10.0, 10.0)]);
        }
        let out = levenberg_marquardt(residuals, &x0, Some(&bounds), &LmConfig::default())?;
        iterations += out.iterations;
        converged &= out.converged;
        shared = unpack_shared(&out.x);
        for (k, slot) in per_trace.iter_mut().enumerate() {
            let o = 3 + 4 * k;
            slot.0 = out.x[o..o + 4].to_vec();
            slot.1 = out.covariance.view((o, o), (4, 4)).into_owned();
        }
        joint_cov = Some(out.covariance);
    }

    // residuals at the final parameters
    let mut all_res = Vec::new();
    for (p, (x, _)) in prepared.iter().zip(&per_trace) {
        trace_residuals(p, shared, x[0], x[1].exp(), Complex64::new(x[2], x[3]), &mut all_res)?;
    }

    let mut drives = Vec::with_capacity(prepared.len());
    for (p, (x, cov)) in prepared.iter().zip(&per_trace) {
        let xi_sigma = cov[(0, 0)].max(0.0).sqrt();
        let k_of = |v: &[f64]| kerr_from_xi(shared, v[1].exp(), p.power, v[0]);
        let sub = cov.view((0, 0), (2, 2)).into_owned();
        let kerr_sigma = propagate(k_of, &x[..2], &sub).sqrt();
        drives.push(TraceDrive {
            p_in_w: p.power,
            xi: x[0],
            xi_sigma,
            gamma_hz: x[1].exp(),
            kerr_hz: k_of(&x[..2]),
            kerr_sigma_hz: kerr_sigma,
            bifurcated: bistable_interval(x[0]).is_some(),
            significant: x[0].abs() > (3.0 * xi_sigma).max(1e-6),
        });
    }
    let used: Vec<&TraceDrive> = drives.iter().filter(|d| d.significant).collect();
    if used.is_empty() {
        return Err(Error::fit(
            "Kerr shift is underdetermined: no trace has a reduced drive distinguishable from 0",
        ));
    }
    let (mut wsum, mut ksum) = (0.0, 0.0);
    for d in &used {
        let s = d.kerr_sigma_hz.max(1e-12 * d.kerr_hz.abs()).max(1e-300);
        let w = 1.0 / (s * s);
        wsum += w;
        ksum += w * d.kerr_hz;
    }
    let kerr_hz = ksum / wsum;
    let kerr_sigma_hz = wsum.sqrt().recip();

    let gamma_ref = drives[0].gamma_hz;
    let resonator = ResonatorParams {
        f0_hz: shared.f0,
        kappa_hz: shared.kappa,
        gamma_hz: gamma_ref,
        phi_rad: shared.phi,
        kerr_hz,
    };
    let mut result = FitResult::new(FitKind::Nonlinear);
    result.set("kerr_hz", kerr_hz, kerr_sigma_hz);
    result.set("f0_hz", shared.f0, 0.0);
    result.set("kappa_hz", shared.kappa, 0.0);
    result.set("phi_rad", shared.phi, 0.0);
    if let Some(cov) = &joint_cov {
        let width = lp.linewidth_hz();
        result.sigma.insert("f0_hz".into(), cov[(0, 0)].max(0.0).sqrt() * width);
        result
            .sigma
            .insert("kappa_hz".into(), cov[(1, 1)].max(0.0).sqrt() * shared.kappa);
        result.sigma.insert("phi_rad".into(), cov[(2, 2)].max(0.0).sqrt());
    }
    let mut labels = Vec::new();
    for (k, d) in drives.iter().enumerate() {
        result.set(&format!("xi_{k}"), d.xi, d.xi_sigma);
        result.set(&format!("gamma_hz_{k}"), d.gamma_hz, 0.0);
        result.set(&format!("kerr_hz_{k}"), d.kerr_hz, d.kerr_sigma_hz);
        labels.push(format!("xi_{k}"));
    }
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        drives.len(),
        drives.iter().map(|d| d.xi_sigma * d.xi_sigma),
    ));
    let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    result.set_covariance(&label_refs, &diag);
    result.residual_rms = complex_rms(&all_res);
    result.converged = converged;
    result.n_iterations = iterations;

    Ok(NonlinearFit {
        resonator,
        kerr_hz,
        kerr_sigma_hz,
        traces: drives,
        result,
    })
}
