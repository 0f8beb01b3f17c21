//! Damped least squares (Levenberg-Marquardt) with box bounds and a
//! central-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Stop once an accepted step lowers the cost by less than this fraction.
    pub rel_cost_tol: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
    pub initial_damping: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            max_iterations: 200,
            rel_cost_tol: 1e-12,
            fd_step: 1e-6,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Sum of squared residuals.
    pub ssr: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(JᵀJ)⁺ · SSR/(m − n)` at the solution.
    pub covariance: DMatrix<f64>,
}

impl LmOutcome {
    pub fn sigma(&self) -> Vec<f64> {
        (0..self.x.len())
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
            .collect()
    }
}

fn ssr(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn clamp(x: &mut [f64], bounds: Option<&[(f64, f64)]>) {
    if let Some(b) = bounds {
        for (v, &(lo, hi)) in x.iter_mut().zip(b) {
            *v = v.clamp(lo, hi);
        }
    }
}

fn jacobian<F>(f: &F, x: &[f64], m: usize, cfg: &LmConfig, bounds: Option<&[(f64, f64)]>) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = cfg.fd_step * x[j].abs().max(1.0);
        let (mut lo, mut hi) = (x[j] - h, x[j] + h);
        if let Some(b) = bounds {
            lo = lo.max(b[j].0);
            hi = hi.min(b[j].1);
        }
        probe[j] = hi;
        let up = f(&probe)?;
        probe[j] = lo;
        let down = f(&probe)?;
        probe[j] = x[j];
        let width = hi - lo;
        if width <= 0.0 {
            continue;
        }
        for i in 0..m {
            jac[(i, j)] = (up[i] - down[i]) / width;
        }
    }
    Ok(jac)
}

/// Pseudo-inverse covariance `(JᵀJ)⁺ · SSR/(m − n)`.
pub fn covariance_from_jacobian(jac: &DMatrix<f64>, ssr: f64) -> DMatrix<f64> {
    let (m, n) = jac.shape();
    let jtj = jac.transpose() * jac;
    let scale = if m > n { ssr / (m - n) as f64 } else { 0.0 };
    let svd = jtj.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let inv = svd
        .pseudo_inverse(max_sv * 1e-14)
        .unwrap_or_else(|_| DMatrix::zeros(n, n));
    let cov = inv * scale;
    // enforce exact symmetry
    (&cov + cov.transpose()) * 0.5
}

/// Minimizes `Σ rᵢ(x)²` starting from `x0`.
///
/// Residual evaluations that fail at a trial point count as rejected steps;
/// a failure at `x0` is returned to the caller. When the damping grows
/// without finding a lower cost the current point is a local minimum to
/// working precision and the run is reported as converged.
pub fn levenberg_marquardt<F>(
    f: F,
    x0: &[f64],
    bounds: Option<&[(f64, f64)]>,
    cfg: &LmConfig,
) -> Result<LmOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    if let Some(b) = bounds {
        if b.len() != n {
            return Err(Error::Internal("bounds length does not match parameters".into()));
        }
    }
    let mut x = x0.to_vec();
    clamp(&mut x, bounds);
    let mut r = f(&x)?;
    let m = r.len();
    if m < n {
        return Err(Error::fit(format!("{m} residuals cannot constrain {n} parameters")));
    }
    let mut cost = ssr(&r);
    let mut lambda = cfg.initial_damping;
    let mut scale = DVector::<f64>::zeros(n);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations && !converged {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jac = jacobian(&f, &x, m, cfg, bounds)?;
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * rv;
        for j in 0..n {
            scale[j] = scale[j].max(jtj[(j, j)]);
        }
        let floor = scale.max() * 1e-15;
        // parameters pinned at a bound with the descent direction pointing
        // outward are held fixed for this step
        let pinned: Vec<bool> = (0..n)
            .map(|j| match bounds {
                Some(b) => (x[j] <= b[j].0 && grad[j] > 0.0) || (x[j] >= b[j].1 && grad[j] < 0.0),
                None => false,
            })
            .collect();

        loop {
            let mut a = jtj.clone();
            let mut rhs = -&grad;
            for j in 0..n {
                a[(j, j)] += lambda * scale[j].max(floor).max(f64::MIN_POSITIVE);
            }
            for j in (0..n).filter(|&j| pinned[j]) {
                for k in 0..n {
                    a[(j, k)] = 0.0;
                    a[(k, j)] = 0.0;
                }
                a[(j, j)] = 1.0;
                rhs[j] = 0.0;
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => {
                    lambda *= 4.0;
                    if lambda > 1e20 {
                        converged = true;
                        break;
                    }
                    continue;
                }
            };
            let mut trial = x.clone();
            for j in 0..n {
                trial[j] += step[j];
            }
            clamp(&mut trial, bounds);
            let moved = trial.iter().zip(&x).any(|(a, b)| a != b);
            if !moved {
                converged = true;
                break;
            }
            let trial_r = match f(&trial) {
                Ok(v) if v.iter().all(|e| e.is_finite()) => Some(v),
                _ => None,
            };
            if let Some(tr) = trial_r {
                let trial_cost = ssr(&tr);
                if trial_cost <= cost {
                    let drop = (cost - trial_cost) / cost;
                    x = trial;
                    r = tr;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-15);
                    if drop < cfg.rel_cost_tol {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > 1e20 {
                converged = true;
                break;
            }
        }
    }

    let jac = jacobian(&f, &x, m, cfg, bounds)?;
    let covariance = covariance_from_jacobian(&jac, cost);
    Ok(LmOutcome {
        x,
        residuals: r,
        ssr: cost,
        iterations,
        converged,
        covariance,
    })
}
