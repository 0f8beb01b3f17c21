//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use kerrkit::Complex64;

/// Signal and idler response built by finite-difference linearization of
/// the reduced steady-state map `u' = (−iδ + iξ|u|² − 1/2)u + a_in`.
///
/// Returns `(g_s, g_i)` for a signal at `+Δ` with `out = in − c·u`; the
/// idler is reported as the amplitude of the conjugated `−Δ` sideband.
pub fn linearized_response(delta: f64, xi: f64, n: f64, c: f64, big_delta: f64) -> (Complex64, Complex64) {
    let j = Complex64::new(0.0, 1.0);
    let drive = Complex64::new(0.5f64.sqrt(), 0.0);
    let u0 = drive / Complex64::new(0.5, delta - xi * n);
    let map = |u: Complex64| (-j * delta + j * xi * u.norm_sqr() - 0.5) * u + drive;

    // central differences of a cubic carry an exact h² error term, which
    // one Richardson step removes
    let central = |dir: Complex64, h: f64| (map(u0 + dir * h) - map(u0 - dir * h)) / (2.0 * h);
    let richardson = |dir: Complex64| (4.0 * central(dir, 1e-3) - central(dir, 2e-3)) / 3.0;
    let d_re = richardson(Complex64::new(1.0, 0.0));
    let d_im = richardson(j);
    // real Jacobian [[∂Re/∂x, ∂Re/∂y], [∂Im/∂x, ∂Im/∂y]]
    let (j11, j12, j21, j22) = (d_re.re, d_im.re, d_re.im, d_im.im);
    let p = Complex64::new(j11 + j22, j21 - j12) / 2.0;
    let q = Complex64::new(j11 - j22, j21 + j12) / 2.0;

    // [(iΔ−P)  −Q ; −Q*  (iΔ−P*)] [B+ ; B−*] = [1 ; 0]
    let a11 = j * big_delta - p;
    let a12 = -q;
    let a21 = -q.conj();
    let a22 = j * big_delta - p.conj();
    let det = a11 * a22 - a12 * a21;
    let b_plus = a22 / det;
    let b_minus_conj = -a21 / det;
    (1.0 - c * b_plus, -c * b_minus_conj)
}

/// `Δ(T)/Δ(0)` from the weak-coupling gap equation written as a Matsubara
/// sum, `ln(Tc/T) = 2πkT Σ_n [1/ωn − 1/sqrt(ωn² + Δ²)]`, in units of kTc.
pub fn matsubara_gap_ratio(t: f64) -> f64 {
    let euler_gamma = 0.577_215_664_901_532_9_f64;
    let delta0 = std::f64::consts::PI * (-euler_gamma).exp(); // Δ(0)/kTc
    let residual = |gap: f64| {
        let mut sum = 0.0;
        let terms = 200_000;
        for k in 0..terms {
            let w = (2 * k + 1) as f64 * std::f64::consts::PI * t;
            sum += 1.0 / w - 1.0 / (w * w + gap * gap).sqrt();
        }
        // tail: Σ Δ²/(2ω³) beyond the cut-off, as an integral
        let w_end = (2 * terms + 1) as f64 * std::f64::consts::PI * t;
        sum += gap * gap / (8.0 * std::f64::consts::PI * t * w_end * w_end);
        2.0 * std::f64::consts::PI * t * sum - (1.0 / t).ln()
    };
    let (mut lo, mut hi) = (0.0, delta0 * 1.01);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / delta0
}
