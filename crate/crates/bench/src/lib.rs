//! Shared fixtures for the benchmarks.

use kerrkit::synth::{frequency_grid, synth_trace, NoiseModel};
use kerrkit::{ComplexTrace, ResonatorParams, SweepDirection};

/// A 95 GHz nanowire mode with K/2π = −1.21 kHz.
pub fn device() -> ResonatorParams {
    ResonatorParams::from_quality_factors(95.1e9, 2e4, 2.901e4, 0.3, -1.21e3).expect("fixture is valid")
}

pub fn noisy_trace(points: usize) -> ComplexTrace {
    let p = device();
    let freqs = frequency_grid(&p, 5.0, points);
    synth_trace(&p, &freqs, &[0.0], SweepDirection::Up, NoiseModel::Snr { snr_db: 20.0 }, 1)
        .expect("fixture is valid")
        .remove(0)
}
