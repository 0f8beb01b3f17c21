//! Modeling and analysis toolkit for superconducting kinetic-inductance
//! resonators at millimeter-wave frequencies.
//!
//! The crate covers the forward models (linear and Kerr-nonlinear complex
//! transmission, degenerate four-wave-mixing gain, Mattis-Bardeen loss and
//! two-level-system saturation) and the inverse pipeline that recovers device
//! parameters from complex spectra.
//!
//! Frequencies and rates cross every public interface in hertz; angular
//! frequencies only appear inside the model functions.

pub mod bcs;
pub mod constants;
pub mod error;
pub mod fitting;
pub mod loss;
pub mod materials;
pub mod mixing;
pub mod optimize;
pub mod quad;
pub mod report;
pub mod resonator;
pub mod stats;
pub mod synth;
pub mod trace;

pub use num_complex::Complex64;

pub use bcs::{BcsParams, ComplexConductivity, GapModel};
pub use error::{Error, Result};
pub use fitting::{FitKind, FitResult};
pub use loss::{KerrGeometry, TlsParams};
pub use materials::{FilmProperties, UniversalFit};
pub use mixing::{PumpPoint, SignalDetuning};
pub use resonator::{Branch, DriveCondition, ResonatorParams, SteadyState, SweepDirection};
pub use trace::{ComplexTrace, TracePoint};
