//! Simulation and DSP library for dual-polarization coherent
//! digital-subcarrier-multiplexing (DSCM) links with pilot-tone polarization
//! demultiplexing and receiver XY-skew calibration.
//!
//! Sample streams are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod channel;
pub mod error;
pub mod mgpd;
pub mod pipeline;
pub mod polaris;
pub mod rng;
pub mod rx;
pub mod scalar;
pub mod signal;
pub mod tx;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Block = signal::ComplexBlock<f64>;
pub type Block32 = signal::ComplexBlock<f32>;
pub type Waveform = signal::DualPolWaveform<f64>;
pub type Waveform32 = signal::DualPolWaveform<f32>;
pub type Capture = signal::QuadTributaryCapture<f64>;
pub type Capture32 = signal::QuadTributaryCapture<f32>;
pub type Trajectory = channel::JonesTrajectory;
