//! Sample-domain value types and primitive block operations.
//!
//! Every block carries its sample rate explicitly. Operations that combine
//! blocks reject rate mismatches instead of resampling implicitly.
//!
//! All frequency-domain operations treat a block as one period of a periodic
//! signal (circular processing over the whole block).

mod delay;
mod resample;
mod rrc;
pub mod spectral;

pub use delay::{fractional_delay, fractional_delay_real, frequency_shift};
pub use resample::resample;
pub use rrc::{rrc_filter, rrc_filter_spectral, rrc_impulse, rrc_spectrum, rrc_shape, rrc_taps, RRC_SPAN_SYMBOLS};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{mean_power, Real};

/// A block of complex baseband samples with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBlock<T: Real> {
    samples: Vec<Complex<T>>,
    sample_rate: f64,
}

impl<T: Real> ComplexBlock<T> {
    /// Validating constructor: the rate must be positive, samples finite.
    pub fn new(samples: Vec<Complex<T>>, sample_rate: f64) -> Result<Self> {
        check_rate(sample_rate)?;
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Constructor for samples produced by this library's own arithmetic.
    pub(crate) fn from_parts(samples: Vec<Complex<T>>, sample_rate: f64) -> Self {
        debug_assert!(sample_rate > 0.0);
        Self { samples, sample_rate }
    }

    pub fn zeros(n: usize, sample_rate: f64) -> Result<Self> {
        check_rate(sample_rate)?;
        Ok(Self::from_parts(vec![Complex::new(T::zero(), T::zero()); n], sample_rate))
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Block duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn power(&self) -> f64 {
        mean_power(&self.samples)
    }

    /// Same rate, new samples. Length may change.
    pub(crate) fn with_samples(&self, samples: Vec<Complex<T>>) -> Self {
        Self::from_parts(samples, self.sample_rate)
    }

    pub fn scaled(&self, gain: f64) -> Self {
        let g = T::of(gain);
        self.with_samples(self.samples.iter().map(|z| z * g).collect())
    }

    /// Element-wise sum; rates and lengths must match.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(self.sample_rate, other.sample_rate, self.len(), other.len())?;
        Ok(self.with_samples(
            self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
        ))
    }
}

/// Paired X/Y polarization streams sharing a sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPolWaveform<T: Real> {
    pub x: ComplexBlock<T>,
    pub y: ComplexBlock<T>,
}

impl<T: Real> DualPolWaveform<T> {
    pub fn new(x: ComplexBlock<T>, y: ComplexBlock<T>) -> Result<Self> {
        check_same(x.sample_rate, y.sample_rate, x.len(), y.len())?;
        Ok(Self { x, y })
    }

    pub fn sample_rate(&self) -> f64 {
        self.x.sample_rate
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Total power `E|x|^2 + E|y|^2`.
    pub fn total_power(&self) -> f64 {
        self.x.power() + self.y.power()
    }

    /// Apply the same block operation to both polarizations.
    pub fn try_map<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&ComplexBlock<T>) -> Result<ComplexBlock<T>>,
    {
        Self::new(f(&self.x)?, f(&self.y)?)
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self { x: self.x.scaled(gain), y: self.y.scaled(gain) }
    }
}

/// The four real photodetected tributaries XI/XQ/YI/YQ.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTributaryCapture<T: Real> {
    pub xi: Vec<T>,
    pub xq: Vec<T>,
    pub yi: Vec<T>,
    pub yq: Vec<T>,
    sample_rate: f64,
}

impl<T: Real> QuadTributaryCapture<T> {
    pub fn new(xi: Vec<T>, xq: Vec<T>, yi: Vec<T>, yq: Vec<T>, sample_rate: f64) -> Result<Self> {
        check_rate(sample_rate)?;
        let n = xi.len();
        for s in [&xq, &yi, &yq] {
            if s.len() != n {
                return Err(Error::LengthMismatch(n, s.len()));
            }
        }
        for s in [&xi, &xq, &yi, &yq] {
            if let Some(i) = s.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Self { xi, xq, yi, yq, sample_rate })
    }

    pub(crate) fn from_parts(xi: Vec<T>, xq: Vec<T>, yi: Vec<T>, yq: Vec<T>, sample_rate: f64) -> Self {
        Self { xi, xq, yi, yq, sample_rate }
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

pub(crate) fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("sample rate must be positive, got {rate}")))
    }
}

pub(crate) fn check_same(r1: f64, r2: f64, n1: usize, n2: usize) -> Result<()> {
    if r1 != r2 {
        return Err(Error::RateMismatch(r1, r2));
    }
    if n1 != n2 {
        return Err(Error::LengthMismatch(n1, n2));
    }
    Ok(())
}
