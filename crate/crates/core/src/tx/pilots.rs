use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::dscm::DscmConfig;
use crate::error::{Error, Result};
use crate::scalar::{db_to_lin, Real};
use crate::signal::{ComplexBlock, DualPolWaveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PilotScheme {
    /// One tone on X.
    Spt,
    /// Tone `f1` on X and tone `f2` on Y.
    Dpt,
    /// Real cosine on X, Y silent.
    MgpdTraining,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PilotDescriptor {
    pub scheme: PilotScheme,
    pub f1: f64,
    /// Y-polarization tone, DPT only.
    pub f2: f64,
    /// Pilot power relative to the per-polarization signal power.
    pub psr_db: f64,
}

impl Default for PilotDescriptor {
    fn default() -> Self {
        Self::spt(0.0)
    }
}

impl PilotDescriptor {
    pub const DEFAULT_PSR_DB: f64 = -10.0;

    pub fn spt(f1: f64) -> Self {
        Self { scheme: PilotScheme::Spt, f1, f2: 0.0, psr_db: Self::DEFAULT_PSR_DB }
    }

    pub fn dpt(f1: f64, f2: f64) -> Self {
        Self { scheme: PilotScheme::Dpt, f1, f2, psr_db: Self::DEFAULT_PSR_DB }
    }

    pub fn mgpd(f1: f64) -> Self {
        Self { scheme: PilotScheme::MgpdTraining, f1, f2: 0.0, psr_db: Self::DEFAULT_PSR_DB }
    }

    pub fn none() -> Self {
        Self { scheme: PilotScheme::None, f1: 0.0, f2: 0.0, psr_db: Self::DEFAULT_PSR_DB }
    }

    /// Frequencies of the tones this descriptor inserts.
    pub fn frequencies(&self) -> Vec<f64> {
        match self.scheme {
            PilotScheme::Spt | PilotScheme::MgpdTraining => vec![self.f1],
            PilotScheme::Dpt => vec![self.f1, self.f2],
            PilotScheme::None => Vec::new(),
        }
    }

    pub fn validate(&self, sample_rate: f64) -> Result<()> {
        if self.scheme == PilotScheme::Dpt && self.f1 == self.f2 {
            return Err(Error::InvalidParameter("DPT requires f1 != f2".into()));
        }
        if !self.psr_db.is_finite() {
            return Err(Error::InvalidParameter(format!("psr_db {}", self.psr_db)));
        }
        for f in self.frequencies() {
            if !f.is_finite() || f.abs() >= sample_rate / 2.0 {
                return Err(Error::BeyondNyquist(f));
            }
        }
        Ok(())
    }
}

/// A pilot that sits inside a subcarrier's -3 dB band. Allowed, reported.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementWarning {
    pub pilot_freq: f64,
    pub subcarrier: usize,
    pub offset_from_center: f64,
}

/// Reject pilots on a subcarrier center; warn on pilots inside a
/// subcarrier's -3 dB band (`|f - fc| < baud/2`).
pub fn check_pilot_placement(p: &PilotDescriptor, cfg: &DscmConfig) -> Result<Vec<PlacementWarning>> {
    p.validate(cfg.sample_rate())?;
    let half = cfg.subcarrier_baud() / 2.0;
    let mut warnings = Vec::new();
    for f in p.frequencies() {
        for (i, fc) in cfg.centers().into_iter().enumerate() {
            let off = f - fc;
            if off.abs() < 1e-3 {
                return Err(Error::InvalidParameter(format!(
                    "pilot at {f} Hz coincides with subcarrier {i} center"
                )));
            }
            if off.abs() < half {
                warnings.push(PlacementWarning { pilot_freq: f, subcarrier: i, offset_from_center: off });
            }
        }
    }
    Ok(warnings)
}

/// Tone amplitude `A` with `A^2 = psr * P_ref`.
pub fn pilot_amplitude(psr_db: f64, reference_power: f64) -> f64 {
    (db_to_lin(psr_db) * reference_power).sqrt()
}

pub(crate) fn tone<T: Real>(n: usize, freq: f64, sample_rate: f64, amplitude: f64) -> Vec<Complex<T>> {
    let cps = freq / sample_rate;
    (0..n)
        .map(|k| {
            let ph = 2.0 * PI * (cps * k as f64).fract();
            Complex::new(T::of(amplitude * ph.cos()), T::of(amplitude * ph.sin()))
        })
        .collect()
}

/// The pure pilot waveform of `p` with amplitude `amplitude`.
pub fn pilot_waveform<T: Real>(p: &PilotDescriptor, n: usize, sample_rate: f64, amplitude: f64) -> Result<DualPolWaveform<T>> {
    p.validate(sample_rate)?;
    let zeros = || vec![Complex::new(T::zero(), T::zero()); n];
    let (x, y) = match p.scheme {
        PilotScheme::Spt => (tone(n, p.f1, sample_rate, amplitude), zeros()),
        PilotScheme::Dpt => (tone(n, p.f1, sample_rate, amplitude), tone(n, p.f2, sample_rate, amplitude)),
        PilotScheme::MgpdTraining => {
            let cps = p.f1 / sample_rate;
            let x = (0..n)
                .map(|k| Complex::new(T::of(amplitude * (2.0 * PI * (cps * k as f64).fract()).cos()), T::zero()))
                .collect();
            (x, zeros())
        }
        PilotScheme::None => (zeros(), zeros()),
    };
    DualPolWaveform::new(ComplexBlock::from_parts(x, sample_rate), ComplexBlock::from_parts(y, sample_rate))
}

/// Add the pilots of `p` to `w`. The amplitude is set from `psr_db` against
/// the mean per-polarization power of `w`.
pub fn insert_pilots<T: Real>(w: &DualPolWaveform<T>, p: &PilotDescriptor) -> Result<DualPolWaveform<T>> {
    if p.scheme == PilotScheme::None {
        return Ok(w.clone());
    }
    let a = pilot_amplitude(p.psr_db, w.total_power() / 2.0);
    let pw = pilot_waveform::<T>(p, w.len(), w.sample_rate(), a)?;
    let x = w.x.add(&pw.x)?;
    let y = if p.scheme == PilotScheme::Dpt { w.y.add(&pw.y)? } else { w.y.clone() };
    DualPolWaveform::new(x, y)
}

/// MGPD training frame: X carries `sqrt(2) cos(2 pi f1 t)` (unit power), Y
/// is silent. `f1` must fall exactly on an FFT bin of the frame.
pub fn generate_mgpd_training<T: Real>(f1: f64, duration: f64, sample_rate: f64) -> Result<DualPolWaveform<T>> {
    crate::signal::check_rate(sample_rate)?;
    let n = (duration * sample_rate).round();
    if !(n >= 1.0) || ((duration * sample_rate) - n).abs() > 1e-6 * n.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "duration {duration} s is not a whole number of samples at {sample_rate} Sa/s"
        )));
    }
    let n = n as usize;
    if f1.abs() >= sample_rate / 2.0 {
        return Err(Error::BeyondNyquist(f1));
    }
    let k = f1 * n as f64 / sample_rate;
    if (k - k.round()).abs() > 1e-6 {
        return Err(Error::OffGrid(f1));
    }
    let k = k.round() as i64;
    let x = (0..n)
        .map(|m| {
            let idx = (k * m as i64).rem_euclid(n as i64) as f64;
            Complex::new(T::of(2f64.sqrt() * (2.0 * PI * idx / n as f64).cos()), T::zero())
        })
        .collect();
    let y = vec![Complex::new(T::zero(), T::zero()); n];
    DualPolWaveform::new(ComplexBlock::from_parts(x, sample_rate), ComplexBlock::from_parts(y, sample_rate))
}
