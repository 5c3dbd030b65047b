use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{widen, Real};
use crate::signal::spectral::circular_convolve_centered;
use crate::signal::{frequency_shift, resample, ComplexBlock, DualPolWaveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpfKind {
    SinglePole,
    MovingAverage,
    Fir,
}

/// Pilot extraction filter and decimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractorConfig {
    /// Single-sided low-pass bandwidth (Hz).
    pub lpf_bandwidth_hz: f64,
    pub lpf_kind: LpfKind,
    /// Full-rate samples per trace sample.
    pub decimation: usize,
    /// FIR length (odd).
    pub fir_taps: usize,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self { lpf_bandwidth_hz: 100e6, lpf_kind: LpfKind::Fir, decimation: 64, fir_taps: 255 }
    }
}

impl ExtractorConfig {
    /// Check the filter against the waveform rate and the rotation speed it
    /// has to pass (`B > 10 * omega / 2 pi`).
    pub fn validate(&self, sample_rate: f64, omega: f64) -> Result<()> {
        if self.decimation == 0 {
            return Err(Error::InvalidParameter("decimation must be >= 1".into()));
        }
        if !(self.lpf_bandwidth_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("lpf_bandwidth_hz {}", self.lpf_bandwidth_hz)));
        }
        let rate = sample_rate / self.decimation as f64;
        if 2.0 * self.lpf_bandwidth_hz > rate {
            return Err(Error::AliasingDownsample { new_rate: rate, in_band: 2.0 * self.lpf_bandwidth_hz });
        }
        if self.lpf_kind == LpfKind::Fir && self.fir_taps % 2 == 0 {
            return Err(Error::InvalidParameter("fir_taps must be odd".into()));
        }
        if self.lpf_bandwidth_hz <= 10.0 * omega / (2.0 * PI) {
            return Err(Error::InvalidParameter(format!(
                "lpf bandwidth {} Hz too narrow for rotation speed {omega} rad/s",
                self.lpf_bandwidth_hz
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pol {
    X,
    Y,
}

/// Baseband-filtered pilot on the decimated grid. Sample `m` corresponds to
/// full-rate sample `m * decimation`.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotTrace {
    pub values: Vec<Complex<f64>>,
    pub source_pol: Pol,
    pub pilot_freq: f64,
    pub sample_rate: f64,
    pub decimation: usize,
}

impl PilotTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<Complex<f64>>) -> Self {
        Self { values, ..self.clone() }
    }
}

/// Windowed-sinc low-pass taps (Blackman window), unit DC gain.
pub fn lowpass_fir(bandwidth: f64, sample_rate: f64, taps: usize) -> Vec<f64> {
    let fc = bandwidth / sample_rate;
    let half = (taps / 2) as f64;
    let mut h: Vec<f64> = (0..taps)
        .map(|i| {
            let t = i as f64 - half;
            let sinc = if t == 0.0 { 2.0 * fc } else { (2.0 * PI * fc * t).sin() / (PI * t) };
            let w = if taps == 1 {
                1.0
            } else {
                let x = 2.0 * PI * i as f64 / (taps - 1) as f64;
                0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos()
            };
            sinc * w
        })
        .collect();
    let dc: f64 = h.iter().sum();
    for v in h.iter_mut() {
        *v /= dc;
    }
    h
}

fn lowpass(x: Vec<Complex<f64>>, cfg: &ExtractorConfig, rate: f64) -> Vec<Complex<f64>> {
    match cfg.lpf_kind {
        LpfKind::Fir => circular_convolve_centered(&x, &lowpass_fir(cfg.lpf_bandwidth_hz, rate, cfg.fir_taps)),
        LpfKind::MovingAverage => {
            // A length-L boxcar has its -3 dB point near 0.443 fs / L.
            let mut len = (0.443 * rate / cfg.lpf_bandwidth_hz).round().max(1.0) as usize;
            if len % 2 == 0 {
                len += 1;
            }
            circular_convolve_centered(&x, &vec![1.0 / len as f64; len])
        }
        LpfKind::SinglePole => {
            // Forward-backward one-pole, started from the steady state of a
            // first circular pass so the result is circular and zero phase.
            let a = (-2.0 * PI * cfg.lpf_bandwidth_hz / rate).exp();
            let run = |v: &[Complex<f64>], rev: bool| -> Vec<Complex<f64>> {
                let n = v.len();
                let idx = |i: usize| if rev { n - 1 - i } else { i };
                let mut s = Complex::new(0.0, 0.0);
                for i in 0..n {
                    s = s * a + v[idx(i)] * (1.0 - a);
                }
                let mut out = vec![Complex::new(0.0, 0.0); n];
                for i in 0..n {
                    s = s * a + v[idx(i)] * (1.0 - a);
                    out[idx(i)] = s;
                }
                out
            };
            let f = run(&x, false);
            run(&f, true)
        }
    }
}

fn extract_one<T: Real>(b: &ComplexBlock<T>, f: f64, cfg: &ExtractorConfig, pol: Pol) -> Result<PilotTrace> {
    let fs = b.sample_rate();
    if b.len() % cfg.decimation != 0 {
        return Err(Error::InvalidParameter(format!(
            "block length {} is not a multiple of decimation {}",
            b.len(),
            cfg.decimation
        )));
    }
    let rate = fs / cfg.decimation as f64;
    let shifted = frequency_shift(b, -f)?;
    let dec = resample(&shifted, rate, 2.0 * cfg.lpf_bandwidth_hz)?;
    let vals: Vec<Complex<f64>> = dec.samples().iter().map(|z| widen(*z)).collect();
    Ok(PilotTrace {
        values: lowpass(vals, cfg, rate),
        source_pol: pol,
        pilot_freq: f,
        sample_rate: rate,
        decimation: cfg.decimation,
    })
}

/// Down-convert both polarizations by `f`, decimate and low-pass. The filter
/// is zero phase, so traces are aligned with the waveform time base.
pub fn extract_pilot<T: Real>(w: &DualPolWaveform<T>, f: f64, cfg: &ExtractorConfig) -> Result<(PilotTrace, PilotTrace)> {
    Ok((extract_one(&w.x, f, cfg, Pol::X)?, extract_one(&w.y, f, cfg, Pol::Y)?))
}
