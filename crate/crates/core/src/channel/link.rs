use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, tag};
use crate::scalar::{narrow, widen, Real};
use crate::signal::{spectral::apply_response, DualPolWaveform};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// OSNR reference noise bandwidth (Hz).
pub const OSNR_REF_BANDWIDTH: f64 = 12.5e9;

/// Fiber, laser and noise parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkParams {
    pub fiber_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub center_wavelength_nm: f64,
    /// Linewidth of each laser; transmitter and LO together give twice this.
    pub linewidth_hz: f64,
    pub freq_offset_hz: f64,
    /// OSNR in 12.5 GHz, both polarizations. Infinite disables noise.
    #[serde(with = "inf_f64")]
    pub osnr_db: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            fiber_km: 80.0,
            dispersion_ps_nm_km: 17.0,
            center_wavelength_nm: 1550.0,
            linewidth_hz: 100e3,
            freq_offset_hz: 1e9,
            osnr_db: f64::INFINITY,
        }
    }
}

impl LinkParams {
    /// Back-to-back, noiseless, ideal lasers.
    pub fn ideal() -> Self {
        Self { fiber_km: 0.0, linewidth_hz: 0.0, freq_offset_hz: 0.0, ..Default::default() }
    }

    pub fn combined_linewidth(&self) -> f64 {
        2.0 * self.linewidth_hz
    }

    /// Accumulated dispersion coefficient `pi D lambda^2 L / c` in s^2.
    pub fn cd_coefficient(&self) -> f64 {
        let d = self.dispersion_ps_nm_km * 1e-6; // s/m^2
        let lambda = self.center_wavelength_nm * 1e-9;
        let l = self.fiber_km * 1e3;
        PI * d * lambda * lambda * l / SPEED_OF_LIGHT
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fiber_km >= 0.0) || !self.fiber_km.is_finite() {
            return Err(Error::InvalidParameter(format!("fiber_km {}", self.fiber_km)));
        }
        if !(self.osnr_db > 0.0) {
            return Err(Error::InvalidParameter(format!("osnr_db {}", self.osnr_db)));
        }
        if !(self.linewidth_hz >= 0.0) || !self.freq_offset_hz.is_finite() {
            return Err(Error::InvalidParameter("linewidth/frequency offset".into()));
        }
        if !self.dispersion_ps_nm_km.is_finite() || !(self.center_wavelength_nm > 0.0) {
            return Err(Error::InvalidParameter("dispersion/wavelength".into()));
        }
        Ok(())
    }
}

/// Dispersion all-pass `exp(sign j (pi D lambda^2 L / c) f^2)`; `sign = +1`
/// applies the fiber, `-1` compensates it.
pub fn apply_cd<T: Real>(w: &DualPolWaveform<T>, link: &LinkParams, sign: f64) -> Result<DualPolWaveform<T>> {
    let k = sign * link.cd_coefficient();
    if k == 0.0 {
        return Ok(w.clone());
    }
    w.try_map(|b| Ok(b.with_samples(apply_response(b.samples(), b.sample_rate(), |f| Complex::from_polar(1.0, k * f * f)))))
}

/// Common laser phase `2 pi df t + phi(t)` on both polarizations, `phi` a
/// Wiener process with increment variance `2 pi (combined linewidth) Ts`.
pub fn apply_laser<T: Real>(w: &DualPolWaveform<T>, link: &LinkParams, seed: u64) -> Result<DualPolWaveform<T>> {
    let fs = w.sample_rate();
    if link.freq_offset_hz.abs() >= fs / 2.0 {
        return Err(Error::BeyondNyquist(link.freq_offset_hz));
    }
    let phase = laser_phase(w.len(), fs, link.freq_offset_hz, link.combined_linewidth(), seed);
    let rot = |s: &[Complex<T>]| -> Vec<Complex<T>> {
        s.iter().zip(&phase).map(|(z, &p)| narrow(widen(*z) * Complex::from_polar(1.0, p))).collect()
    };
    if link.freq_offset_hz == 0.0 && link.linewidth_hz == 0.0 {
        return Ok(w.clone());
    }
    DualPolWaveform::new(w.x.with_samples(rot(w.x.samples())), w.y.with_samples(rot(w.y.samples())))
}

/// Laser phase samples (rad), including the frequency-offset ramp.
pub fn laser_phase(n: usize, fs: f64, freq_offset: f64, combined_linewidth: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, &[tag::PHASE_NOISE]);
    let sigma = (2.0 * PI * combined_linewidth / fs).sqrt();
    let cps = freq_offset / fs;
    let mut phi = 0.0;
    (0..n)
        .map(|k| {
            if k > 0 && sigma > 0.0 {
                let g: f64 = rng.sample(StandardNormal);
                phi += sigma * g;
            }
            2.0 * PI * (cps * k as f64).fract() + phi
        })
        .collect()
}

/// Total ASE noise power (both polarizations) in the simulation bandwidth
/// for a given signal power and OSNR.
pub fn noise_power_for_osnr(signal_power: f64, osnr_db: f64, sample_rate: f64) -> f64 {
    signal_power / 10f64.powf(osnr_db / 10.0) * (sample_rate / OSNR_REF_BANDWIDTH)
}

/// Add circular white Gaussian noise for the requested OSNR, split equally
/// between polarizations.
pub fn set_osnr<T: Real>(w: &DualPolWaveform<T>, osnr_db: f64, seed: u64) -> Result<DualPolWaveform<T>> {
    if osnr_db == f64::INFINITY {
        return Ok(w.clone());
    }
    if !(osnr_db.is_finite()) {
        return Err(Error::InvalidParameter(format!("osnr_db {osnr_db}")));
    }
    let total = noise_power_for_osnr(w.total_power(), osnr_db, w.sample_rate());
    // Per polarization total/2, per real dimension total/4.
    let sigma = (total / 4.0).sqrt();
    let mut rng = stream(seed, &[tag::ASE]);
    let mut noisy = |s: &[Complex<T>]| -> Vec<Complex<T>> {
        s.iter()
            .map(|z| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                narrow(widen(*z) + Complex::new(sigma * a, sigma * b))
            })
            .collect()
    };
    let x = noisy(w.x.samples());
    let y = noisy(w.y.samples());
    DualPolWaveform::new(w.x.with_samples(x), w.y.with_samples(y))
}

/// Serde helper: infinite values round-trip as the string `"inf"`.
pub mod inf_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Num(v) => Ok(v),
            NumOrStr::Str(s) => match s.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                other => other.parse::<f64>().map_err(serde::de::Error::custom),
            },
        }
    }
}
