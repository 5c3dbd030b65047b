use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::prbs::generate_prbs;
use super::qam::map_16qam;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, tag};
use crate::scalar::Real;
use crate::signal::{frequency_shift, rrc_shape, ComplexBlock, DualPolWaveform};

/// Digital-subcarrier-multiplexing layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DscmConfig {
    /// Aggregate symbol rate over all subcarriers (Bd).
    pub total_baud: f64,
    pub num_subcarriers: usize,
    pub rolloff: f64,
    /// Extra spectral gap between adjacent subcarriers (Hz).
    pub guard_band: f64,
    /// Simulation samples per aggregate symbol.
    pub sps: usize,
}

impl Default for DscmConfig {
    fn default() -> Self {
        Self { total_baud: 50e9, num_subcarriers: 4, rolloff: 0.1, guard_band: 0.0, sps: 2 }
    }
}

impl DscmConfig {
    pub fn subcarrier_baud(&self) -> f64 {
        self.total_baud / self.num_subcarriers as f64
    }

    pub fn sample_rate(&self) -> f64 {
        self.total_baud * self.sps as f64
    }

    /// Samples per symbol of one subcarrier at the simulation rate.
    pub fn subcarrier_sps(&self) -> usize {
        self.sps * self.num_subcarriers
    }

    /// Center-to-center subcarrier spacing.
    pub fn spacing(&self) -> f64 {
        self.subcarrier_baud() * (1.0 + self.rolloff) + self.guard_band
    }

    /// Subcarrier center frequencies, symmetric about 0 and increasing.
    pub fn centers(&self) -> Vec<f64> {
        let n = self.num_subcarriers as f64;
        (0..self.num_subcarriers)
            .map(|i| (i as f64 - (n - 1.0) / 2.0) * self.spacing())
            .collect()
    }

    /// Upper edge of the occupied spectrum.
    pub fn band_edge(&self) -> f64 {
        let last = self.centers().last().copied().unwrap_or(0.0);
        last + self.subcarrier_baud() * (1.0 + self.rolloff) / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_subcarriers < 1 {
            return Err(Error::InvalidParameter("num_subcarriers must be >= 1".into()));
        }
        if !(self.total_baud > 0.0) || !self.total_baud.is_finite() {
            return Err(Error::InvalidParameter(format!("total_baud {}", self.total_baud)));
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(Error::InvalidParameter(format!("rolloff {}", self.rolloff)));
        }
        if self.sps < 1 {
            return Err(Error::InvalidParameter("sps must be >= 1".into()));
        }
        if self.guard_band < 0.0 && self.num_subcarriers > 1 {
            return Err(Error::SpectralOverlap(self.guard_band));
        }
        if self.band_edge() >= self.sample_rate() / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "occupied band edge {} Hz exceeds Nyquist {} Hz",
                self.band_edge(),
                self.sample_rate() / 2.0
            )));
        }
        Ok(())
    }
}

/// Bits and symbols indexed `[polarization][subcarrier]` (0 = X, 1 = Y).
#[derive(Debug, Clone, PartialEq)]
pub struct FramePayload<T: Real> {
    pub bits: [Vec<Vec<u8>>; 2],
    pub symbols: [Vec<Vec<Complex<T>>>; 2],
    pub seed: u64,
}

/// PRBS order used for payload generation.
pub const PAYLOAD_PRBS_ORDER: u32 = 23;

impl<T: Real> FramePayload<T> {
    /// Independent PRBS-23 streams per (polarization, subcarrier).
    pub fn generate(num_subcarriers: usize, symbols_per_subcarrier: usize, seed: u64) -> Result<Self> {
        let mask = (1u64 << PAYLOAD_PRBS_ORDER) - 1;
        let mut bits: [Vec<Vec<u8>>; 2] = [Vec::new(), Vec::new()];
        let mut symbols: [Vec<Vec<Complex<T>>>; 2] = [Vec::new(), Vec::new()];
        for pol in 0..2 {
            for sc in 0..num_subcarriers {
                let mut s = derive_seed(seed, &[tag::PAYLOAD, pol as u64, sc as u64]) & mask;
                if s == 0 {
                    s = 1;
                }
                let b = generate_prbs(PAYLOAD_PRBS_ORDER, s, 4 * symbols_per_subcarrier)?;
                symbols[pol].push(map_16qam(&b));
                bits[pol].push(b);
            }
        }
        Ok(Self { bits, symbols, seed })
    }

    /// Wrap externally chosen symbols; bits are left empty.
    pub fn from_symbols(symbols: [Vec<Vec<Complex<T>>>; 2]) -> Self {
        Self { bits: [Vec::new(), Vec::new()], symbols, seed: 0 }
    }

    pub fn num_subcarriers(&self) -> usize {
        self.symbols[0].len()
    }
}

/// Shape each subcarrier with RRC at the subcarrier rate, shift to its center
/// and sum. Each polarization is normalized to unit mean power.
pub fn build_dscm<T: Real>(payload: &FramePayload<T>, cfg: &DscmConfig) -> Result<DualPolWaveform<T>> {
    cfg.validate()?;
    if payload.symbols[0].len() != cfg.num_subcarriers || payload.symbols[1].len() != cfg.num_subcarriers {
        return Err(Error::InvalidParameter(format!(
            "payload has {}/{} subcarriers, config expects {}",
            payload.symbols[0].len(),
            payload.symbols[1].len(),
            cfg.num_subcarriers
        )));
    }
    let n_sym = payload.symbols[0][0].len();
    for pol in &payload.symbols {
        for sc in pol {
            if sc.len() != n_sym {
                return Err(Error::LengthMismatch(n_sym, sc.len()));
            }
        }
    }
    let centers = cfg.centers();
    let sc_sps = cfg.subcarrier_sps();
    let sc_baud = cfg.subcarrier_baud();
    let fs = cfg.sample_rate();
    let mut pols = Vec::with_capacity(2);
    for pol in &payload.symbols {
        let mut acc = vec![Complex::new(T::zero(), T::zero()); n_sym * sc_sps];
        for (syms, &fc) in pol.iter().zip(&centers) {
            let shaped = rrc_shape(syms, cfg.rolloff, sc_sps, sc_baud)?;
            let shifted = frequency_shift(&shaped, fc)?;
            for (a, b) in acc.iter_mut().zip(shifted.samples()) {
                *a += *b;
            }
        }
        let block = ComplexBlock::from_parts(acc, fs);
        let p = block.power();
        pols.push(if p > 0.0 { block.scaled(1.0 / p.sqrt()) } else { block });
    }
    let y = pols.pop().expect("two polarizations");
    let x = pols.pop().expect("two polarizations");
    DualPolWaveform::new(x, y)
}
