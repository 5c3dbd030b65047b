use num_complex::Complex;

use crate::channel::LinkParams;
use crate::error::Result;
use crate::scalar::Real;
use crate::signal::spectral::apply_response;
use crate::signal::{frequency_shift, resample, rrc_filter_spectral, ComplexBlock, DualPolWaveform};
use crate::tx::DscmConfig;

/// Matched-filtered subcarrier streams at 2 samples per symbol, indexed
/// `[pol][subcarrier]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierStreams<T: Real> {
    pub streams: [Vec<ComplexBlock<T>>; 2],
    pub centers: Vec<f64>,
}

impl<T: Real> SubcarrierStreams<T> {
    pub fn num_subcarriers(&self) -> usize {
        self.centers.len()
    }

    pub fn try_map<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, &ComplexBlock<T>) -> Result<ComplexBlock<T>>,
    {
        let mut out: [Vec<ComplexBlock<T>>; 2] = [Vec::new(), Vec::new()];
        for (pol, scs) in self.streams.iter().enumerate() {
            for (sc, b) in scs.iter().enumerate() {
                out[pol].push(f(pol, sc, b)?);
            }
        }
        Ok(Self { streams: out, centers: self.centers.clone() })
    }
}

/// Shift each subcarrier to baseband, resample to 2 samples per symbol and
/// apply the RRC matched filter.
pub fn demux_subcarriers<T: Real>(w: &DualPolWaveform<T>, cfg: &DscmConfig) -> Result<SubcarrierStreams<T>> {
    cfg.validate()?;
    let sc_baud = cfg.subcarrier_baud();
    let centers = cfg.centers();
    let mut streams: [Vec<ComplexBlock<T>>; 2] = [Vec::new(), Vec::new()];
    for (pol, block) in [&w.x, &w.y].into_iter().enumerate() {
        for &fc in &centers {
            let base = frequency_shift(block, -fc)?;
            let two_sps = resample(&base, 2.0 * sc_baud, sc_baud * (1.0 + cfg.rolloff))?;
            streams[pol].push(rrc_filter_spectral(&two_sps, cfg.rolloff, 2)?);
        }
    }
    Ok(SubcarrierStreams { streams, centers })
}

/// Compensate the fiber dispersion on one baseband subcarrier centered at
/// `center` in the original spectrum.
pub fn cdc_subcarrier<T: Real>(b: &ComplexBlock<T>, link: &LinkParams, center: f64) -> ComplexBlock<T> {
    let k = -link.cd_coefficient();
    if k == 0.0 {
        return b.clone();
    }
    b.with_samples(apply_response(b.samples(), b.sample_rate(), |f| {
        let g = f + center;
        Complex::from_polar(1.0, k * g * g)
    }))
}

/// Pick the 2-sample phase with the larger decimated power and rotate the
/// stream so that phase lands on even samples. Returns the phase chosen.
pub fn retime<T: Real>(b: &ComplexBlock<T>) -> (ComplexBlock<T>, usize) {
    let s = b.samples();
    let mut p = [0.0f64; 2];
    for (i, z) in s.iter().enumerate() {
        p[i % 2] += z.norm_sqr().to_f64_lossy();
    }
    if p[1] > p[0] {
        let mut v = s.to_vec();
        v.rotate_left(1);
        (b.with_samples(v), 1)
    } else {
        (b.clone(), 0)
    }
}
