use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Real;
use crate::signal::{fractional_delay_real, ComplexBlock, DualPolWaveform, QuadTributaryCapture};

/// Tributary delays and IQ imbalance of the transceiver front ends.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrontEndImpairments {
    pub tau_rxi: f64,
    pub tau_rxq: f64,
    pub tau_ryi: f64,
    pub tau_ryq: f64,
    /// Transmitter X-polarization I-rail delay.
    pub tau_txi: f64,
    pub amp_imb_x_db: f64,
    pub amp_imb_y_db: f64,
    pub phase_imb_x_deg: f64,
    pub phase_imb_y_deg: f64,
}

impl FrontEndImpairments {
    /// Receiver XY skew `tau_ryi - tau_rxi`.
    pub fn rx_xy_skew(&self) -> f64 {
        self.tau_ryi - self.tau_rxi
    }

    /// Pure receiver XY skew: both Y rails delayed by `tau`.
    pub fn with_rx_xy_skew(tau: f64) -> Self {
        Self { tau_ryi: tau, tau_ryq: tau, ..Default::default() }
    }
}

fn split<T: Real>(b: &ComplexBlock<T>) -> (Vec<T>, Vec<T>) {
    b.samples().iter().map(|z| (z.re, z.im)).unzip()
}

fn delay<T: Real>(v: Vec<T>, fs: f64, tau: f64) -> Result<Vec<T>> {
    if tau == 0.0 {
        Ok(v)
    } else {
        fractional_delay_real(&v, fs, tau)
    }
}

/// `Q' = g (Q cos(theta) - I sin(theta))`; identity when both are zero.
fn imbalance<T: Real>(i: &[T], q: Vec<T>, amp_db: f64, phase_deg: f64) -> Vec<T> {
    if amp_db == 0.0 && phase_deg == 0.0 {
        return q;
    }
    let g = 10f64.powf(amp_db / 20.0);
    let th = phase_deg * PI / 180.0;
    let (gc, gs) = (T::of(g * th.cos()), T::of(g * th.sin()));
    i.iter().zip(q).map(|(&i, q)| gc * q - gs * i).collect()
}

/// Transmitter I-rail delay on X, applied before the channel.
pub fn apply_tx_iq_delay<T: Real>(w: &DualPolWaveform<T>, tau_txi: f64) -> Result<DualPolWaveform<T>> {
    if tau_txi == 0.0 {
        return Ok(w.clone());
    }
    let fs = w.sample_rate();
    let (i, q) = split(&w.x);
    let i = fractional_delay_real(&i, fs, tau_txi)?;
    let x = i.into_iter().zip(q).map(|(a, b)| Complex::new(a, b)).collect();
    DualPolWaveform::new(w.x.with_samples(x), w.y.clone())
}

/// Split into four real rails, delay each, then apply per-polarization IQ
/// imbalance on the Q rail. `tau_txi` is not applied here.
pub fn apply_rx_frontend<T: Real>(w: &DualPolWaveform<T>, imp: &FrontEndImpairments) -> Result<QuadTributaryCapture<T>> {
    let fs = w.sample_rate();
    let (xi, xq) = split(&w.x);
    let (yi, yq) = split(&w.y);
    let xi = delay(xi, fs, imp.tau_rxi)?;
    let xq = delay(xq, fs, imp.tau_rxq)?;
    let yi = delay(yi, fs, imp.tau_ryi)?;
    let yq = delay(yq, fs, imp.tau_ryq)?;
    let xq = imbalance(&xi, xq, imp.amp_imb_x_db, imp.phase_imb_x_deg);
    let yq = imbalance(&yi, yq, imp.amp_imb_y_db, imp.phase_imb_y_deg);
    Ok(QuadTributaryCapture::from_parts(xi, xq, yi, yq, fs))
}

/// `x = xi + j xq`, `y = yi + j yq`.
pub fn recombine<T: Real>(q: &QuadTributaryCapture<T>) -> Result<DualPolWaveform<T>> {
    let fs = q.sample_rate();
    let join = |i: &[T], r: &[T]| i.iter().zip(r).map(|(&a, &b)| Complex::new(a, b)).collect::<Vec<_>>();
    DualPolWaveform::new(
        ComplexBlock::from_parts(join(&q.xi, &q.xq), fs),
        ComplexBlock::from_parts(join(&q.yi, &q.yq), fs),
    )
}
