//! Root-raised-cosine pulse shaping and matched filtering.

use std::f64::consts::PI;

use num_complex::Complex;

use super::spectral::{apply_response, circular_convolve_centered};
use super::{check_rate, ComplexBlock};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tap span of the truncated RRC filter, in symbols.
pub const RRC_SPAN_SYMBOLS: usize = 32;

/// Closed-form RRC impulse response at `t` (in symbol periods), unnormalized.
pub fn rrc_impulse(t: f64, rolloff: f64) -> f64 {
    let b = rolloff;
    if t == 0.0 {
        return 1.0 - b + 4.0 * b / PI;
    }
    if b > 0.0 && (t.abs() - 1.0 / (4.0 * b)).abs() < 1e-12 {
        let a = PI / (4.0 * b);
        return b / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
    let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
    num / den
}

/// Unit-energy RRC taps spanning `span` symbols at `sps` samples per symbol.
/// Length is `span * sps + 1` with the peak at the center tap.
pub fn rrc_taps(rolloff: f64, sps: usize, span: usize) -> Result<Vec<f64>> {
    check_rolloff(rolloff)?;
    if sps < 1 || span < 1 {
        return Err(Error::InvalidParameter(format!("sps={sps} span={span}")));
    }
    let len = span * sps + 1;
    let mid = (len / 2) as f64;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| rrc_impulse((i as f64 - mid) / sps as f64, rolloff))
        .collect();
    let energy: f64 = taps.iter().map(|t| t * t).sum();
    let norm = energy.sqrt();
    for t in taps.iter_mut() {
        *t /= norm;
    }
    Ok(taps)
}

fn check_rolloff(rolloff: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rolloff) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rolloff {rolloff} outside [0, 1]")))
    }
}

/// Upsample `symbols` by `sps` (zero stuffing) and filter with unit-energy
/// RRC taps. The filter is zero-phase and applied circularly, so symbol `k`
/// peaks at output sample `k * sps`.
pub fn rrc_shape<T: Real>(
    symbols: &[Complex<T>],
    rolloff: f64,
    sps: usize,
    symbol_rate: f64,
) -> Result<ComplexBlock<T>> {
    check_rolloff(rolloff)?;
    check_rate(symbol_rate)?;
    if sps < 2 {
        return Err(Error::InvalidParameter(format!("sps must be >= 2, got {sps}")));
    }
    let mut up = vec![Complex::new(T::zero(), T::zero()); symbols.len() * sps];
    for (k, s) in symbols.iter().enumerate() {
        up[k * sps] = *s;
    }
    let taps = rrc_taps(rolloff, sps, RRC_SPAN_SYMBOLS)?;
    Ok(ComplexBlock::from_parts(
        circular_convolve_centered(&up, &taps),
        symbol_rate * sps as f64,
    ))
}

/// RRC matched filter on a block sampled at `sps` samples per symbol.
pub fn rrc_filter<T: Real>(block: &ComplexBlock<T>, rolloff: f64, sps: usize) -> Result<ComplexBlock<T>> {
    let taps = rrc_taps(rolloff, sps, RRC_SPAN_SYMBOLS)?;
    Ok(block.with_samples(circular_convolve_centered(block.samples(), &taps)))
}

/// Square-root raised-cosine amplitude at `f` (in symbol rates), unit in
/// the flat part and exactly zero beyond `(1 + rolloff) / 2`.
pub fn rrc_spectrum(f: f64, rolloff: f64) -> f64 {
    let af = f.abs();
    let lo = (1.0 - rolloff) / 2.0;
    if af <= lo {
        1.0
    } else if af >= (1.0 + rolloff) / 2.0 {
        0.0
    } else {
        (PI / (2.0 * rolloff) * (af - lo)).cos()
    }
}

/// Matched filter applied as the exact RRC spectrum over the circular block.
/// Same gain as [`rrc_filter`] but without the truncation sidelobes, so a
/// tone just outside the subcarrier band (a pilot in a narrow guard) is fully
/// rejected.
pub fn rrc_filter_spectral<T: Real>(block: &ComplexBlock<T>, rolloff: f64, sps: usize) -> Result<ComplexBlock<T>> {
    check_rolloff(rolloff)?;
    if sps < 1 {
        return Err(Error::InvalidParameter(format!("sps={sps}")));
    }
    let baud = block.sample_rate() / sps as f64;
    let gain = (sps as f64).sqrt();
    Ok(block.with_samples(apply_response(block.samples(), block.sample_rate(), |f| {
        Complex::new(gain * rrc_spectrum(f / baud, rolloff), 0.0)
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::spectral::periodogram;

    /// RRC pulse by numerical inverse Fourier transform of the square-root
    /// raised-cosine spectrum (independent of the closed form).
    fn rrc_by_quadrature(t: f64, b: f64) -> f64 {
        let f_max = (1.0 + b) / 2.0;
        let steps = 200_000;
        let df = 2.0 * f_max / steps as f64;
        let mut acc = 0.0;
        for i in 0..steps {
            let f = -f_max + (i as f64 + 0.5) * df;
            let af = f.abs();
            let h = if af <= (1.0 - b) / 2.0 {
                1.0
            } else {
                (PI / (2.0 * b) * (af - (1.0 - b) / 2.0)).cos()
            };
            acc += h * (2.0 * PI * f * t).cos() * df;
        }
        acc
    }

    #[test]
    fn impulse_matches_quadrature_oracle() {
        let sps = 8;
        let b = 0.1;
        let mut syms = vec![Complex::new(0.0, 0.0); 64];
        syms[0] = Complex::new(1.0, 0.0);
        let out = rrc_shape(&syms, b, sps, 1.0).unwrap();
        let half = RRC_SPAN_SYMBOLS * sps / 2;
        let oracle: Vec<f64> = (0..=2 * half)
            .map(|i| rrc_by_quadrature((i as f64 - half as f64) / sps as f64, b))
            .collect();
        let norm = oracle.iter().map(|v| v * v).sum::<f64>().sqrt();
        let n = out.len();
        for (i, o) in oracle.iter().enumerate() {
            let idx = (i as i64 - half as i64).rem_euclid(n as i64) as usize;
            let got = out.samples()[idx];
            assert!((got.re - o / norm).abs() < 1e-6, "tap {i}: {} vs {}", got.re, o / norm);
            assert!(got.im.abs() < 1e-15);
        }
        // Zero outside the span.
        for k in half + 1..n - half {
            assert!(out.samples()[k].norm() < 1e-12);
        }
    }

    #[test]
    fn special_point_is_continuous() {
        let b = 0.25;
        let t0 = 1.0 / (4.0 * b);
        let at = rrc_impulse(t0, b);
        let near = rrc_impulse(t0 + 1e-6, b);
        assert!((at - near).abs() < 1e-5);
        assert!((rrc_impulse(0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((rrc_impulse(1.0, 0.0)).abs() < 1e-15);
    }

    fn cascade_isi(span: usize) -> Vec<f64> {
        let sps = 8;
        let taps = rrc_taps(0.1, sps, span).unwrap();
        let n = taps.len();
        let mid = n - 1;
        let mut rc = vec![0.0; 2 * n - 1];
        for i in 0..n {
            for j in 0..n {
                rc[i + j] += taps[i] * taps[j];
            }
        }
        assert!((rc[mid] - 1.0).abs() < 1e-12);
        (1..=mid / sps).flat_map(|k| [rc[mid + k * sps], rc[mid - k * sps]]).collect()
    }

    #[test]
    fn cascade_has_negligible_isi() {
        // Default span: aggregate ISI power stays below -40 dB; the largest
        // single lag sits near the truncation edge.
        let isi = cascade_isi(RRC_SPAN_SYMBOLS);
        let power: f64 = isi.iter().map(|v| v * v).sum();
        assert!(10.0 * power.log10() < -40.0);
        assert!(isi.iter().all(|v| v.abs() < 5e-3));
        // With a longer span every off-center symbol tap is below 1e-3.
        let isi = cascade_isi(64);
        assert!(isi.iter().all(|v| v.abs() < 1e-3));
    }

    fn minus20_bandwidth(rolloff: f64) -> f64 {
        // Average many random symbol blocks for a smooth PSD.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n_sym = 4096;
        let sps = 8;
        let mut acc = vec![0.0; n_sym * sps];
        for _ in 0..16 {
            let syms: Vec<Complex<f64>> = (0..n_sym)
                .map(|_| Complex::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, if rng.random::<bool>() { 1.0 } else { -1.0 }))
                .collect();
            let out = rrc_shape(&syms, rolloff, sps, 1.0).unwrap();
            for (a, p) in acc.iter_mut().zip(periodogram(out.samples())) {
                *a += p;
            }
        }
        // Smooth over 33 bins.
        let n = acc.len();
        let smooth: Vec<f64> = (0..n)
            .map(|k| (0..33).map(|d| acc[(k + n - 16 + d) % n]).sum::<f64>() / 33.0)
            .collect();
        let peak = smooth.iter().cloned().fold(0.0, f64::max);
        let edge = (0..n / 2).rev().find(|&k| smooth[k] >= peak * 0.01).unwrap();
        2.0 * edge as f64 / n as f64 * sps as f64
    }

    #[test]
    fn occupied_bandwidth_ratio_tracks_rolloff() {
        let b0 = minus20_bandwidth(0.0);
        let b1 = minus20_bandwidth(0.1);
        // Raised-cosine PSD reaches -20 dB at |f|T = 0.45 + 0.1 * acos(-0.98) / pi.
        let ideal = 2.0 * (0.45 + 0.1 * (-0.98f64).acos() / std::f64::consts::PI);
        assert!((b1 - ideal).abs() < 0.01, "{b1} vs {ideal}");
        let ratio = b1 / b0;
        assert!((ratio - 1.1).abs() < 0.05, "ratio {ratio} ({b0}, {b1})");
    }

    #[test]
    fn rejects_bad_rolloff_and_sps() {
        let s = vec![Complex::new(1.0f64, 0.0); 4];
        assert!(rrc_shape(&s, 1.5, 8, 1.0).is_err());
        assert!(rrc_shape(&s, -0.1, 8, 1.0).is_err());
        assert!(rrc_shape(&s, 0.1, 1, 1.0).is_err());
    }

    #[test]
    fn spectral_matched_filter_agrees_with_taps() {
        let syms: Vec<Complex<f64>> = (0..1024).map(|k| Complex::new(((k * 7919) % 5) as f64 - 2.0, ((k * 104729) % 3) as f64 - 1.0)).collect();
        let w = rrc_shape(&syms, 0.1, 2, 1.0).unwrap();
        let a = rrc_filter(&w, 0.1, 2).unwrap();
        let b = rrc_filter_spectral(&w, 0.1, 2).unwrap();
        let err: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert!(10.0 * (err / a.power() / a.len() as f64).log10() < -35.0);
    }

    #[test]
    fn spectral_matched_filter_rejects_tone_at_band_edge() {
        let n = 4096;
        // Bin-aligned, just outside the 0.55 symbol-rate edge.
        let bin = 1130.0;
        let tone = ComplexBlock::new((0..n).map(|k| Complex::from_polar(1.0, 2.0 * PI * bin * k as f64 / n as f64)).collect::<Vec<Complex<f64>>>(), 2.0).unwrap();
        assert!(rrc_filter_spectral(&tone, 0.1, 2).unwrap().power() < 1e-20);
        assert!(rrc_filter(&tone, 0.1, 2).unwrap().power() > 1e-5);
    }
}
