use std::f64::consts::PI;

use num_complex::Complex;

use super::spectral::{apply_response, bin_frequency, fft, ifft_in_place};
use super::ComplexBlock;
use crate::error::{Error, Result};
use crate::scalar::{cis, widen, Real};

/// Multiply sample `n` by `e^{j 2 pi delta_f n / fs}`.
pub fn frequency_shift<T: Real>(block: &ComplexBlock<T>, delta_f: f64) -> Result<ComplexBlock<T>> {
    let fs = block.sample_rate();
    if !delta_f.is_finite() || delta_f.abs() >= fs / 2.0 {
        return Err(Error::BeyondNyquist(delta_f));
    }
    if delta_f == 0.0 {
        return Ok(block.clone());
    }
    Ok(block.with_samples(shift_samples(block.samples(), delta_f / fs, 0.0)))
}

/// Rotate `samples[n]` by `e^{j (2 pi cycles_per_sample n + phase0)}`.
/// The phase is reduced modulo one cycle in `f64` so long blocks do not lose
/// precision.
pub(crate) fn shift_samples<T: Real>(samples: &[Complex<T>], cycles_per_sample: f64, phase0: f64) -> Vec<Complex<T>> {
    samples
        .iter()
        .enumerate()
        .map(|(n, z)| {
            let cyc = (cycles_per_sample * n as f64).fract();
            z * cis::<T>(2.0 * PI * cyc + phase0)
        })
        .collect()
}

/// Delay a complex block by `tau` seconds with a linear phase ramp
/// `e^{-j 2 pi f tau}` over the two-sided spectrum (circular over the block).
pub fn fractional_delay<T: Real>(block: &ComplexBlock<T>, tau: f64) -> Result<ComplexBlock<T>> {
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("delay must be finite, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(block.clone());
    }
    let out = apply_response(block.samples(), block.sample_rate(), |f| {
        Complex::from_polar(1.0, -2.0 * PI * f * tau)
    });
    Ok(block.with_samples(out))
}

/// Real-stream variant of [`fractional_delay`]. The ramp is conjugate
/// symmetric, and the Nyquist bin of an even-length block receives the real
/// part of the ramp so the output stays real.
pub fn fractional_delay_real<T: Real>(samples: &[T], sample_rate: f64, tau: f64) -> Result<Vec<T>> {
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("delay must be finite, got {tau}")));
    }
    if tau == 0.0 || samples.is_empty() {
        return Ok(samples.to_vec());
    }
    let n = samples.len();
    let buf: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
    let mut xf = fft(&buf);
    for (k, z) in xf.iter_mut().enumerate() {
        let f = bin_frequency(k, n, sample_rate);
        let ramp = if n % 2 == 0 && k == n / 2 {
            Complex::new((2.0 * PI * f * tau).cos(), 0.0)
        } else {
            Complex::from_polar(1.0, -2.0 * PI * f * tau)
        };
        *z = crate::scalar::narrow(widen(*z) * ramp);
    }
    ifft_in_place(&mut xf);
    Ok(xf.into_iter().map(|z| z.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::spectral::periodogram;

    fn tone(n: usize, fs: f64, f0: f64) -> ComplexBlock<f64> {
        let s = (0..n)
            .map(|k| Complex::from_polar(1.0, 2.0 * PI * f0 * k as f64 / fs))
            .collect();
        ComplexBlock::new(s, fs).unwrap()
    }

    fn peak_bin(p: &[f64]) -> usize {
        p.iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0
    }

    #[test]
    fn zero_shift_is_bitwise_identity() {
        let b = tone(64, 1e3, 37.0);
        assert_eq!(frequency_shift(&b, 0.0).unwrap(), b);
    }

    #[test]
    fn shift_moves_fft_peak() {
        // Bin-aligned tone at bin 10, shift by 7 bins.
        let n = 256;
        let fs = 256e3;
        let b = tone(n, fs, 10e3);
        let shifted = frequency_shift(&b, 7e3).unwrap();
        assert_eq!(peak_bin(&periodogram(b.samples())), 10);
        assert_eq!(peak_bin(&periodogram(shifted.samples())), 17);
        let down = frequency_shift(&b, -15e3).unwrap();
        assert_eq!(peak_bin(&periodogram(down.samples())), n - 5);
    }

    #[test]
    fn shift_inverse_pair_and_power() {
        let fs = 1e9;
        let b = ComplexBlock::new(
            (0..1000).map(|k| Complex::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect(),
            fs,
        )
        .unwrap();
        let s = frequency_shift(&b, 123.4e6).unwrap();
        let back = frequency_shift(&s, -123.4e6).unwrap();
        let err = b.samples().iter().zip(back.samples()).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!((s.power() - b.power()).abs() < 1e-12);
    }

    #[test]
    fn shift_beyond_nyquist_rejected() {
        let b = tone(8, 100.0, 1.0);
        assert_eq!(frequency_shift(&b, 50.0).unwrap_err(), Error::BeyondNyquist(50.0));
        assert!(frequency_shift(&b, -60.0).is_err());
    }

    #[test]
    fn integer_delay_is_circular_shift() {
        let fs = 10.0;
        let x: Vec<Complex<f64>> = (0..64).map(|k| Complex::new((k as f64 * 1.3).sin(), (k as f64 * 0.7).cos())).collect();
        let b = ComplexBlock::new(x.clone(), fs).unwrap();
        for k in [1i64, 5, -3] {
            let d = fractional_delay(&b, k as f64 / fs).unwrap();
            for n in 0..64i64 {
                let src = (n - k).rem_euclid(64) as usize;
                assert!((d.samples()[n as usize] - x[src]).norm() < 1e-10);
            }
            let r: Vec<f64> = x.iter().map(|z| z.re).collect();
            let dr = fractional_delay_real(&r, fs, k as f64 / fs).unwrap();
            for n in 0..64i64 {
                let src = (n - k).rem_euclid(64) as usize;
                assert!((dr[n as usize] - r[src]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cosine_delay_phase_matches_analytic() {
        // cos(2 pi f1 t) delayed by tau: bin +f1 phase becomes -2 pi f1 tau.
        let n = 1000;
        let fs = 100e9;
        let f1 = 2e9; // bin 20
        let tau = 3.7e-12;
        let x: Vec<f64> = (0..n).map(|k| (2.0 * PI * f1 * k as f64 / fs).cos()).collect();
        let d = fractional_delay_real(&x, fs, tau).unwrap();
        for (k, v) in d.iter().enumerate() {
            let t = k as f64 / fs;
            assert!((v - (2.0 * PI * f1 * (t - tau)).cos()).abs() < 1e-10);
        }
        let spec = fft(&d.iter().map(|&v| Complex::new(v, 0.0)).collect::<Vec<_>>());
        let phase = spec[20].arg();
        assert!((phase + 2.0 * PI * f1 * tau).abs() < 1e-9);
        assert!((spec[n - 20].arg() - 2.0 * PI * f1 * tau).abs() < 1e-9);
    }

    #[test]
    fn zero_delay_identity() {
        let b = tone(16, 1.0, 0.1);
        assert_eq!(fractional_delay(&b, 0.0).unwrap(), b);
        assert_eq!(fractional_delay_real(&[1.0, 2.0, 3.0], 1.0, 0.0).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn f32_delay_close_to_f64() {
        let x64: Vec<f64> = (0..128).map(|k| (k as f64 * 0.2).sin()).collect();
        let x32: Vec<f32> = x64.iter().map(|&v| v as f32).collect();
        let a = fractional_delay_real(&x64, 1.0, 0.3).unwrap();
        let b = fractional_delay_real(&x32, 1.0, 0.3).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - *q as f64).abs() < 1e-4);
        }
    }
}
