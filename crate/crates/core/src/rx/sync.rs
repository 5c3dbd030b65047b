use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::spectral::{fft, ifft};

/// Required ratio of the correlation peak to the RMS of the other lags.
pub const SYNC_PEAK_RATIO: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyncResult<T: Real> {
    /// `rx` rotated so that `aligned[k]` corresponds to `reference[k]`.
    pub aligned: Vec<Complex<T>>,
    /// `rx[k + lag] ~ reference[k]` (circular).
    pub lag: usize,
    pub peak_ratio: f64,
}

fn centered_modulus<T: Real>(v: &[Complex<T>]) -> Vec<Complex<f64>> {
    let m: Vec<f64> = v.iter().map(|z| z.norm().to_f64_lossy()).collect();
    let mean = m.iter().sum::<f64>() / m.len() as f64;
    m.into_iter().map(|a| Complex::new(a - mean, 0.0)).collect()
}

/// Circular alignment by cross-correlation of mean-removed moduli, which is
/// blind to carrier phase and quadrant.
pub fn synchronize<T: Real>(rx: &[Complex<T>], reference: &[Complex<T>]) -> Result<SyncResult<T>> {
    if rx.len() != reference.len() {
        return Err(Error::LengthMismatch(reference.len(), rx.len()));
    }
    if rx.len() < 2 {
        return Err(Error::SyncFailed);
    }
    let a = fft(&centered_modulus(rx));
    let b = fft(&centered_modulus(reference));
    let prod: Vec<Complex<f64>> = a.iter().zip(&b).map(|(x, y)| x * y.conj()).collect();
    let r: Vec<f64> = ifft(&prod).into_iter().map(|z| z.re).collect();
    let (lag, peak) = r
        .iter()
        .copied()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty");
    let rest: f64 = r.iter().enumerate().filter(|(i, _)| *i != lag).map(|(_, v)| v * v).sum();
    let floor = (rest / (r.len() - 1) as f64).sqrt();
    let peak_ratio = if floor > 0.0 { peak / floor } else if peak > 0.0 { f64::INFINITY } else { 0.0 };
    if !(peak_ratio >= SYNC_PEAK_RATIO) {
        return Err(Error::SyncFailed);
    }
    let mut aligned = rx.to_vec();
    aligned.rotate_left(lag);
    Ok(SyncResult { aligned, lag, peak_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tx::{generate_prbs, map_16qam};
    use rand::{Rng, SeedableRng};

    fn symbols(n: usize, seed: u64) -> Vec<Complex<f64>> {
        map_16qam(&generate_prbs(15, seed, 4 * n).unwrap())
    }

    #[test]
    fn zero_lag() {
        let s = symbols(4096, 1);
        let r = synchronize(&s, &s).unwrap();
        assert_eq!(r.lag, 0);
        assert_eq!(r.aligned, s);
    }

    #[test]
    fn injected_shift_and_phase() {
        let s = symbols(8192, 7);
        let mut rx: Vec<_> = s.iter().map(|z| z * Complex::new(0.0, 1.0)).collect();
        rx.rotate_right(137);
        let r = synchronize(&rx, &s).unwrap();
        assert_eq!(r.lag, 137);
        for (a, b) in r.aligned.iter().zip(&s) {
            assert!((a - b * Complex::new(0.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn unrelated_sequences_fail() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a: Vec<Complex<f64>> = (0..4096).map(|_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let b = symbols(4096, 99);
        assert_eq!(synchronize(&a, &b).unwrap_err(), Error::SyncFailed);
    }

    #[test]
    fn length_mismatch() {
        let s = symbols(64, 1);
        assert!(matches!(synchronize(&s[..10], &s), Err(Error::LengthMismatch(..))));
    }
}
