//! FFT helpers shared by the frequency-domain operations.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::{widen, Real};

/// Forward DFT (unnormalized).
pub fn fft<T: Real>(input: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = input.to_vec();
    fft_in_place(&mut buf);
    buf
}

pub fn fft_in_place<T: Real>(buf: &mut [Complex<T>]) {
    if buf.is_empty() {
        return;
    }
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// Inverse DFT normalized by `1/N`, so `ifft(fft(x)) == x`.
pub fn ifft<T: Real>(input: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = input.to_vec();
    ifft_in_place(&mut buf);
    buf
}

pub fn ifft_in_place<T: Real>(buf: &mut [Complex<T>]) {
    if buf.is_empty() {
        return;
    }
    let n = buf.len();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_inverse(n).process(buf);
    let scale = T::of(1.0 / n as f64);
    for z in buf.iter_mut() {
        *z = *z * scale;
    }
}

/// Signed frequency of DFT bin `k` for an `n`-point transform.
///
/// Bins at or above `n/2` map to negative frequencies, so the Nyquist bin of
/// an even-length transform reports `-fs/2`.
pub fn bin_frequency(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = k as f64;
    let n_f = n as f64;
    if k < n_f / 2.0 {
        k * sample_rate / n_f
    } else {
        (k - n_f) * sample_rate / n_f
    }
}

/// Index of the bin whose frequency is nearest to `f` (wrapped to the grid).
pub fn nearest_bin(f: f64, n: usize, sample_rate: f64) -> usize {
    let k = (f / sample_rate * n as f64).round() as i64;
    k.rem_euclid(n as i64) as usize
}

/// Periodogram `|X_k|^2 / N` in `f64`, natural bin order.
pub fn periodogram<T: Real>(samples: &[Complex<T>]) -> Vec<f64> {
    let n = samples.len();
    fft(samples).into_iter().map(|z| widen(z).norm_sqr() / n as f64).collect()
}

/// Welch-averaged periodogram with `segments` non-overlapping rectangular
/// segments. Returns `(psd, segment_len)`.
pub fn welch<T: Real>(samples: &[Complex<T>], segments: usize) -> (Vec<f64>, usize) {
    let segments = segments.max(1);
    let seg_len = samples.len() / segments;
    let mut acc = vec![0.0; seg_len];
    if seg_len == 0 {
        return (acc, 0);
    }
    for s in 0..segments {
        let p = periodogram(&samples[s * seg_len..(s + 1) * seg_len]);
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    for a in acc.iter_mut() {
        *a /= segments as f64;
    }
    (acc, seg_len)
}

/// Circular convolution of `x` with a tap vector whose center tap is aligned
/// to sample 0 (zero group delay). `taps.len()` should be odd.
pub fn circular_convolve_centered<T: Real>(x: &[Complex<T>], taps: &[f64]) -> Vec<Complex<T>> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let half = (taps.len() / 2) as i64;
    let mut h = vec![Complex::new(T::zero(), T::zero()); n];
    for (i, &t) in taps.iter().enumerate() {
        let idx = (i as i64 - half).rem_euclid(n as i64) as usize;
        h[idx] += Complex::new(T::of(t), T::zero());
    }
    let hf = fft(&h);
    let mut xf = fft(x);
    for (a, b) in xf.iter_mut().zip(hf) {
        *a *= b;
    }
    ifft_in_place(&mut xf);
    xf
}

/// Apply a frequency response `h(f)` (evaluated on the two-sided DFT grid)
/// to a block.
pub fn apply_response<T: Real, F>(x: &[Complex<T>], sample_rate: f64, mut h: F) -> Vec<Complex<T>>
where
    F: FnMut(f64) -> Complex<f64>,
{
    let n = x.len();
    let mut xf = fft(x);
    for (k, z) in xf.iter_mut().enumerate() {
        let g = h(bin_frequency(k, n, sample_rate));
        *z = crate::scalar::narrow(widen(*z) * g);
    }
    ifft_in_place(&mut xf);
    xf
}
