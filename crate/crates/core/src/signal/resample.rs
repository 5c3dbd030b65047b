use num_complex::Complex;

use super::spectral::{fft, ifft_in_place};
use super::{check_rate, ComplexBlock};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Band-limited rate conversion by DFT zero-padding / truncation.
///
/// `in_band_hz` is the two-sided bandwidth the caller needs preserved.
/// Downsampling to a rate narrower than that is rejected. Content outside the
/// new Nyquist band is discarded (ideal anti-alias filter). The new length
/// `len * new_rate / old_rate` must be an integer.
pub fn resample<T: Real>(block: &ComplexBlock<T>, new_rate: f64, in_band_hz: f64) -> Result<ComplexBlock<T>> {
    check_rate(new_rate)?;
    let old_rate = block.sample_rate();
    if new_rate == old_rate {
        return Ok(block.clone());
    }
    if new_rate < old_rate && in_band_hz > new_rate * (1.0 + 1e-12) {
        return Err(Error::AliasingDownsample { new_rate, in_band: in_band_hz });
    }
    let n = block.len();
    let m_exact = n as f64 * new_rate / old_rate;
    let m = m_exact.round() as usize;
    if (m_exact - m as f64).abs() > 1e-6 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "length {n} at ratio {new_rate}/{old_rate} does not give an integer length"
        )));
    }
    let spec = fft(block.samples());
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; m];
    let common = n.min(m);
    let half = common / 2;
    // Positive frequencies, DC included (bins 0..ceil(common/2)).
    let pos = common - half;
    out[..pos].copy_from_slice(&spec[..pos]);
    // Negative frequencies.
    for i in 1..=half {
        out[m - i] = spec[n - i];
    }
    if common % 2 == 0 {
        // The shared Nyquist bin is split (upsampling) or folded (downsampling).
        let half_t = T::of(0.5);
        if m > n {
            let v = spec[n / 2] * half_t;
            out[half] = v;
            out[m - half] = v;
        } else {
            out[half] = spec[half] + spec[n - half];
        }
    }
    let scale = T::of(m as f64 / n as f64);
    for z in out.iter_mut() {
        *z = *z * scale;
    }
    ifft_in_place(&mut out);
    Ok(ComplexBlock::from_parts(out, new_rate))
}
