use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::spectral::{periodogram, welch};
use crate::signal::DualPolWaveform;

/// Default half-width of the pilot search window.
pub const DEFAULT_SEARCH_SPAN: f64 = 2.5e9;

const WELCH_SEGMENTS: usize = 16;
const MIN_SEGMENT: usize = 1024;
const DETECT_DB: f64 = 10.0;

fn combined(a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    a.into_iter().zip(b).map(|(p, q)| p + q).collect()
}

fn bin_of(f: f64, n: usize, fs: f64) -> usize {
    ((f / fs * n as f64).round() as i64).rem_euclid(n as i64) as usize
}

/// Frequency offset from the pilot spectrum: the peak of `|X|^2 + |Y|^2`
/// within `expected_f1 +/- search_span`, minus `expected_f1`.
pub fn estimate_frequency_offset<T: Real>(w: &DualPolWaveform<T>, expected_f1: f64, search_span: f64) -> Result<f64> {
    estimate_frequency_offset_tones(w, &[expected_f1], search_span)
}

/// Multi-tone variant: the offset maximizing the summed density at every
/// expected tone, so a DPT pair cannot be confused with one of its members.
///
/// A Welch-averaged spectrum locates the peak (detection requires the score
/// to clear the window median by 10 dB); the full-length periodogram and a
/// quadratic fit through the peak and its neighbours refine it.
pub fn estimate_frequency_offset_tones<T: Real>(w: &DualPolWaveform<T>, tones: &[f64], search_span: f64) -> Result<f64> {
    if tones.is_empty() {
        return Err(Error::InvalidParameter("no pilot tones to search".into()));
    }
    let fs = w.sample_rate();
    let n = w.len();
    if !(search_span > 0.0) || search_span >= fs / 2.0 {
        return Err(Error::InvalidParameter(format!("search span {search_span}")));
    }
    let segments = (n / MIN_SEGMENT).clamp(1, WELCH_SEGMENTS);
    let (px, len) = welch(w.x.samples(), segments);
    let (py, _) = welch(w.y.samples(), segments);
    let coarse = combined(px, py);
    let score = |psd: &[f64], m: usize, off: f64| -> f64 {
        tones.iter().map(|&f| psd[bin_of(f + off, m, fs)]).sum()
    };

    let df_coarse = fs / len as f64;
    let k_span = (search_span / df_coarse).floor() as i64;
    let mut scores: Vec<(f64, f64)> = (-k_span..=k_span)
        .map(|k| {
            let off = k as f64 * df_coarse;
            (off, score(&coarse, len, off))
        })
        .collect();
    let (best_off, best) = scores.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    scores.sort_by(|a, b| a.1.total_cmp(&b.1));
    let median = scores[scores.len() / 2].1;
    if !(best > median * 10f64.powf(DETECT_DB / 10.0)) {
        return Err(Error::PilotNotFound);
    }

    // Refine on the full-resolution grid around the coarse peak.
    let fine = combined(periodogram(w.x.samples()), periodogram(w.y.samples()));
    let df = fs / n as f64;
    let reach = ((df_coarse / df).ceil() as i64).max(1);
    let k0 = (best_off / df).round() as i64;
    let eval = |k: i64| score(&fine, n, k as f64 * df);
    let kb = (k0 - reach..=k0 + reach).max_by(|&a, &b| eval(a).total_cmp(&eval(b))).unwrap_or(k0);
    let (pm, p0, pp) = (eval(kb - 1), eval(kb), eval(kb + 1));
    let denom = pm - 2.0 * p0 + pp;
    let delta = if denom.abs() > 0.0 { (0.5 * (pm - pp) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    Ok((kb as f64 + delta) * df)
}
