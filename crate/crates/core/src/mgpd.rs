//! Receiver XY-skew estimation from a self-coherent back-to-back capture of
//! a single real cosine pilot on X, and its compensation.
//!
//! Only the XI and YI rails are used. For each rail the DFT bins at `+f1`
//! and `-f1` are projected; `angle(P+ conj(P-))` equals `-4 pi f1` times the
//! rail's total delay, so the X/Y difference isolates `tau_ryi - tau_rxi`.
//! The transmitter delay is common to both and cancels.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_polarization_channel, apply_rx_frontend, apply_tx_iq_delay, jones_trajectory, set_osnr};
use crate::channel::{FrontEndImpairments, RsopPdlParams};
use crate::error::{Error, Result};
use crate::scalar::{lin_to_db, wrap_angle, Real};
use crate::signal::{fractional_delay_real, QuadTributaryCapture};
use crate::tx::generate_mgpd_training;

/// Tone power required over the rail's median bin power.
pub const TONE_THRESHOLD_DB: f64 = 20.0;

/// Default calibration pilot frequency.
pub const DEFAULT_F1: f64 = 2e9;

/// Default calibration capture: 256 000 samples at 100 GSa/s puts 2 GHz on
/// bin 5120.
pub const DEFAULT_CAPTURE_SAMPLES: usize = 256_000;
pub const DEFAULT_CAPTURE_RATE: f64 = 100e9;

#[derive(Debug, Clone, PartialEq)]
pub struct SkewEstimate {
    /// Estimated `tau_ryi - tau_rxi` (s).
    pub tau_xy: f64,
    pub angle_x: f64,
    pub angle_y: f64,
    pub tone_snr_x_db: f64,
    pub tone_snr_y_db: f64,
    /// `1 / (4 f1)`.
    pub unambiguous_range: f64,
}

/// Calibration report in picoseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewReport {
    pub tau_xy_ps: f64,
    pub angle_x: f64,
    pub angle_y: f64,
    pub tone_snr_x_db: f64,
    pub tone_snr_y_db: f64,
    pub unambiguous_range_ps: f64,
}

impl SkewEstimate {
    pub fn report(&self) -> SkewReport {
        SkewReport {
            tau_xy_ps: self.tau_xy * 1e12,
            angle_x: self.angle_x,
            angle_y: self.angle_y,
            tone_snr_x_db: self.tone_snr_x_db,
            tone_snr_y_db: self.tone_snr_y_db,
            unambiguous_range_ps: self.unambiguous_range * 1e12,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report()).expect("report serializes")
    }
}

/// Single-bin DFT of a real stream at integer bin `k`.
fn project<T: Real>(v: &[T], k: i64) -> Complex<f64> {
    let n = v.len() as i64;
    let mut acc = Complex::new(0.0, 0.0);
    for (m, x) in v.iter().enumerate() {
        let idx = (k * m as i64).rem_euclid(n) as f64;
        acc += Complex::from_polar(x.to_f64_lossy(), -2.0 * PI * idx / n as f64);
    }
    acc
}

/// Tone bin power over the median bin power of the rail, in dB.
fn tone_snr<T: Real>(v: &[T], tone: Complex<f64>) -> f64 {
    let buf: Vec<Complex<f64>> = v.iter().map(|x| Complex::new(x.to_f64_lossy(), 0.0)).collect();
    let mut p: Vec<f64> = crate::signal::spectral::fft(&buf).into_iter().map(|z| z.norm_sqr()).collect();
    let mid = p.len() / 2;
    let (_, median, _) = p.select_nth_unstable_by(mid, f64::total_cmp);
    let median = *median;
    if median <= 0.0 {
        return if tone.norm_sqr() > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    lin_to_db(tone.norm_sqr() / median)
}

fn bin_index(f1: f64, n: usize, fs: f64) -> Result<i64> {
    if f1 <= 0.0 || f1 >= fs / 2.0 {
        return Err(Error::InvalidParameter(format!("pilot frequency {f1} Hz must lie in (0, fs/2)")));
    }
    let k = f1 * n as f64 / fs;
    if (k - k.round()).abs() > 1e-6 {
        return Err(Error::OffGrid(f1));
    }
    Ok(k.round() as i64)
}

/// Estimate `tau_ryi - tau_rxi` from a training capture with pilot `f1`.
pub fn estimate_rx_xy_skew<T: Real>(capture: &QuadTributaryCapture<T>, f1: f64) -> Result<SkewEstimate> {
    let n = capture.len();
    let fs = capture.sample_rate();
    let k = bin_index(f1, n, fs)?;
    let (xp, xm) = (project(&capture.xi, k), project(&capture.xi, -k));
    let (yp, ym) = (project(&capture.yi, k), project(&capture.yi, -k));
    let snr_x = tone_snr(&capture.xi, xp);
    let snr_y = tone_snr(&capture.yi, yp);
    if !(snr_x >= TONE_THRESHOLD_DB) || !(snr_y >= TONE_THRESHOLD_DB) {
        return Err(Error::InsufficientCrosstalk);
    }
    let angle_x = (xp * xm.conj()).arg();
    let angle_y = (yp * ym.conj()).arg();
    let tau_xy = wrap_angle(angle_x - angle_y) / (4.0 * PI * f1);
    Ok(SkewEstimate {
        tau_xy,
        angle_x,
        angle_y,
        tone_snr_x_db: snr_x,
        tone_snr_y_db: snr_y,
        unambiguous_range: 1.0 / (4.0 * f1),
    })
}

/// Advance the Y rails by the estimated skew; X rails are untouched.
pub fn compensate_rx_xy_skew<T: Real>(capture: &QuadTributaryCapture<T>, est: &SkewEstimate) -> Result<QuadTributaryCapture<T>> {
    compensate_skew_by(capture, est.tau_xy)
}

pub(crate) fn compensate_skew_by<T: Real>(capture: &QuadTributaryCapture<T>, tau: f64) -> Result<QuadTributaryCapture<T>> {
    if tau == 0.0 {
        return Ok(capture.clone());
    }
    let fs = capture.sample_rate();
    let yi = fractional_delay_real(&capture.yi, fs, -tau)?;
    let yq = fractional_delay_real(&capture.yq, fs, -tau)?;
    QuadTributaryCapture::new(capture.xi.clone(), capture.xq.clone(), yi, yq, fs)
}

/// Back-to-back calibration run: training frame, transmitter I delay, a
/// static rotation (no CD, DGD, frequency offset or phase noise), ASE, the
/// receiver front end, then [`estimate_rx_xy_skew`].
pub fn run_obtb_calibration<T: Real>(
    imp: &FrontEndImpairments,
    rotation: &RsopPdlParams,
    f1: f64,
    duration: f64,
    osnr_db: f64,
    sample_rate: f64,
    seed: u64,
) -> Result<SkewEstimate> {
    let train = generate_mgpd_training::<T>(f1, duration, sample_rate)?;
    let train = apply_tx_iq_delay(&train, imp.tau_txi)?;
    let stat = RsopPdlParams { omega: 0.0, dgd: 0.0, ..rotation.clone() };
    let traj = jones_trajectory(&stat, train.len(), sample_rate)?;
    let rx = apply_polarization_channel(&train, &traj)?;
    let rx = set_osnr(&rx, osnr_db, seed)?;
    let cap = apply_rx_frontend(&rx, imp)?;
    estimate_rx_xy_skew(&cap, f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FrontEndImpairments as Fe;
    use proptest::prelude::*;

    const FS: f64 = DEFAULT_CAPTURE_RATE;
    const DUR: f64 = DEFAULT_CAPTURE_SAMPLES as f64 / DEFAULT_CAPTURE_RATE;

    fn rot45() -> RsopPdlParams {
        RsopPdlParams::fixed(PI / 4.0, 0.3, 0.2)
    }

    fn calib(imp: &Fe, rot: &RsopPdlParams, osnr: f64, seed: u64) -> Result<SkewEstimate> {
        run_obtb_calibration::<f64>(imp, rot, DEFAULT_F1, DUR, osnr, FS, seed)
    }

    #[test]
    fn zero_delays_give_zero() {
        let e = calib(&Fe::default(), &rot45(), f64::INFINITY, 1).unwrap();
        assert!(e.tau_xy.abs() * 1e12 < 1e-3);
        assert!((e.unambiguous_range - 125e-12).abs() < 1e-18);
    }

    #[test]
    fn injected_skew_at_26_db() {
        for (i, tau_ps) in [-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0].into_iter().enumerate() {
            let e = calib(&Fe::with_rx_xy_skew(tau_ps * 1e-12), &rot45(), 26.0, i as u64).unwrap();
            assert!((e.tau_xy * 1e12 - tau_ps).abs() <= 0.1, "{tau_ps}: {}", e.tau_xy * 1e12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn noiseless_fractional_delays(tau_ps in -100.0f64..100.0, rx in -20.0f64..20.0) {
            let imp = Fe { tau_rxi: rx * 1e-12, tau_ryi: (rx + tau_ps) * 1e-12, ..Default::default() };
            let e = calib(&imp, &rot45(), f64::INFINITY, 0).unwrap();
            prop_assert!((e.tau_xy * 1e12 - tau_ps).abs() < 1e-2);
        }

        #[test]
        fn q_rails_and_imbalance_do_not_matter(
            txq in -10.0f64..10.0, tyq in -10.0f64..10.0, ax in -10.0f64..10.0, ay in -10.0f64..10.0,
            px in -15.0f64..15.0, py in -15.0f64..15.0
        ) {
            let imp = Fe {
                tau_ryi: 5e-12, tau_ryq: 5e-12 + tyq * 1e-12, tau_rxq: txq * 1e-12,
                amp_imb_x_db: ax, amp_imb_y_db: ay, phase_imb_x_deg: px, phase_imb_y_deg: py,
                ..Default::default()
            };
            let e = calib(&imp, &rot45(), 26.0, 3).unwrap();
            prop_assert!((e.tau_xy * 1e12 - 5.0).abs() <= 0.2);
        }

        #[test]
        fn transmitter_delay_cancels(txi in -50.0f64..50.0) {
            let base = calib(&Fe::with_rx_xy_skew(5e-12), &rot45(), f64::INFINITY, 0).unwrap();
            let imp = Fe { tau_txi: txi * 1e-12, ..Fe::with_rx_xy_skew(5e-12) };
            let e = calib(&imp, &rot45(), f64::INFINITY, 0).unwrap();
            prop_assert!((e.tau_xy - base.tau_xy).abs() * 1e12 < 0.05);
        }

        #[test]
        fn crosstalk_magnitude_does_not_matter(alpha_deg in 10.0f64..80.0) {
            let rot = RsopPdlParams::fixed(alpha_deg.to_radians(), 0.3, 0.2);
            let e = calib(&Fe::with_rx_xy_skew(5e-12), &rot, 26.0, 4).unwrap();
            prop_assert!((e.tau_xy * 1e12 - 5.0).abs() < 0.1);
        }
    }

    #[test]
    fn no_crosstalk_is_rejected() {
        let rot = RsopPdlParams::fixed(0.0, 0.0, 0.0);
        assert_eq!(calib(&Fe::with_rx_xy_skew(5e-12), &rot, 26.0, 1).unwrap_err(), Error::InsufficientCrosstalk);
    }

    #[test]
    fn low_osnr_accuracy() {
        for seed in 0..4 {
            let e = calib(&Fe::with_rx_xy_skew(5e-12), &rot45(), 12.0, seed).unwrap();
            assert!((e.tau_xy * 1e12 - 5.0).abs() <= 0.3, "{}", e.tau_xy * 1e12);
        }
    }

    #[test]
    fn wraps_beyond_range() {
        let eps = 3e-12;
        let e = calib(&Fe::with_rx_xy_skew(125e-12 + eps), &rot45(), f64::INFINITY, 0).unwrap();
        assert!((e.tau_xy - (-125e-12 + eps)).abs() < 1e-14, "{}", e.tau_xy);
    }

    #[test]
    fn deterministic_and_off_grid() {
        let train = generate_mgpd_training::<f64>(DEFAULT_F1, DUR, FS).unwrap();
        let traj = jones_trajectory(&rot45(), train.len(), FS).unwrap();
        let cap = apply_rx_frontend(&apply_polarization_channel(&train, &traj).unwrap(), &Fe::with_rx_xy_skew(2e-12)).unwrap();
        assert_eq!(estimate_rx_xy_skew(&cap, DEFAULT_F1).unwrap(), estimate_rx_xy_skew(&cap, DEFAULT_F1).unwrap());
        assert_eq!(estimate_rx_xy_skew(&cap, 2.0001e9).unwrap_err(), Error::OffGrid(2.0001e9));
    }

    #[test]
    fn compensation_fixed_point() {
        let train = generate_mgpd_training::<f64>(DEFAULT_F1, DUR, FS).unwrap();
        let traj = jones_trajectory(&rot45(), train.len(), FS).unwrap();
        let rx = set_osnr(&apply_polarization_channel(&train, &traj).unwrap(), 26.0, 5).unwrap();
        let cap = apply_rx_frontend(&rx, &Fe::with_rx_xy_skew(7e-12)).unwrap();
        let truth = SkewEstimate { tau_xy: 7e-12, angle_x: 0.0, angle_y: 0.0, tone_snr_x_db: 0.0, tone_snr_y_db: 0.0, unambiguous_range: 125e-12 };
        let fixed = compensate_rx_xy_skew(&cap, &truth).unwrap();
        let again = estimate_rx_xy_skew(&fixed, DEFAULT_F1).unwrap();
        assert!(again.tau_xy.abs() * 1e12 < 0.05);
        let zero = SkewEstimate { tau_xy: 0.0, ..truth };
        assert_eq!(compensate_rx_xy_skew(&cap, &zero).unwrap(), cap);
    }

    #[test]
    fn report_json_fields() {
        let e = calib(&Fe::with_rx_xy_skew(5e-12), &rot45(), 26.0, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        for key in ["tau_xy_ps", "angle_x", "angle_y", "tone_snr_x_db", "tone_snr_y_db", "unambiguous_range_ps"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!((v["unambiguous_range_ps"].as_f64().unwrap() - 125.0).abs() < 1e-9);
    }

    #[test]
    fn single_precision_capture() {
        let e = run_obtb_calibration::<f32>(&Fe::with_rx_xy_skew(5e-12), &rot45(), DEFAULT_F1, DUR, 26.0, FS, 2).unwrap();
        assert!((e.tau_xy * 1e12 - 5.0).abs() <= 0.1);
    }
}
