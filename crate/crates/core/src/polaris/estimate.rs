use num_complex::Complex;

use super::extract::PilotTrace;
use crate::channel::{apply_matrices, Jones, JonesTrajectory};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{ComplexBlock, DualPolWaveform};

type C = Complex<f64>;

/// Below this `|det|` a DPT estimate is flagged degenerate.
pub const DPT_DEGENERATE_DET: f64 = 1e-3;

/// SPT samples whose pilot power falls this far under the median are flagged
/// as pilot loss.
pub const SPT_PILOT_LOST_RATIO: f64 = 1e-2;

/// A Jones trajectory on the pilot-trace grid plus per-sample validity.
#[derive(Debug, Clone, PartialEq)]
pub struct JonesEstimate {
    pub trajectory: JonesTrajectory,
    /// `true` where the estimate is degenerate or the pilot was lost.
    pub flagged: Vec<bool>,
    pub decimation: usize,
}

impl JonesEstimate {
    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }
}

fn check_grid(traces: &[&PilotTrace]) -> Result<()> {
    let a = traces[0];
    for t in &traces[1..] {
        if t.len() != a.len() {
            return Err(Error::LengthMismatch(a.len(), t.len()));
        }
        if t.decimation != a.decimation || t.sample_rate != a.sample_rate {
            return Err(Error::RateMismatch(a.sample_rate, t.sample_rate));
        }
    }
    Ok(())
}

/// `J = [[px1, px2], [py1, py2]]` with each column scaled to unit norm.
pub fn estimate_jones_dpt(px1: &PilotTrace, py1: &PilotTrace, px2: &PilotTrace, py2: &PilotTrace) -> Result<JonesEstimate> {
    check_grid(&[px1, py1, px2, py2])?;
    let mut flagged = Vec::with_capacity(px1.len());
    let matrices = (0..px1.len())
        .map(|m| {
            let (a, b, c, d) = (px1.values[m], py1.values[m], px2.values[m], py2.values[m]);
            let n1 = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let n2 = (c.norm_sqr() + d.norm_sqr()).sqrt();
            let (s1, s2) = (if n1 > 0.0 { 1.0 / n1 } else { 0.0 }, if n2 > 0.0 { 1.0 / n2 } else { 0.0 });
            let j = Jones::new(a * s1, c * s2, b * s1, d * s2);
            flagged.push(!(j.det().norm() >= DPT_DEGENERATE_DET));
            j
        })
        .collect();
    Ok(JonesEstimate {
        trajectory: JonesTrajectory { matrices, sample_rate: px1.sample_rate },
        flagged,
        decimation: px1.decimation,
    })
}

/// Unitary completion from one pilot:
/// `J = [[px, -py*], [py, px*]] / sqrt(|px|^2 + |py|^2)`, so `det J = 1`.
pub fn estimate_jones_spt(px: &PilotTrace, py: &PilotTrace) -> Result<JonesEstimate> {
    check_grid(&[px, py])?;
    let power: Vec<f64> = px.values.iter().zip(&py.values).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
    let mut sorted = power.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
    let floor = median * SPT_PILOT_LOST_RATIO;
    let mut flagged = Vec::with_capacity(px.len());
    let matrices = px
        .values
        .iter()
        .zip(&py.values)
        .zip(&power)
        .map(|((&a, &b), &p)| {
            let lost = !(p > floor) || p == 0.0;
            flagged.push(lost);
            if lost {
                return Jones::identity();
            }
            let s = 1.0 / p.sqrt();
            Jones::new(a * s, -b.conj() * s, b * s, a.conj() * s)
        })
        .collect();
    Ok(JonesEstimate {
        trajectory: JonesTrajectory { matrices, sample_rate: px.sample_rate },
        flagged,
        decimation: px.decimation,
    })
}

/// Diagnostics of one inverse-Jones pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DemuxDiagnostics {
    /// Trace samples replaced by the last valid estimate.
    pub held_samples: usize,
}

/// Replace flagged samples with the most recent valid matrix (circularly,
/// so leading flagged samples take the last valid one of the block).
fn hold_over(est: &JonesEstimate) -> Result<(Vec<Jones>, usize)> {
    let m = &est.trajectory.matrices;
    let last_valid = (0..m.len()).rev().find(|&i| !est.flagged[i]).ok_or(Error::PilotNotFound)?;
    let mut held = 0;
    let mut cur = m[last_valid];
    let out = m
        .iter()
        .zip(&est.flagged)
        .map(|(j, &f)| {
            if f {
                held += 1;
            } else {
                cur = *j;
            }
            cur
        })
        .collect();
    Ok((out, held))
}

/// Expand a decimated trajectory to the full rate by linear interpolation
/// between neighbouring estimates (circular over the block).
///
/// Each interpolated matrix is rescaled so `|det|` follows the linear
/// interpolation of the end points' `|det|`. Two unit-determinant SPT
/// estimates with very different common phase (the laser phase jump at the
/// block wrap) would otherwise interpolate through a near-singular matrix;
/// with the rescaling SPT-form matrices stay unitary.
pub fn interpolate_trajectory(matrices: &[Jones], decimation: usize, sample_rate: f64) -> JonesTrajectory {
    let m = matrices.len();
    let d = decimation.max(1);
    let mut out = Vec::with_capacity(m * d);
    for i in 0..m {
        let a = matrices[i];
        let b = matrices[(i + 1) % m];
        let (da, db) = (a.det().norm(), b.det().norm());
        for k in 0..d {
            let t = k as f64 / d as f64;
            let mut r = [[C::new(0.0, 0.0); 2]; 2];
            for (p, row) in r.iter_mut().enumerate() {
                for (q, v) in row.iter_mut().enumerate() {
                    *v = a.0[p][q] * (1.0 - t) + b.0[p][q] * t;
                }
            }
            let j = Jones(r);
            let actual = j.det().norm();
            let target = da * (1.0 - t) + db * t;
            let j = if actual > 0.0 && actual.is_finite() { j.scale(C::new((target / actual).sqrt(), 0.0)) } else { j };
            out.push(j);
        }
    }
    JonesTrajectory { matrices: out, sample_rate }
}

/// Per-sample `J(t)^{-1} [R_X; R_Y]`. Flagged estimates are held over.
pub fn apply_inverse_jones<T: Real>(w: &DualPolWaveform<T>, est: &JonesEstimate) -> Result<(DualPolWaveform<T>, DemuxDiagnostics)> {
    let (mats, held) = hold_over(est)?;
    let expected = mats.len() * est.decimation;
    if expected != w.len() {
        return Err(Error::LengthMismatch(w.len(), expected));
    }
    let full = if est.decimation == 1 {
        JonesTrajectory { matrices: mats, sample_rate: w.sample_rate() }
    } else {
        interpolate_trajectory(&mats, est.decimation, w.sample_rate())
    };
    let inv: Vec<Jones> = full
        .matrices
        .iter()
        .map(|j| j.inverse().unwrap_or_else(|| j.adjugate()))
        .collect();
    let (x, y) = apply_matrices(w.x.samples(), w.y.samples(), &inv);
    let fs = w.sample_rate();
    Ok((
        DualPolWaveform::new(ComplexBlock::from_parts(x, fs), ComplexBlock::from_parts(y, fs))?,
        DemuxDiagnostics { held_samples: held },
    ))
}

/// Estimated matrix a skewed receiver would produce for a static channel
/// `j`, receiver XY skew `tau_xy` and pilot `f1` (plus `f2` for DPT).
pub fn predict_skewed_jones(j: &Jones, tau_xy: f64, f1: f64, f2: Option<f64>) -> Jones {
    let rot = |f: f64| Complex::from_polar(1.0, -2.0 * std::f64::consts::PI * f * tau_xy);
    match f2 {
        Some(f2) => Jones::new(j.xx(), j.xy(), j.yx() * rot(f1), j.yy() * rot(f2)),
        None => {
            let yx = j.yx() * rot(f1);
            Jones::new(j.xx(), -yx.conj(), yx, j.xx().conj())
        }
    }
}

/// Least-squares 2x2 matrix `M` with `out ~ M ref`, from paired samples.
pub fn fit_mixing_matrix<T: Real>(out: (&[Complex<T>], &[Complex<T>]), reference: (&[Complex<T>], &[Complex<T>])) -> Option<Jones> {
    use crate::scalar::widen;
    let n = out.0.len().min(out.1.len()).min(reference.0.len()).min(reference.1.len());
    // M = (O R^H)(R R^H)^{-1}
    let mut orh = [[C::new(0.0, 0.0); 2]; 2];
    let mut rrh = [[C::new(0.0, 0.0); 2]; 2];
    for k in 0..n {
        let o = [widen(out.0[k]), widen(out.1[k])];
        let r = [widen(reference.0[k]), widen(reference.1[k])];
        for p in 0..2 {
            for q in 0..2 {
                orh[p][q] += o[p] * r[q].conj();
                rrh[p][q] += r[p] * r[q].conj();
            }
        }
    }
    Jones(rrh).inverse().map(|inv| Jones(orh).mul(&inv))
}

/// Cross-polarization leakage of a mixing matrix, in dB:
/// `(|M_xy|^2 + |M_yx|^2) / (|M_xx|^2 + |M_yy|^2)`.
pub fn leakage_db(m: &Jones) -> f64 {
    let cross = m.xy().norm_sqr() + m.yx().norm_sqr();
    let direct = m.xx().norm_sqr() + m.yy().norm_sqr();
    10.0 * (cross / direct).log10()
}
