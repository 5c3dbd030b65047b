use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{narrow, widen, Real};
use crate::signal::ComplexBlock;
use crate::tx::qam16_radii;

/// Output cross-correlation above which a MIMO equalizer is flagged as
/// having captured the same source twice.
pub const SINGULARITY_CORRELATION: f64 = 0.9;

/// Tap-norm growth treated as divergence.
const DIVERGENCE_GROWTH: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EqualizerConfig {
    pub taps: usize,
    pub mu_cma: f64,
    pub mu_cmma: f64,
    pub cma_pretrain_symbols: usize,
    pub radii: [f64; 3],
}

impl Default for EqualizerConfig {
    fn default() -> Self {
        Self { taps: 15, mu_cma: 1e-3, mu_cmma: 1e-4, cma_pretrain_symbols: 20_000, radii: qam16_radii() }
    }
}

impl EqualizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.taps % 2 == 0 || self.taps == 0 {
            return Err(Error::InvalidParameter(format!("equalizer taps must be odd, got {}", self.taps)));
        }
        if !(self.radii[0] > 0.0 && self.radii[0] < self.radii[1] && self.radii[1] < self.radii[2]) {
            return Err(Error::InvalidParameter(format!("radii must be strictly increasing: {:?}", self.radii)));
        }
        if !(self.mu_cma > 0.0) || !(self.mu_cmma > 0.0) {
            return Err(Error::InvalidParameter("step sizes must be positive".into()));
        }
        Ok(())
    }

    /// CMA modulus `E|s|^4 / E|s|^2` for a constellation whose rings carry
    /// 4, 8 and 4 points, as in square 16QAM.
    pub fn cma_r2(&self) -> f64 {
        let w = [4.0, 8.0, 4.0];
        let (m4, m2) = self.radii.iter().zip(w).fold((0.0, 0.0), |(a, b), (r, n)| (a + n * r.powi(4), b + n * r * r));
        m4 / m2
    }

    fn nearest_r2(&self, p: f64) -> f64 {
        let r = p.sqrt();
        let mut best = self.radii[0];
        for &c in &self.radii[1..] {
            if (r - c).abs() < (r - best).abs() {
                best = c;
            }
        }
        best * best
    }
}

/// Input scaled to unit mean power, in f64.
fn normalized<T: Real>(b: &ComplexBlock<T>) -> Vec<Complex<f64>> {
    let p = b.power();
    let g = if p > 0.0 { 1.0 / p.sqrt() } else { 1.0 };
    b.samples().iter().map(|z| widen(*z) * g).collect()
}

fn window(x: &[Complex<f64>], center: usize, taps: usize, out: &mut [Complex<f64>]) {
    let n = x.len();
    let half = taps / 2;
    for (i, o) in out.iter_mut().enumerate() {
        *o = x[(center + n + i - half) % n];
    }
}

fn dot(w: &[Complex<f64>], x: &[Complex<f64>]) -> Complex<f64> {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn norm(w: &[Complex<f64>]) -> f64 {
    w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_2sps<T: Real>(b: &ComplexBlock<T>) -> Result<()> {
    if b.len() % 2 != 0 || b.is_empty() {
        return Err(Error::InvalidParameter(format!("equalizer input must hold an even number of samples, got {}", b.len())));
    }
    Ok(())
}

/// Error term for symbol index `k`: CMA on `R^2` during pretraining, then
/// radius-directed on the nearest ring.
fn modulus_error(cfg: &EqualizerConfig, r2: f64, k: usize, y: Complex<f64>) -> (Complex<f64>, f64) {
    let p = y.norm_sqr();
    if k < cfg.cma_pretrain_symbols {
        (y * (p - r2), cfg.mu_cma)
    } else {
        (y * (p - cfg.nearest_r2(p)), cfg.mu_cmma)
    }
}

/// Fractionally spaced single-polarization equalizer: 2 samples per symbol
/// in, 1 out. Taps start as a center spike.
pub fn equalize_siso_cmma<T: Real>(input: &ComplexBlock<T>, cfg: &EqualizerConfig) -> Result<ComplexBlock<T>> {
    cfg.validate()?;
    check_2sps(input)?;
    let x = normalized(input);
    let n_sym = x.len() / 2;
    let r2 = cfg.cma_r2();
    let mut w = vec![Complex::new(0.0, 0.0); cfg.taps];
    w[cfg.taps / 2] = Complex::new(1.0, 0.0);
    let limit = DIVERGENCE_GROWTH * norm(&w);
    let mut buf = vec![Complex::new(0.0, 0.0); cfg.taps];
    let mut out = Vec::with_capacity(n_sym);
    for k in 0..n_sym {
        window(&x, 2 * k, cfg.taps, &mut buf);
        let y = dot(&w, &buf);
        out.push(narrow(y));
        let (e, mu) = modulus_error(cfg, r2, k, y);
        for (wi, xi) in w.iter_mut().zip(&buf) {
            *wi -= mu * e * xi.conj();
        }
        if !(norm(&w) <= limit) {
            return Err(Error::EqualizerDiverged);
        }
    }
    Ok(ComplexBlock::new(out, input.sample_rate() / 2.0)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimoOutput<T: Real> {
    pub x: ComplexBlock<T>,
    pub y: ComplexBlock<T>,
    /// Normalized output cross-correlation after pretraining.
    pub cross_correlation: f64,
    /// Both outputs converged onto the same source.
    pub singular: bool,
}

/// Orthogonal counterpart of the X row: `w_yx = -conj(rev(w_xy))`,
/// `w_yy = conj(rev(w_xx))`.
fn orthogonal_row(wxx: &[Complex<f64>], wxy: &[Complex<f64>]) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
    let wyx = wxy.iter().rev().map(|z| -z.conj()).collect();
    let wyy = wxx.iter().rev().map(|z| z.conj()).collect();
    (wyx, wyy)
}

/// 2x2 butterfly fractionally spaced equalizer. The X row trains alone for
/// the first half of the CMA phase; the Y row is then seeded orthogonal to it
/// and both rows adapt jointly.
pub fn equalize_mimo_cmma<T: Real>(x_in: &ComplexBlock<T>, y_in: &ComplexBlock<T>, cfg: &EqualizerConfig) -> Result<MimoOutput<T>> {
    cfg.validate()?;
    check_2sps(x_in)?;
    if x_in.len() != y_in.len() {
        return Err(Error::LengthMismatch(x_in.len(), y_in.len()));
    }
    let x = normalized(x_in);
    let y = normalized(y_in);
    let n_sym = x.len() / 2;
    let r2 = cfg.cma_r2();
    let t = cfg.taps;
    let zero = Complex::new(0.0, 0.0);
    let mut wxx = vec![zero; t];
    let mut wxy = vec![zero; t];
    wxx[t / 2] = Complex::new(1.0, 0.0);
    let (mut wyx, mut wyy) = orthogonal_row(&wxx, &wxy);
    let bound = DIVERGENCE_GROWTH * 2f64.sqrt();
    let seed_at = cfg.cma_pretrain_symbols / 2;
    let (mut bx, mut by) = (vec![zero; t], vec![zero; t]);
    let (mut ox, mut oy) = (Vec::with_capacity(n_sym), Vec::with_capacity(n_sym));
    for k in 0..n_sym {
        if k == seed_at {
            (wyx, wyy) = orthogonal_row(&wxx, &wxy);
        }
        window(&x, 2 * k, t, &mut bx);
        window(&y, 2 * k, t, &mut by);
        let u = dot(&wxx, &bx) + dot(&wxy, &by);
        let v = dot(&wyx, &bx) + dot(&wyy, &by);
        ox.push(u);
        oy.push(v);
        let (eu, mu) = modulus_error(cfg, r2, k, u);
        for i in 0..t {
            wxx[i] -= mu * eu * bx[i].conj();
            wxy[i] -= mu * eu * by[i].conj();
        }
        if k >= seed_at {
            let (ev, mu) = modulus_error(cfg, r2, k, v);
            for i in 0..t {
                wyx[i] -= mu * ev * bx[i].conj();
                wyy[i] -= mu * ev * by[i].conj();
            }
        }
        if k < seed_at {
            (wyx, wyy) = orthogonal_row(&wxx, &wxy);
        }
        let nx = (norm(&wxx).powi(2) + norm(&wxy).powi(2)).sqrt();
        let ny = (norm(&wyx).powi(2) + norm(&wyy).powi(2)).sqrt();
        if !(nx <= bound && ny <= bound) {
            return Err(Error::EqualizerDiverged);
        }
    }
    let start = cfg.cma_pretrain_symbols.min(n_sym.saturating_sub(1));
    let cross_correlation = correlation(&ox[start..], &oy[start..]);
    let rate = x_in.sample_rate() / 2.0;
    Ok(MimoOutput {
        x: ComplexBlock::new(ox.into_iter().map(narrow).collect(), rate)?,
        y: ComplexBlock::new(oy.into_iter().map(narrow).collect(), rate)?,
        cross_correlation,
        singular: cross_correlation > SINGULARITY_CORRELATION,
    })
}

/// Magnitude of the normalized cross-correlation of `|a|^2` and `|b|^2`
/// fluctuations, which is insensitive to any slowly varying phase between
/// the two outputs.
fn correlation(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    let pa: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    let pb: Vec<f64> = b.iter().map(|z| z.norm_sqr()).collect();
    let n = pa.len().max(1) as f64;
    let (ma, mb) = (pa.iter().sum::<f64>() / n, pb.iter().sum::<f64>() / n);
    let (mut c, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in pa.iter().zip(&pb) {
        c += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        (c / (va * vb).sqrt()).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_polarization_channel, jones_trajectory, RsopPdlParams};
    use crate::rx::{bps_carrier_recovery, demux_subcarriers, resolve_quadrant, BpsConfig};
    use crate::signal::DualPolWaveform;
    use crate::tx::{build_dscm, demap_16qam, qam16_points, DscmConfig, FramePayload};

    #[test]
    fn radii_and_cma_modulus_from_constellation() {
        let pts = qam16_points();
        let mut mods: Vec<f64> = pts.iter().map(|z| z.norm()).collect();
        mods.sort_by(f64::total_cmp);
        mods.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let cfg = EqualizerConfig::default();
        assert_eq!(mods.len(), 3);
        for (m, r) in mods.iter().zip(cfg.radii) {
            assert!((m - r).abs() < 1e-12);
        }
        assert!((cfg.radii[0] - 0.4472).abs() < 1e-4 && (cfg.radii[2] - 1.3416).abs() < 1e-4);
        let m4: f64 = pts.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>() / 16.0;
        let m2: f64 = pts.iter().map(|z| z.norm_sqr()).sum::<f64>() / 16.0;
        assert!((m4 / m2 - 1.32).abs() < 1e-12);
        assert!((cfg.cma_r2() - 1.32).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(EqualizerConfig { taps: 14, ..Default::default() }.validate().is_err());
        assert!(EqualizerConfig { radii: [1.0, 0.5, 2.0], ..Default::default() }.validate().is_err());
        assert!(EqualizerConfig::default().validate().is_ok());
    }

    fn evm_db(y: &[Complex<f64>], s: &[Complex<f64>]) -> f64 {
        let e: f64 = y.iter().zip(s).map(|(a, b)| (a - b).norm_sqr()).sum();
        let p: f64 = s.iter().map(|z| z.norm_sqr()).sum();
        10.0 * (e / p).log10()
    }

    #[test]
    fn siso_converges_on_clean_input() {
        let cfg = DscmConfig::default();
        let payload = FramePayload::<f64>::generate(4, 16384, 9).unwrap();
        let d = demux_subcarriers(&build_dscm(&payload, &cfg).unwrap(), &cfg).unwrap();
        let eq = EqualizerConfig { cma_pretrain_symbols: 4096, ..Default::default() };
        let out = equalize_siso_cmma(&d.streams[0][1], &eq).unwrap();
        let tail = 8192..16384;
        let (y, _) = resolve_quadrant(&out.samples()[tail.clone()], &payload.symbols[0][1][tail.clone()]);
        assert!(evm_db(&y, &payload.symbols[0][1][tail]) < -25.0);
    }

    #[test]
    fn siso_divergence_is_reported() {
        let cfg = DscmConfig::default();
        let payload = FramePayload::<f64>::generate(4, 2048, 9).unwrap();
        let d = demux_subcarriers(&build_dscm(&payload, &cfg).unwrap(), &cfg).unwrap();
        let eq = EqualizerConfig { mu_cma: 5.0, ..Default::default() };
        assert_eq!(equalize_siso_cmma(&d.streams[0][0], &eq).unwrap_err(), Error::EqualizerDiverged);
    }

    fn rotated_streams(alpha: f64, n_sym: usize, seed: u64) -> (FramePayload<f64>, crate::rx::SubcarrierStreams<f64>) {
        let cfg = DscmConfig::default();
        let payload = FramePayload::<f64>::generate(4, n_sym, seed).unwrap();
        let w = build_dscm(&payload, &cfg).unwrap();
        let traj = jones_trajectory(&RsopPdlParams::fixed(alpha, 0.4, -0.3), w.len(), w.sample_rate()).unwrap();
        let r: DualPolWaveform<f64> = apply_polarization_channel(&w, &traj).unwrap();
        (payload, demux_subcarriers(&r, &cfg).unwrap())
    }

    fn symbol_errors(y: &[Complex<f64>], s: &[Complex<f64>]) -> usize {
        let (r, _) = resolve_quadrant(&bps_carrier_recovery(y, &BpsConfig::default()), s);
        let a = demap_16qam(&r);
        let b = demap_16qam(s);
        a.chunks(4).zip(b.chunks(4)).filter(|(p, q)| p != q).count()
    }

    #[test]
    fn mimo_recovers_static_rotation() {
        let (payload, d) = rotated_streams(std::f64::consts::FRAC_PI_4, 16384, 4);
        let eq = EqualizerConfig { cma_pretrain_symbols: 8000, ..Default::default() };
        let o = equalize_mimo_cmma(&d.streams[0][2], &d.streams[1][2], &eq).unwrap();
        assert!(!o.singular, "{}", o.cross_correlation);
        let tail = 10000..16384;
        let ox = &o.x.samples()[tail.clone()];
        let oy = &o.y.samples()[tail.clone()];
        let (sx, sy) = (&payload.symbols[0][2][tail.clone()], &payload.symbols[1][2][tail]);
        let straight = symbol_errors(ox, sx) + symbol_errors(oy, sy);
        let swapped = symbol_errors(ox, sy) + symbol_errors(oy, sx);
        assert_eq!(straight.min(swapped), 0);
    }

    #[test]
    fn siso_cannot_undo_crosstalk() {
        let (payload, d) = rotated_streams(std::f64::consts::FRAC_PI_4, 16384, 4);
        let eq = EqualizerConfig { cma_pretrain_symbols: 4096, ..Default::default() };
        let out = equalize_siso_cmma(&d.streams[0][2], &eq).unwrap();
        let tail = 8192..16384;
        let errs = symbol_errors(&out.samples()[tail.clone()], &payload.symbols[0][2][tail]);
        assert!(errs > 8192 / 4, "{errs}");
    }

    #[test]
    fn singularity_is_flagged() {
        let (_, d) = rotated_streams(0.3, 8192, 2);
        let eq = EqualizerConfig { cma_pretrain_symbols: 2048, ..Default::default() };
        let same = &d.streams[0][1];
        let o = equalize_mimo_cmma(same, same, &eq).unwrap();
        assert!(o.singular, "{}", o.cross_correlation);
    }
}
