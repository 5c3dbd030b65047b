use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{narrow, widen, Real};
use crate::tx::QAM16_SCALE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BpsConfig {
    pub test_phases: usize,
    pub block: usize,
}

impl Default for BpsConfig {
    fn default() -> Self {
        Self { test_phases: 32, block: 64 }
    }
}

fn slice_axis(v: f64) -> f64 {
    let l = (v / QAM16_SCALE).clamp(-3.0, 3.0);
    let q = ((l + 3.0) / 2.0).round() * 2.0 - 3.0;
    q * QAM16_SCALE
}

/// Nearest unit-power 16QAM point.
pub fn slice_16qam(z: Complex<f64>) -> Complex<f64> {
    Complex::new(slice_axis(z.re), slice_axis(z.im))
}

/// Blind phase search: per block, the test phase in `[-pi/4, pi/4)` with the
/// smallest summed squared distance to the nearest constellation point.
/// Block phases are unwrapped modulo `pi/2` before derotation.
pub fn bps_carrier_recovery<T: Real>(symbols: &[Complex<T>], cfg: &BpsConfig) -> Vec<Complex<T>> {
    let b = cfg.test_phases.max(1);
    let block = cfg.block.max(1);
    let rot: Vec<Complex<f64>> = (0..b)
        .map(|i| Complex::from_polar(1.0, -(-PI / 4.0 + FRAC_PI_2 * i as f64 / b as f64)))
        .collect();
    let z: Vec<Complex<f64>> = symbols.iter().map(|s| widen(*s)).collect();
    let mut out = Vec::with_capacity(z.len());
    let mut prev: Option<f64> = None;
    for chunk in z.chunks(block) {
        let mut best = (f64::INFINITY, 0usize);
        for (i, r) in rot.iter().enumerate() {
            let d: f64 = chunk.iter().map(|s| {
                let t = s * r;
                (t - slice_16qam(t)).norm_sqr()
            }).sum();
            if d < best.0 {
                best = (d, i);
            }
        }
        let mut phi = -PI / 4.0 + FRAC_PI_2 * best.1 as f64 / b as f64;
        if let Some(p) = prev {
            phi += FRAC_PI_2 * ((p - phi) / FRAC_PI_2).round();
        }
        prev = Some(phi);
        let r = Complex::from_polar(1.0, -phi);
        out.extend(chunk.iter().map(|s| narrow(s * r)));
    }
    out
}

/// Rotate by the multiple of `pi/2` that best matches `reference`
/// (offline genie resolution). Returns the rotated symbols and the number of
/// quarter turns applied.
pub fn resolve_quadrant<T: Real>(symbols: &[Complex<T>], reference: &[Complex<T>]) -> (Vec<Complex<T>>, u8) {
    let mut best = (usize::MAX, 0u8);
    let turns = [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0), Complex::new(0.0, -1.0)];
    for (q, t) in turns.iter().enumerate() {
        let errs = symbols
            .iter()
            .zip(reference)
            .filter(|(s, r)| (slice_16qam(widen(**s) * t) - widen(**r)).norm() > 1e-6)
            .count();
        if errs < best.0 {
            best = (errs, q as u8);
        }
    }
    let t = turns[best.1 as usize];
    (symbols.iter().map(|s| narrow(widen(*s) * t)).collect(), best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tx::{demap_16qam, generate_prbs, map_16qam};
    use proptest::prelude::*;

    fn syms(n: usize, seed: u64) -> Vec<Complex<f64>> {
        map_16qam(&generate_prbs(15, seed, 4 * n).unwrap())
    }

    fn max_phase_err(out: &[Complex<f64>], s: &[Complex<f64>]) -> f64 {
        out.iter().zip(s).map(|(a, b)| (a / b).arg().abs()).fold(0.0, f64::max)
    }

    #[test]
    fn slicer_grid() {
        let s = slice_16qam(Complex::new(0.9, -0.05));
        assert!((s.re - 3.0 * QAM16_SCALE).abs() < 1e-12 && (s.im + QAM16_SCALE).abs() < 1e-12);
    }

    #[test]
    fn constant_offset_within_half_step() {
        let s = syms(4096, 3);
        let rx: Vec<_> = s.iter().map(|z| z * Complex::from_polar(1.0, PI / 16.0)).collect();
        let out = bps_carrier_recovery(&rx, &BpsConfig::default());
        assert!(max_phase_err(&out, &s) <= PI / 64.0 + 1e-12);
    }

    #[test]
    fn zero_phase_is_identity() {
        let s = syms(1024, 5);
        let out = bps_carrier_recovery(&s, &BpsConfig::default());
        let (r, q) = resolve_quadrant(&out, &s);
        assert_eq!(q, 0);
        for (a, b) in r.iter().zip(&s) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn opposite_signed_phases_on_two_streams() {
        let sx = syms(8192, 1);
        let sy = syms(8192, 2);
        let phi: Vec<f64> = (0..8192).map(|k| 0.6 * (k as f64 * 1e-3).sin() + 1e-4 * k as f64).collect();
        let rx: Vec<_> = sx.iter().zip(&phi).map(|(z, p)| z * Complex::from_polar(1.0, -p)).collect();
        let ry: Vec<_> = sy.iter().zip(&phi).map(|(z, p)| z * Complex::from_polar(1.0, *p)).collect();
        for (r, s) in [(rx, sx), (ry, sy)] {
            let (out, _) = resolve_quadrant(&bps_carrier_recovery(&r, &BpsConfig::default()), &s);
            assert_eq!(demap_16qam(&out), demap_16qam(&s));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn quadrant_rotation_invariance(q in 0u8..4, seed in 0u64..1000) {
            let s = syms(2048, seed + 1);
            let rot = Complex::from_polar(1.0, FRAC_PI_2 * q as f64 + 0.05);
            let rx: Vec<_> = s.iter().map(|z| z * rot).collect();
            let (out, _) = resolve_quadrant(&bps_carrier_recovery(&rx, &BpsConfig::default()), &s);
            prop_assert_eq!(demap_16qam(&out), demap_16qam(&s));
        }
    }
}
