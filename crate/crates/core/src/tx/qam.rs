//! Gray-mapped square 16QAM on the `{±1, ±3}/√10` grid.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Grid scale giving unit average power.
pub const QAM16_SCALE: f64 = 0.316_227_766_016_837_94; // 1/sqrt(10)

/// Per-axis Gray code: bit pair `(b0, b1)` to amplitude level.
const LEVELS: [i32; 4] = [-3, -1, 3, 1]; // index = b0 * 2 + b1: 00,01,10,11

fn level(b0: u8, b1: u8) -> i32 {
    LEVELS[(b0 * 2 + b1) as usize]
}

fn bits_of_level(v: f64) -> (u8, u8) {
    let t = 2.0 * QAM16_SCALE;
    if v < -t {
        (0, 0)
    } else if v < 0.0 {
        (0, 1)
    } else if v < t {
        (1, 1)
    } else {
        (1, 0)
    }
}

/// Integer grid point `(i, q)` for the nibble `b0 b1 b2 b3` (b0 first).
pub fn qam16_point(nibble: [u8; 4]) -> (i32, i32) {
    (level(nibble[0], nibble[1]), level(nibble[2], nibble[3]))
}

/// Map bits (length a multiple of 4; excess bits are ignored) to symbols.
pub fn map_16qam<T: Real>(bits: &[u8]) -> Vec<Complex<T>> {
    let s = T::of(QAM16_SCALE);
    bits.chunks_exact(4)
        .map(|c| {
            let (i, q) = qam16_point([c[0], c[1], c[2], c[3]]);
            Complex::new(T::of(i as f64) * s, T::of(q as f64) * s)
        })
        .collect()
}

/// Nearest-neighbor hard decision back to bits.
pub fn demap_16qam<T: Real>(symbols: &[Complex<T>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * 4);
    for z in symbols {
        let (a, b) = bits_of_level(z.re.to_f64_lossy());
        let (c, d) = bits_of_level(z.im.to_f64_lossy());
        out.extend_from_slice(&[a, b, c, d]);
    }
    out
}

/// All 16 unit-power constellation points in nibble order.
pub fn qam16_points() -> Vec<Complex<f64>> {
    (0..16u8)
        .map(|n| {
            let (i, q) = qam16_point([(n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1]);
            Complex::new(i as f64 * QAM16_SCALE, q as f64 * QAM16_SCALE)
        })
        .collect()
}

/// The three distinct moduli of unit-power 16QAM, increasing.
pub fn qam16_radii() -> [f64; 3] {
    [(2.0f64 / 10.0).sqrt(), 1.0, (18.0f64 / 10.0).sqrt()]
}

/// One row of the Gray table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayEntry {
    pub bits: String,
    pub i: i32,
    pub q: i32,
}

pub fn gray_table() -> Vec<GrayEntry> {
    (0..16u8)
        .map(|n| {
            let nib = [(n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1];
            let (i, q) = qam16_point(nib);
            GrayEntry { bits: nib.iter().map(|b| char::from(b'0' + b)).collect(), i, q }
        })
        .collect()
}

/// The Gray table as JSON: `{"scale": 1/sqrt(10), "points": [{bits, i, q}, ...]}`.
pub fn gray_table_json() -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "modulation": "16QAM",
        "scale": QAM16_SCALE,
        "points": gray_table(),
    }))
    .expect("static table serializes")
}
