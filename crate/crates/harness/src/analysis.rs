//! Curve reductions over result rows: seed pooling, binomial error bars and
//! OSNR readouts from log-BER interpolation.

use std::collections::BTreeMap;

use crate::output::ResultRow;

/// Seeds pooled at one sweep value of one scenario label.
#[derive(Debug, Clone, PartialEq)]
pub struct Pooled {
    pub scenario: String,
    pub x: f64,
    pub errors: f64,
    pub bits: f64,
}

impl Pooled {
    pub fn ber(&self) -> f64 {
        if self.bits > 0.0 {
            self.errors / self.bits
        } else {
            f64::NAN
        }
    }

    pub fn sigma(&self) -> f64 {
        binomial_sigma(self.ber(), self.bits)
    }
}

pub fn binomial_sigma(ber: f64, bits: f64) -> f64 {
    (ber * (1.0 - ber) / bits).sqrt()
}

/// `|a - b| <= k * sqrt(sigma_a^2 + sigma_b^2)`.
pub fn within_sigma(a: &Pooled, b: &Pooled, k: f64) -> bool {
    (a.ber() - b.ber()).abs() <= k * a.sigma().hypot(b.sigma())
}

/// Pool rows with a BER by (scenario, sweep value), preserving first-seen
/// order. Rows without a bit count are skipped.
pub fn pool(rows: &[ResultRow]) -> Vec<Pooled> {
    let mut out: Vec<Pooled> = Vec::new();
    let mut index: BTreeMap<(String, u64), usize> = BTreeMap::new();
    for r in rows {
        let (Some(ber), Some(bits)) = (r.ber, r.diag_num("bits")) else { continue };
        let errors = r.diag_num("errors").unwrap_or((ber * bits).round());
        let key = (r.scenario.clone(), r.sweep_value.to_bits());
        match index.get(&key) {
            Some(&i) => {
                out[i].errors += errors;
                out[i].bits += bits;
            }
            None => {
                index.insert(key, out.len());
                out.push(Pooled { scenario: r.scenario.clone(), x: r.sweep_value, errors, bits });
            }
        }
    }
    out
}

/// Pooled points of one scenario label, sorted by sweep value.
pub fn curve(pooled: &[Pooled], scenario: &str) -> Vec<Pooled> {
    let mut c: Vec<Pooled> = pooled.iter().filter(|p| p.scenario == scenario).cloned().collect();
    c.sort_by(|a, b| a.x.total_cmp(&b.x));
    c
}

/// log10 BER with zero-error points pinned half an error below the floor.
fn log_ber(p: &Pooled) -> f64 {
    p.ber().max(0.5 / p.bits).log10()
}

/// OSNR at which the falling BER curve first crosses `threshold`, by linear
/// interpolation of log10 BER. `None` if the curve never goes below it.
pub fn required_osnr(curve: &[Pooled], threshold: f64) -> Option<f64> {
    let t = threshold.log10();
    if let Some(first) = curve.first() {
        if log_ber(first) <= t {
            return None;
        }
    }
    curve.windows(2).find_map(|w| {
        let (y0, y1) = (log_ber(&w[0]), log_ber(&w[1]));
        (y0 > t && y1 <= t).then(|| w[0].x + (t - y0) * (w[1].x - w[0].x) / (y1 - y0))
    })
}

/// OSNR on a monotone reference curve that gives the same BER, linear in
/// log10 BER, extrapolated from the end segments.
pub fn osnr_equivalent(ber: f64, bits: f64, reference: &[Pooled]) -> f64 {
    assert!(reference.len() >= 2, "reference curve needs two points");
    let y = ber.max(0.5 / bits).log10();
    let seg = reference
        .windows(2)
        .find(|w| {
            let (a, b) = (log_ber(&w[0]), log_ber(&w[1]));
            (a >= y && y >= b) || (a <= y && y <= b)
        })
        .unwrap_or_else(|| {
            if y > log_ber(&reference[0]) {
                &reference[..2]
            } else {
                &reference[reference.len() - 2..]
            }
        });
    let (y0, y1) = (log_ber(&seg[0]), log_ber(&seg[1]));
    if (y1 - y0).abs() < 1e-12 {
        return seg[0].x;
    }
    seg[0].x + (y - y0) * (seg[1].x - seg[0].x) / (y1 - y0)
}
