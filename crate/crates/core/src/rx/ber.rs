use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};

/// Hard-decision FEC threshold used for penalty measurements.
pub const HD_FEC_THRESHOLD: f64 = 3.8e-3;

/// Below this many counted bits the report is flagged low-confidence.
pub const MIN_CONFIDENT_BITS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCell {
    pub pol: usize,
    pub subcarrier: usize,
    pub errors: u64,
    pub bits: u64,
    pub ber: f64,
}

/// Bit-error counts per (polarization, subcarrier) and in aggregate. The
/// 16QAM quadrant ambiguity is resolved against the transmitted symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub cells: Vec<BerCell>,
    pub errors: u64,
    pub bits: u64,
    pub ber: f64,
    pub q_db: f64,
    pub low_confidence: bool,
}

/// `20 log10(sqrt(2) erfcinv(2 ber))`; infinite at zero BER.
pub fn q_factor_db(ber: f64) -> f64 {
    if ber <= 0.0 {
        return f64::INFINITY;
    }
    if ber >= 0.5 {
        return f64::NEG_INFINITY;
    }
    20.0 * (2f64.sqrt() * erfc_inv(2.0 * ber)).log10()
}

/// Compare decided bits with reference bits, both indexed `[pol][subcarrier]`.
pub fn measure_ber(decided: &[Vec<Vec<u8>>; 2], reference: &[Vec<Vec<u8>>; 2]) -> Result<BerReport> {
    let mut cells = Vec::new();
    for pol in 0..2 {
        if decided[pol].len() != reference[pol].len() {
            return Err(Error::LengthMismatch(reference[pol].len(), decided[pol].len()));
        }
        for (sc, (d, r)) in decided[pol].iter().zip(&reference[pol]).enumerate() {
            if d.len() != r.len() {
                return Err(Error::LengthMismatch(r.len(), d.len()));
            }
            let errors = d.iter().zip(r).filter(|(a, b)| a != b).count() as u64;
            let bits = d.len() as u64;
            let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
            cells.push(BerCell { pol, subcarrier: sc, errors, bits, ber });
        }
    }
    let errors = cells.iter().map(|c| c.errors).sum();
    let bits: u64 = cells.iter().map(|c| c.bits).sum();
    let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
    Ok(BerReport { cells, errors, bits, ber, q_db: q_factor_db(ber), low_confidence: bits < MIN_CONFIDENT_BITS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn grid(v: Vec<u8>) -> [Vec<Vec<u8>>; 2] {
        let h = v.len() / 2;
        [vec![v[..h].to_vec()], vec![v[h..].to_vec()]]
    }

    #[test]
    fn identical_and_inverted() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let bits: Vec<u8> = (0..200_000).map(|_| rng.random_range(0..2u8)).collect();
        let r = grid(bits.clone());
        let same = measure_ber(&r, &r).unwrap();
        assert_eq!(same.ber, 0.0);
        assert_eq!(same.q_db, f64::INFINITY);
        assert!(!same.low_confidence);
        let inv = grid(bits.iter().map(|b| 1 - b).collect());
        assert_eq!(measure_ber(&inv, &r).unwrap().ber, 1.0);
    }

    #[test]
    fn random_bits_near_half() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let n = 400_000;
        let a = grid((0..n).map(|_| rng.random_range(0..2u8)).collect());
        let b = grid((0..n).map(|_| rng.random_range(0..2u8)).collect());
        let rep = measure_ber(&a, &b).unwrap();
        let sigma = (0.25 / n as f64).sqrt();
        assert!((rep.ber - 0.5).abs() <= 3.0 * sigma, "{}", rep.ber);
        assert_eq!(rep.errors, rep.cells.iter().map(|c| c.errors).sum::<u64>());
    }

    #[test]
    fn low_confidence_and_q() {
        let r = grid(vec![0; 1000]);
        assert!(measure_ber(&r, &r).unwrap().low_confidence);
        // Q = 3.0 (9.54 dB) corresponds to BER 1.35e-3.
        let ber = 0.5 * statrs::function::erf::erfc(3.0 / 2f64.sqrt());
        assert!((q_factor_db(ber) - 20.0 * 3f64.log10()).abs() < 1e-9);
        assert_eq!(q_factor_db(0.5), f64::NEG_INFINITY);
    }

    #[test]
    fn mismatched_lengths() {
        let a = grid(vec![0; 10]);
        let b = grid(vec![0; 12]);
        assert!(measure_ber(&a, &b).is_err());
    }
}
