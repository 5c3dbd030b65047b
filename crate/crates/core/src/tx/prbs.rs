use crate::error::{Error, Result};

/// Fibonacci LFSR over a primitive trinomial `x^order + x^tap + 1`.
#[derive(Debug, Clone)]
pub struct Prbs {
    state: u64,
    order: u32,
    tap: u32,
}

fn tap_for(order: u32) -> Option<u32> {
    match order {
        7 => Some(6),
        15 => Some(14),
        23 => Some(18),
        31 => Some(28),
        _ => None,
    }
}

impl Prbs {
    /// The low `order` bits of `seed` form the initial register.
    pub fn new(order: u32, seed: u64) -> Result<Self> {
        let tap = tap_for(order).ok_or(Error::UnsupportedPrbsOrder(order))?;
        let state = seed & ((1u64 << order) - 1);
        if state == 0 {
            return Err(Error::InvalidParameter("PRBS seed must be nonzero in the register bits".into()));
        }
        Ok(Self { state, order, tap })
    }

    pub fn next_bit(&mut self) -> u8 {
        let bit = ((self.state >> (self.order - 1)) ^ (self.state >> (self.tap - 1))) & 1;
        self.state = ((self.state << 1) | bit) & ((1u64 << self.order) - 1);
        bit as u8
    }
}

impl Iterator for Prbs {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_bit())
    }
}

pub fn prbs_period(order: u32) -> u64 {
    (1u64 << order) - 1
}

/// `n` bits of the PRBS of the given order.
pub fn generate_prbs(order: u32, seed: u64, n: usize) -> Result<Vec<u8>> {
    Ok(Prbs::new(order, seed)?.take(n).collect())
}
