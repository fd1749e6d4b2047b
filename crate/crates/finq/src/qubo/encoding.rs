//! Little-endian binary encoding of bounded nonnegative integers.

use crate::error::{FinqError, Result};

/// Maps a nonnegative integer to `num_bits` binary variables with weights
/// 2^q, scaled by a real multiplier. Bit q carries weight `scale · 2^q`, so
/// the decodable range is `[0, scale · (2^num_bits − 1)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegerEncoding {
    num_bits: usize,
    scale: f64,
}

impl IntegerEncoding {
    pub fn new(num_bits: usize, scale: f64) -> Result<Self> {
        if num_bits == 0 || num_bits > 63 {
            return Err(FinqError::Parameter(format!(
                "num_bits must be in 1..=63, got {num_bits}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(FinqError::Parameter(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { num_bits, scale })
    }

    /// Unit-scale encoding.
    pub fn plain(num_bits: usize) -> Result<Self> {
        Self::new(num_bits, 1.0)
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Largest encodable integer before scaling: 2^num_bits − 1.
    pub fn max_value(&self) -> u64 {
        (1u64 << self.num_bits) - 1
    }

    /// Largest decodable real value: scale · (2^num_bits − 1).
    pub fn max_decoded(&self) -> f64 {
        self.scale * self.max_value() as f64
    }

    /// Little-endian bit vector for `value` (bit q has weight 2^q).
    pub fn encode(&self, value: u64) -> Result<Vec<u8>> {
        if value > self.max_value() {
            return Err(FinqError::Range(format!(
                "value {value} exceeds encodable maximum {}",
                self.max_value()
            )));
        }
        Ok((0..self.num_bits).map(|q| (value >> q & 1) as u8).collect())
    }

    /// Unscaled integer value of a bit vector.
    pub fn decode_units(&self, bits: &[u8]) -> Result<u64> {
        if bits.len() != self.num_bits {
            return Err(FinqError::Dimension(format!(
                "expected {} bits, got {}",
                self.num_bits,
                bits.len()
            )));
        }
        Ok(bits
            .iter()
            .enumerate()
            .map(|(q, &b)| (b as u64) << q)
            .sum())
    }

    /// scale · Σ_q 2^q x_q
    pub fn decode(&self, bits: &[u8]) -> Result<f64> {
        Ok(self.scale * self.decode_units(bits)? as f64)
    }
}

/// Free-function form of [`IntegerEncoding::encode`].
pub fn encode_integer(value: u64, enc: &IntegerEncoding) -> Result<Vec<u8>> {
    enc.encode(value)
}
