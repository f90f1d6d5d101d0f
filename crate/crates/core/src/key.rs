//! Amplitude-to-bit quantization and Hamming comparison of extracted keys.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SyncError};

/// Threshold rule used by [`quantize`]; a sample maps to `1` iff it is
/// strictly greater than the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantizePolicy {
    /// Segment median (mean of the two middle values for even lengths).
    #[default]
    Median,
    Mean,
    Fixed(f64),
}

impl QuantizePolicy {
    pub fn threshold(&self, segment: &[f64]) -> f64 {
        match *self {
            Self::Median => median(segment),
            Self::Mean => segment.iter().sum::<f64>() / segment.len() as f64,
            Self::Fixed(t) => t,
        }
    }
}

/// Parses `median`, `mean` or `fixed:<threshold>`.
impl FromStr for QuantizePolicy {
    type Err = SyncError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Self::Median),
            "mean" => Ok(Self::Mean),
            _ => {
                let t = s
                    .strip_prefix("fixed:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .filter(|t| t.is_finite())
                    .ok_or_else(|| SyncError::Parameter(format!("unknown quantize policy '{s}'")))?;
                Ok(Self::Fixed(t))
            }
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Fixed-length key packed most significant bit first.
///
/// Padding bits in the final byte are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitKey {
    bytes: Vec<u8>,
    len: usize,
}

impl BitKey {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut bytes = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % 8 == 0 {
                bytes.push(0);
            }
            if bit {
                bytes[len / 8] |= 0x80 >> (len % 8);
            }
            len += 1;
        }
        Self { bytes, len }
    }

    /// Rebuilds a key from packed bytes; trailing padding must be zero.
    pub fn from_packed(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(SyncError::Length(format!("{len} bits need {} bytes, got {}", len.div_ceil(8), bytes.len())));
        }
        if !len.is_multiple_of(8) {
            let pad_mask = 0xffu8 >> (len % 8);
            if bytes[bytes.len() - 1] & pad_mask != 0 {
                return Err(SyncError::Data("non-zero padding bits in packed key".into()));
            }
        }
        Ok(Self { bytes, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for key of {} bits", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Bitwise complement of the key (padding stays zero).
    pub fn complement(&self) -> Self {
        Self::from_bits(self.bits().map(|b| !b))
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming_count(&self, other: &Self) -> Result<usize> {
        if self.len != other.len {
            return Err(SyncError::Length(format!("cannot compare keys of {} and {} bits", self.len, other.len)));
        }
        Ok(self.bytes.iter().zip(&other.bytes).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for BitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitKey({} bits, {} ones)", self.len, self.count_ones())
    }
}

impl fmt::Display for BitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Quantizes a `key_len`-sample segment into a key, one bit per sample.
pub fn quantize(segment: &[f64], key_len: usize, policy: QuantizePolicy) -> Result<BitKey> {
    if segment.len() != key_len {
        return Err(SyncError::Length(format!("key segment has {} samples, expected {key_len}", segment.len())));
    }
    if let Some(i) = segment.iter().position(|s| !s.is_finite()) {
        return Err(SyncError::Data(format!("segment sample {i} is not finite")));
    }
    if key_len == 0 {
        return Ok(BitKey::from_bits(std::iter::empty()));
    }
    let threshold = policy.threshold(segment);
    Ok(BitKey::from_bits(segment.iter().map(|&s| s > threshold)))
}

/// Fraction of differing bits between two equal-length keys.
pub fn hamming_fraction(a: &BitKey, b: &BitKey) -> Result<f64> {
    let diff = a.hamming_count(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(diff as f64 / a.len() as f64)
}
