//! Codec configuration: window size, similarity threshold, output variant.

use crate::error::{CodecError, Result};

/// Output serialization of encoded records.
///
/// The bit variant packs records into an unaligned bit stream; it is smaller
/// and faster but opaque to downstream byte-oriented compressors. The byte
/// variant keeps every field byte-aligned so the container stays amenable to
/// a general-purpose post-compression pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    /// Bit-aligned record stream.
    Bit,
    /// Byte-aligned record stream.
    Byte,
}

impl Variant {
    pub(crate) fn wire_byte(self) -> u8 {
        match self {
            Variant::Bit => 0,
            Variant::Byte => 1,
        }
    }

    pub(crate) fn from_wire_byte(b: u8) -> Result<Variant> {
        match b {
            0 => Ok(Variant::Bit),
            1 => Ok(Variant::Byte),
            other => Err(CodecError::BadHeader(format!("unknown variant byte {other}"))),
        }
    }
}

/// Smallest representable similarity threshold step. The threshold is carried
/// in the container header as `theta * 10000`, so the compressor works with
/// the quantized value to keep both sides in agreement.
pub const THETA_SCALE: u32 = 10_000;

/// Validated codec parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CodecConfig {
    k: usize,
    /// Quantized to 1/10000 steps, in (0, 1].
    theta: f64,
    variant: Variant,
}

impl CodecConfig {
    pub const DEFAULT_K: usize = 8;
    pub const DEFAULT_THETA: f64 = 0.85;
    pub const MIN_K: usize = 1;
    pub const MAX_K: usize = 256;

    /// Validates and quantizes the parameters.
    ///
    /// `k` must lie in `[1, 256]` and `theta` in `(0, 1]`; `theta` is rounded
    /// to the nearest 1/10000 and must stay nonzero after rounding.
    pub fn new(k: usize, theta: f64, variant: Variant) -> Result<CodecConfig> {
        if !(Self::MIN_K..=Self::MAX_K).contains(&k) {
            return Err(CodecError::ConfigInvalid(format!(
                "window size k must be in [{}, {}], got {k}",
                Self::MIN_K,
                Self::MAX_K
            )));
        }
        if !theta.is_finite() || theta <= 0.0 || theta > 1.0 {
            return Err(CodecError::ConfigInvalid(format!(
                "similarity threshold theta must be in (0, 1], got {theta}"
            )));
        }
        let scaled = (theta * THETA_SCALE as f64).round() as u32;
        if scaled == 0 {
            return Err(CodecError::ConfigInvalid(format!(
                "theta {theta} is below the smallest representable step 1/{THETA_SCALE}"
            )));
        }
        Ok(CodecConfig {
            k,
            theta: scaled as f64 / THETA_SCALE as f64,
            variant,
        })
    }

    pub fn window_size(&self) -> usize {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Threshold as carried in the container header.
    pub fn theta_scaled(&self) -> u16 {
        (self.theta * THETA_SCALE as f64).round() as u16
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig::new(Self::DEFAULT_K, Self::DEFAULT_THETA, Variant::Byte)
            .expect("defaults are valid")
    }
}
