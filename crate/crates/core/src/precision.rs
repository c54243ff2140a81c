//! Working precision for real-valued evaluation.

use rug::Float;
use serde::Serialize;

pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Number of mantissa bits used for every real-valued operation.
///
/// All functions taking a context are deterministic for a fixed `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrecisionContext {
    pub bits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            bits: DEFAULT_PRECISION_BITS,
        }
    }
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Self {
        assert!(bits >= 16, "precision below 16 bits is not supported");
        Self { bits }
    }

    pub fn doubled(self) -> Self {
        Self::new(self.bits * 2)
    }

    pub fn with_extra(self, extra: u32) -> Self {
        Self::new(self.bits + extra)
    }

    /// Convert any value rug knows how to assign into a float at this precision.
    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, value)
    }

    /// Decimal digits that are meaningful at this precision.
    pub fn decimal_digits(&self) -> usize {
        ((self.bits as f64) * std::f64::consts::LOG10_2).floor() as usize
    }

    pub fn to_decimal(&self, value: &Float) -> String {
        to_decimal(value, self.decimal_digits())
    }
}

/// Decimal rendering with a fixed number of significant digits.
pub fn to_decimal(value: &Float, digits: usize) -> String {
    value.to_string_radix(10, Some(digits.max(1)))
}
