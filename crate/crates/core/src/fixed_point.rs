//! Unsigned fixed-point formats and value/code conversion.
//!
//! A format `U<i>.<f>` has `i` integer bits and `f` fractional bits. Code `c`
//! stands for exactly `c * 2^-f`; the grid step is `2^-f` and the largest
//! representable value is `2^i - 2^-f`. Signs never enter a table: values are
//! carried as [`SignedValue`] (sign-magnitude) and only the Verilog wrapper
//! converts to two's complement.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported total bit width of a format.
pub const MAX_BITS: u32 = 16;

/// Rounding applied when snapping a real value onto the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoundingMode {
    Floor,
    /// Round to nearest, ties upward.
    Round,
    Ceil,
}

impl RoundingMode {
    pub const ALL: [RoundingMode; 3] = [RoundingMode::Floor, RoundingMode::Round, RoundingMode::Ceil];

    /// Applies the mode to a scaled (code-unit) real value.
    pub fn apply(self, scaled: f64) -> f64 {
        match self {
            RoundingMode::Floor => scaled.floor(),
            RoundingMode::Round => (scaled + 0.5).floor(),
            RoundingMode::Ceil => scaled.ceil(),
        }
    }
}

/// Unsigned magnitude fixed-point format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FixedPointFormat {
    int_bits: u32,
    frac_bits: u32,
}

impl FixedPointFormat {
    pub fn new(int_bits: u32, frac_bits: u32) -> Result<Self> {
        let total = int_bits + frac_bits;
        if total == 0 || total > MAX_BITS {
            return Err(Error::InvalidFormat(format!(
                "U{int_bits}.{frac_bits} has {total} bits, expected 1..={MAX_BITS}"
            )));
        }
        Ok(FixedPointFormat { int_bits, frac_bits })
    }

    pub fn int_bits(&self) -> u32 {
        self.int_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn total_bits(&self) -> u32 {
        self.int_bits + self.frac_bits
    }

    /// Number of codes, `2^n`.
    pub fn code_count(&self) -> u32 {
        1 << self.total_bits()
    }

    pub fn max_code(&self) -> u32 {
        self.code_count() - 1
    }

    /// Grid step `2^-frac_bits`.
    pub fn step(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    /// Scale factor from real value to code units, `2^frac_bits`.
    pub fn scale(&self) -> f64 {
        (self.frac_bits as f64).exp2()
    }

    pub fn max_value(&self) -> f64 {
        self.max_code() as f64 * self.step()
    }

    /// First value past the representable range, `2^int_bits`.
    pub fn range_end(&self) -> f64 {
        (self.int_bits as f64).exp2()
    }

    /// Snaps a nonnegative real onto the grid, saturating at the maximum code.
    ///
    /// Negative inputs and NaN map to code 0.
    pub fn encode(&self, x: f64, mode: RoundingMode) -> u32 {
        if x.is_nan() || x <= 0.0 {
            return 0;
        }
        let scaled = mode.apply(x * self.scale());
        if scaled >= self.max_code() as f64 {
            self.max_code()
        } else {
            scaled as u32
        }
    }

    pub fn decode(&self, code: u32) -> Result<f64> {
        if code > self.max_code() {
            return Err(Error::CodeOutOfRange {
                code,
                bits: self.total_bits(),
            });
        }
        Ok(code as f64 * self.step())
    }

    /// Nearest grid value without the range clamp, for values that are only
    /// quantized in precision (e.g. linear branches).
    pub fn quantize_unbounded(&self, x: f64, mode: RoundingMode) -> f64 {
        mode.apply(x * self.scale()) * self.step()
    }
}

impl fmt::Display for FixedPointFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}.{}", self.int_bits, self.frac_bits)
    }
}

impl FromStr for FixedPointFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFormat(format!("`{s}` (expected U<int>.<frac>, e.g. U1.6)"));
        let body = s.trim().strip_prefix(['U', 'u']).ok_or_else(bad)?;
        let (int, frac) = body.split_once('.').ok_or_else(bad)?;
        let int: u32 = int.parse().map_err(|_| bad())?;
        let frac: u32 = frac.parse().map_err(|_| bad())?;
        FixedPointFormat::new(int, frac)
    }
}

impl TryFrom<String> for FixedPointFormat {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FixedPointFormat> for String {
    fn from(f: FixedPointFormat) -> String {
        f.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

/// Sign-magnitude value over a magnitude format. Zero always carries `Pos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedValue {
    sign: Sign,
    magnitude: u32,
}

impl SignedValue {
    pub fn new(sign: Sign, magnitude: u32) -> Self {
        let sign = if magnitude == 0 { Sign::Pos } else { sign };
        SignedValue { sign, magnitude }
    }

    pub fn from_real(x: f64, fmt: &FixedPointFormat, mode: RoundingMode) -> Self {
        let sign = if x < 0.0 { Sign::Neg } else { Sign::Pos };
        SignedValue::new(sign, fmt.encode(x.abs(), mode))
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn magnitude(&self) -> u32 {
        self.magnitude
    }

    pub fn to_real(&self, fmt: &FixedPointFormat) -> Result<f64> {
        let m = fmt.decode(self.magnitude)?;
        Ok(match self.sign {
            Sign::Pos => m,
            Sign::Neg => -m,
        })
    }
}
