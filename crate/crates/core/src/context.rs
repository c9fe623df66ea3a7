//! Precision contexts and the [`Real`] number type.
//!
//! Every real-valued computation in the crate is performed under a
//! [`PrecisionContext`]: a target number of decimal digits plus guard digits
//! that absorb rounding.  Values are MPFR floats; the binary precision used
//! is derived from the total digit count.

use num_rational::Rational64;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Arbitrary-precision real number.
///
/// Values are deterministic: equal inputs evaluated under equal contexts are
/// bit-identical.
pub type Real = Float;

/// Guard digits below this are rejected by [`make_context`].
pub const MIN_GUARD_DIGITS: u32 = 10;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    decimal_digits: u32,
    guard_digits: u32,
}

/// Builds a context with `decimal_digits` of target precision and
/// `guard_digits` of extra working precision.
pub fn make_context(decimal_digits: u32, guard_digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(decimal_digits, guard_digits)
}

impl PrecisionContext {
    pub fn new(decimal_digits: u32, guard_digits: u32) -> Result<Self> {
        if decimal_digits == 0 {
            return Err(Error::InvalidPrecision(
                "decimal digits must be positive".into(),
            ));
        }
        if guard_digits < MIN_GUARD_DIGITS {
            return Err(Error::InvalidPrecision(format!(
                "guard digits must be at least {MIN_GUARD_DIGITS}, got {guard_digits}"
            )));
        }
        Ok(PrecisionContext {
            decimal_digits,
            guard_digits,
        })
    }

    /// Context with the default guard: 20 digits up to 500 target digits,
    /// 50 above.
    pub fn with_default_guard(decimal_digits: u32) -> Result<Self> {
        Self::new(decimal_digits, default_guard(decimal_digits))
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn working_digits(&self) -> u32 {
        self.decimal_digits + self.guard_digits
    }

    /// Binary precision matching [`working_digits`](Self::working_digits).
    pub fn working_bits(&self) -> u32 {
        digits_to_bits(self.working_digits())
    }

    /// A copy of this context with a different target, keeping the guard
    /// policy (never lowering the guard below the current one).
    pub fn with_digits(&self, decimal_digits: u32) -> Result<Self> {
        let guard = self.guard_digits.max(default_guard(decimal_digits));
        Self::new(decimal_digits, guard)
    }

    /// `value` rounded to the working precision.
    pub fn real<T>(&self, value: T) -> Real
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.working_bits(), value)
    }

    /// `10^(-working_digits)` at working precision.
    pub fn working_epsilon(&self) -> Real {
        pow10(-(self.working_digits() as i32), self.working_bits())
    }
}

pub fn default_guard(decimal_digits: u32) -> u32 {
    if decimal_digits <= 500 {
        20
    } else {
        50
    }
}

pub(crate) fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 4
}

/// `10^exp` rounded to `prec` bits.
pub(crate) fn pow10(exp: i32, prec: u32) -> Real {
    let ten = Float::with_val(prec, 10);
    ten.pow(exp)
}

/// Exact rational converted to a real at `prec` bits.
pub fn rational_to_real(r: &Rational64, prec: u32) -> Real {
    let num = Float::with_val(prec, *r.numer());
    num / *r.denom()
}

/// `log10 |x|` as an `f64`; `-inf` for zero.  Works far outside the `f64`
/// exponent range.
pub fn log10_abs(x: &Real) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    let low = Float::with_val(64, x.abs_ref());
    low.log10().to_f64()
}

/// `x` rounded to `places` digits after the decimal point.
pub fn format_fixed(x: &Real, places: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let prec = x.prec() + digits_to_bits(places);
    let scaled = Float::with_val(prec, x * pow10(places as i32, prec));
    let n = scaled.to_integer().expect("finite value");
    let digits = n.clone().abs().to_string();
    let sign = if n < 0 { "-" } else { "" };
    let places = places as usize;
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{int}.{frac}")
}
