//! Partition numbers by radix expansion of F at scale 10.
//!
//! `F(10) = Σ p(n) e^{-10πn}`, and `p(n) < e^{10π}` for `n ≤ 205`, so the
//! base-`e^{10π}` digits of the fractional part of `F(10)` are `p(1), p(2), …`
//! with no carries.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::constants::pi;
use crate::context::{log10_abs, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::series::euler_f;
use num_rational::Rational64;

/// Largest count supported by the expansion precision budget.
pub const MAX_EXPANSION_COUNT: usize = 205;

/// Minimum target precision for [`partitions_by_expansion`].
pub const MIN_EXPANSION_DIGITS: u32 = 2800;

/// Published decimal of F(10), used as a checksum.
pub const F10_PRINTED: &str = "1.000000000000002271101068";

/// Published decimal of F(4), used as a checksum.
pub const F4_PRINTED: &str = "1.0000034873666794496495854034";

/// Published decimal of 1/√(1 − 4/100).
pub const BINOMIAL_PRINTED: &str = "1.02062072615965754091";

/// Digits of precision consumed beyond the expansion itself.
const EXPANSION_SLACK: f64 = 50.0;

/// Radix expansion `y_n = ⌊b·x_n⌋`, `x_{n+1} = {b·x_n}`.
#[derive(Debug, Clone)]
pub struct ExpansionState {
    x: Real,
    base: Real,
    digits_emitted: u64,
}

impl ExpansionState {
    pub fn new(x0: Real, base: Real) -> Result<Self> {
        if base.is_nan() || base <= 1 {
            return Err(Error::arg("expansion base must exceed 1"));
        }
        if x0.is_nan() || x0 < 0 {
            return Err(Error::arg("expanded value must be non-negative"));
        }
        Ok(ExpansionState {
            x: x0,
            base,
            digits_emitted: 0,
        })
    }

    pub fn remainder(&self) -> &Real {
        &self.x
    }

    pub fn digits_emitted(&self) -> u64 {
        self.digits_emitted
    }
}

impl Iterator for ExpansionState {
    type Item = Integer;

    fn next(&mut self) -> Option<Integer> {
        self.x *= &self.base;
        let y = Float::with_val(self.x.prec(), self.x.floor_ref());
        self.x -= &y;
        self.digits_emitted += 1;
        Some(y.to_integer().expect("finite digit"))
    }
}

/// Decimal digits of precision an expansion of `count` digits needs.
pub fn required_digits(base: &Real, count: usize) -> f64 {
    count as f64 * log10_abs(base) + EXPANSION_SLACK
}

/// The first `count` base-`base` digits of `x0`.
///
/// Rejects the request when `ctx` (or `x0` itself) is too short to make
/// every digit meaningful.
pub fn digit_expand(
    x0: &Real,
    base: &Real,
    count: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Integer>> {
    let needed = required_digits(base, count);
    let held = (x0.prec() as f64 * std::f64::consts::LOG10_2).min(ctx.decimal_digits() as f64);
    if needed > held {
        return Err(Error::InvalidPrecision(format!(
            "{count} digits in this base need {needed:.0} decimal digits of precision, have {held:.0}"
        )));
    }
    let state = ExpansionState::new(x0.clone(), base.clone())?;
    Ok(state.take(count).collect())
}

/// `Σ y_i b^{-i-1} + r·b^{-n}`: inverse of [`digit_expand`].
pub fn radix_assemble(digits: &[Integer], base: &Real, remainder: &Real) -> Real {
    let prec = base.prec();
    let mut acc = Float::with_val(prec, remainder);
    for y in digits.iter().rev() {
        acc += y;
        acc /= base;
    }
    acc
}

/// `[p(0), …, p(count)]` from the base-`e^{10π}` expansion of `F(10)`.
pub fn partitions_by_expansion(count: usize, ctx: &PrecisionContext) -> Result<Vec<Integer>> {
    expansion_with_constant(count, ctx).map(|(p, _)| p)
}

/// As [`partitions_by_expansion`], also returning the expanded value `F(10)`.
pub fn expansion_with_constant(
    count: usize,
    ctx: &PrecisionContext,
) -> Result<(Vec<Integer>, Real)> {
    if count == 0 || count > MAX_EXPANSION_COUNT {
        return Err(Error::arg(format!(
            "expansion yields p(1) to p({MAX_EXPANSION_COUNT}); got count {count}"
        )));
    }
    if ctx.decimal_digits() < MIN_EXPANSION_DIGITS {
        return Err(Error::InvalidPrecision(format!(
            "expansion needs at least {MIN_EXPANSION_DIGITS} digits, got {}",
            ctx.decimal_digits()
        )));
    }
    let prec = ctx.working_bits();
    let base = Float::with_val(prec, pi(prec) * 10u32).exp();
    let value = euler_f(Rational64::from_integer(10), ctx)?;
    let whole = Float::with_val(prec, value.floor_ref());
    let fraction = Float::with_val(prec, &value - &whole);
    let mut out = vec![whole.to_integer().expect("finite value")];
    out.extend(digit_expand(&fraction, &base, count, ctx)?);
    Ok((out, value))
}

/// Leading-digit agreement of `value` with a published decimal.
#[derive(Debug, Clone, PartialEq)]
pub struct Checksum {
    pub printed: String,
    /// Significant digits printed.
    pub printed_digits: usize,
    /// `value` lies within one unit of the last printed place.
    pub matches: bool,
    /// `−log10 |value − printed|`.
    pub agreement: f64,
}

pub fn checksum(value: &Real, printed: &str) -> Result<Checksum> {
    let prec = value.prec().max(256);
    let parsed = Float::parse(printed).map_err(|e| Error::Parse(format!("`{printed}`: {e}")))?;
    let reference = Float::with_val(prec, parsed);
    let places = printed.split_once('.').map_or(0, |(_, frac)| frac.len()) as i32;
    let unit = Float::with_val(prec, 10).pow(-places);
    let diff = Float::with_val(prec, value - &reference).abs();
    let printed_digits = printed
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count();
    Ok(Checksum {
        printed: printed.to_string(),
        printed_digits,
        matches: diff < unit,
        agreement: -log10_abs(&diff),
    })
}

/// The asymptotic estimate `A_n e^{π√((2/3)(n − 1/24))}` with
/// `A_n = (π/√(6(n−1)/24) − 1/(2((n−1)/24)^{3/2})) / (2n√2)`.
///
/// `A_n` is singular at `n = 1`, so `n ≥ 2` is required.
pub fn hr_estimate(n: u64, ctx: &PrecisionContext) -> Result<Real> {
    if n < 2 {
        return Err(Error::arg("the estimate is singular for n < 2"));
    }
    let prec = ctx.working_bits() + 32;
    let pi = pi(prec);
    let m = Float::with_val(prec, n - 1) / 24u32;
    let first = Float::with_val(prec, &pi / Float::with_val(prec, &m * 6u32).sqrt());
    let second = Float::with_val(prec, m.pow(3u32).sqrt() * 2u32).recip();
    let two_root2 = Float::with_val(prec, 2).sqrt() * 2u32 * n;
    let a_n = (first - second) / two_root2;
    let shifted = Float::with_val(prec, n) - Float::with_val(prec, 24).recip();
    let exponent = (shifted * 2u32 / 3u32).sqrt() * pi;
    Ok(Float::with_val(ctx.working_bits(), a_n * exponent.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::partition_oracle;
    use crate::context::make_context;

    #[test]
    fn binary_expansion_of_five_eighths() {
        let ctx = make_context(60, 20).unwrap();
        let x = ctx.real(0.625);
        let two = ctx.real(2);
        let state = ExpansionState::new(x, two).unwrap();
        let digits: Vec<Integer> = state.take(3).collect();
        assert_eq!(digits, [1, 0, 1]);
    }

    #[test]
    fn binomial_expansion_matches_printed_decimal() {
        let ctx = make_context(80, 20).unwrap();
        let x: Real = ctx.real(96).recip_sqrt() * 10u32 - 1u32;
        let base = ctx.real(100);
        let digits = digit_expand(&x, &base, 10, &ctx).unwrap();
        assert_eq!(digits, [2, 6, 20, 72, 61, 59, 65, 75, 40, 91]);
        let printed = &BINOMIAL_PRINTED[2..];
        let joined: String = digits.iter().map(|d| format!("{d:02}")).collect();
        assert_eq!(joined, printed);
        let full = x + 1u32;
        assert!(checksum(&full, BINOMIAL_PRINTED).unwrap().matches);
    }

    #[test]
    fn rejects_insufficient_precision() {
        let ctx = make_context(60, 20).unwrap();
        let x = ctx.real(0.3);
        let base = ctx.real(1000);
        assert!(matches!(
            digit_expand(&x, &base, 10, &ctx),
            Err(Error::InvalidPrecision(_))
        ));
        assert!(digit_expand(&x, &ctx.real(1), 1, &ctx).is_err());
        assert!(digit_expand(&ctx.real(-0.5), &base, 1, &ctx).is_err());
    }

    #[test]
    fn assembly_inverts_expansion() {
        let ctx = make_context(200, 20).unwrap();
        let x0: Real = ctx.real(2).sqrt() - 1u32;
        let base = ctx.real(7).sqrt() * 10u32;
        let mut state = ExpansionState::new(x0.clone(), base.clone()).unwrap();
        let digits: Vec<Integer> = state.by_ref().take(40).collect();
        let rebuilt = radix_assemble(&digits, &base, state.remainder());
        let err = Float::with_val(ctx.working_bits(), rebuilt - &x0).abs();
        assert!(log10_abs(&err) < -190.0);
        assert_eq!(state.digits_emitted(), 40);
    }

    #[test]
    fn expansion_guards() {
        let ctx = make_context(2850, 50).unwrap();
        assert!(partitions_by_expansion(206, &ctx).is_err());
        assert!(partitions_by_expansion(0, &ctx).is_err());
        let low = make_context(2000, 50).unwrap();
        assert!(matches!(
            partitions_by_expansion(5, &low),
            Err(Error::InvalidPrecision(_))
        ));
    }

    #[test]
    fn small_partitions_by_expansion() {
        let ctx = make_context(2800, 50).unwrap();
        assert_eq!(
            partitions_by_expansion(5, &ctx).unwrap(),
            [1, 1, 2, 3, 5, 7]
        );
    }

    #[test]
    fn base_exceeds_every_partition_number_in_window() {
        let p = partition_oracle(MAX_EXPANSION_COUNT + 1);
        let ctx = make_context(60, 20).unwrap();
        let prec = ctx.working_bits();
        let base = Float::with_val(prec, pi(prec) * 10u32).exp();
        for n in 0..=MAX_EXPANSION_COUNT {
            assert!(Float::with_val(prec, &p[n]) < base, "p({n})");
            // tail after digit n stays below one unit
            let mut tail = Float::with_val(prec, 0);
            let mut scale = Float::with_val(prec, 1);
            for pm in p.iter().skip(n + 1).take(40) {
                scale /= &base;
                tail += Float::with_val(prec, pm) * &scale;
            }
            assert!(tail < 1, "tail after {n}");
        }
    }

    #[test]
    fn estimate_behaviour() {
        let ctx = make_context(30, 20).unwrap();
        assert!(hr_estimate(1, &ctx).is_err());
        let p = partition_oracle(200);
        let ratio = hr_estimate(200, &ctx).unwrap() / Float::with_val(100, &p[200]);
        assert!((ratio.to_f64() - 1.068968758).abs() < 1e-8, "{ratio}");
        let mut prev = hr_estimate(10, &ctx).unwrap();
        for n in 11..=500 {
            let next = hr_estimate(n, &ctx).unwrap();
            assert!(next > prev, "n = {n}");
            prev = next;
        }
        let step =
            |n: u64| (hr_estimate(n, &ctx).unwrap() / hr_estimate(n - 1, &ctx).unwrap()).to_f64();
        assert!(step(10_000) - 1.0 < step(1000) - 1.0);
        assert!(step(100_000) - 1.0 < 0.01);
    }

    #[test]
    fn checksums() {
        let ctx = make_context(40, 20).unwrap();
        let f4 = euler_f(Rational64::from_integer(4), &ctx).unwrap();
        let c = checksum(&f4, F4_PRINTED).unwrap();
        assert!(c.matches);
        assert_eq!(c.printed_digits, 29);
    }
}
