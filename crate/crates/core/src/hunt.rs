//! Near-integer search over Farey arguments.

use num_rational::Rational64;
use rayon::prelude::*;
use rug::{Float, Rational};

use crate::context::{log10_abs, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::rational::{farey, nearest_rational};
use crate::series::{evaluate, SeriesSpec};

/// Orders accepted by [`hunt_near_integers`]: numerator exponents 3, 7, 11.
pub const HUNT_ORDERS: [i32; 3] = [-3, -7, -11];

/// Largest denominator considered when measuring nearness to a rational.
pub const MAX_DENOMINATOR: u64 = 1000;

/// Digits of screening precision above the threshold.
const SCREEN_MARGIN: u32 = 20;

#[derive(Debug, Clone)]
pub struct NearHit {
    /// The Farey point; the series argument is `2f`.
    pub f: Rational64,
    pub alpha: Rational64,
    pub s: i32,
    pub value: Real,
    pub nearest: Rational,
    /// `−log10 |value − nearest|`, capped at the target precision.
    pub nearness_digits: f64,
    pub integer_nearness_digits: f64,
    /// For `f = 1/k`: whether `240 | k⁴ − 1`.
    pub advisory: Option<bool>,
}

/// `240 | k⁴ − 1`, which holds exactly when `k` is prime to 30.
pub fn divisibility_advisory(k: u64) -> bool {
    (k % 240).pow(4) % 240 == 1
}

fn nearness(value: &Real, target: &Real, cap: u32) -> f64 {
    let diff = Float::with_val(value.prec(), value - target);
    (-log10_abs(&diff)).clamp(0.0, cap as f64)
}

fn measure(f: Rational64, s: i32, ctx: &PrecisionContext) -> Result<NearHit> {
    let alpha = f * 2;
    let value = evaluate(&SeriesSpec::lambert(s, alpha), ctx)?;
    let (nearest, _) = nearest_rational(&value, MAX_DENOMINATOR)?;
    let cap = ctx.decimal_digits();
    let as_real = Float::with_val(value.prec(), &nearest);
    let rounded = Float::with_val(
        value.prec(),
        value.to_integer().expect("finite series value"),
    );
    let advisory = (*f.numer() == 1).then(|| divisibility_advisory(*f.denom() as u64));
    Ok(NearHit {
        f,
        alpha,
        s,
        nearness_digits: nearness(&value, &as_real, cap),
        integer_nearness_digits: nearness(&value, &rounded, cap),
        value,
        nearest,
        advisory,
    })
}

/// Evaluates `lambert(s, 2f)` for every `f` in the Farey set of the given
/// order and returns the points within `10^(-threshold_digits)` of a
/// rational with denominator at most [`MAX_DENOMINATOR`], sorted by
/// nearness (descending).
///
/// Points are first screened at `threshold + 20` digits; survivors are
/// measured again at the full precision of `ctx`.
pub fn hunt_near_integers(
    s: i32,
    farey_order: u32,
    threshold_digits: f64,
    ctx: &PrecisionContext,
) -> Result<Vec<NearHit>> {
    if !HUNT_ORDERS.contains(&s) {
        return Err(Error::arg(format!(
            "s must be one of {HUNT_ORDERS:?} (numerator exponent 4m-1), got {s}"
        )));
    }
    if !threshold_digits.is_finite() || threshold_digits < 0.0 {
        return Err(Error::arg(
            "threshold must be a non-negative number of digits",
        ));
    }
    let points = farey(farey_order)?;
    let screen_digits = (threshold_digits.ceil() as u32 + SCREEN_MARGIN).min(ctx.decimal_digits());
    let screen = ctx.with_digits(screen_digits)?;
    let survivors: Vec<Rational64> = points
        .par_iter()
        .map(|&f| measure(f, s, &screen).map(|h| (f, h.nearness_digits)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(_, d)| d >= threshold_digits - 1.0)
        .map(|(f, _)| f)
        .collect();
    let mut hits: Vec<NearHit> = survivors
        .par_iter()
        .map(|&f| measure(f, s, ctx))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|h| h.nearness_digits >= threshold_digits)
        .collect();
    hits.sort_by(|a, b| {
        b.nearness_digits
            .total_cmp(&a.nearness_digits)
            .then(a.f.cmp(&b.f))
    });
    Ok(hits)
}
