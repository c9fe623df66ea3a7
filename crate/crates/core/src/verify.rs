//! Numerical verification of catalog identities.

use std::collections::HashMap;
use std::time::Instant;

use num_rational::Rational64;
use rayon::prelude::*;
use rug::Float;

use crate::closed_form::ClosedForm;
use crate::context::{log10_abs, rational_to_real, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::registry::{Combination, Identity, Kind, Reading, Registry, Term};
use crate::series::{evaluate, SeriesSpec};

/// Smallest target precision accepted by [`verify`].
pub const MIN_VERIFY_DIGITS: u32 = 30;

/// Headroom an approximation needs above its expected digit count.
pub const APPROX_HEADROOM: u32 = 20;

/// Pass band for approximations, relative to the expected digit count.
pub const APPROX_BAND: (f64, f64) = (-2.0, 8.0);

#[derive(Debug, Clone)]
pub struct CandidateOutcome {
    pub label: String,
    pub as_printed: bool,
    pub form: String,
    pub digits_agree: f64,
    /// Evaluation failure of this reading (e.g. a negative square root).
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub id: String,
    pub kind: Kind,
    pub decimal_digits: u32,
    pub guard_digits: u32,
    pub lhs_value: Real,
    pub rhs_value: Real,
    pub digits_agree: f64,
    pub passed: bool,
    /// The selected reading is not the form as printed.
    pub flagged: bool,
    pub selected: String,
    pub selected_form: String,
    pub candidates: Vec<CandidateOutcome>,
    pub wall_time: f64,
}

/// `−log10(|lhs − rhs| / reference)` clamped to `[0, decimal_digits]`.
pub fn digits_agree(lhs: &Real, rhs: &Real, reference: &Real, decimal_digits: u32) -> f64 {
    let prec = lhs.prec().max(rhs.prec());
    let diff = Float::with_val(prec, lhs - rhs);
    let d = log10_abs(reference) - log10_abs(&diff);
    if d.is_nan() {
        0.0
    } else {
        d.clamp(0.0, decimal_digits as f64)
    }
}

/// Whether `digits` passes for an identity of `kind` under `ctx`.
pub fn passes(kind: Kind, digits: f64, ctx: &PrecisionContext) -> bool {
    match kind {
        Kind::Exact => digits >= (ctx.decimal_digits() as f64 - ctx.guard_digits() as f64),
        Kind::Approx(e) => {
            let e = e as f64;
            digits >= e + APPROX_BAND.0 && digits <= e + APPROX_BAND.1
        }
    }
}

/// The context [`verify_all`] uses for `identity`: approximations are lifted
/// to their minimum admissible precision.
pub fn context_for(identity: &Identity, ctx: &PrecisionContext) -> Result<PrecisionContext> {
    match identity.kind {
        Kind::Approx(e) if ctx.decimal_digits() < e + APPROX_HEADROOM => {
            ctx.with_digits(e + APPROX_HEADROOM)
        }
        _ => Ok(*ctx),
    }
}

type ValueCache = HashMap<SeriesSpec, Real>;

fn evaluate_specs<'a>(
    specs: impl Iterator<Item = &'a SeriesSpec>,
    ctx: &PrecisionContext,
) -> Result<ValueCache> {
    let mut unique: Vec<SeriesSpec> = specs.copied().collect();
    unique.sort_by_key(|s| s.to_string());
    unique.dedup();
    unique
        .into_par_iter()
        .map(|s| evaluate(&s, ctx).map(|v| (s, v)))
        .collect()
}

/// Value of a series side and the magnitude used as reference when the
/// closed side is exactly zero (largest single term).
fn combine(rhs: &Combination, values: &ValueCache, prec: u32) -> (Real, Real) {
    let mut largest = Float::with_val(prec, 0);
    match rhs {
        Combination::Linear(terms) => {
            let mut sum = Float::with_val(prec, 0);
            for t in terms {
                let term = rational_to_real(&t.coefficient, prec) * &values[&t.spec];
                if Float::with_val(prec, term.abs_ref()) > largest {
                    largest = Float::with_val(prec, term.abs_ref());
                }
                sum += term;
            }
            (sum, largest)
        }
        Combination::Product(terms) => {
            let mut product = Float::with_val(prec, 1);
            for t in terms {
                let factor = Float::with_val(prec, &values[&t.spec]);
                product *= rug::ops::Pow::pow(factor, t.power);
                product *= rational_to_real(&t.coefficient, prec);
            }
            let magnitude = Float::with_val(prec, product.abs_ref());
            (product, magnitude)
        }
    }
}

struct Evaluated {
    lhs: Real,
    rhs: Real,
    digits: f64,
}

fn evaluate_reading(
    reading: &Reading,
    values: &ValueCache,
    ctx: &PrecisionContext,
) -> Result<Evaluated> {
    let prec = ctx.working_bits() + 64;
    let lhs = reading.lhs.eval_at(prec)?;
    let (rhs, largest) = combine(&reading.rhs, values, prec);
    let reference = if reading.lhs.is_zero() {
        largest
    } else {
        Float::with_val(prec, lhs.abs_ref()).max(&Float::with_val(prec, 1))
    };
    let digits = digits_agree(&lhs, &rhs, &reference, ctx.decimal_digits());
    Ok(Evaluated {
        lhs: Float::with_val(ctx.working_bits(), lhs),
        rhs: Float::with_val(ctx.working_bits(), rhs),
        digits,
    })
}

/// Evaluates both sides of every reading of `identity` and reports the
/// selected one.
///
/// The as-printed reading is selected whenever it passes; otherwise the
/// best-agreeing reading is selected and the report is flagged.
pub fn verify(identity: &Identity, ctx: &PrecisionContext) -> Result<VerificationReport> {
    if ctx.decimal_digits() < MIN_VERIFY_DIGITS {
        return Err(Error::InvalidPrecision(format!(
            "verification needs at least {MIN_VERIFY_DIGITS} digits, got {}",
            ctx.decimal_digits()
        )));
    }
    if let Kind::Approx(e) = identity.kind {
        if ctx.decimal_digits() < e + APPROX_HEADROOM {
            return Err(Error::InvalidPrecision(format!(
                "approximation {} expects {e} digits; verify it at {} digits or more",
                identity.id,
                e + APPROX_HEADROOM
            )));
        }
    }
    let start = Instant::now();
    let values = evaluate_specs(
        identity
            .readings
            .iter()
            .flat_map(|r| r.rhs.terms())
            .map(|t| &t.spec),
        ctx,
    )?;

    let evaluated: Vec<(&Reading, Result<Evaluated>)> = identity
        .readings
        .iter()
        .map(|r| (r, evaluate_reading(r, &values, ctx)))
        .collect();

    let candidates: Vec<CandidateOutcome> = evaluated
        .iter()
        .map(|(r, e)| CandidateOutcome {
            label: r.label.clone(),
            as_printed: r.as_printed,
            form: r.to_string(),
            digits_agree: e.as_ref().map_or(0.0, |e| e.digits),
            error: e.as_ref().err().map(ToString::to_string),
        })
        .collect();

    let ok: Vec<(usize, &Evaluated)> = evaluated
        .iter()
        .enumerate()
        .filter_map(|(i, (_, e))| e.as_ref().ok().map(|e| (i, e)))
        .collect();
    if ok.is_empty() {
        // every reading failed to evaluate; surface the first failure
        let (_, first) = evaluated.into_iter().next().expect("identity has readings");
        return Err(first.err().expect("failed reading"));
    }
    let printed_passing = ok
        .iter()
        .find(|(i, e)| identity.readings[*i].as_printed && passes(identity.kind, e.digits, ctx));
    let (index, chosen) = match printed_passing {
        Some(&(i, e)) => (i, e),
        None => {
            let passing: Vec<_> = ok
                .iter()
                .filter(|(_, e)| passes(identity.kind, e.digits, ctx))
                .collect();
            let pool: Vec<&(usize, &Evaluated)> = if passing.is_empty() {
                ok.iter().collect()
            } else {
                passing
            };
            let &&(i, e) = pool
                .iter()
                .max_by(|a, b| a.1.digits.total_cmp(&b.1.digits).then(b.0.cmp(&a.0)))
                .expect("non-empty pool");
            (i, e)
        }
    };
    let reading = &identity.readings[index];
    Ok(VerificationReport {
        id: identity.id.clone(),
        kind: identity.kind,
        decimal_digits: ctx.decimal_digits(),
        guard_digits: ctx.guard_digits(),
        lhs_value: chosen.lhs.clone(),
        rhs_value: chosen.rhs.clone(),
        digits_agree: chosen.digits,
        passed: passes(identity.kind, chosen.digits, ctx),
        flagged: !reading.as_printed,
        selected: reading.label.clone(),
        selected_form: reading.to_string(),
        candidates,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Verifies `ids` (all identities when `None`) in parallel, preserving
/// order.  Unknown ids and evaluation failures become per-item errors.
pub fn verify_all(
    registry: &Registry,
    ids: Option<&[String]>,
    ctx: &PrecisionContext,
) -> Vec<Result<VerificationReport>> {
    let ids: Vec<String> = match ids {
        Some(ids) => ids.to_vec(),
        None => registry.ids().map(str::to_string).collect(),
    };
    ids.par_iter()
        .map(|id| {
            let identity = registry.get(id)?;
            verify(identity, &context_for(identity, ctx)?)
        })
        .collect()
}

/// Takes logarithms of a product reading: `ln lhs = Σ power · ln value`,
/// with `ln F(α) = lambert(1, α)` and `ln J(α) = lambert(1, 5α) − lambert(1, α)`.
pub fn log_linearise(reading: &Reading) -> Result<Reading> {
    let Combination::Product(factors) = &reading.rhs else {
        return Err(Error::arg("only product readings can be linearised"));
    };
    let mut terms: Vec<Term> = Vec::new();
    let mut push = |coefficient: Rational64, alpha: Rational64| {
        let spec = SeriesSpec::lambert(1, alpha);
        match terms.iter_mut().find(|t| t.spec == spec) {
            Some(t) => t.coefficient += coefficient,
            None => terms.push(Term {
                coefficient,
                spec,
                power: 1,
            }),
        }
    };
    for f in factors {
        let p = Rational64::from_integer(f.power as i64);
        match f.spec {
            SeriesSpec::EulerF { alpha } => push(p, alpha),
            SeriesSpec::RogersRamanujanJ { alpha } => {
                push(p, alpha * 5);
                push(-p, alpha);
            }
            other => return Err(Error::arg(format!("{other} has no logarithmic form"))),
        }
    }
    terms.retain(|t| t.coefficient != Rational64::from_integer(0));
    let lhs = match &reading.lhs {
        ClosedForm::Lit(r) if *r == Rational64::from_integer(1) => ClosedForm::zero(),
        other => ClosedForm::Ln(Box::new(other.clone())),
    };
    Ok(Reading {
        label: format!("{}-log", reading.label),
        as_printed: reading.as_printed,
        lhs,
        rhs: Combination::Linear(terms),
    })
}
