//! Evaluation of the exponential series and products.
//!
//! All summation families share one kernel: terms are functions of
//! `E_n = e^{βn}` with `β = απ` (or `2πq`, `4πq` for Eisenstein series), and
//! the truncation index is the smallest `N` for which a rigorous majorant of
//! the tail drops below `10^(-working_digits)`.
//!
//! Majorants, for `n > N`:
//!
//! * `n^{-s}/(e^{βn}−1) ≤ n^m e^{-βn} / (1 − e^{-β(N+1)})`, `m = max(0, −s)`
//! * `n^{-s}/(cosh βn − 1) ≤ 2 n^m e^{-βn} / (1 − e^{-β(N+1)})²`
//! * `σ₁(n) n^s e^{-βn} ≤ n^{s+2} e^{-βn}`
//! * `c σ_{w−1}(n) e^{-βn} ≤ c ζ(w−1) n^{w−1} e^{-βn}`
//!
//! and `Σ_{n>N} n^m e^{-βn} ≤ t_{N+1} / (1 − ρ)` with
//! `ρ = ((N+2)/(N+1))^m e^{-β}` once `ρ < 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::Rational64;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::arith;
use crate::constants::pi;
use crate::context::{rational_to_real, PrecisionContext, Real};
use crate::error::{Error, Result};

/// How often the running exponential is recomputed from scratch.
const REEXP_INTERVAL: u64 = 64;

const LN10: f64 = std::f64::consts::LN_10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Convention {
    /// `q^{2k}` with `q → e^{-π q}`: nome `e^{-2π q}`.
    PiScale,
    /// `q^{2k}` with `q → e^{-2π q}`: nome `e^{-4π q}`.
    TwoPiScale,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::PiScale => "pi",
            Convention::TwoPiScale => "two_pi",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pi" | "pi_scale" => Ok(Convention::PiScale),
            "two_pi" | "two_pi_scale" | "2pi" => Ok(Convention::TwoPiScale),
            _ => Err(Error::arg(format!("unknown Eisenstein convention `{s}`"))),
        }
    }

    fn nome_factor(self) -> i64 {
        match self {
            Convention::PiScale => 2,
            Convention::TwoPiScale => 4,
        }
    }
}

/// Names one series or product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesSpec {
    /// Σ n^{-s} / (e^{απn} − 1)
    Lambert { s: i32, alpha: Rational64 },
    /// Σ n^{-s} / (cosh(απn) − 1)
    Cosh { s: i32, alpha: Rational64 },
    /// Σ σ₁(n) n^s e^{-απn}
    SigmaExp { s: u32, alpha: Rational64 },
    /// Π 1/(1 − e^{-απn})
    EulerF { alpha: Rational64 },
    /// Π_{5∤n} (1 − e^{-απn})
    RogersRamanujanJ { alpha: Rational64 },
    /// 1 + c_w Σ σ_{w−1}(k) x^k
    Eisenstein {
        weight: u32,
        q: Rational64,
        convention: Convention,
    },
}

impl SeriesSpec {
    pub fn lambert(s: i32, alpha: Rational64) -> Self {
        SeriesSpec::Lambert { s, alpha }
    }

    pub fn cosh(s: i32, alpha: Rational64) -> Self {
        SeriesSpec::Cosh { s, alpha }
    }

    pub fn sigma_exp(s: u32, alpha: Rational64) -> Self {
        SeriesSpec::SigmaExp { s, alpha }
    }

    pub fn euler_f(alpha: Rational64) -> Self {
        SeriesSpec::EulerF { alpha }
    }

    pub fn rr_j(alpha: Rational64) -> Self {
        SeriesSpec::RogersRamanujanJ { alpha }
    }

    pub fn eisenstein(weight: u32, q: Rational64, convention: Convention) -> Self {
        SeriesSpec::Eisenstein {
            weight,
            q,
            convention,
        }
    }

    /// The scale argument (α, or q for Eisenstein series).
    pub fn scale(&self) -> Rational64 {
        match *self {
            SeriesSpec::Lambert { alpha, .. }
            | SeriesSpec::Cosh { alpha, .. }
            | SeriesSpec::SigmaExp { alpha, .. }
            | SeriesSpec::EulerF { alpha }
            | SeriesSpec::RogersRamanujanJ { alpha } => alpha,
            SeriesSpec::Eisenstein { q, .. } => q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scale = self.scale();
        if scale <= Rational64::from_integer(0) {
            return Err(Error::arg(format!(
                "scale must be positive, got {scale} in {self}"
            )));
        }
        if let SeriesSpec::Eisenstein { weight, .. } = *self {
            if ![4, 8, 12].contains(&weight) {
                return Err(Error::arg(format!(
                    "Eisenstein weight must be 4, 8 or 12, got {weight}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SeriesSpec::Lambert { s, alpha } => write!(f, "lambert({s}, {alpha})"),
            SeriesSpec::Cosh { s, alpha } => write!(f, "cosh({s}, {alpha})"),
            SeriesSpec::SigmaExp { s, alpha } => write!(f, "sigma({s}, {alpha})"),
            SeriesSpec::EulerF { alpha } => write!(f, "F({alpha})"),
            SeriesSpec::RogersRamanujanJ { alpha } => write!(f, "J({alpha})"),
            SeriesSpec::Eisenstein {
                weight,
                q,
                convention,
            } => write!(f, "E{weight}({q}, {})", convention.name()),
        }
    }
}

/// Σ_{n≥1} n^{-s} / (e^{απn} − 1).
pub fn lambert(s: i32, alpha: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    evaluate(&SeriesSpec::lambert(s, alpha), ctx)
}

/// Σ_{n≥1} n^{-s} / (cosh(απn) − 1).
pub fn cosh_series(s: i32, alpha: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    evaluate(&SeriesSpec::cosh(s, alpha), ctx)
}

/// Σ_{n≥1} σ₁(n) n^s e^{-απn}.
pub fn sigma_exp_series(s: u32, alpha: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    evaluate(&SeriesSpec::sigma_exp(s, alpha), ctx)
}

/// Euler's partition product F at x = e^{-απ}.
pub fn euler_f(alpha: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    evaluate(&SeriesSpec::euler_f(alpha), ctx)
}

/// The Rogers–Ramanujan product J = G·H at x = e^{-απ}.
pub fn rr_j(alpha: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    evaluate(&SeriesSpec::rr_j(alpha), ctx)
}

/// Eisenstein series of the given weight.
pub fn eisenstein(
    weight: u32,
    q: Rational64,
    convention: Convention,
    ctx: &PrecisionContext,
) -> Result<Real> {
    evaluate(&SeriesSpec::eisenstein(weight, q, convention), ctx)
}

/// Evaluates `spec` with absolute error below `10^(-working_digits)`.
pub fn evaluate(spec: &SeriesSpec, ctx: &PrecisionContext) -> Result<Real> {
    spec.validate()?;
    let digits = ctx.working_digits() as f64;
    match *spec {
        SeriesSpec::EulerF { alpha } => {
            // ln F = lambert(1, α) ≈ π/(6α); exp scales the absolute error by F
            let log_f = log_f_estimate(alpha);
            let log_series = Kernel::new(&SeriesSpec::lambert(1, alpha))?;
            let l = log_series.sum(digits + log_f.max(0.0), ctx.working_bits(), None);
            Ok(l.exp())
        }
        SeriesSpec::RogersRamanujanJ { alpha } => {
            let five = alpha * 5;
            let big = Kernel::new(&SeriesSpec::lambert(1, five))?;
            let small = Kernel::new(&SeriesSpec::lambert(1, alpha))?;
            let a = big.sum(digits + 1.0, ctx.working_bits(), None);
            let b = small.sum(digits + 1.0, ctx.working_bits(), None);
            Ok((a - b).exp())
        }
        _ => Ok(Kernel::new(spec)?.sum(digits, ctx.working_bits(), None)),
    }
}

/// Number of terms [`evaluate`] sums for a summation family at `ctx`.
pub fn truncation_index(spec: &SeriesSpec, ctx: &PrecisionContext) -> Result<u64> {
    spec.validate()?;
    let kernel = Kernel::summation(spec)?;
    Ok(kernel.truncation(ctx.working_digits() as f64))
}

/// Sums exactly `terms` terms of a summation family, at the precision
/// [`evaluate`] would use.
pub fn evaluate_truncated(spec: &SeriesSpec, ctx: &PrecisionContext, terms: u64) -> Result<Real> {
    spec.validate()?;
    let kernel = Kernel::summation(spec)?;
    Ok(kernel.sum(ctx.working_digits() as f64, ctx.working_bits(), Some(terms)))
}

fn log_f_estimate(alpha: Rational64) -> f64 {
    let a = *alpha.numer() as f64 / *alpha.denom() as f64;
    std::f64::consts::PI / (6.0 * a) / LN10
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Lambert { s: i32 },
    Cosh { s: i32 },
    SigmaExp { s: u32 },
    Eisenstein { weight: u32 },
}

/// A summation family reduced to its term shape and exponential rate.
struct Kernel {
    shape: Shape,
    /// β as an exact multiple of π.
    rate: Rational64,
    beta: f64,
}

impl Kernel {
    fn new(spec: &SeriesSpec) -> Result<Self> {
        Self::summation(spec)
    }

    fn summation(spec: &SeriesSpec) -> Result<Self> {
        let (shape, rate) = match *spec {
            SeriesSpec::Lambert { s, alpha } => (Shape::Lambert { s }, alpha),
            SeriesSpec::Cosh { s, alpha } => (Shape::Cosh { s }, alpha),
            SeriesSpec::SigmaExp { s, alpha } => (Shape::SigmaExp { s }, alpha),
            SeriesSpec::Eisenstein {
                weight,
                q,
                convention,
            } => (Shape::Eisenstein { weight }, q * convention.nome_factor()),
            SeriesSpec::EulerF { .. } | SeriesSpec::RogersRamanujanJ { .. } => {
                return Err(Error::arg(format!("{spec} is a product, not a summation")))
            }
        };
        let beta = std::f64::consts::PI * (*rate.numer() as f64) / (*rate.denom() as f64);
        Ok(Kernel { shape, rate, beta })
    }

    /// (log10 of the majorant constant, polynomial degree m, power of the
    /// `1/(1 − e^{-β(N+1)})` factor).
    fn majorant(&self) -> (f64, i64, i32) {
        match self.shape {
            Shape::Lambert { s } => (0.0, (-(s as i64)).max(0), 1),
            Shape::Cosh { s } => (2f64.log10(), (-(s as i64)).max(0), 2),
            Shape::SigmaExp { s } => (0.0, s as i64 + 2, 0),
            Shape::Eisenstein { weight } => {
                let c = eisenstein_coefficient_f64(weight) * zeta_bound(weight - 1);
                (c.log10(), weight as i64 - 1, 0)
            }
        }
    }

    /// log10 of the tail bound after `n` terms; `+inf` when the ratio test
    /// does not yet apply.
    fn log10_tail(&self, n: u64) -> f64 {
        let (log_k, m, power) = self.majorant();
        let next = (n + 1) as f64;
        let ratio_log = m as f64 * ((next + 1.0) / next).ln() - self.beta;
        if ratio_log >= 0.0 {
            return f64::INFINITY;
        }
        let rho = ratio_log.exp();
        let ln_term = m as f64 * next.ln() - self.beta * next;
        let ln_factor = -(power as f64) * (-(-self.beta * next).exp()).ln_1p();
        log_k + (ln_term + ln_factor - (1.0 - rho).ln()) / LN10
    }

    /// Smallest `N` whose tail bound is below `10^(-digits)`.
    fn truncation(&self, digits: f64) -> u64 {
        let (_, m, _) = self.majorant();
        let start = ((m as f64 / self.beta).ceil() as u64).max(1);
        let ok = |n: u64| self.log10_tail(n) < -digits;
        let mut hi = start;
        while !ok(hi) {
            hi *= 2;
        }
        let mut lo = (hi / 2).max(start);
        if ok(lo) {
            return lo;
        }
        // lo fails, hi passes
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// log10 of an upper estimate of the largest term, used to size the
    /// working precision so that the absolute error target holds.
    fn log10_peak(&self) -> f64 {
        let (log_k, m, power) = self.majorant();
        let peak_at = |n: f64| {
            let ln = m as f64 * n.ln()
                - self.beta * n
                - power as f64 * (-(-self.beta * n).exp()).ln_1p();
            log_k + ln / LN10
        };
        let mut candidates = vec![1.0, (m as f64 / self.beta).max(1.0)];
        if m > power as i64 {
            candidates.push(((m - power as i64) as f64 / self.beta).max(1.0));
        }
        candidates
            .into_iter()
            .flat_map(|c: f64| [c.floor().max(1.0), c.ceil()])
            .map(peak_at)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn sum(&self, digits: f64, base_bits: u32, forced_terms: Option<u64>) -> Real {
        let terms = forced_terms.unwrap_or_else(|| self.truncation(digits));
        let log2_10 = std::f64::consts::LOG2_10;
        let headroom = (self.log10_peak().max(0.0)) * log2_10
            + (terms as f64).log2()
            + (1.0 / self.beta).log2().max(0.0)
            + 16.0;
        let extra_digits_bits = ((digits - (base_bits as f64 / log2_10)).max(0.0) * log2_10).ceil();
        let prec = base_bits + extra_digits_bits as u32 + headroom.ceil() as u32;

        let beta = pi(prec) * *self.rate.numer() / *self.rate.denom();
        match self.shape {
            Shape::Lambert { s } => sum_lambert_like(&beta, terms, prec, s, false),
            Shape::Cosh { s } => sum_lambert_like(&beta, terms, prec, s, true),
            Shape::SigmaExp { s } => {
                let sigma = sigma_cached(1, terms as usize);
                sum_divisor_weighted(&beta, terms, prec, &sigma, s)
            }
            Shape::Eisenstein { weight } => {
                let sigma = sigma_cached(weight - 1, terms as usize);
                let sum = sum_divisor_weighted(&beta, terms, prec, &sigma, 0);
                sum * eisenstein_coefficient(weight, prec) + 1u32
            }
        }
    }
}

/// Upper bound for ζ(k), k ≥ 3.
fn zeta_bound(k: u32) -> f64 {
    match k {
        3 => 1.203,
        7 => 1.009,
        11 => 1.001,
        _ => 1.0 + 2f64.powi(1 - k as i32) * 2.0,
    }
}

fn eisenstein_coefficient_f64(weight: u32) -> f64 {
    match weight {
        4 => 240.0,
        8 => 480.0,
        _ => 65520.0 / 691.0,
    }
}

pub(crate) fn eisenstein_coefficient(weight: u32, prec: u32) -> Real {
    match weight {
        4 => Float::with_val(prec, 240),
        8 => Float::with_val(prec, 480),
        _ => rational_to_real(&Rational64::new(65520, 691), prec),
    }
}

/// Running `e^{βn}` with periodic recomputation.
struct ExpWalk<'a> {
    beta: &'a Real,
    step: Real,
    current: Real,
    n: u64,
    sign: i32,
}

impl<'a> ExpWalk<'a> {
    /// `sign = 1` walks e^{βn}, `sign = −1` walks e^{-βn}.
    fn new(beta: &'a Real, sign: i32) -> Self {
        let step = if sign > 0 {
            beta.clone().exp()
        } else {
            (-beta.clone()).exp()
        };
        ExpWalk {
            beta,
            current: Float::with_val(beta.prec(), 1),
            step,
            n: 0,
            sign,
        }
    }

    fn next(&mut self) -> &Real {
        self.n += 1;
        if (self.n - 1).is_multiple_of(REEXP_INTERVAL) {
            let arg = Float::with_val(self.beta.prec(), self.beta * self.n);
            self.current = if self.sign > 0 {
                arg.exp()
            } else {
                (-arg).exp()
            };
        } else {
            self.current *= &self.step;
        }
        &self.current
    }
}

fn int_pow(n: u64, k: u32, prec: u32) -> Real {
    Float::with_val(prec, Integer::from(n).pow(k))
}

/// Lambert (`cosh = false`) or cosh (`cosh = true`) family.
fn sum_lambert_like(beta: &Real, terms: u64, prec: u32, s: i32, cosh: bool) -> Real {
    let mut walk = ExpWalk::new(beta, 1);
    let mut sum = Float::with_val(prec, 0);
    let mut denom = Float::new(prec);
    for n in 1..=terms {
        let e = walk.next();
        denom.assign_sub_one(e);
        let mut term = if cosh {
            // 1/(cosh x − 1) = 2e^x/(e^x − 1)²
            let sq = Float::with_val(prec, denom.square_ref());
            Float::with_val(prec, e * 2u32) / sq
        } else {
            Float::with_val(prec, denom.recip_ref())
        };
        match s.cmp(&0) {
            std::cmp::Ordering::Greater => term /= int_pow(n, s as u32, prec),
            std::cmp::Ordering::Less => term *= int_pow(n, s.unsigned_abs(), prec),
            std::cmp::Ordering::Equal => {}
        }
        sum += &term;
    }
    sum
}

/// Σ σ(n) n^s e^{-βn} for a precomputed divisor-sum table.
fn sum_divisor_weighted(beta: &Real, terms: u64, prec: u32, sigma: &[Integer], s: u32) -> Real {
    let mut walk = ExpWalk::new(beta, -1);
    let mut sum = Float::with_val(prec, 0);
    for n in 1..=terms {
        let x = walk.next();
        let mut coeff = Integer::from(&sigma[n as usize - 1]);
        if s > 0 {
            coeff *= Integer::from(n).pow(s);
        }
        sum += Float::with_val(prec, x * &coeff);
    }
    sum
}

trait SubOne {
    fn assign_sub_one(&mut self, e: &Real);
}

impl SubOne for Float {
    fn assign_sub_one(&mut self, e: &Real) {
        use rug::Assign;
        self.assign(e - 1u32);
    }
}

type SigmaCache = RwLock<HashMap<u32, Arc<Vec<Integer>>>>;

fn sigma_cache() -> &'static SigmaCache {
    static CACHE: OnceLock<SigmaCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Divisor-sum table of length at least `len`, shared across evaluations.
fn sigma_cached(k: u32, len: usize) -> Arc<Vec<Integer>> {
    if let Some(t) = sigma_cache().read().expect("sigma cache poisoned").get(&k) {
        if t.len() >= len {
            return Arc::clone(t);
        }
    }
    let mut guard = sigma_cache().write().expect("sigma cache poisoned");
    let current = guard.get(&k).map_or(0, |t| t.len());
    if current >= len {
        return Arc::clone(&guard[&k]);
    }
    let size = len.max(current * 2).max(256);
    let table = Arc::new(arith::sieve(k, size).expect("sieve of valid order"));
    guard.insert(k, Arc::clone(&table));
    table
}

/// Direct truncated product Π_{n≥1} 1/(1 − e^{-απn}).
///
/// Shares no code with the logarithmic evaluation used by [`euler_f`]; kept
/// as an independent cross-check.
pub fn euler_product_direct(alpha: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    direct_product(alpha, ctx, |_| true, true)
}

/// Direct truncated product Π_{5∤n} (1 − e^{-απn}).
pub fn rr_product_direct(alpha: Rational64, ctx: &PrecisionContext) -> Result<Real> {
    direct_product(alpha, ctx, |n| n % 5 != 0, false)
}

fn direct_product(
    alpha: Rational64,
    ctx: &PrecisionContext,
    keep: impl Fn(u64) -> bool,
    invert: bool,
) -> Result<Real> {
    SeriesSpec::euler_f(alpha).validate()?;
    let beta_f = std::f64::consts::PI * (*alpha.numer() as f64) / (*alpha.denom() as f64);
    // ln of the product is Σ −ln(1 − x^n) ≤ 2 x^n / (1 − x) past the point x^n ≤ 1/2
    let extra = log_f_estimate(alpha).max(0.0);
    let digits = ctx.working_digits() as f64 + extra + 2.0;
    let prec = ctx.working_bits() + (extra * std::f64::consts::LOG2_10) as u32 + 64;
    let x = (-(pi(prec) * *alpha.numer() / *alpha.denom())).exp();
    let mut power = Float::with_val(prec, 1);
    let mut product = Float::with_val(prec, 1);
    let mut n = 0u64;
    loop {
        n += 1;
        power *= &x;
        if keep(n) {
            let factor = 1 - Float::with_val(prec, &power);
            product *= factor;
        }
        let ln_tail = -beta_f * n as f64 + 2f64.ln() - (-(-beta_f).exp()).ln_1p();
        if beta_f * n as f64 > 1.0 && ln_tail / LN10 < -digits {
            break;
        }
    }
    Ok(if invert { product.recip() } else { product })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{constant, NamedConstant};
    use crate::context::make_context;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn assert_close(a: &Real, b: &Real, digits: i32) {
        let prec = a.prec().max(b.prec());
        let diff = Float::with_val(prec, a - b).abs();
        let tol = Float::with_val(prec, 10).pow(-digits);
        assert!(diff < tol, "|{a} - {b}| = {diff} ≥ 1e-{digits}");
    }

    /// Naive oracle: fixed number of terms, every exponential computed
    /// afresh, at a generous precision.
    fn brute(spec: &SeriesSpec, terms: u64, prec: u32) -> Real {
        let mut sum = Float::with_val(prec, 0);
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        for n in 1..=terms {
            let nf = Float::with_val(prec, n);
            let term = match *spec {
                SeriesSpec::Lambert { s, alpha } => {
                    let arg = Float::with_val(prec, &pi * &nf) * *alpha.numer() / *alpha.denom();
                    Float::with_val(prec, (&nf).pow(-s)) / (arg.exp() - 1u32)
                }
                SeriesSpec::Cosh { s, alpha } => {
                    let arg = Float::with_val(prec, &pi * &nf) * *alpha.numer() / *alpha.denom();
                    Float::with_val(prec, (&nf).pow(-s)) / (arg.cosh() - 1u32)
                }
                SeriesSpec::SigmaExp { s, alpha } => {
                    let arg = Float::with_val(prec, &pi * &nf) * *alpha.numer() / *alpha.denom();
                    let sig = arith::sigma_pow(1, n).unwrap();
                    Float::with_val(prec, (&nf).pow(s)) * sig * (-arg).exp()
                }
                _ => unreachable!(),
            };
            sum += term;
        }
        sum
    }

    #[test]
    fn near_integer_at_two_sevenths() {
        let ctx = make_context(40, 20).unwrap();
        let v = lambert(-3, r(2, 7), &ctx).unwrap();
        // independently confirmed by the closed form with Γ(3/4); see the
        // registry tests
        let expected = Float::with_val(
            300,
            Float::parse("10.00000000000000019016176788866267558436").unwrap(),
        );
        assert_close(&v, &expected, 38);
    }

    #[test]
    fn zeta3_from_single_lambert() {
        let ctx = make_context(80, 20).unwrap();
        let pi = constant(NamedConstant::Pi, &ctx);
        let l = lambert(3, r(2, 1), &ctx).unwrap();
        let v = Float::with_val(400, pi.pow(3u32)) * 7u32 / 180u32 - l * 2u32;
        assert_close(&v, &constant(NamedConstant::Zeta3, &ctx), 95);
    }

    #[test]
    fn brute_force_oracles_at_thirty_digits() {
        let ctx = make_context(30, 20).unwrap();
        for spec in [
            SeriesSpec::lambert(1, r(4, 1)),
            SeriesSpec::cosh(2, r(4, 1)),
            SeriesSpec::sigma_exp(1, r(4, 1)),
            SeriesSpec::lambert(-3, r(1, 1)),
            SeriesSpec::cosh(-2, r(1, 1)),
        ] {
            let v = evaluate(&spec, &ctx).unwrap();
            let oracle = brute(&spec, 100, 200);
            assert_close(&v, &oracle, 30);
        }
    }

    #[test]
    fn catalan_from_cosh_series() {
        let ctx = make_context(60, 20).unwrap();
        let c = |a| cosh_series(2, r(a, 1), &ctx).unwrap();
        let v = c(1) * 11u32 - c(2) * 71u32 / 2u32 + c(4) * 11u32;
        assert_close(&v, &constant(NamedConstant::Catalan, &ctx), 75);
    }

    #[test]
    fn inverse_pi_squared_from_cosh_and_sigma() {
        let ctx = make_context(60, 20).unwrap();
        let pi = constant(NamedConstant::Pi, &ctx);
        let target = Float::with_val(300, (&pi).pow(2u32)).recip();
        let c = |a| cosh_series(-2, r(a, 1), &ctx).unwrap();
        assert_close(&(c(1) * 2u32 - c(2) * 32u32 + c(4) * 32u32), &target, 75);
        let s = |a| sigma_exp_series(1, r(a, 1), &ctx).unwrap();
        assert_close(&(s(1) * 4u32 - s(2) * 64u32 + s(4) * 64u32), &target, 75);
        let target3 = Float::with_val(300, (&pi).pow(3u32)).recip();
        let s = |a| sigma_exp_series(2, r(a, 1), &ctx).unwrap();
        assert_close(&(s(1) * 4u32 - s(2) * 128u32 + s(4) * 256u32), &target3, 75);
    }

    #[test]
    fn euler_f_printed_decimals() {
        let ctx = make_context(40, 20).unwrap();
        let f4 = euler_f(r(4, 1), &ctx).unwrap();
        let printed = Float::with_val(200, Float::parse("1.0000034873666794496495854034").unwrap());
        assert_close(&f4, &printed, 28);
        let f10 = euler_f(r(10, 1), &ctx).unwrap();
        // 1 + e^{-10π} + ...: the leading correction is 2.2711e-14
        let lead = Float::with_val(200, f10 - 1u32) * 1e14f64;
        let lead: Real = lead;
        assert!((lead.to_f64() - 2.271101068).abs() < 1e-9);
    }

    #[test]
    fn euler_f_one_eighth_power_is_near_e_pi_over_16() {
        let ctx = make_context(40, 20).unwrap();
        let f1 = euler_f(r(1, 1), &ctx).unwrap();
        let lhs = f1.pow(8u32);
        let rhs = constant(NamedConstant::EPi, &ctx) / 16u32;
        let rel = (Float::with_val(100, &lhs - &rhs) / &rhs).abs().to_f64();
        assert!(rel < 1e-4 && rel > 1e-6, "{rel}");
    }

    #[test]
    fn rr_products() {
        let ctx = make_context(50, 20).unwrap();
        let j = |n, d| rr_j(r(n, d), &ctx).unwrap();
        let e_pi = constant(NamedConstant::EPi, &ctx);
        let v = j(1, 5).pow(10u32) * j(4, 5).pow(10u32) / j(2, 5).pow(40u32);
        assert_close(&v, &e_pi, 60);
        let phi = constant(NamedConstant::Phi, &ctx);
        let v = j(1, 5).pow(4u32) * j(4, 5).pow(4u32) / j(2, 5).pow(10u32);
        assert_close(&v, &phi.pow(-3i32), 60);
    }

    #[test]
    fn eisenstein_values() {
        let ctx = make_context(40, 20).unwrap();
        let e4 = eisenstein(4, r(1, 10), Convention::PiScale, &ctx).unwrap();
        let expected = Float::with_val(
            300,
            Float::parse("10000.0000000000000000000012378960150102816841004").unwrap(),
        );
        assert_close(&e4, &expected, 40);
        let e = |q: Rational64| eisenstein(4, q, Convention::PiScale, &ctx).unwrap();
        let combo =
            -e(r(1, 10)) + e(r(1, 5)) * 14u32 - e(r(2, 5)) * 16u32 + e(r(1, 2)) * 1288u32 / 11u32;
        assert!(combo.abs() < Float::with_val(64, 1e-55));
        // leading term dominance
        let big = eisenstein(4, r(3, 1), Convention::PiScale, &ctx).unwrap();
        let lead = Float::with_val(200, -6.0 * std::f64::consts::PI).exp() * 240u32;
        let ratio = Float::with_val(200, (big - 1u32) / lead).to_f64();
        assert!((ratio - 1.0).abs() < 1e-7);
    }

    #[test]
    fn e4_squared_is_e8() {
        let ctx = make_context(60, 20).unwrap();
        for conv in [Convention::PiScale, Convention::TwoPiScale] {
            for q in [r(1, 10), r(1, 5), r(2, 5), r(1, 2)] {
                let e4 = eisenstein(4, q, conv, &ctx).unwrap();
                let e8 = eisenstein(8, q, conv, &ctx).unwrap();
                let sq = Float::with_val(e4.prec(), e4.square_ref());
                assert_close(&sq, &e8, 60);
            }
        }
    }

    #[test]
    fn rejects_non_positive_scale() {
        let ctx = make_context(30, 20).unwrap();
        assert!(lambert(1, r(0, 1), &ctx).is_err());
        assert!(cosh_series(1, r(-1, 2), &ctx).is_err());
        assert!(eisenstein(6, r(1, 2), Convention::PiScale, &ctx).is_err());
        assert!(euler_f(r(0, 1), &ctx).is_err());
    }

    #[test]
    fn deterministic() {
        let ctx = make_context(50, 20).unwrap();
        let spec = SeriesSpec::lambert(-7, r(2, 13));
        let a = evaluate(&spec, &ctx).unwrap();
        let b = evaluate(&spec, &ctx).unwrap();
        assert_eq!(a.prec(), b.prec());
        assert_eq!(a.to_integer_exp(), b.to_integer_exp());
    }

    #[test]
    fn tail_bound_is_rigorous_against_true_tail() {
        // the bound after N terms must exceed the true remainder
        let spec = SeriesSpec::lambert(-3, r(2, 163));
        let kernel = Kernel::summation(&spec).unwrap();
        let n = kernel.truncation(30.0);
        let full = evaluate_truncated(&spec, &make_context(40, 20).unwrap(), 4 * n).unwrap();
        let part = evaluate_truncated(&spec, &make_context(40, 20).unwrap(), n).unwrap();
        let tail = crate::context::log10_abs(&Float::with_val(400, full - part));
        assert!(tail <= kernel.log10_tail(n));
        assert!(kernel.log10_tail(n) < -30.0);
    }

    #[test]
    fn doubling_truncation_changes_nothing() {
        let ctx = make_context(60, 20).unwrap();
        for spec in [
            SeriesSpec::lambert(-3, r(2, 7)),
            SeriesSpec::lambert(1, r(1, 5)),
            SeriesSpec::cosh(2, r(1, 1)),
            SeriesSpec::sigma_exp(2, r(1, 2)),
            SeriesSpec::eisenstein(12, r(1, 10), Convention::TwoPiScale),
        ] {
            let n = truncation_index(&spec, &ctx).unwrap();
            let a = evaluate(&spec, &ctx).unwrap();
            let b = evaluate_truncated(&spec, &ctx, 2 * n).unwrap();
            assert_close(&a, &b, 80);
        }
        assert!(truncation_index(&SeriesSpec::euler_f(r(1, 1)), &ctx).is_err());
    }

    #[test]
    fn products_agree_with_logarithmic_route() {
        let ctx = make_context(60, 20).unwrap();
        for a in [r(1, 5), r(1, 1), r(4, 1), r(1, 32)] {
            let log_route = euler_f(a, &ctx).unwrap();
            let direct = euler_product_direct(a, &ctx).unwrap();
            let rel = Float::with_val(400, (log_route - &direct) / &direct);
            assert!(rel.abs() < Float::with_val(64, 1e-75), "F({a})");
            let log_route = rr_j(a, &ctx).unwrap();
            let direct = rr_product_direct(a, &ctx).unwrap();
            assert_close(&log_route, &direct, 78);
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(
            SeriesSpec::lambert(-3, r(2, 7)).to_string(),
            "lambert(-3, 2/7)"
        );
        assert_eq!(
            SeriesSpec::eisenstein(8, r(1, 10), Convention::TwoPiScale).to_string(),
            "E8(1/10, two_pi)"
        );
        assert_eq!(SeriesSpec::euler_f(r(4, 1)).to_string(), "F(4)");
    }
}
