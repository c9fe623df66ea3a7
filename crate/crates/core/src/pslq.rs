//! Integer relation detection with PSLQ.

use num_integer::Integer as _;
use num_rational::Rational64;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::context::{log10_abs, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::registry::{builtin_registry, Combination, Identity, Kind, Reading};
use crate::series::evaluate;

#[derive(Debug, Clone)]
pub struct RelationProblem {
    values: Vec<Real>,
    max_coeff_digits: u32,
    ctx: PrecisionContext,
}

impl RelationProblem {
    pub fn new(values: Vec<Real>, max_coeff_digits: u32, ctx: PrecisionContext) -> Result<Self> {
        let m = values.len() as u32;
        if m < 2 {
            return Err(Error::arg("need at least two values"));
        }
        if values.iter().any(|v| !v.is_finite() || v.is_zero()) {
            return Err(Error::arg("values must be finite and nonzero"));
        }
        if max_coeff_digits == 0 {
            return Err(Error::arg("coefficient digit bound must be positive"));
        }
        let needed = 20 + m * max_coeff_digits;
        if ctx.decimal_digits() < needed {
            return Err(Error::InvalidPrecision(format!(
                "{m} values with coefficients up to 10^{max_coeff_digits} need {needed} digits, got {}",
                ctx.decimal_digits()
            )));
        }
        Ok(RelationProblem {
            values,
            max_coeff_digits,
            ctx,
        })
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub coefficients: Vec<Integer>,
    pub residual: Real,
}

#[derive(Debug, Clone)]
pub enum PslqOutcome {
    Relation(Relation),
    /// No relation with Euclidean norm below `bound` exists.
    NoRelation {
        bound: Real,
    },
}

/// Divides out the gcd and makes the first nonzero entry positive.
pub fn normalize(coefficients: &mut [Integer]) {
    let g = coefficients.iter().fold(Integer::new(), |g, c| g.gcd(c));
    if g == 0 {
        return;
    }
    let negate = coefficients
        .iter()
        .find(|c| **c != 0)
        .is_some_and(|c| *c < 0);
    for c in coefficients.iter_mut() {
        c.div_exact_mut(&g);
        if negate {
            *c = -std::mem::take(c);
        }
    }
}

fn residual(values: &[Real], coefficients: &[Integer], prec: u32) -> Real {
    let mut sum = Float::with_val(prec, 0);
    for (v, c) in values.iter().zip(coefficients) {
        sum += Float::with_val(prec, v * c);
    }
    sum.abs()
}

/// Searches for integers `c` with `Σ c_i v_i = 0`.
#[allow(clippy::needless_range_loop)]
pub fn pslq(problem: &RelationProblem) -> Result<PslqOutcome> {
    let ctx = &problem.ctx;
    let prec = ctx.working_bits();
    let n = problem.values.len();
    let x: Vec<Real> = problem
        .values
        .iter()
        .map(|v| Float::with_val(prec, v))
        .collect();

    let accept_digits = ctx
        .decimal_digits()
        .saturating_sub(ctx.guard_digits())
        .max(1);
    let accept = Float::with_val(prec, 10).pow(-(accept_digits as i32));
    let target_bound = Float::with_val(prec, 10).pow(problem.max_coeff_digits);
    let max_iterations = 10 * n.pow(3);
    let a_limit = (ctx.working_digits() as f64) - 10.0;

    // partial norms s_k = |x_k..x_n|, then scale so s_1 = 1
    let mut s: Vec<Real> = vec![Float::new(prec); n];
    let mut acc = Float::with_val(prec, 0);
    for k in (0..n).rev() {
        acc += Float::with_val(prec, x[k].square_ref());
        s[k] = Float::with_val(prec, acc.sqrt_ref());
    }
    let norm = s[0].clone();
    let mut y: Vec<Real> = x.iter().map(|v| Float::with_val(prec, v / &norm)).collect();
    for sk in s.iter_mut() {
        *sk /= &norm;
    }

    let mut h: Vec<Vec<Real>> = vec![vec![Float::with_val(prec, 0); n - 1]; n];
    for i in 0..n {
        for j in 0..(n - 1).min(i + 1) {
            h[i][j] = if i == j {
                Float::with_val(prec, &s[j + 1] / &s[j])
            } else {
                let den = Float::with_val(prec, &s[j] * &s[j + 1]);
                -Float::with_val(prec, &y[i] * &y[j]) / den
            };
        }
    }
    let identity = |n: usize| -> Vec<Vec<Integer>> {
        (0..n)
            .map(|i| (0..n).map(|j| Integer::from((i == j) as u8)).collect())
            .collect()
    };
    let mut a = identity(n);
    let mut b = identity(n);

    let reduce = |h: &mut Vec<Vec<Real>>,
                  y: &mut Vec<Real>,
                  a: &mut Vec<Vec<Integer>>,
                  b: &mut Vec<Vec<Integer>>| {
        for i in 1..n {
            for j in (0..i.min(n - 1)).rev() {
                if h[j][j].is_zero() {
                    continue;
                }
                let q = Float::with_val(prec, &h[i][j] / &h[j][j]).round();
                if q.is_zero() {
                    continue;
                }
                let t = q.to_integer().expect("finite quotient");
                let yi = Float::with_val(prec, &y[i] * &t);
                y[j] += yi;
                for k in 0..=j {
                    let hk = Float::with_val(prec, &h[j][k] * &t);
                    h[i][k] -= hk;
                }
                for k in 0..n {
                    let ak = Integer::from(&a[j][k] * &t);
                    a[i][k] -= ak;
                    let bk = Integer::from(&b[k][i] * &t);
                    b[k][j] += bk;
                }
            }
        }
    };
    reduce(&mut h, &mut y, &mut a, &mut b);

    let gamma = Float::with_val(prec, 4) / 3u32;
    let gamma = gamma.sqrt();
    for _ in 0..max_iterations {
        // pick the row maximising γ^i |H_ii|
        let mut m = 0;
        let mut best = Float::with_val(prec, 0);
        let mut weight = Float::with_val(prec, &gamma);
        for i in 0..n - 1 {
            let v = Float::with_val(prec, h[i][i].abs_ref()) * &weight;
            if v > best {
                best = v;
                m = i;
            }
            weight *= &gamma;
        }
        y.swap(m, m + 1);
        a.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m < n - 2 {
            let t0 = Float::with_val(prec, h[m][m].square_ref())
                + Float::with_val(prec, h[m][m + 1].square_ref());
            let t0 = t0.sqrt();
            let t1 = Float::with_val(prec, &h[m][m] / &t0);
            let t2 = Float::with_val(prec, &h[m][m + 1] / &t0);
            for row in h.iter_mut().skip(m) {
                let t3 = row[m].clone();
                let t4 = row[m + 1].clone();
                row[m] = Float::with_val(prec, &t1 * &t3) + Float::with_val(prec, &t2 * &t4);
                row[m + 1] = Float::with_val(prec, &t1 * &t4) - Float::with_val(prec, &t2 * &t3);
            }
        }
        reduce(&mut h, &mut y, &mut a, &mut b);

        for j in 0..n {
            if Float::with_val(prec, y[j].abs_ref()) < accept {
                let mut c: Vec<Integer> = b.iter().map(|row| row[j].clone()).collect();
                if c.iter().all(|v| *v == 0) {
                    continue;
                }
                let r = residual(&problem.values, &c, prec);
                if r < accept {
                    normalize(&mut c);
                    return Ok(PslqOutcome::Relation(Relation {
                        coefficients: c,
                        residual: r,
                    }));
                }
            }
        }

        let mut max_diag = Float::with_val(prec, 0);
        for i in 0..n - 1 {
            let v = Float::with_val(prec, h[i][i].abs_ref());
            if v > max_diag {
                max_diag = v;
            }
        }
        if max_diag.is_zero() {
            return Err(Error::PrecisionTooLow("degenerate reduction".into()));
        }
        let bound = max_diag.recip();
        if bound > target_bound {
            return Ok(PslqOutcome::NoRelation { bound });
        }
        let largest_a = a
            .iter()
            .flatten()
            .map(|v| log10_abs(&Float::with_val(64, v)))
            .fold(f64::NEG_INFINITY, f64::max);
        if largest_a > a_limit {
            return Err(Error::PrecisionTooLow(format!(
                "reduction matrix entries reached 10^{largest_a:.0}"
            )));
        }
    }
    Err(Error::PrecisionTooLow(format!(
        "no decision after {max_iterations} iterations"
    )))
}

/// Outcome of searching for a catalog identity's coefficient pattern.
#[derive(Debug, Clone)]
pub struct Rediscovery {
    pub id: String,
    /// Labels of the quantities, closed side first.
    pub labels: Vec<String>,
    pub relation: Relation,
    /// Integer vector the catalog predicts, per reading.
    pub expected: Vec<(String, Vec<Integer>)>,
    /// The reading whose vector matches, if any.
    pub matched: Option<String>,
    /// The match is not the printed reading.
    pub flagged: bool,
}

fn lcm_of_denominators(coefs: &[Rational64]) -> i64 {
    coefs.iter().fold(1i64, |l, c| l.lcm(c.denom()))
}

/// `lhs − Σ c_i s_i = 0` as a normalized integer vector over the distinct
/// series of the reading (closed side first, omitted when it is zero).
fn expected_vector(reading: &Reading, order: &[crate::series::SeriesSpec]) -> Option<Vec<Integer>> {
    let Combination::Linear(terms) = &reading.rhs else {
        return None;
    };
    let mut coefs: Vec<Rational64> = vec![Rational64::from_integer(0); order.len()];
    for t in terms {
        let i = order.iter().position(|s| *s == t.spec)?;
        coefs[i] -= t.coefficient;
    }
    if !reading.lhs.is_zero() {
        coefs.insert(0, Rational64::from_integer(1));
    }
    let l = lcm_of_denominators(&coefs);
    let mut v: Vec<Integer> = coefs
        .iter()
        .map(|c| Integer::from(*c.numer() * (l / c.denom())))
        .collect();
    normalize(&mut v);
    Some(v)
}

/// Runs PSLQ on the closed side and series values of a linear exact
/// identity and compares the result with the catalog coefficients.
pub fn rediscover(identity_id: &str, ctx: &PrecisionContext) -> Result<Rediscovery> {
    rediscover_identity(builtin_registry().get(identity_id)?, ctx)
}

pub fn rediscover_identity(identity: &Identity, ctx: &PrecisionContext) -> Result<Rediscovery> {
    if identity.kind != Kind::Exact || !identity.is_linear() {
        return Err(Error::arg(format!(
            "{} is not an exact linear identity",
            identity.id
        )));
    }
    let primary = identity.primary();
    let Combination::Linear(terms) = &primary.rhs else {
        unreachable!("checked linear");
    };
    let mut order = Vec::new();
    for t in terms {
        if !order.contains(&t.spec) {
            order.push(t.spec);
        }
    }
    let mut values = Vec::new();
    let mut labels = Vec::new();
    if !primary.lhs.is_zero() {
        values.push(primary.lhs.evaluate(ctx)?);
        labels.push(primary.lhs.to_string());
    }
    for spec in &order {
        values.push(evaluate(spec, ctx)?);
        labels.push(spec.to_string());
    }
    let m = values.len() as u32;
    let coeff_digits = ((ctx.decimal_digits().saturating_sub(20)) / m).clamp(1, 12);
    let problem = RelationProblem::new(values, coeff_digits, *ctx)?;
    let relation = match pslq(&problem)? {
        PslqOutcome::Relation(r) => r,
        PslqOutcome::NoRelation { bound } => {
            return Err(Error::PrecisionTooLow(format!(
                "no relation found for {} (norm bound {})",
                identity.id,
                bound.to_f64()
            )))
        }
    };
    let expected: Vec<(String, Vec<Integer>)> = identity
        .readings
        .iter()
        .filter(|r| r.lhs.is_zero() == primary.lhs.is_zero())
        .filter_map(|r| expected_vector(r, &order).map(|v| (r.label.clone(), v)))
        .collect();
    let matched = expected
        .iter()
        .find(|(_, v)| *v == relation.coefficients)
        .map(|(l, _)| l.clone());
    let flagged = matched.as_ref().is_none_or(|l| {
        identity
            .readings
            .iter()
            .any(|r| &r.label == l && !r.as_printed)
    });
    Ok(Rediscovery {
        id: identity.id.clone(),
        labels,
        relation,
        expected,
        matched,
        flagged,
    })
}
