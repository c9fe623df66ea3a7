//! Farey sequences and best rational approximation.

use num_rational::Rational64;
use rug::{Float, Integer, Rational};

use crate::context::Real;
use crate::error::{Error, Result};

/// All reduced fractions `p/q` with `1 ≤ p ≤ q ≤ order`, ascending.
pub fn farey(order: u32) -> Result<Vec<Rational64>> {
    if order == 0 {
        return Err(Error::arg("Farey order must be positive"));
    }
    let n = order as i64;
    // next-term recurrence starting from 0/1, 1/n
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    let mut out = Vec::new();
    while c <= n {
        out.push(Rational64::new_raw(c, d));
        if c == d {
            break;
        }
        let k = (n + b) / d;
        let (e, f) = (k * c - a, k * d - b);
        (a, b, c, d) = (c, d, e, f);
    }
    Ok(out)
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form P/Q"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(num, den))
}

/// Best rational approximation of `x` with denominator at most
/// `max_denominator`, and the distance `|x − p/q|`.
///
/// The candidate set is the continued-fraction convergents of `x` plus the
/// largest admissible semiconvergent; among fractions with bounded
/// denominator the closest one is always in that set.  Ties go to the
/// smaller denominator.
pub fn nearest_rational(x: &Real, max_denominator: u64) -> Result<(Rational, Real)> {
    if !x.is_finite() {
        return Err(Error::arg("cannot approximate a non-finite value"));
    }
    if max_denominator == 0 {
        return Err(Error::arg("maximum denominator must be positive"));
    }
    let exact = x.to_rational().expect("finite float converts exactly");
    let best = best_approximation(&exact, &Integer::from(max_denominator));
    let distance = Float::with_val(x.prec(), Rational::from(&exact - &best)).abs();
    Ok((best, distance))
}

fn best_approximation(x: &Rational, max_den: &Integer) -> Rational {
    // convergents h_{k-2}/k_{k-2} and h_{k-1}/k_{k-1}
    let (mut p0, mut q0) = (Integer::from(0), Integer::from(1));
    let (mut p1, mut q1) = (Integer::from(1), Integer::from(0));
    let mut rest = x.clone();
    loop {
        let a = Integer::from(rest.floor_ref());
        let q2 = Integer::from(&a * &q1) + &q0;
        if &q2 > max_den {
            break;
        }
        let p2 = Integer::from(&a * &p1) + &p0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = rest - &a;
        if frac == 0 {
            return Rational::from((p1, q1));
        }
        rest = frac.recip();
    }
    let convergent = Rational::from((p1.clone(), q1.clone()));
    let k = Integer::from(max_den - &q0) / &q1;
    if k == 0 {
        return convergent;
    }
    let semi = Rational::from((p0 + Integer::from(&k * &p1), q0 + k * &q1));
    let d_conv = Rational::from(x - &convergent).abs();
    let d_semi = Rational::from(x - &semi).abs();
    if d_semi < d_conv {
        semi
    } else {
        convergent
    }
}
