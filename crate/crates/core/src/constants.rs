//! Fundamental real constants.
//!
//! π, e^π, logarithms and square roots come straight from MPFR.  The zeta
//! values, Catalan's constant and Γ(1/4) are computed here by classical
//! rapidly convergent methods that share nothing with the series identities
//! they are later compared against.

use std::fmt;
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::context::{PrecisionContext, Real};
use crate::error::{Error, Result};

/// Extra bits carried internally before rounding to the working precision.
const INTERNAL_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedConstant {
    Pi,
    EPi,
    Phi,
    Ln2,
    LnPi,
    GammaQuarter,
    GammaThreeQuarter,
    Sqrt2,
    Sqrt5,
    Sqrt7,
    /// 7^(1/4)
    Root4_7,
    /// 343^(1/4) = 7^(3/4)
    Root4_343,
    Zeta3,
    Zeta5,
    Zeta7,
    Catalan,
}

impl NamedConstant {
    pub const ALL: [NamedConstant; 16] = [
        NamedConstant::Pi,
        NamedConstant::EPi,
        NamedConstant::Phi,
        NamedConstant::Ln2,
        NamedConstant::LnPi,
        NamedConstant::GammaQuarter,
        NamedConstant::GammaThreeQuarter,
        NamedConstant::Sqrt2,
        NamedConstant::Sqrt5,
        NamedConstant::Sqrt7,
        NamedConstant::Root4_7,
        NamedConstant::Root4_343,
        NamedConstant::Zeta3,
        NamedConstant::Zeta5,
        NamedConstant::Zeta7,
        NamedConstant::Catalan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedConstant::Pi => "pi",
            NamedConstant::EPi => "e_pi",
            NamedConstant::Phi => "phi",
            NamedConstant::Ln2 => "ln2",
            NamedConstant::LnPi => "ln_pi",
            NamedConstant::GammaQuarter => "gamma_quarter",
            NamedConstant::GammaThreeQuarter => "gamma_three_quarter",
            NamedConstant::Sqrt2 => "sqrt2",
            NamedConstant::Sqrt5 => "sqrt5",
            NamedConstant::Sqrt7 => "sqrt7",
            NamedConstant::Root4_7 => "root4_7",
            NamedConstant::Root4_343 => "root4_343",
            NamedConstant::Zeta3 => "zeta3",
            NamedConstant::Zeta5 => "zeta5",
            NamedConstant::Zeta7 => "zeta7",
            NamedConstant::Catalan => "catalan",
        }
    }
}

impl fmt::Display for NamedConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedConstant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let found = NamedConstant::ALL.iter().find(|c| c.name() == s).copied();
        match (found, s) {
            (Some(c), _) => Ok(c),
            (None, "π") => Ok(NamedConstant::Pi),
            (None, "φ") => Ok(NamedConstant::Phi),
            (None, "√2") => Ok(NamedConstant::Sqrt2),
            (None, "√5") => Ok(NamedConstant::Sqrt5),
            (None, "√7") => Ok(NamedConstant::Sqrt7),
            (None, "K") => Ok(NamedConstant::Catalan),
            _ => Err(Error::arg(format!("unknown constant `{s}`"))),
        }
    }
}

/// Value of `name` correct to the working precision of `ctx`.
pub fn constant(name: NamedConstant, ctx: &PrecisionContext) -> Real {
    let prec = ctx.working_bits();
    let v = constant_at(name, prec + INTERNAL_BITS);
    Float::with_val(prec, &v)
}

/// Value of `name` at an explicit binary precision.
pub(crate) fn constant_at(name: NamedConstant, prec: u32) -> Real {
    match name {
        NamedConstant::Pi => pi(prec),
        NamedConstant::EPi => pi(prec).exp(),
        NamedConstant::Phi => (Float::with_val(prec, 5).sqrt() + 1u32) / 2u32,
        NamedConstant::Ln2 => Float::with_val(prec, Constant::Log2),
        NamedConstant::LnPi => pi(prec).ln(),
        NamedConstant::GammaQuarter => gamma_quarter(prec),
        NamedConstant::GammaThreeQuarter => {
            // reflection: Γ(1/4)Γ(3/4) = π√2
            let num = pi(prec) * Float::with_val(prec, 2).sqrt();
            num / gamma_quarter(prec)
        }
        NamedConstant::Sqrt2 => Float::with_val(prec, 2).sqrt(),
        NamedConstant::Sqrt5 => Float::with_val(prec, 5).sqrt(),
        NamedConstant::Sqrt7 => Float::with_val(prec, 7).sqrt(),
        NamedConstant::Root4_7 => Float::with_val(prec, 7).sqrt().sqrt(),
        NamedConstant::Root4_343 => {
            let r = Float::with_val(prec, 7).sqrt();
            let q = Float::with_val(prec, r.sqrt_ref());
            r * q
        }
        NamedConstant::Zeta3 => zeta_odd(3, prec),
        NamedConstant::Zeta5 => zeta_odd(5, prec),
        NamedConstant::Zeta7 => zeta_odd(7, prec),
        NamedConstant::Catalan => catalan(prec),
    }
}

pub(crate) fn pi(prec: u32) -> Real {
    Float::with_val(prec, Constant::Pi)
}

/// Arithmetic-geometric mean of two positive reals.
pub fn agm(a: &Real, b: &Real) -> Real {
    let prec = a.prec().max(b.prec());
    Float::with_val(prec, a.agm_ref(b))
}

/// Γ(1/4) = ((2π)^(3/2) / AGM(1, √2))^(1/2).
fn gamma_quarter(prec: u32) -> Real {
    let p = prec + 16;
    let two_pi = pi(p) * 2u32;
    let num = Float::with_val(p, two_pi.pow(1.5f64));
    let m = agm(&Float::with_val(p, 1), &Float::with_val(p, 2).sqrt());
    let g = (num / m).sqrt();
    Float::with_val(prec, g)
}

/// ζ(s) for integer `s ≥ 2` via Borwein's accelerated alternating series
/// for the eta function, ζ(s) = η(s) / (1 − 2^(1−s)).
///
/// With `n` terms the error in η(s) is at most 3 / (3 + √8)^n.
fn zeta_odd(s: u32, prec: u32) -> Real {
    assert!(s >= 2);
    let p = prec + 16;
    // (3 + √8)^n ≥ 3 · 2^p
    let rate = (3.0f64 + 8.0f64.sqrt()).log2();
    let n = ((p as f64 + 2.0) / rate).ceil() as u32 + 1;

    // d_k = n Σ_{i≤k} (n+i−1)! 4^i / ((n−i)! (2i)!), all integers.
    let mut d = Vec::with_capacity(n as usize + 1);
    let mut term = Integer::from(1);
    let mut acc = Integer::from(1);
    d.push(acc.clone());
    for i in 1..=n {
        term *= 4u32 * (n + i - 1) * (n - i + 1);
        let den = Integer::from(2u64 * i as u64 * (2 * i as u64 - 1));
        let rem = Integer::from(&term % &den);
        debug_assert!(rem == 0, "Borwein coefficient not integral");
        term /= den;
        acc += &term;
        d.push(acc.clone());
    }
    let dn = &d[n as usize];

    // headroom for the alternating cancellation
    let wp = p + dn.significant_bits() / 2 + 16;
    let mut sum = Float::with_val(wp, 0);
    for k in 0..n {
        let diff = Integer::from(&d[k as usize] - dn);
        let mut t = Float::with_val(wp, &diff);
        let kp1 = Float::with_val(wp, k + 1).pow(s);
        t /= &kp1;
        if k % 2 == 0 {
            sum += &t;
        } else {
            sum -= &t;
        }
    }
    let eta = -sum / Float::with_val(wp, dn);
    let factor = 1 - Float::with_val(wp, Float::u_exp(1, 1 - s as i32));
    Float::with_val(prec, eta / factor)
}

/// Catalan's constant from K = (π/8)·ln(2+√3) + (3/8)·Σ_{n≥0} (n!)²/((2n)!(2n+1)²).
///
/// The ratio of consecutive terms tends to 1/4, so every term gains about
/// two bits.
fn catalan(prec: u32) -> Real {
    let p = prec + 16;
    let tol = Float::with_val(p, Float::u_exp(1, -(p as i32) - 4));
    // t_n = (n!)² / (2n)!, t_n / t_{n−1} = n / (2(2n−1))
    let mut t = Float::with_val(p, 1);
    let mut sum = Float::with_val(p, 1);
    let mut n: u64 = 1;
    loop {
        t *= n;
        t /= 2 * (2 * n - 1);
        let term = Float::with_val(p, &t / ((2 * n + 1) * (2 * n + 1)));
        sum += &term;
        if term < tol {
            break;
        }
        n += 1;
    }
    let log_term = pi(p) / 8u32 * (Float::with_val(p, 3).sqrt() + 2u32).ln();
    Float::with_val(prec, log_term + sum * 3u32 / 8u32)
}
