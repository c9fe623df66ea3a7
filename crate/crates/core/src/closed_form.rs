//! Closed-form expressions over rationals and named constants.
//!
//! Text syntax, used by the identity catalog:
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" exponent)?
//! exponent := int | "-" int | "(" ["-"] int "/" int ")"
//! atom  := int | constant | ("ln" | "exp" | "sqrt") "(" expr ")" | "(" expr ")"
//! ```
//!
//! Literal arithmetic (`7/4`, `-3`) folds into a single rational literal.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rug::ops::Pow;
use rug::Float;

use crate::constants::{constant_at, NamedConstant};
use crate::context::{rational_to_real, PrecisionContext, Real};
use crate::error::{Error, Result};

/// Bits carried beyond the working precision while evaluating a tree.
const EVAL_EXTRA_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    Lit(Rational64),
    Const(NamedConstant),
    Add(Box<ClosedForm>, Box<ClosedForm>),
    Sub(Box<ClosedForm>, Box<ClosedForm>),
    Mul(Box<ClosedForm>, Box<ClosedForm>),
    Div(Box<ClosedForm>, Box<ClosedForm>),
    Neg(Box<ClosedForm>),
    Pow(Box<ClosedForm>, Rational64),
    Ln(Box<ClosedForm>),
    Exp(Box<ClosedForm>),
    Sqrt(Box<ClosedForm>),
}

impl ClosedForm {
    pub fn int(n: i64) -> Self {
        ClosedForm::Lit(Rational64::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ClosedForm::Lit(r) if *r == Rational64::from_integer(0))
    }

    /// Value at the working precision of `ctx`.
    pub fn evaluate(&self, ctx: &PrecisionContext) -> Result<Real> {
        let v = self.eval_at(ctx.working_bits() + EVAL_EXTRA_BITS)?;
        Ok(Float::with_val(ctx.working_bits(), v))
    }

    /// Value at an explicit binary precision.
    pub fn eval_at(&self, prec: u32) -> Result<Real> {
        use ClosedForm::*;
        Ok(match self {
            Lit(r) => rational_to_real(r, prec),
            Const(c) => constant_at(*c, prec),
            Add(a, b) => a.eval_at(prec)? + b.eval_at(prec)?,
            Sub(a, b) => a.eval_at(prec)? - b.eval_at(prec)?,
            Mul(a, b) => a.eval_at(prec)? * b.eval_at(prec)?,
            Div(a, b) => {
                let d = b.eval_at(prec)?;
                if d.is_zero() {
                    return Err(Error::arg(format!("division by zero in {self}")));
                }
                a.eval_at(prec)? / d
            }
            Neg(a) => -a.eval_at(prec)?,
            Pow(a, e) => power(a.eval_at(prec)?, *e, self)?,
            Ln(a) => {
                let v = a.eval_at(prec)?;
                if v <= 0 {
                    return Err(Error::arg(format!(
                        "logarithm of a non-positive value in {self}"
                    )));
                }
                v.ln()
            }
            Exp(a) => a.eval_at(prec)?.exp(),
            Sqrt(a) => {
                let v = a.eval_at(prec)?;
                if v < 0 {
                    return Err(Error::arg(format!(
                        "square root of a negative value in {self}"
                    )));
                }
                v.sqrt()
            }
        })
    }

    fn precedence(&self) -> u8 {
        use ClosedForm::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Lit(r) if *r.numer() < 0 => 3,
            Lit(r) if !r.is_integer() => 2,
            Neg(..) => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }

    fn starts_negative(&self) -> bool {
        use ClosedForm::*;
        match self {
            Lit(r) => *r.numer() < 0,
            Neg(..) => true,
            Add(a, _) | Sub(a, _) | Mul(a, _) | Div(a, _) => a.starts_negative(),
            _ => false,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8, leading: bool) -> fmt::Result {
        if self.precedence() < min || (!leading && self.starts_negative()) {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn power(base: Real, e: Rational64, expr: &ClosedForm) -> Result<Real> {
    let (p, q) = (*e.numer(), *e.denom());
    if q == 1 {
        return Ok(base.pow(p as i32));
    }
    if base < 0 {
        return Err(Error::arg(format!(
            "fractional power of a negative value in {expr}"
        )));
    }
    Ok(base.root(q as u32).pow(p as i32))
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: Rational64) -> fmt::Result {
    if e.is_integer() {
        write!(f, "^{}", e.numer())
    } else {
        write!(f, "^({}/{})", e.numer(), e.denom())
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ClosedForm::*;
        match self {
            Lit(r) => write!(f, "{r}"),
            Const(c) => write!(f, "{c}"),
            Add(a, b) | Sub(a, b) => {
                a.write_child(f, 1, true)?;
                f.write_str(if matches!(self, Add(..)) {
                    " + "
                } else {
                    " - "
                })?;
                b.write_child(f, 2, false)
            }
            Mul(a, b) | Div(a, b) => {
                a.write_child(f, 2, true)?;
                f.write_str(if matches!(self, Mul(..)) { "*" } else { "/" })?;
                b.write_child(f, 3, false)
            }
            Neg(a) => {
                f.write_str("-")?;
                a.write_child(f, 4, false)
            }
            Pow(a, e) => {
                a.write_child(f, 5, false)?;
                write_exponent(f, *e)
            }
            Ln(a) => write!(f, "ln({a})"),
            Exp(a) => write!(f, "exp({a})"),
            Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

impl FromStr for ClosedForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<ClosedForm> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = ClosedForm::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = ClosedForm::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ClosedForm> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = ClosedForm::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                let rhs = self.unary()?;
                lhs = match (lhs, rhs) {
                    (ClosedForm::Lit(a), ClosedForm::Lit(b))
                        if b != Rational64::from_integer(0) =>
                    {
                        ClosedForm::Lit(a / b)
                    }
                    (a, b) => ClosedForm::Div(Box::new(a), Box::new(b)),
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ClosedForm> {
        if self.eat('-') {
            return Ok(match self.unary()? {
                ClosedForm::Lit(r) => ClosedForm::Lit(-r),
                e => ClosedForm::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<ClosedForm> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exponent = if self.eat('(') {
            let neg = self.eat('-');
            let p = self.integer()?;
            self.expect('/')?;
            let q = self.integer()?;
            self.expect(')')?;
            if q == 0 {
                return Err(self.error("zero denominator in exponent"));
            }
            Rational64::new(if neg { -p } else { p }, q)
        } else {
            let neg = self.eat('-');
            let p = self.integer()?;
            Rational64::from_integer(if neg { -p } else { p })
        };
        Ok(ClosedForm::Pow(Box::new(base), exponent))
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("expected an integer"))
    }

    fn atom(&mut self) -> Result<ClosedForm> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(ClosedForm::int(self.integer()?)),
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.bump();
                }
                let name = &self.src[start..self.pos];
                let func: Option<fn(Box<ClosedForm>) -> ClosedForm> = match name {
                    "ln" => Some(ClosedForm::Ln),
                    "exp" => Some(ClosedForm::Exp),
                    "sqrt" => Some(ClosedForm::Sqrt),
                    _ => None,
                };
                if let Some(func) = func {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(func(Box::new(arg)));
                }
                name.parse::<NamedConstant>()
                    .map(ClosedForm::Const)
                    .map_err(|_| self.error(&format!("unknown name `{name}`")))
            }
            _ => Err(self.error("expected a number, constant, function or `(`")),
        }
    }
}
