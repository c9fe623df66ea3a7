//! The identity catalog: every identity and approximation as data.
//!
//! The built-in catalog lives in `catalog.txt` and is parsed at first use.
//! Each identity carries one or more readings.  A reading marked `printed`
//! is the form exactly as published; other readings are alternatives for
//! forms whose typography is garbled or ambiguous.  Verification picks the
//! reading that agrees and reports which one it was.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use num_rational::Rational64;

use crate::closed_form::ClosedForm;
use crate::error::{Error, Result};
use crate::rational::parse_rational;
use crate::series::{Convention, SeriesSpec};

const BUILTIN_CATALOG: &str = include_str!("catalog.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Exact,
    /// Holds to roughly this many digits and no further.
    Approx(u32),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Exact => f.write_str("exact"),
            Kind::Approx(d) => write!(f, "approx {d}"),
        }
    }
}

/// One factor or summand of a series side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coefficient: Rational64,
    pub spec: SeriesSpec,
    /// Exponent on the factor in a product; 1 in a linear combination.
    pub power: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Combination {
    /// Σ coefficient · value
    Linear(Vec<Term>),
    /// Π value^power
    Product(Vec<Term>),
}

impl Combination {
    pub fn terms(&self) -> &[Term] {
        match self {
            Combination::Linear(t) | Combination::Product(t) => t,
        }
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Combination::Linear(terms) => {
                f.write_str("sum ")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{} {}", t.coefficient, t.spec)?;
                }
            }
            Combination::Product(terms) => {
                f.write_str("prod ")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{}^{}", t.spec, t.power)?;
                }
            }
        }
        Ok(())
    }
}

/// One reading of an identity: `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reading {
    pub label: String,
    pub as_printed: bool,
    pub lhs: ClosedForm,
    pub rhs: Combination,
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub id: String,
    pub kind: Kind,
    pub readings: Vec<Reading>,
}

impl Identity {
    /// The as-printed reading, if the published form is readable at all.
    pub fn printed(&self) -> Option<&Reading> {
        self.readings.iter().find(|r| r.as_printed)
    }

    /// The as-printed reading, or the first alternative.
    pub fn primary(&self) -> &Reading {
        self.printed().unwrap_or(&self.readings[0])
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.primary().rhs, Combination::Linear(_))
    }

    fn validate(&self) -> Result<()> {
        let err = |m: String| Error::arg(format!("identity {}: {m}", self.id));
        if self.readings.is_empty() {
            return Err(err("no readings".into()));
        }
        if self.readings.iter().filter(|r| r.as_printed).count() > 1 {
            return Err(err("more than one printed reading".into()));
        }
        let mut labels = HashSet::new();
        for r in &self.readings {
            if !labels.insert(r.label.as_str()) {
                return Err(err(format!("duplicate reading label `{}`", r.label)));
            }
            if r.rhs.terms().is_empty() {
                return Err(err("empty series side".into()));
            }
            for t in r.rhs.terms() {
                t.spec.validate()?;
                if t.coefficient == Rational64::from_integer(0) {
                    return Err(err(format!("zero coefficient on {}", t.spec)));
                }
                if matches!(r.rhs, Combination::Product(_)) && t.power == 0 {
                    return Err(err(format!("zero power on {}", t.spec)));
                }
            }
        }
        Ok(())
    }
}

/// An immutable, ordered collection of identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    identities: Vec<Identity>,
}

impl Registry {
    pub fn new(identities: Vec<Identity>) -> Result<Self> {
        let mut ids = HashSet::new();
        for identity in &identities {
            identity.validate()?;
            if !ids.insert(identity.id.clone()) {
                return Err(Error::arg(format!(
                    "duplicate identity id `{}`",
                    identity.id
                )));
            }
        }
        Ok(Registry { identities })
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn get(&self, id: &str) -> Result<&Identity> {
        self.identities
            .iter()
            .find(|i| i.id == id)
            .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.identities.iter().map(|i| i.id.as_str())
    }

    pub fn from_catalog(text: &str) -> Result<Self> {
        Self::new(parse_catalog(text)?)
    }

    /// Line-oriented text form; [`Registry::from_catalog`] reads it back.
    pub fn to_catalog(&self) -> String {
        let mut out = String::new();
        for (i, identity) in self.identities.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{}] {}\n", identity.id, identity.kind));
            for r in &identity.readings {
                if r.as_printed {
                    out.push_str(&format!("printed: {r}\n"));
                } else {
                    out.push_str(&format!("reading {}: {r}\n", r.label));
                }
            }
        }
        out
    }
}

/// The built-in catalog.
pub fn builtin_registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY
        .get_or_init(|| Registry::from_catalog(BUILTIN_CATALOG).expect("built-in catalog is valid"))
}

fn catalog_error(line: usize, message: impl Into<String>) -> Error {
    Error::Catalog {
        line,
        message: message.into(),
    }
}

pub fn parse_catalog(text: &str) -> Result<Vec<Identity>> {
    let mut out: Vec<Identity> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let (id, kind) = rest
                .split_once(']')
                .ok_or_else(|| catalog_error(line_no, "unterminated `[`"))?;
            let kind = parse_kind(kind.trim()).map_err(|m| catalog_error(line_no, m))?;
            out.push(Identity {
                id: id.trim().to_string(),
                kind,
                readings: Vec::new(),
            });
            continue;
        }
        let identity = out
            .last_mut()
            .ok_or_else(|| catalog_error(line_no, "reading before any `[id]` header"))?;
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| catalog_error(line_no, "expected `printed:` or `reading <label>:`"))?;
        let (label, as_printed) = match head.trim() {
            "printed" => ("printed".to_string(), true),
            h => match h.strip_prefix("reading ") {
                Some(l) if !l.trim().is_empty() => (l.trim().to_string(), false),
                _ => return Err(catalog_error(line_no, format!("unknown line kind `{h}`"))),
            },
        };
        let reading = parse_reading(label, as_printed, body).map_err(|e| match e {
            Error::Catalog { .. } => e,
            other => catalog_error(line_no, other.to_string()),
        })?;
        identity.readings.push(reading);
    }
    Ok(out)
}

fn parse_kind(s: &str) -> std::result::Result<Kind, String> {
    let mut parts = s.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some("exact"), None, None) => Ok(Kind::Exact),
        (Some("approx"), Some(d), None) => d
            .parse()
            .ok()
            .filter(|d: &u32| *d > 0)
            .map(Kind::Approx)
            .ok_or_else(|| format!("bad digit count `{d}`")),
        _ => Err(format!("expected `exact` or `approx <digits>`, got `{s}`")),
    }
}

fn parse_reading(label: String, as_printed: bool, body: &str) -> Result<Reading> {
    let (lhs, rhs) = body
        .split_once('=')
        .ok_or_else(|| Error::Parse("expected `lhs = rhs`".into()))?;
    let lhs: ClosedForm = lhs.trim().parse()?;
    let rhs = rhs.trim();
    let rhs = if let Some(rest) = rhs.strip_prefix("sum ") {
        Combination::Linear(
            split_terms(rest)
                .map(parse_sum_term)
                .collect::<Result<_>>()?,
        )
    } else if let Some(rest) = rhs.strip_prefix("prod ") {
        Combination::Product(
            split_terms(rest)
                .map(parse_prod_term)
                .collect::<Result<_>>()?,
        )
    } else {
        return Err(Error::Parse(format!(
            "series side must start with `sum` or `prod`: `{rhs}`"
        )));
    };
    Ok(Reading {
        label,
        as_printed,
        lhs,
        rhs,
    })
}

fn split_terms(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').map(str::trim)
}

fn parse_sum_term(s: &str) -> Result<Term> {
    let (coef, spec) = s
        .split_once(char::is_whitespace)
        .ok_or_else(|| Error::Parse(format!("expected `<coefficient> <series>`, got `{s}`")))?;
    Ok(Term {
        coefficient: parse_rational(coef)?,
        spec: parse_series(spec.trim())?,
        power: 1,
    })
}

fn parse_prod_term(s: &str) -> Result<Term> {
    let close = s
        .rfind(')')
        .ok_or_else(|| Error::Parse(format!("expected a series factor, got `{s}`")))?;
    let (spec, rest) = s.split_at(close + 1);
    let power = match rest.trim() {
        "" => 1,
        p => p
            .strip_prefix('^')
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad power `{p}`")))?,
    };
    Ok(Term {
        coefficient: Rational64::from_integer(1),
        spec: parse_series(spec.trim())?,
        power,
    })
}

/// Parses the series syntax used by the catalog and the command line, e.g.
/// `lambert(-3, 2/7)`, `F(1/5)`, `E4(1/10, pi)`.
pub fn parse_series(s: &str) -> Result<SeriesSpec> {
    let bad = |m: &str| Error::Parse(format!("{m} in series `{s}`"));
    let open = s.find('(').ok_or_else(|| bad("missing `(`"))?;
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| bad("missing `)`"))?;
    let name = s[..open].trim();
    let args: Vec<&str> = inner.split(',').map(str::trim).collect();
    let int = |a: &str| {
        a.parse::<i32>()
            .map_err(|_| bad("expected an integer order"))
    };
    let spec = match (name, args.as_slice()) {
        ("lambert", [order, a]) => SeriesSpec::lambert(int(order)?, parse_rational(a)?),
        ("cosh", [order, a]) => SeriesSpec::cosh(int(order)?, parse_rational(a)?),
        ("sigma", [order, a]) => {
            let order = u32::try_from(int(order)?).map_err(|_| bad("negative order"))?;
            SeriesSpec::sigma_exp(order, parse_rational(a)?)
        }
        ("F", [a]) => SeriesSpec::euler_f(parse_rational(a)?),
        ("J", [a]) => SeriesSpec::rr_j(parse_rational(a)?),
        (e, [q, conv]) if e.starts_with('E') => {
            let weight: u32 = e[1..].parse().map_err(|_| bad("bad Eisenstein weight"))?;
            SeriesSpec::eisenstein(weight, parse_rational(q)?, Convention::parse(conv)?)
        }
        _ => return Err(bad("unknown series or wrong argument count")),
    };
    spec.validate()?;
    Ok(spec)
}
