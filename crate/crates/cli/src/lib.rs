//! The `qverify` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 insufficient numeric headroom.

pub mod records;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Integer;
use serde::Serialize;

use qverify::arith::partition_oracle;
use qverify::closed_form::ClosedForm;
use qverify::context::{default_guard, format_fixed, make_context, PrecisionContext, Real};
use qverify::error::Error;
use qverify::hunt::hunt_near_integers;
use qverify::partition::{
    checksum, expansion_with_constant, hr_estimate, F10_PRINTED, MAX_EXPANSION_COUNT,
};
use qverify::pslq::{pslq, rediscover_identity, PslqOutcome, RelationProblem};
use qverify::rational::parse_rational;
use qverify::registry::{builtin_registry, parse_series, Kind, Registry};
use qverify::series::{evaluate, Convention, SeriesSpec};
use qverify::verify::{verify_all, VerificationReport, MIN_VERIFY_DIGITS};

use records::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

/// Digits required by `partition --method expansion`.
pub const EXPANSION_CLI_DIGITS: u32 = 2850;

/// Largest `--max-coeff` accepted; coefficients are reported as JSON integers.
const MAX_COEFF_DIGITS: u32 = 15;

#[derive(Debug, Parser)]
#[command(
    name = "qverify",
    version,
    about = "High-precision q-series identity checker"
)]
pub struct Cli {
    /// Target decimal digits.
    #[arg(long, global = true, default_value_t = 100)]
    pub digits: u32,

    /// Guard digits [default: 20, or 50 above 500 digits].
    #[arg(long, global = true)]
    pub guard: Option<u32>,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Identity catalog to use instead of the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    pub catalog: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify catalog identities.
    Verify(VerifyArgs),
    /// Evaluate one series.
    Eval(EvalArgs),
    /// Search a Farey set for near-integer lambert values.
    Hunt(HuntArgs),
    /// Partition numbers p(0..=n) or the asymptotic estimate of p(n).
    Partition(PartitionArgs),
    /// Integer relation search.
    Relation(RelationArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated identity ids, or `all`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub id: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Lambert,
    Cosh,
    SigmaExp,
    EulerF,
    RrJ,
    Eisenstein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Pi,
    #[value(name = "two_pi")]
    TwoPi,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Exponent (lambert, cosh, sigma-exp).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<i32>,
    /// Scale as `P/Q`; the nome argument for eisenstein.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// Eisenstein weight (4, 8 or 12).
    #[arg(long)]
    pub weight: Option<u32>,
    #[arg(long, value_enum, default_value = "pi")]
    pub convention: ConventionArg,
}

#[derive(Debug, Args)]
pub struct HuntArgs {
    /// Exponent: -3, -7 or -11.
    #[arg(long, allow_hyphen_values = true)]
    pub s: i32,
    /// Farey order.
    #[arg(long)]
    pub farey: u32,
    /// Minimum nearness in digits.
    #[arg(long, default_value_t = 12.0)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Expansion,
    Oracle,
    Estimate,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "oracle")]
    pub method: Method,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["values", "template"]))]
pub struct RelationArgs {
    /// Comma-separated values: rationals, constants (pi, π, sqrt2, √3, ...),
    /// closed-form expressions or series such as `lambert(1, 2)`.
    #[arg(long)]
    pub values: Option<String>,
    /// Linear exact catalog identity whose coefficients to rediscover.
    #[arg(long)]
    pub template: Option<String>,
    /// Decimal digits of the largest coefficient searched (values only).
    #[arg(long, default_value_t = 6)]
    pub max_coeff: u32,
}

/// A failure with its exit code; the message goes to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code_for(&e),
            message: e.to_string(),
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::PrecisionTooLow(_) => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

/// Text for stdout, diagnostics for stderr, and the exit code.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                Output {
                    stdout: text,
                    ..Output::default()
                }
            } else {
                Output {
                    stderr: text,
                    code: EXIT_USAGE,
                    ..Output::default()
                }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Output {
    let mut out = Output::default();
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(cli, a, &mut out),
        Command::Eval(a) => cmd_eval(cli, a, &mut out),
        Command::Hunt(a) => cmd_hunt(cli, a, &mut out),
        Command::Partition(a) => cmd_partition(cli, a, &mut out),
        Command::Relation(a) => cmd_relation(cli, a, &mut out),
    };
    if let Err(f) = result {
        let _ = writeln!(out.stderr, "error: {}", f.message);
        out.code = f.code;
    }
    out
}

fn context(cli: &Cli) -> Result<PrecisionContext, Failure> {
    let guard = cli.guard.unwrap_or_else(|| default_guard(cli.digits));
    Ok(make_context(cli.digits, guard)?)
}

fn config(cli: &Cli, ctx: &PrecisionContext, options: &[(&str, String)]) -> Config {
    Config {
        digits: ctx.decimal_digits(),
        guard: ctx.guard_digits(),
        catalog: cli.catalog.as_ref().map(|p| p.display().to_string()),
        options: options
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect::<BTreeMap<_, _>>(),
    }
}

fn emit_json<R: Serialize>(out: &mut Output, command: &str, config: Config, results: Vec<R>) {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        config,
        results,
    };
    out.stdout = serde_json::to_string_pretty(&env).expect("records serialize");
    out.stdout.push('\n');
}

fn registry(cli: &Cli) -> Result<Registry, Failure> {
    match &cli.catalog {
        None => Ok(builtin_registry().clone()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(Registry::from_catalog(&text)?)
        }
    }
}

fn sci(x: &Real) -> String {
    x.to_string_radix(10, Some(4))
}

fn verify_record(r: &VerificationReport) -> VerifyRecord {
    let (kind, expected_digits) = match r.kind {
        Kind::Exact => ("exact", None),
        Kind::Approx(d) => ("approx", Some(d)),
    };
    VerifyRecord {
        id: r.id.clone(),
        kind: kind.into(),
        expected_digits,
        decimal_digits: r.decimal_digits,
        guard_digits: r.guard_digits,
        digits_agree: round_to(r.digits_agree, 2),
        passed: r.passed,
        flagged: r.flagged,
        selected: r.selected.clone(),
        selected_form: r.selected_form.clone(),
        lhs: format_fixed(&r.lhs_value, r.decimal_digits),
        rhs: format_fixed(&r.rhs_value, r.decimal_digits),
        wall_time: round_to(r.wall_time, 6),
        candidates: r
            .candidates
            .iter()
            .map(|c| CandidateRecord {
                label: c.label.clone(),
                as_printed: c.as_printed,
                form: c.form.clone(),
                digits_agree: round_to(c.digits_agree, 2),
                error: c.error.clone(),
            })
            .collect(),
    }
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, out: &mut Output) -> Result<(), Failure> {
    if cli.digits < MIN_VERIFY_DIGITS {
        return Err(Failure::usage(format!(
            "verify needs --digits of at least {MIN_VERIFY_DIGITS}"
        )));
    }
    let ctx = context(cli)?;
    let registry = registry(cli)?;
    let ids: Vec<String> = if args.id.iter().any(|i| i == "all") {
        registry.ids().map(str::to_string).collect()
    } else {
        args.id.clone()
    };
    for id in &ids {
        registry.get(id)?;
    }
    let reports = verify_all(&registry, Some(&ids), &ctx);
    let mut records = Vec::new();
    let mut code = EXIT_OK;
    for (id, r) in ids.iter().zip(reports) {
        match r {
            Ok(r) => {
                if !r.passed {
                    code = code.max(EXIT_FAILED);
                }
                if r.flagged {
                    let _ = writeln!(
                        out.stderr,
                        "warning: {}: printed form does not hold; reading `{}` selected",
                        r.id, r.selected
                    );
                }
                records.push(verify_record(&r));
            }
            Err(e) => {
                let _ = writeln!(out.stderr, "error: {id}: {e}");
                code = code.max(match e {
                    Error::PrecisionTooLow(_) => EXIT_PRECISION,
                    _ => EXIT_FAILED,
                });
            }
        }
    }
    if cli.json {
        let cfg = config(cli, &ctx, &[("id", args.id.join(","))]);
        emit_json(out, "verify", cfg, records);
    } else {
        let s = &mut out.stdout;
        let _ = writeln!(
            s,
            "{:<6} {:<10} {:>6} {:>8}  {:<6} reading",
            "id", "kind", "digits", "agree", "status"
        );
        for r in &records {
            let kind = match r.expected_digits {
                Some(d) => format!("approx {d}"),
                None => r.kind.clone(),
            };
            let status = if r.passed { "PASS" } else { "FAIL" };
            let mark = if r.flagged { "  [flagged]" } else { "" };
            let _ = writeln!(
                s,
                "{:<6} {:<10} {:>6} {:>8.2}  {:<6} {}{}",
                r.id, kind, r.decimal_digits, r.digits_agree, status, r.selected, mark
            );
        }
    }
    out.code = code;
    Ok(())
}

fn spec_from_args(a: &EvalArgs) -> Result<SeriesSpec, Failure> {
    let alpha = parse_rational(&a.alpha)?;
    let need_s = || {
        a.s.ok_or_else(|| Failure::usage("--s is required for this family"))
    };
    let spec = match a.family {
        Family::Lambert => SeriesSpec::lambert(need_s()?, alpha),
        Family::Cosh => SeriesSpec::cosh(need_s()?, alpha),
        Family::SigmaExp => {
            let s = u32::try_from(need_s()?)
                .map_err(|_| Failure::usage("--s must be non-negative for sigma-exp"))?;
            SeriesSpec::sigma_exp(s, alpha)
        }
        Family::EulerF => SeriesSpec::euler_f(alpha),
        Family::RrJ => SeriesSpec::rr_j(alpha),
        Family::Eisenstein => {
            let weight = a
                .weight
                .ok_or_else(|| Failure::usage("--weight is required for eisenstein"))?;
            let convention = match a.convention {
                ConventionArg::Pi => Convention::PiScale,
                ConventionArg::TwoPi => Convention::TwoPiScale,
            };
            SeriesSpec::eisenstein(weight, alpha, convention)
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_eval(cli: &Cli, args: &EvalArgs, out: &mut Output) -> Result<(), Failure> {
    let spec = spec_from_args(args)?;
    let ctx = context(cli)?;
    let value = evaluate(&spec, &ctx)?;
    let record = EvalRecord {
        spec: spec.to_string(),
        value: format_fixed(&value, ctx.decimal_digits()),
    };
    if cli.json {
        let cfg = config(cli, &ctx, &[("spec", record.spec.clone())]);
        emit_json(out, "eval", cfg, vec![record]);
    } else {
        let _ = writeln!(out.stdout, "{} = {}", record.spec, record.value);
    }
    Ok(())
}

fn cmd_hunt(cli: &Cli, args: &HuntArgs, out: &mut Output) -> Result<(), Failure> {
    let ctx = context(cli)?;
    let hits = hunt_near_integers(args.s, args.farey, args.threshold, &ctx)?;
    let records: Vec<HitRecord> = hits
        .iter()
        .map(|h| HitRecord {
            f: h.f.to_string(),
            alpha: h.alpha.to_string(),
            s: h.s,
            value: format_fixed(&h.value, ctx.decimal_digits()),
            nearest: h.nearest.to_string(),
            nearness_digits: round_to(h.nearness_digits, 2),
            integer_nearness_digits: round_to(h.integer_nearness_digits, 2),
            advisory: h.advisory,
        })
        .collect();
    if cli.json {
        let cfg = config(
            cli,
            &ctx,
            &[
                ("s", args.s.to_string()),
                ("farey", args.farey.to_string()),
                ("threshold", args.threshold.to_string()),
            ],
        );
        emit_json(out, "hunt", cfg, records);
    } else {
        let s = &mut out.stdout;
        let _ = writeln!(
            s,
            "{:<9} {:<9} {:>10} {:>9} {:>9}  240|k^4-1",
            "f", "alpha", "nearest", "nearness", "integer"
        );
        for r in &records {
            let adv = match r.advisory {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            };
            let _ = writeln!(
                s,
                "{:<9} {:<9} {:>10} {:>9.2} {:>9.2}  {}",
                r.f, r.alpha, r.nearest, r.nearness_digits, r.integer_nearness_digits, adv
            );
        }
        if records.is_empty() {
            let _ = writeln!(out.stderr, "no hits at threshold {}", args.threshold);
        }
    }
    Ok(())
}

fn cmd_partition(cli: &Cli, args: &PartitionArgs, out: &mut Output) -> Result<(), Failure> {
    let n = args.n;
    let mut records = Vec::new();
    let ctx;
    match args.method {
        Method::Oracle => {
            ctx = context(cli)?;
            let n = usize::try_from(n).map_err(|_| Failure::usage("--n too large"))?;
            for (i, p) in partition_oracle(n).into_iter().enumerate() {
                records.push(PartitionRecord {
                    n: i as u64,
                    value: p.to_string(),
                    ratio: None,
                });
            }
        }
        Method::Expansion => {
            if n == 0 || n > MAX_EXPANSION_COUNT as u64 {
                return Err(Failure::usage(format!(
                    "expansion covers 1 <= n <= {MAX_EXPANSION_COUNT}; use --method oracle"
                )));
            }
            if cli.digits < EXPANSION_CLI_DIGITS {
                return Err(Failure::usage(format!(
                    "expansion needs --digits of at least {EXPANSION_CLI_DIGITS}"
                )));
            }
            ctx = context(cli)?;
            let (values, constant) = expansion_with_constant(n as usize, &ctx)?;
            for (i, p) in values.into_iter().enumerate() {
                records.push(PartitionRecord {
                    n: i as u64,
                    value: p.to_string(),
                    ratio: None,
                });
            }
            let c = checksum(&constant, F10_PRINTED)?;
            let _ = writeln!(
                out.stderr,
                "checksum F(10) against {}: {} (agreement {:.2} digits)",
                c.printed,
                if c.matches { "match" } else { "MISMATCH" },
                c.agreement
            );
        }
        Method::Estimate => {
            ctx = context(cli)?;
            let estimate = hr_estimate(n, &ctx)?;
            let exact = usize::try_from(n)
                .ok()
                .filter(|&n| n <= 100_000)
                .and_then(|n| partition_oracle(n).pop());
            let ratio = exact.map(|p| {
                let p = ctx.real(&p);
                round_to(
                    Real::with_val(ctx.working_bits(), &estimate / &p).to_f64(),
                    12,
                )
            });
            records.push(PartitionRecord {
                n,
                value: format_fixed(&estimate, 6),
                ratio,
            });
        }
    }
    if cli.json {
        let method = args
            .method
            .to_possible_value()
            .expect("named")
            .get_name()
            .to_string();
        let cfg = config(cli, &ctx, &[("n", n.to_string()), ("method", method)]);
        emit_json(out, "partition", cfg, records);
    } else {
        for r in &records {
            match r.ratio {
                Some(q) => {
                    let _ = writeln!(out.stdout, "{} {} ratio={q}", r.n, r.value);
                }
                None => {
                    let _ = writeln!(out.stdout, "{} {}", r.n, r.value);
                }
            }
        }
    }
    Ok(())
}

/// Splits on commas outside parentheses.
fn split_values(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    parts.push(cur);
    parts.into_iter().map(|p| p.trim().to_string()).collect()
}

/// Rewrites `√x` as `sqrt(x)` for a number, name or parenthesised operand.
fn expand_radicals(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != '√' {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        i += 1;
        if chars.get(i) == Some(&'(') {
            out.push_str("sqrt");
            continue;
        }
        let start = i;
        while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
            i += 1;
        }
        let operand: String = chars[start..i].iter().collect();
        let _ = write!(out, "sqrt({operand})");
    }
    out
}

fn parse_value(text: &str, ctx: &PrecisionContext) -> Result<Real, Failure> {
    let looks_like_series = text.split_once('(').is_some_and(|(head, _)| {
        !matches!(head.trim(), "" | "ln" | "exp" | "sqrt")
            && head.chars().all(|c| c.is_alphanumeric() || c == '_')
    });
    if looks_like_series {
        if let Ok(spec) = parse_series(text) {
            return Ok(evaluate(&spec, ctx)?);
        }
    }
    let form: ClosedForm = expand_radicals(text)
        .parse()
        .map_err(|e: Error| Failure::usage(format!("cannot read value `{text}`: {e}")))?;
    Ok(form.evaluate(ctx)?)
}

fn to_i64(v: &[Integer]) -> Result<Vec<i64>, Failure> {
    v.iter()
        .map(|c| {
            c.to_i64().ok_or_else(|| {
                Failure::usage(format!("coefficient {c} exceeds the reporting range"))
            })
        })
        .collect()
}

fn cmd_relation(cli: &Cli, args: &RelationArgs, out: &mut Output) -> Result<(), Failure> {
    let ctx = context(cli)?;
    let record = if let Some(id) = &args.template {
        let registry = registry(cli)?;
        let found = rediscover_identity(registry.get(id)?, &ctx)?;
        let expected = found
            .matched
            .as_ref()
            .and_then(|m| found.expected.iter().find(|(l, _)| l == m))
            .or_else(|| found.expected.first())
            .map(|(_, v)| to_i64(v))
            .transpose()?;
        if found.matched.is_none() {
            let _ = writeln!(
                out.stderr,
                "warning: {id}: relation found does not match any catalog reading"
            );
        } else if found.flagged {
            let _ = writeln!(
                out.stderr,
                "warning: {id}: relation matches reading `{}`, not the printed form",
                found.matched.as_deref().unwrap_or_default()
            );
        }
        RelationRecord {
            status: "relation".into(),
            labels: found.labels.clone(),
            coefficients: Some(to_i64(&found.relation.coefficients)?),
            residual: Some(sci(&found.relation.residual)),
            bound: None,
            expected,
            matched: found.matched.clone(),
            flagged: found.flagged || found.matched.is_none(),
        }
    } else {
        if args.max_coeff == 0 || args.max_coeff > MAX_COEFF_DIGITS {
            return Err(Failure::usage(format!(
                "--max-coeff must be between 1 and {MAX_COEFF_DIGITS}"
            )));
        }
        let texts = split_values(args.values.as_deref().unwrap_or_default());
        if texts.len() < 2 {
            return Err(Failure::usage("need at least two values"));
        }
        let values = texts
            .iter()
            .map(|t| parse_value(t, &ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let problem = RelationProblem::new(values, args.max_coeff, ctx)?;
        match pslq(&problem)? {
            PslqOutcome::Relation(r) => RelationRecord {
                status: "relation".into(),
                labels: texts,
                coefficients: Some(to_i64(&r.coefficients)?),
                residual: Some(sci(&r.residual)),
                bound: None,
                expected: None,
                matched: None,
                flagged: false,
            },
            PslqOutcome::NoRelation { bound } => RelationRecord {
                status: "no-relation".into(),
                labels: texts,
                coefficients: None,
                residual: None,
                bound: Some(sci(&bound)),
                expected: None,
                matched: None,
                flagged: false,
            },
        }
    };
    if cli.json {
        let mut opts = vec![("max_coeff", args.max_coeff.to_string())];
        if let Some(t) = &args.template {
            opts.push(("template", t.clone()));
        }
        if let Some(v) = &args.values {
            opts.push(("values", v.clone()));
        }
        emit_json(out, "relation", config(cli, &ctx, &opts), vec![record]);
    } else {
        let s = &mut out.stdout;
        match &record.coefficients {
            Some(c) => {
                let list: Vec<String> = c.iter().map(i64::to_string).collect();
                let _ = writeln!(s, "{}", list.join(", "));
                for (l, c) in record.labels.iter().zip(c) {
                    let _ = writeln!(s, "  {c:>8}  {l}");
                }
                let _ = writeln!(
                    s,
                    "residual {}",
                    record.residual.as_deref().unwrap_or_default()
                );
                if let Some(m) = &record.matched {
                    let mark = if record.flagged { " [flagged]" } else { "" };
                    let _ = writeln!(s, "matches reading {m}{mark}");
                } else if record.expected.is_some() {
                    let _ = writeln!(s, "MISMATCH with catalog [flagged]");
                }
            }
            None => {
                let _ = writeln!(
                    s,
                    "NO-RELATION (no relation with norm below {})",
                    record.bound.as_deref().unwrap_or_default()
                );
            }
        }
    }
    Ok(())
}
