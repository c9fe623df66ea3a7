//! Acceptance suite: one PASS/FAIL line per check, nonzero exit on any FAIL.
//!
//! Run with `cargo test -p qverify --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rug::{Float, Integer};

use qverify::arith::partition_oracle;
use qverify::constants::{constant, NamedConstant};
use qverify::context::{log10_abs, PrecisionContext, Real};
use qverify::hunt::hunt_near_integers;
use qverify::partition::{checksum, partitions_by_expansion, F10_PRINTED, F4_PRINTED};
use qverify::pslq::{normalize, pslq, rediscover, PslqOutcome, RelationProblem};
use qverify::registry::{builtin_registry, Identity, Kind};
use qverify::series::{
    euler_f, euler_product_direct, evaluate, evaluate_truncated, rr_j, truncation_index,
    Convention, SeriesSpec,
};
use qverify::verify::verify;

const LAMBERT_2_7_PRINTED: &str = "10.0000000000000000190161767888663";
const E4_TENTH_PRINTED: &str = "10000.00000000000000000000000012378";

struct Suite {
    failed: Vec<String>,
}

impl Suite {
    fn check(&mut self, label: &str, ok: bool, detail: impl AsRef<str>) -> bool {
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} [{label}] {}", detail.as_ref());
        if !ok {
            self.failed.push(label.to_string());
        }
        ok
    }
}

fn ctx(d: u32) -> PrecisionContext {
    PrecisionContext::with_default_guard(d).unwrap()
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn abs_diff(a: &Real, b: &Real) -> Real {
    let prec = a.prec().max(b.prec());
    Float::with_val(prec, a - b).abs()
}

/// `|a − b| < 10^(−d)`.
fn within(a: &Real, b: &Real, d: u32) -> bool {
    -log10_abs(&abs_diff(a, b)) > d as f64
}

fn in_ranges(id: &str, ranges: &[(&str, &str)]) -> bool {
    let key = |s: &str| -> (u32, u32) {
        let (a, b) = s.split_once('.').unwrap_or((s, "0"));
        (a.parse().unwrap_or(u32::MAX), b.parse().unwrap_or(u32::MAX))
    };
    let k = key(id);
    ranges.iter().any(|(lo, hi)| key(lo) <= k && k <= key(hi))
}

fn criterion_1(s: &mut Suite) {
    let ranges = [
        ("1.1", "1.12"),
        ("2.3", "2.8"),
        ("2.10", "2.14"),
        ("2.24", "2.26"),
    ];
    let entries: Vec<&Identity> = builtin_registry()
        .identities()
        .iter()
        .filter(|i| i.kind == Kind::Exact && in_ranges(&i.id, &ranges))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let start = Instant::now();
    for (d, min) in [(100u32, 80.0), (200, 180.0)] {
        let c = ctx(d);
        let (mut worst, mut worst_id, mut all) = (f64::INFINITY, String::new(), true);
        for identity in &entries {
            let report = pool.install(|| verify(identity, &c));
            let digits = report.as_ref().map_or(0.0, |r| r.digits_agree);
            if digits < worst {
                worst = digits;
                worst_id = identity.id.clone();
            }
            all &= report.is_ok_and(|r| r.passed) && digits >= min;
        }
        s.check(
            &format!("1.{d}"),
            all,
            format!("{} exact entries at {d} digits, minimum agreement {worst:.2} ({worst_id}) >= {min}", entries.len()),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    s.check(
        "1.time",
        secs < 300.0,
        format!("single-threaded total {secs:.2}s < 300s"),
    );
}

fn criterion_2(s: &mut Suite) {
    let c = ctx(100);
    for id in ["2.15", "2.19", "2.20", "2.21"] {
        let report = verify(builtin_registry().get(id).unwrap(), &c).unwrap();
        s.check(
            &format!("2.{id}"),
            report.passed && report.digits_agree >= 80.0,
            format!(
                "{id}: reading `{}`{} agrees to {:.2} digits",
                report.selected,
                if report.flagged {
                    " (not as printed)"
                } else {
                    ""
                },
                report.digits_agree
            ),
        );
    }
}

fn printed_match(s: &mut Suite, label: &str, name: &str, value: &Real, printed: &str) {
    let c = checksum(value, printed).unwrap();
    s.check(
        label,
        c.matches,
        format!(
            "{name} vs printed {printed} ({} digits): agreement {:.2} digits",
            c.printed_digits, c.agreement
        ),
    );
}

fn criterion_3(s: &mut Suite) {
    let c = ctx(60);
    let value = evaluate(&SeriesSpec::lambert(-3, r(2, 7)), &c).unwrap();
    printed_match(s, "3a", "lambert(-3, 2/7)", &value, LAMBERT_2_7_PRINTED);
    let value = evaluate(
        &SeriesSpec::eisenstein(4, r(1, 10), Convention::PiScale),
        &c,
    )
    .unwrap();
    printed_match(s, "3b", "E4(1/10, pi)", &value, E4_TENTH_PRINTED);

    let start = Instant::now();
    let hits = hunt_near_integers(-3, 163, 12.0, &ctx(470)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let hit = hits.iter().find(|h| h.f == r(1, 163));
    let nearness = hit.map_or(0.0, |h| h.nearness_digits);
    s.check(
        "3c",
        (nearness - 435.0).abs() <= 2.0,
        format!(
            "Farey 163 hunt: f=1/163 near {} at {nearness:.2} digits (435 ± 2), {} hits, {secs:.1}s",
            hit.map_or("-".to_string(), |h| h.nearest.to_string()),
            hits.len()
        ),
    );
}

fn criterion_4(s: &mut Suite) {
    let rows = [
        ("2.27", 4u32),
        ("2.28", 6),
        ("2.29", 35),
        ("2.30", 36),
        ("2.31", 48),
        ("2.32", 173),
    ];
    for (id, expected) in rows {
        let identity = builtin_registry().get(id).unwrap();
        let report = verify(identity, &ctx(expected + 40)).unwrap();
        let d = report.digits_agree;
        s.check(
            &format!("4.{id}"),
            (d - expected as f64).abs() <= 2.0,
            format!(
                "{id}: {d:.2} digits at {} digits, expected {expected} ± 2",
                expected + 40
            ),
        );
        let mut as_exact = identity.clone();
        as_exact.kind = Kind::Exact;
        let target = (expected + 8).max(30);
        let exact = verify(&as_exact, &ctx(target)).unwrap();
        s.check(
            &format!("4.{id}.inexact"),
            exact.digits_agree < target as f64 - 1.0,
            format!(
                "{id}: {:.2} digits at a {target}-digit context, short of exact",
                exact.digits_agree
            ),
        );
    }
}

fn criterion_5(s: &mut Suite) {
    let start = Instant::now();
    let expanded = partitions_by_expansion(205, &ctx(2850)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let oracle = partition_oracle(205);
    let first_diff = expanded.iter().zip(&oracle).position(|(a, b)| a != b);
    s.check(
        "5.oracle",
        expanded == oracle,
        format!(
            "expansion of 205 terms at 2850 digits vs recurrence, first difference {first_diff:?}"
        ),
    );
    s.check(
        "5.p200",
        expanded[200] == 3_972_999_029_388u64,
        format!("p(200) = {}", expanded[200]),
    );
    s.check(
        "5.time",
        secs < 120.0,
        format!("expansion took {secs:.2}s < 120s"),
    );
}

fn criterion_6(s: &mut Suite) {
    let c = ctx(60);
    let f10 = euler_f(r(10, 1), &c).unwrap();
    printed_match(s, "6a", "F(10)", &f10, F10_PRINTED);
    let f4 = euler_f(r(4, 1), &c).unwrap();
    printed_match(s, "6b", "F(4)", &f4, F4_PRINTED);
}

fn ints(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

fn criterion_7(s: &mut Suite) {
    let c = ctx(120);
    for id in ["1.1", "1.2", "1.4", "1.6", "1.8"] {
        match rediscover(id, &c) {
            Ok(found) => {
                let printed = found.expected.iter().find(|(l, _)| l == "printed");
                let exact = printed.is_some_and(|(_, v)| *v == found.relation.coefficients);
                let coefs: Vec<String> = found
                    .relation
                    .coefficients
                    .iter()
                    .map(|c| c.to_string())
                    .collect();
                s.check(
                    &format!("7.{id}"),
                    exact,
                    format!("{id}: ({})", coefs.join(", ")),
                );
            }
            Err(e) => {
                s.check(&format!("7.{id}"), false, format!("{id}: {e}"));
            }
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let c = ctx(80);
    let prec = c.working_bits();
    let mut recovered = 0;
    for _ in 0..20 {
        let m = rng.gen_range(3..=5usize);
        let mut coef: Vec<i64> = (0..m).map(|_| rng.gen_range(-500..=500)).collect();
        while coef[m - 1] == 0 {
            coef[m - 1] = rng.gen_range(-500..=500);
        }
        let mut values: Vec<Real> = (0..m - 1)
            .map(|_| Float::with_val(prec, rng.gen::<f64>() + 0.01))
            .collect();
        let mut partial = Float::with_val(prec, 0);
        for (v, k) in values.iter().zip(&coef) {
            partial += Float::with_val(prec, v * *k);
        }
        values.push(-partial / coef[m - 1]);
        let mut expected = ints(&coef);
        normalize(&mut expected);
        let problem = RelationProblem::new(values, 3, c).unwrap();
        if let Ok(PslqOutcome::Relation(rel)) = pslq(&problem) {
            if rel.coefficients == expected {
                recovered += 1;
            }
        }
    }
    s.check(
        "7.random",
        recovered == 20,
        format!("{recovered}/20 random relations recovered"),
    );
}

fn criterion_8(s: &mut Suite) {
    let d = 100;
    let c = ctx(d);

    let mut specs = Vec::new();
    for s_ in [-11, -3, -1, 1, 3, 5] {
        for a in [r(1, 5), r(2, 7), r(1, 1), r(4, 1)] {
            specs.push(SeriesSpec::lambert(s_, a));
        }
    }
    specs.extend([
        SeriesSpec::cosh(2, r(1, 1)),
        SeriesSpec::cosh(-3, r(2, 5)),
        SeriesSpec::sigma_exp(1, r(1, 2)),
        SeriesSpec::sigma_exp(3, r(1, 1)),
        SeriesSpec::eisenstein(4, r(1, 10), Convention::PiScale),
        SeriesSpec::eisenstein(12, r(2, 5), Convention::TwoPiScale),
    ]);
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for spec in &specs {
        let n = truncation_index(spec, &c).unwrap();
        let base = evaluate(spec, &c).unwrap();
        let doubled = evaluate_truncated(spec, &c, 2 * n).unwrap();
        let digits = -log10_abs(&abs_diff(&base, &doubled));
        worst = worst.min(digits);
        ok &= within(&base, &doubled, d);
    }
    s.check(
        "8.doubling",
        ok,
        format!(
            "{} series, doubled truncation moves values by at most 10^-{worst:.1}",
            specs.len()
        ),
    );

    let alphas = [
        r(1, 1),
        r(2, 1),
        r(4, 1),
        r(1, 5),
        r(2, 5),
        r(4, 5),
        r(10, 1),
    ];
    let (mut product_ok, mut j_ok) = (true, true);
    for &a in &alphas {
        let f = euler_f(a, &c).unwrap();
        product_ok &= within(&f, &euler_product_direct(a, &c).unwrap(), d);
        let ratio = Float::with_val(c.working_bits(), euler_f(a * 5, &c).unwrap() / &f);
        j_ok &= within(&rr_j(a, &c).unwrap(), &ratio, d);
    }
    s.check(
        "8.product",
        product_ok,
        "F(α) vs direct product, α ∈ {1, 2, 4, 1/5, 2/5, 4/5, 10}",
    );
    s.check("8.rr", j_ok, "J(α) vs F(5α)/F(α) on the same grid");

    let mut square_ok = true;
    for q in [r(1, 10), r(1, 5), r(2, 5), r(1, 2)] {
        for conv in [Convention::PiScale, Convention::TwoPiScale] {
            let e4 = evaluate(&SeriesSpec::eisenstein(4, q, conv), &c).unwrap();
            let e8 = evaluate(&SeriesSpec::eisenstein(8, q, conv), &c).unwrap();
            let sq = Float::with_val(c.working_bits(), e4.square_ref());
            square_ok &= within(&sq, &e8, d);
        }
    }
    s.check(
        "8.eisenstein",
        square_ok,
        "E4² = E8 for q ∈ {1/10, 1/5, 2/5, 1/2}, both conventions",
    );

    let mut reflection_ok = true;
    for digits in [50u32, 200, 1000] {
        let c = ctx(digits);
        let prec = c.working_bits();
        let g1 = constant(NamedConstant::GammaQuarter, &c);
        let g3 = constant(NamedConstant::GammaThreeQuarter, &c);
        let lhs = Float::with_val(prec, &g1 * &g3);
        let rhs = constant(NamedConstant::Pi, &c) * Float::with_val(prec, 2).sqrt();
        reflection_ok &= within(&lhs, &rhs, digits);
        let mpfr_g1 = Float::with_val(prec, Float::with_val(prec, 0.25).gamma());
        let mpfr_g3 = Float::with_val(prec, Float::with_val(prec, 0.75).gamma());
        reflection_ok &= within(&g1, &mpfr_g1, digits) && within(&g3, &mpfr_g3, digits);
    }
    s.check(
        "8.gamma",
        reflection_ok,
        "Γ(1/4)Γ(3/4) = π√2 and both factors vs MPFR Γ at 50, 200, 1000 digits",
    );
}

type Criterion = (&'static str, fn(&mut Suite));

fn main() -> ExitCode {
    let mut suite = Suite { failed: Vec::new() };
    let criteria: [Criterion; 8] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
    ];
    for (name, run) in criteria {
        let before = suite.failed.len();
        run(&mut suite);
        let failed = &suite.failed[before..];
        if failed.is_empty() {
            println!("PASS criterion {name}");
        } else {
            println!("FAIL criterion {name} ({})", failed.join(", "));
        }
    }
    if suite.failed.is_empty() {
        println!("acceptance: all checks passed");
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} check(s) failed: {}",
            suite.failed.len(),
            suite.failed.join(", ")
        );
        ExitCode::FAILURE
    }
}
