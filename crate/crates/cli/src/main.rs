//! `qbracket`: evaluate q-brackets, solve for fixed points, inspect Newton polygons and run the
//! verification harness.

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use qbracket::analytic::{q_bracket, series1, series2};
use qbracket::padic::vp_int;
use qbracket::polygon::certified_polygon;
use qbracket::solver::{fixed_points_for_q, q_for_x, Fiber};
use qbracket::{Error, HarnessConfig, PadicNumber, PrimeContext, SuiteId, SuiteReport, ValuationQ};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "qbracket",
    version,
    about = "q-bracket fixed points over Q_p(pi), pi^e = p"
)]
struct Cli {
    /// Residue characteristic.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Ramification index of Q_p(pi).
    #[arg(long, global = true)]
    e: Option<u32>,
    /// Working precision in pi-units (default 60e).
    #[arg(long, global = true)]
    prec: Option<i64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print [x]_q and v([x]_q - x).
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Nontrivial fixed points x of [.]_q for a given q.
    FixedPoints {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Parameters q for which a given x is a fixed point.
    SolveQ {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Newton polygon of a local expansion and its zero count on the closed unit disk.
    Polygon {
        #[arg(long, value_enum)]
        series: SeriesKind,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Parameter for series1.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// v(q - 1) for series2, as a/b.
        #[arg(long)]
        m0: Option<String>,
        /// Expansion point for series2.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
    },
    /// Run the verification harness; exits 1 on any failing assertion.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        /// Divide every working precision by this factor.
        #[arg(long, default_value_t = 1)]
        precision_divisor: i64,
        /// Record elapsed time in the reports.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeriesKind {
    Series1,
    Series2,
}

enum Failure {
    Parse(String),
    Precondition(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Precondition(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `n`, `a/b`, `pi^k*a/b` (`p^k*a/b` when e = 1) or the printed form
/// `pi^k*(d0 d1 ... ; prec=N)`.
fn parse_literal(ctx: &PrimeContext, token: &str) -> CliResult<PadicNumber> {
    let bad = |why: &str| Failure::Parse(format!("invalid number `{token}`: {why}"));
    let s = token.trim();
    if s.contains("*(") {
        return PadicNumber::parse(ctx, s).map_err(Failure::from);
    }
    let (shift, body) = match s.split_once('*') {
        Some((prefix, body)) => {
            let k = prefix
                .strip_prefix("pi^")
                .or_else(|| prefix.strip_prefix("p^").filter(|_| ctx.e() == 1))
                .ok_or_else(|| bad("expected a `pi^k*` prefix (`p^k*` when e = 1)"))?;
            let k: i64 = k.parse().map_err(|_| bad("invalid exponent"))?;
            (Some(k), body)
        }
        None => (None, s),
    };
    let (num, den) = body.split_once('/').unwrap_or((body, "1"));
    let num = BigInt::from_str(num).map_err(|_| bad("invalid numerator"))?;
    let den = BigInt::from_str(den).map_err(|_| bad("invalid denominator"))?;
    if den == BigInt::from(0) {
        return Err(bad("zero denominator"));
    }
    let p = ctx.p();
    if shift.is_none() && num != BigInt::from(0) && vp_int(&den, p) > vp_int(&num, p) {
        return Err(bad(&format!(
            "denominator divisible by p = {p} in lowest terms (use a pi^k* prefix)"
        )));
    }
    let value = PadicNumber::from_bigint_ratio(ctx, &num, &den)?;
    Ok(match shift {
        Some(k) => value.mul_pi_pow(k),
        None => value,
    })
}

fn context(cli: &Cli) -> CliResult<PrimeContext> {
    let p = cli
        .p
        .ok_or_else(|| Failure::Parse("missing required flag --p".into()))?;
    let e = cli.e.unwrap_or(1);
    let k = cli.prec.unwrap_or(60 * e as i64);
    Ok(PrimeContext::new(p, e, k)?)
}

fn header(ctx: &PrimeContext, seed: u64) -> String {
    format!("# p={} e={} K={} seed={}", ctx.p(), ctx.e(), ctx.k(), seed)
}

fn config_json(ctx: &PrimeContext, seed: u64) -> Value {
    json!({ "p": ctx.p(), "e": ctx.e(), "K": ctx.k(), "seed": seed })
}

fn fiber_json(f: &Fiber) -> Value {
    json!({
        "records": f.records.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "predicted": f.predicted,
        "deficit": f.deficit,
    })
}

fn print_fiber(f: &Fiber) {
    println!(
        "found {} of {} predicted (deficit {})",
        f.records.len(),
        f.predicted,
        f.deficit
    );
    for r in &f.records {
        println!("x = {}", r.x);
        println!("  q = {}", r.q);
        println!("  u = {}", r.u);
        println!(
            "  m0 = {}  residue_x = {}  residue_u = {}  multiplicity = {}  certified_to = {}",
            r.m0, r.residue_x, r.residue_u, r.multiplicity, r.certified_to
        );
    }
}

fn emit(cli: &Cli, ctx: &PrimeContext, result: Value, text: impl FnOnce()) {
    if cli.json {
        let out = json!({ "config": config_json(ctx, cli.seed), "result": result });
        println!("{out}");
    } else {
        println!("{}", header(ctx, cli.seed));
        text();
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    match &cli.command {
        Command::Eval { x, q } => {
            let ctx = context(cli)?;
            let x = parse_literal(&ctx, x)?;
            let q = parse_literal(&ctx, q)?;
            let b = q_bracket(&x, &q)?;
            let diff = b.try_sub(&x)?;
            let v = diff.valuation().to_string();
            emit(
                cli,
                &ctx,
                json!({ "bracket": b.to_json(), "v_bracket_minus_x": v }),
                || {
                    println!("[x]_q = {b}");
                    println!(
                        "v([x]_q - x) {}",
                        if diff.is_zero() {
                            v.clone()
                        } else {
                            format!("= {v}")
                        }
                    );
                },
            );
            Ok(true)
        }
        Command::FixedPoints { q } => {
            let ctx = context(cli)?;
            let q = parse_literal(&ctx, q)?;
            let fib = fixed_points_for_q(&q)?;
            emit(cli, &ctx, fiber_json(&fib), || print_fiber(&fib));
            Ok(true)
        }
        Command::SolveQ { x } => {
            let ctx = context(cli)?;
            let x = parse_literal(&ctx, x)?;
            let fib = q_for_x(&x)?;
            emit(cli, &ctx, fiber_json(&fib), || print_fiber(&fib));
            Ok(true)
        }
        Command::Polygon {
            series,
            x,
            q,
            m0,
            u,
        } => {
            let ctx = context(cli)?;
            let x = parse_literal(&ctx, x)?;
            let s = match series {
                SeriesKind::Series1 => {
                    let q = q
                        .as_deref()
                        .ok_or_else(|| Failure::Parse("series1 needs --q".into()))?;
                    series1(&x, &parse_literal(&ctx, q)?, None)?
                }
                SeriesKind::Series2 => {
                    let m0 = m0
                        .as_deref()
                        .ok_or_else(|| Failure::Parse("series2 needs --m0".into()))?;
                    let m0 = ValuationQ::from_str(m0)?;
                    let u = match u {
                        Some(u) => parse_literal(&ctx, u)?,
                        None => PadicNumber::one(&ctx),
                    };
                    series2(&x, &u, m0, None)?
                }
            };
            let poly = certified_polygon(&s)?;
            let zeros = poly.weierstrass_degree();
            emit(
                cli,
                &ctx,
                json!({ "polygon": poly.to_json(), "zeros": zeros }),
                || {
                    println!("{}", poly.to_json());
                    println!("zeros in the closed unit disk: {zeros}");
                },
            );
            Ok(true)
        }
        Command::Verify {
            suite,
            precision_divisor,
            timing,
        } => {
            let config = HarnessConfig {
                seed: cli.seed,
                p: cli.p,
                e: cli.e,
                k: cli.prec,
                precision_divisor: *precision_divisor,
                timing: *timing,
            };
            let reports: Vec<SuiteReport> = match suite {
                Some(id) => vec![qbracket::run_suite(id.parse::<SuiteId>()?, &config)?],
                None => qbracket::run_all(&config)?,
            };
            let ok = reports.iter().all(|r| r.passed());
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string(&reports).expect("reports serialize")
                );
            } else {
                println!(
                    "# seed={} precision_divisor={} p={} e={} K={}",
                    cli.seed,
                    precision_divisor,
                    cli.p.map_or("default".into(), |p| p.to_string()),
                    cli.e.map_or("default".into(), |e| e.to_string()),
                    cli.prec.map_or("default".into(), |k| k.to_string()),
                );
                for r in &reports {
                    let params: Vec<String> = r
                        .params
                        .iter()
                        .map(|c| format!("({},{},{})", c.p, c.e, c.k))
                        .collect();
                    println!(
                        "{} {} [{} assertions; (p,e,K) {}]",
                        if r.passed() { "PASS" } else { "FAIL" },
                        r.suite,
                        r.assertions.len(),
                        params.join(" ")
                    );
                    for a in r.assertions.iter().filter(|a| !a.pass) {
                        println!("  failed: {} [{}]", a.name, a.anchor);
                        println!("    expected: {}", a.expected);
                        println!("    observed: {}", a.observed);
                    }
                }
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("precondition violated: {msg}");
            ExitCode::from(3)
        }
    }
}
