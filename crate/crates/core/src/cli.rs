//! The `packing-bounds` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse or config error,
//! 3 no applicable bound. Data goes to stdout (or `--out`), diagnostics to
//! stderr. Floats carry 12 significant digits.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotic::{
    convexity_constants, optimal_yaglom, rate_curve, QUOTED_ALPHA_DEG, QUOTED_DELTA, QUOTED_SLOPE, QUOTED_T0,
    QUOTED_T1, YAGLOM_CONSTANT,
};
use crate::error::{Error, Result};
use crate::finite_bounds::{best_bound_at_t, best_finite_bound, BoundResult, DEFAULT_DEGREE_BUDGET};
use crate::spaces::Space;
use crate::verify::{run_verification, VerifyConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NO_BOUND: u8 = 3;

/// Caps the worker threads used for grids and sampling.
pub const THREADS_ENV: &str = "PACKING_BOUNDS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "packing-bounds", version, about = "Upper bounds for codes in spheres, projective spaces, products and Grassmann/Stiefel manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every random draw; recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format (default: csv for `rate`, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Best finite bound on the size of a code at one distance.
    Bound(BoundArgs),
    /// Asymptotic rate curves over a distance grid.
    Rate(RateArgs),
    /// Randomized invariant checks.
    Verify(VerifyArgs),
    /// Convexity constants and the Yaglom crossing angle.
    Constants,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, value_parser = parse_space)]
    space: Space,
    /// Minimum distance in the space's metric.
    #[arg(long, conflicts_with = "t", required_unless_present = "t")]
    d: Option<f64>,
    /// Cosine-type variable of the product angle.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DEGREE_BUDGET, value_parser = parse_positive)]
    degree_budget: usize,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[arg(long, value_parser = parse_space)]
    space: Space,
    /// `<start>:<stop>:<count>`, evenly spaced and strictly increasing.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Random pairs per Grassmannian; a tenth as many identity triples and
    /// a hundredth as many positivity codes.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fault {
    CorruptRecurrence,
}

#[derive(Debug, Clone, PartialEq)]
struct Grid {
    spec: String,
    points: Vec<f64>,
}

fn parse_space(s: &str) -> std::result::Result<Space, String> {
    let space: Space = s.parse().map_err(|e: Error| e.to_string())?;
    space.validate().map_err(|e| e.to_string())?;
    Ok(space)
}

fn parse_positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let bad = || format!("expected <start>:<stop>:<count>, got `{s}`");
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    if !start.is_finite() || !stop.is_finite() || count == 0 {
        return Err(bad());
    }
    if count > 1 && start >= stop {
        return Err(format!("grid `{s}` is not strictly increasing"));
    }
    let points = if count == 1 {
        vec![start]
    } else {
        let step = (stop - start) / (count - 1) as f64;
        (0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect()
    };
    Ok(Grid { spec: s.into(), points })
}

/// Rounds to 12 significant digits.
fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        // also folds -0 into 0
        return x + 0.0;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// A float for CSV: 12 significant digits, `inf` for unbounded.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round12(x);
    if r != 0.0 && (r.abs() < 1e-6 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

struct Output {
    text: String,
    code: u8,
}

fn bound(args: &BoundArgs, seed: u64, format: Format) -> Result<Output> {
    let (variable, x, result) = match (args.d, args.t) {
        (Some(d), _) => ("d", d, best_finite_bound(&args.space, d, args.degree_budget)?),
        (None, Some(t)) => ("t", t, best_bound_at_t(&args.space, t, args.degree_budget)?),
        (None, None) => unreachable!("clap requires --d or --t"),
    };
    let code = if result.trivial { EXIT_NO_BOUND } else { EXIT_OK };
    let text = match format {
        Format::Json => to_json(&json!({
            "command": "bound",
            "space": args.space.to_string(),
            "variable": variable,
            "input": x,
            "degree_budget": args.degree_budget,
            "seed": seed,
            "floor": finite_or_null(result.floor()),
            "result": result,
        })),
        Format::Csv => bound_csv(&args.space, variable, x, &result, seed),
    };
    Ok(Output { text, code })
}

fn finite_or_null(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn bound_csv(space: &Space, variable: &str, x: f64, r: &BoundResult, seed: u64) -> String {
    let multi = r.witness.as_ref().map_or(String::new(), |w| {
        w.multi_index.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(";")
    });
    let applicability = r.applicability.as_ref().map_or(String::new(), |a| {
        let close = if a.hi_inclusive { ']' } else { ')' };
        format!("{}:[{};{}{close}", a.variable, fmt_num(a.lo), fmt_num(a.hi))
    });
    format!(
        "space,variable,input,value,floor,method,multi_index,applicability,trivial,seed\n{space},{variable},{},{},{},{},{multi},{applicability},{},{seed}\n",
        fmt_num(x),
        fmt_num(r.value),
        fmt_num(r.floor()),
        r.method.tag(),
        r.trivial,
    )
}

fn rate(args: &RateArgs, seed: u64, format: Format) -> Result<Output> {
    let rows = rate_curve(&args.space, &args.grid.points)?;
    let text = match format {
        Format::Json => to_json(&json!({
            "command": "rate",
            "space": args.space.to_string(),
            "grid": args.grid.spec,
            "seed": seed,
            "rows": rows,
        })),
        Format::Csv => {
            let mut s = String::from("d,method,rate,m,c,params\n");
            for p in &rows {
                let kind = if p.lower_bound { ";lower_bound" } else { "" };
                s.push_str(&format!(
                    "{},{},{},{},{},space={};seed={seed}{kind}\n",
                    fmt_num(p.d),
                    p.method,
                    fmt_num(p.rate),
                    p.m,
                    p.c,
                    args.space
                ));
            }
            s
        }
    };
    Ok(Output { text, code: EXIT_OK })
}

fn verify(args: &VerifyArgs, seed: u64, format: Format) -> Result<Output> {
    let report = run_verification(&VerifyConfig {
        samples: args.samples,
        seed,
        corrupt_recurrence: args.inject_fault == Some(Fault::CorruptRecurrence),
    })?;
    let code = if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("check,status,samples,max_violation,tolerance,failures,seed\n");
            for c in &report.checks {
                let status = serde_json::to_value(c.status).expect("status serializes");
                s.push_str(&format!(
                    "{},{},{},{},{},{},{seed}\n",
                    c.name,
                    status.as_str().unwrap_or_default(),
                    c.samples,
                    fmt_num(c.max_violation),
                    fmt_num(c.tolerance),
                    c.failures
                ));
            }
            s
        }
    };
    Ok(Output { text, code })
}

/// One computed constant next to its quoted value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRow {
    pub name: &'static str,
    pub computed: f64,
    pub quoted: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub within: bool,
}

pub fn constant_rows() -> Result<Vec<ConstantRow>> {
    let c = convexity_constants();
    let y = optimal_yaglom()?;
    let row = |name, computed: f64, quoted: f64, tolerance: f64| ConstantRow {
        name,
        computed,
        quoted,
        delta: computed - quoted,
        tolerance,
        within: (computed - quoted).abs() <= tolerance,
    };
    Ok(vec![
        row("t0", c.t0, QUOTED_T0, 0.002),
        row("t1", c.t1, QUOTED_T1, 0.002),
        row("slope", c.slope, QUOTED_SLOPE, 0.002),
        row("delta", c.delta, QUOTED_DELTA, 0.002),
        row("alpha_deg", y.alpha.to_degrees(), QUOTED_ALPHA_DEG, 1.0),
        row("yaglom_constant", y.constant, YAGLOM_CONSTANT, 1e-4),
    ])
}

fn constants(seed: u64, format: Format) -> Result<Output> {
    let rows = constant_rows()?;
    let text = match format {
        Format::Json => to_json(&json!({ "command": "constants", "seed": seed, "rows": rows })),
        Format::Csv => {
            let mut s = String::from("name,computed,quoted,delta,tolerance,within,seed\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{seed}\n",
                    r.name,
                    fmt_num(r.computed),
                    fmt_num(r.quoted),
                    fmt_num(r.delta),
                    fmt_num(r.tolerance),
                    r.within
                ));
            }
            s
        }
    };
    Ok(Output { text, code: EXIT_OK })
}

fn execute(cli: &Cli) -> Result<Output> {
    let format = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Bound(a) => bound(a, cli.seed, format(Format::Json)),
        Command::Rate(a) => rate(a, cli.seed, format(Format::Csv)),
        Command::Verify(a) => verify(a, cli.seed, format(Format::Json)),
        Command::Constants => constants(cli.seed, format(Format::Json)),
    }
}

fn thread_cap() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        },
    }
}

/// Runs the command line `args` (program name first), writing data to
/// `out`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            eprint!("{}", e.render());
            return EXIT_USAGE;
        }
    };
    let result = match thread_cap() {
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Ok(None) => execute(&cli),
        Ok(Some(n)) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => {
                eprintln!("error: cannot start worker pool: {e}");
                return EXIT_USAGE;
            }
        },
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &output.text),
        None => out.write_all(output.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    output.code
}
