//! The `fracdiff` command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
//! 3 window too short, 4 singular implicit step, 5 implicit solve did not
//! converge.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::grid::{q_reflect, read_csv, read_json, write_csv, write_json, GridFunction};
use crate::identities::{
    lookup, registry, reports_json, reports_table, run_check, run_suite, suite_passed, CheckConfig, CheckReport, Source,
};
use crate::kernels::{format_rational, gbinom_value, parse_rational, Mode, Order, Rational, Scalar, Value};
use crate::operators::{Convention, FracOperator, OperatorKind};
use crate::par::{map_with, Execution};
use crate::solver::{read_problem, residual, solve, trace_csv, trace_plot_csv, SolutionTrace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_WINDOW: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;
pub const EXIT_NONCONVERGENCE: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::WindowTooShort { .. } | Error::OutsideWindow(..) | Error::EmptyWindow(_) => EXIT_WINDOW,
        Error::Singular { .. } => EXIT_SINGULAR,
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

const DEFAULT_ALPHAS: &str = "1/2,5/4,3/2,7/3,2,3";

#[derive(Debug, Parser)]
#[command(
    name = "fracdiff",
    version,
    about = "Discrete fractional sums and differences on one-step lattices"
)]
pub struct Cli {
    /// Arithmetic: `exact` (rationals) or `float` (f64).
    #[arg(long, global = true, env = "FRACDIFF_MODE", default_value = "exact")]
    pub mode: Mode,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a fractional operator (or the reflection `q-reflect`) to a table.
    Apply(ApplyArgs),
    /// Run identity checks.
    Check(CheckArgs),
    /// Solve a nabla initial value problem given as JSON.
    Solve(SolveArgs),
    /// Tabulate gbinom(alpha, k).
    Kernel(KernelArgs),
}

#[derive(Debug, clap::Args)]
pub struct ApplyArgs {
    /// Operator tag, e.g. `nabla-left-sum`, or `q-reflect`.
    pub op: String,
    /// Order; required for every operator except `q-reflect`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Nabla convention: `standard` or `inclusive-base`.
    #[arg(long, default_value = "standard")]
    pub convention: Convention,
    /// Delta differences: keep the points where the inner sum is empty.
    #[arg(long)]
    pub extended: bool,
    /// Input table (`index,t,value` CSV, or JSON if the name ends in .json); stdin if absent.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Output file; stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Write long-format `series,t,value` rows with input and output.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    /// Check ids, or `all`.
    #[arg(default_value = "all")]
    pub ids: Vec<String>,
    /// Comma-separated orders.
    #[arg(long, default_value = DEFAULT_ALPHAS)]
    pub alpha: String,
    /// Left end point of the test windows.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value_t = 12)]
    pub window: usize,
    /// Draw each trial's window length from `window..=window-max`.
    #[arg(long)]
    pub window_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Nabla convention for the left dual checks (default inclusive-base).
    #[arg(long)]
    pub convention: Option<Convention>,
    /// Exponent for the power rules (random when absent).
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Second order for the semigroup checks.
    #[arg(long)]
    pub beta: Option<String>,
    /// Comma-separated function values to use instead of random ones.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    /// Relative tolerance in float mode.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print JSON instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Run checks one at a time.
    #[arg(long)]
    pub sequential: bool,
    /// List the registered checks and exit.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Problem file (JSON). The file's `mode`, if present, wins over --mode.
    pub problem: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Override the number of steps.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Write long-format `series,t,value` rows (solution and residual).
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, clap::Args)]
pub struct KernelArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub from: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: i64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write long-format `series,t,value` rows.
    #[arg(long)]
    pub plot_data: bool,
}

fn check_help() -> String {
    let width = registry().iter().map(|c| c.id.len()).max().unwrap_or(0);
    let mut s = String::from("Registered checks:\n");
    for c in registry() {
        let _ = writeln!(s, "  {:<width$}  {}", c.id, c.summary);
    }
    s.push_str("\nOrders outside a check's range (integer-only or non-integer-only) are skipped under `all`\nand rejected with exit code 2 when the check is named explicitly.");
    s
}

pub fn command() -> clap::Command {
    Cli::command().mut_subcommand("check", |c| c.after_long_help(check_help()))
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Apply(a) => cmd_apply(cli.mode, a, stdin),
        Command::Check(c) => cmd_check(cli.mode, c),
        Command::Solve(s) => cmd_solve(cli.mode, s),
        Command::Kernel(k) => cmd_kernel(cli.mode, k),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&out, stdout) {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            if !out.notes.is_empty() {
                let _ = stderr.write_all(out.notes.as_bytes());
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::UnknownCheck(_) = e {
                let _ = writeln!(
                    stderr,
                    "valid ids: {}",
                    registry().iter().map(|c| c.id).collect::<Vec<_>>().join(", ")
                );
            }
            exit_code(&e)
        }
    }
}

struct Output {
    text: String,
    path: Option<PathBuf>,
    notes: String,
    code: i32,
}

impl Output {
    fn new(text: String, path: Option<PathBuf>) -> Output {
        Output {
            text,
            path,
            notes: String::new(),
            code: EXIT_OK,
        }
    }
}

fn emit(out: &Output, stdout: &mut dyn Write) -> Result<()> {
    match &out.path {
        Some(p) => fs::write(p, &out.text)?,
        None => stdout.write_all(out.text.as_bytes())?,
    }
    Ok(())
}

fn read_input(path: Option<&Path>, stdin: &mut dyn Read) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|x| parse_rational(x.trim())).collect()
}

fn cmd_apply(mode: Mode, args: &ApplyArgs, stdin: &mut dyn Read) -> Result<Output> {
    match mode {
        Mode::Exact => apply_typed::<Rational>(args, stdin),
        Mode::Float => apply_typed::<f64>(args, stdin),
    }
}

fn apply_typed<S: Scalar>(args: &ApplyArgs, stdin: &mut dyn Read) -> Result<Output> {
    let text = read_input(args.input.as_deref(), stdin)?;
    let is_json = args
        .input
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let f: GridFunction<S> = if is_json { read_json(&text)? } else { read_csv(&text)? };

    let (out, label) = if args.op == "q-reflect" {
        (q_reflect(&f).reoriented(f.orientation()), "q-reflect".to_string())
    } else {
        let kind: OperatorKind = args.op.parse()?;
        let alpha = args
            .alpha
            .as_deref()
            .ok_or_else(|| Error::Domain(format!("{kind} needs --alpha")))?;
        let order = Order::new(parse_rational(alpha)?)?;
        let mut op = FracOperator::new(kind, order);
        if args.convention != Convention::Standard {
            op = op.with_convention(args.convention)?;
        }
        if args.extended {
            if kind.is_sum() || kind.is_nabla() {
                return Err(Error::Domain("--extended applies to delta differences".into()));
            }
            op = op.extended();
        }
        let out = op.apply(&f)?.reoriented(f.orientation());
        let mut label = format!("{kind} alpha={}", format_rational(op.order.alpha()));
        if kind.is_nabla() {
            let _ = write!(label, " convention={}", op.convention);
        }
        if args.extended {
            label.push_str(" extended");
        }
        (out, label)
    };

    let window = format!(
        "[{}, {}]",
        format_rational(&out.lowest_point()),
        format_rational(&out.highest_point())
    );
    let text = if args.plot_data {
        let mut s = String::from("series,t,value\n");
        for (name, g) in [("input", &f), ("output", &out)] {
            for (t, v) in g.points() {
                let _ = writeln!(s, "{name},{},{}", format_rational(&t), v.to_csv());
            }
        }
        s
    } else if args.json {
        write_json(&out)
    } else {
        format!("# {label} mode={} window={window}\n{}", S::MODE, write_csv(&out))
    };
    Ok(Output::new(text, args.output.clone()))
}

fn check_config(mode: Mode, args: &CheckArgs) -> Result<CheckConfig> {
    Ok(CheckConfig {
        alphas: parse_list(&args.alpha)?,
        a: parse_rational(&args.a)?,
        window: args.window,
        window_max: args.window_max,
        mode,
        source: match &args.values {
            Some(v) => Source::Explicit(parse_list(v)?),
            None => Source::Random,
        },
        seed: args.seed,
        trials: args.trials,
        convention: args.convention,
        mu: args.mu.as_deref().map(parse_rational).transpose()?,
        beta: args.beta.as_deref().map(parse_rational).transpose()?,
        tolerance: args.tolerance,
    })
}

fn cmd_check(mode: Mode, args: &CheckArgs) -> Result<Output> {
    if args.list {
        let mut s = String::new();
        for c in registry() {
            let _ = writeln!(s, "{}\t{}", c.id, c.summary);
        }
        return Ok(Output::new(s, None));
    }
    let cfg = check_config(mode, args)?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let all = args.ids.iter().any(|i| i == "all");
    let reports: Vec<CheckReport> = if all {
        if args.ids.len() > 1 {
            return Err(Error::Domain("`all` cannot be combined with other ids".into()));
        }
        run_suite(&[], &cfg, exec)
    } else {
        for id in &args.ids {
            lookup(id)?;
        }
        map_with(exec, args.ids.len(), |i| run_check(&args.ids[i], &cfg))
            .into_iter()
            .collect::<Result<_>>()?
    };
    let json = reports_json(&reports);
    if let Some(path) = &args.report {
        fs::write(path, &json)?;
    }
    let text = if args.json { json } else { reports_table(&reports) };
    let mut out = Output::new(text, None);
    if !suite_passed(&reports) {
        out.code = EXIT_CHECK_FAILED;
    }
    Ok(out)
}

fn cmd_solve(mode: Mode, args: &SolveArgs) -> Result<Output> {
    let text = fs::read_to_string(&args.problem).map_err(|e| Error::Io(format!("{}: {e}", args.problem.display())))?;
    let (mut p, mode, mut opts) = read_problem(&text, mode)?;
    if let Some(h) = args.horizon {
        p = p.with_horizon(h);
    }
    if let Some(tol) = args.tol {
        opts.tol = tol;
    }
    if let Some(m) = args.max_iter {
        opts.max_iter = m;
    }
    let text = match mode {
        Mode::Exact => solve_text::<Rational>(&p, &opts, args.plot_data)?,
        Mode::Float => solve_text::<f64>(&p, &opts, args.plot_data)?,
    };
    Ok(Output::new(text, args.output.clone()))
}

fn solve_text<S: Scalar>(
    p: &crate::solver::IvProblem,
    opts: &crate::solver::SolveOptions,
    plot: bool,
) -> Result<String> {
    let trace: SolutionTrace<S> = solve(p, opts)?;
    if plot {
        return trace_plot_csv(p, &trace);
    }
    let res = if trace.values().len() >= 2 {
        residual(p, &trace)?.to_csv()
    } else {
        "n/a".into()
    };
    let c = match p.c() {
        Value::Exact(r) => format_rational(r),
        Value::Float(x) => x.to_string(),
    };
    let mut s = format!(
        "# alpha={} a={} start={} c={} mode={} steps={}\n# initial-sum={} residual={}\n",
        format_rational(p.order().alpha()),
        format_rational(p.a()),
        format_rational(&p.start()),
        c,
        S::MODE,
        p.horizon(),
        trace.initial_sum.to_csv(),
        res
    );
    s.push_str(&trace_csv(&trace));
    Ok(s)
}

fn cmd_kernel(mode: Mode, args: &KernelArgs) -> Result<Output> {
    if args.from < 0 || args.to < args.from {
        return Err(Error::Domain(format!("bad k range {}..={}", args.from, args.to)));
    }
    let alpha = Value::parse(&args.alpha, mode)?;
    let mut text = if args.plot_data {
        String::from("series,t,value\n")
    } else {
        format!("# gbinom({}, k) mode={mode}\nk,gbinom\n", args.alpha.trim())
    };
    for k in args.from..=args.to {
        let v = match gbinom_value(&alpha, k, mode)? {
            Value::Exact(r) => format_rational(&r),
            Value::Float(x) => x.to_string(),
        };
        if args.plot_data {
            let _ = writeln!(text, "gbinom,{k},{v}");
        } else {
            let _ = writeln!(text, "{k},{v}");
        }
    }
    Ok(Output::new(text, args.output.clone()))
}
