//! A registry of machine-checkable identities between the fractional
//! operators. Each check evaluates both sides on random (or explicit)
//! functions and reports the largest pointwise discrepancy: exactly zero is
//! required in rational mode, a relative tolerance applies in float mode.

mod checks;

pub use checks::Source;

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{format_rational, int, is_integer, Mode, Order, Rational, Scalar};
use crate::operators::Convention;
use crate::par::{map_with, Execution};

/// Which orders an identity is stated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    Any,
    NonInteger,
    Integer,
}

impl Validity {
    pub fn admits(self, alpha: &Rational) -> bool {
        match self {
            Validity::Any => true,
            Validity::NonInteger => !is_integer(alpha),
            Validity::Integer => is_integer(alpha),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckInfo {
    pub id: &'static str,
    pub validity: Validity,
    pub summary: &'static str,
}

const fn info(id: &'static str, validity: Validity, summary: &'static str) -> CheckInfo {
    CheckInfo { id, validity, summary }
}

pub const REGISTRY: &[CheckInfo] = &[
    info(
        "commute-delta-left",
        Validity::Any,
        "delta left sum of a forward difference, with the f(a) correction",
    ),
    info(
        "commute-delta-right",
        Validity::Any,
        "delta right sum of a signed backward difference, with the f(b) correction",
    ),
    info(
        "commute-nabla-left-shifted",
        Validity::Any,
        "nabla left sum of a backward difference for sums that include the base point",
    ),
    info(
        "commute-nabla-left",
        Validity::Any,
        "nabla left sum (and difference) of a backward difference, with the f(a) correction",
    ),
    info(
        "commute-nabla-right",
        Validity::Any,
        "nabla right sum (and difference) of a signed forward difference, with the f(b) correction",
    ),
    info(
        "commute-nabla-left-higher",
        Validity::Any,
        "p-th backward difference under a nabla left sum, f known below a",
    ),
    info(
        "commute-nabla-right-higher",
        Validity::Any,
        "p-th signed forward difference under a nabla right sum, f known above b",
    ),
    info(
        "commute-nabla-left-restricted",
        Validity::Any,
        "p-th backward difference under a nabla left sum based at a+p-1, f known on N_a only",
    ),
    info(
        "commute-nabla-right-restricted",
        Validity::Any,
        "p-th signed forward difference under a nabla right sum based at b-p+1, f known on _bN only",
    ),
    info(
        "dual-left-sum",
        Validity::Any,
        "delta left sum shifted by alpha equals the nabla left sum",
    ),
    info(
        "dual-left-diff",
        Validity::Any,
        "delta left difference shifted by -alpha equals the nabla left difference",
    ),
    info(
        "dual-left-base",
        Validity::Any,
        "left delta/nabla duals for functions on N_{alpha-n}",
    ),
    info(
        "dual-right-sum",
        Validity::Any,
        "delta right sum shifted by -alpha equals the nabla right sum ending at b+1",
    ),
    info(
        "dual-right-diff",
        Validity::Any,
        "delta right difference shifted by alpha equals the nabla right difference ending at b+1",
    ),
    info(
        "dual-right-base",
        Validity::Any,
        "right delta/nabla duals for functions on _{n-alpha}N",
    ),
    info("power-delta-right", Validity::Any, "delta right sum of a falling power"),
    info(
        "semigroup-delta-right",
        Validity::Any,
        "composition of delta right sums adds the orders",
    ),
    info(
        "semigroup-nabla-right",
        Validity::Any,
        "composition of nabla right sums adds the orders",
    ),
    info("power-nabla-right", Validity::Any, "nabla right sum of a rising power"),
    info("power-nabla-left", Validity::Any, "nabla left sum of a rising power"),
    info(
        "semigroup-nabla-left",
        Validity::Any,
        "composition of nabla left sums adds the orders",
    ),
    info(
        "ibp-sum-nabla",
        Validity::Any,
        "summation by parts for nabla fractional sums",
    ),
    info(
        "compose-left",
        Validity::Any,
        "left nabla difference and sum invert each other (Taylor remainder for integer orders)",
    ),
    info(
        "compose-right",
        Validity::Any,
        "right nabla difference and sum invert each other (Taylor remainder for integer orders)",
    ),
    info(
        "ibp-diff-nabla",
        Validity::NonInteger,
        "summation by parts for nabla fractional differences",
    ),
    info(
        "ibp-sum-delta",
        Validity::Any,
        "summation by parts for delta fractional sums",
    ),
    info(
        "ibp-diff-delta",
        Validity::NonInteger,
        "summation by parts for delta fractional differences",
    ),
    info(
        "q-dual-delta-sum",
        Validity::Any,
        "reflection maps the delta right sum to the delta left sum",
    ),
    info(
        "q-dual-delta-diff",
        Validity::Any,
        "reflection maps the delta right difference to the delta left difference",
    ),
    info(
        "q-dual-nabla-sum",
        Validity::Any,
        "reflection maps the nabla right sum to the nabla left sum",
    ),
    info(
        "q-dual-nabla-diff",
        Validity::Any,
        "reflection maps the nabla right difference to the nabla left difference",
    ),
    info(
        "cauchy-integer-left-delta",
        Validity::Integer,
        "order-n delta left sum solves Delta^n u = f with n zero initial values",
    ),
    info(
        "cauchy-integer-right-delta",
        Validity::Integer,
        "order-n delta right sum solves the signed nabla^n u = f with n zero end values",
    ),
    info(
        "cauchy-integer-left-nabla",
        Validity::Integer,
        "order-n nabla left sum solves nabla^n y = f with vanishing jets at a",
    ),
    info(
        "cauchy-integer-right-nabla",
        Validity::Integer,
        "order-n nabla right sum solves the signed Delta^n y = f with vanishing jets at b",
    ),
];

pub fn registry() -> &'static [CheckInfo] {
    REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static CheckInfo> {
    REGISTRY
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub alphas: Vec<Rational>,
    pub a: Rational,
    /// Number of stored points of the test functions.
    pub window: usize,
    /// When set, each trial draws its window length from `window..=window_max`.
    pub window_max: Option<usize>,
    pub mode: Mode,
    pub source: Source,
    pub seed: u64,
    pub trials: usize,
    /// Nabla convention for the left dual checks (default: inclusive-base).
    pub convention: Option<Convention>,
    /// Exponent for the power rules; random per trial when unset.
    pub mu: Option<Rational>,
    /// Second order for the semigroup checks; cycles through `alphas` when unset.
    pub beta: Option<Rational>,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            alphas: vec![Rational::new(1.into(), 2.into())],
            a: int(0),
            window: 12,
            window_max: None,
            mode: Mode::Exact,
            source: Source::Random,
            seed: 1,
            trials: 10,
            convention: None,
            mu: None,
            beta: None,
            tolerance: 1e-9,
        }
    }
}

/// Smallest window every check accepts for an order with ceiling `n`.
pub fn min_window(n: usize) -> usize {
    2 * n + 6
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaResult {
    pub alpha: String,
    pub residual: String,
    pub points: usize,
    /// Lowest and highest lattice points compared, over all trials.
    pub window: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub mode: Mode,
    pub alphas: Vec<String>,
    pub window: String,
    pub seed: u64,
    pub trials: usize,
    pub residual: String,
    pub points: usize,
    pub pass: bool,
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub per_alpha: Vec<AlphaResult>,
    /// Largest residual of each trial, over all orders.
    pub trial_residuals: Vec<String>,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial RNG; stable across platforms and independent of scheduling.
fn trial_rng(seed: u64, id: &str, alpha_index: usize, trial: usize) -> ChaCha8Rng {
    let mut h = splitmix(seed ^ fnv1a(id));
    h = splitmix(h ^ alpha_index as u64);
    h = splitmix(h ^ trial as u64);
    ChaCha8Rng::seed_from_u64(h)
}

fn window_label(cfg: &CheckConfig) -> String {
    match cfg.window_max {
        Some(max) if max > cfg.window => format!("{}..={}", cfg.window, max),
        _ => cfg.window.to_string(),
    }
}

fn legal_orders(info: &CheckInfo, cfg: &CheckConfig) -> Result<Vec<(usize, Order)>> {
    let mut out = Vec::new();
    for (i, alpha) in cfg.alphas.iter().enumerate() {
        let order = Order::new(alpha.clone())?;
        if info.validity.admits(alpha) {
            out.push((i, order));
        }
    }
    if out.is_empty() {
        return Err(Error::Domain(format!(
            "{} needs {} orders; none given",
            info.id,
            match info.validity {
                Validity::Integer => "integer",
                Validity::NonInteger => "non-integer",
                Validity::Any => "positive",
            }
        )));
    }
    Ok(out)
}

fn run_typed<S: Scalar>(info: &CheckInfo, cfg: &CheckConfig, orders: &[(usize, Order)]) -> Result<CheckReport> {
    use rand::Rng;

    let mut overall = S::zero();
    let mut points = 0;
    let mut per_alpha = Vec::new();
    let mut trial_max = vec![S::zero(); cfg.trials];
    for (index, order) in orders {
        let mut residual = S::zero();
        let mut count = 0;
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for (trial, worst) in trial_max.iter_mut().enumerate() {
            let mut rng = trial_rng(cfg.seed, info.id, *index, trial);
            let len = match cfg.window_max {
                Some(max) if max > cfg.window => rng.random_range(cfg.window..=max),
                _ => cfg.window,
            };
            let beta = cfg
                .beta
                .clone()
                .unwrap_or_else(|| cfg.alphas[(index + trial + 1) % cfg.alphas.len()].clone());
            let convention = cfg.convention.unwrap_or(Convention::InclusiveBase);
            let mut ctx = checks::Ctx::<S>::new(
                order,
                cfg.a.clone(),
                len,
                1 + trial % 3,
                beta,
                cfg.mu.clone(),
                convention,
                &cfg.source,
                rng,
            );
            checks::eval(info.id, &mut ctx)?;
            if ctx.residual > residual {
                residual = ctx.residual.clone();
            }
            if ctx.residual > *worst {
                *worst = ctx.residual.clone();
            }
            count += ctx.points;
            if let Some(l) = ctx.lo {
                lo = Some(lo.map_or(l.clone(), |x| x.min(l)));
            }
            if let Some(h) = ctx.hi {
                hi = Some(hi.map_or(h.clone(), |x| x.max(h)));
            }
        }
        if residual > overall {
            overall = residual.clone();
        }
        points += count;
        per_alpha.push(AlphaResult {
            alpha: format_rational(order.alpha()),
            residual: residual.to_csv(),
            points: count,
            window: match (lo, hi) {
                (Some(l), Some(h)) => format!("[{l}, {h}]"),
                _ => "[]".into(),
            },
        });
    }
    Ok(CheckReport {
        id: info.id.to_string(),
        mode: S::MODE,
        alphas: orders.iter().map(|(_, o)| format_rational(o.alpha())).collect(),
        window: window_label(cfg),
        seed: cfg.seed,
        trials: cfg.trials,
        residual: overall.to_csv(),
        points,
        pass: S::accepts(&overall, cfg.tolerance),
        skipped: false,
        error: None,
        per_alpha,
        trial_residuals: trial_max.iter().map(|r| r.to_csv()).collect(),
    })
}

/// Runs one registered check over every legal order in `cfg.alphas`.
pub fn run_check(id: &str, cfg: &CheckConfig) -> Result<CheckReport> {
    let info = lookup(id)?;
    if cfg.trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if let Source::Explicit(values) = &cfg.source {
        if values.is_empty() {
            return Err(Error::Domain("explicit source has no values".into()));
        }
    }
    let orders = legal_orders(info, cfg)?;
    let needed = orders.iter().map(|(_, o)| min_window(o.n())).max().unwrap_or(0);
    if cfg.window < needed {
        return Err(Error::WindowTooShort {
            what: id.to_string(),
            needed,
            got: cfg.window,
        });
    }
    match cfg.mode {
        Mode::Exact => run_typed::<Rational>(info, cfg, &orders),
        Mode::Float => run_typed::<f64>(info, cfg, &orders),
    }
}

fn failed_report(id: &str, cfg: &CheckConfig, err: &Error) -> CheckReport {
    CheckReport {
        id: id.to_string(),
        mode: cfg.mode,
        alphas: cfg.alphas.iter().map(format_rational).collect(),
        window: window_label(cfg),
        seed: cfg.seed,
        trials: cfg.trials,
        residual: "-".into(),
        points: 0,
        pass: false,
        skipped: false,
        error: Some(err.to_string()),
        per_alpha: Vec::new(),
        trial_residuals: Vec::new(),
    }
}

/// Runs `ids` (all registered checks when empty). Windows are expanded to
/// each check's minimum, checks without a legal order are skipped, and
/// errors become failed reports. Reports keep the order of `ids`.
pub fn run_suite(ids: &[&str], cfg: &CheckConfig, exec: Execution) -> Vec<CheckReport> {
    let ids: Vec<&str> = if ids.is_empty() {
        REGISTRY.iter().map(|c| c.id).collect()
    } else {
        ids.to_vec()
    };
    map_with(exec, ids.len(), |i| {
        let id = ids[i];
        let info = match lookup(id) {
            Ok(info) => info,
            Err(e) => return failed_report(id, cfg, &e),
        };
        if !cfg.alphas.iter().any(|a| info.validity.admits(a)) {
            let mut r = failed_report(id, cfg, &Error::Domain("no legal order".into()));
            r.pass = true;
            r.skipped = true;
            r.error = None;
            return r;
        }
        let mut local = cfg.clone();
        let needed = cfg
            .alphas
            .iter()
            .filter_map(|a| Order::new(a.clone()).ok())
            .map(|o| min_window(o.n()))
            .max()
            .unwrap_or(0);
        local.window = local.window.max(needed);
        match run_check(id, &local) {
            Ok(r) => r,
            Err(e) => failed_report(id, cfg, &e),
        }
    })
}

pub fn suite_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

pub fn reports_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize") + "\n"
}

pub fn reports_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:<5}  {:>24}  {:>7}  {:<8}  result",
        "id", "mode", "residual", "points", "window"
    );
    for r in reports {
        let result = if r.skipped {
            "skip"
        } else if r.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = write!(
            out,
            "{:<width$}  {:<5}  {:>24}  {:>7}  {:<8}  {result}",
            r.id, r.mode, r.residual, r.points, r.window
        );
        if let Some(e) = &r.error {
            let _ = write!(out, "  ({e})");
        }
        out.push('\n');
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    let skipped = reports.iter().filter(|r| r.skipped).count();
    let _ = writeln!(
        out,
        "{} checks, {} passed, {} failed, {} skipped",
        reports.len(),
        reports.len() - failed - skipped,
        failed,
        skipped
    );
    out
}
