//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the lines always show up in
//! `cargo test` output.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fracdiff::identities::{registry, run_check, run_suite, CheckConfig, CheckReport};
use fracdiff::kernels::{gbinom, int, rat, rational_to_f64};
use fracdiff::operators::nabla_left_sum;
use fracdiff::par::Execution;
use fracdiff::solver::{residual, solve, telescoping_stages, IvProblem, Rhs, SolutionTrace, SolveOptions};
use fracdiff::{Convention, GridFunction, Mode, Order, Orientation, Rational, Value};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: std::ops::RangeInclusive<u64> = 1..=5;

fn suite_config(mode: Mode, seed: u64) -> CheckConfig {
    CheckConfig {
        alphas: vec![rat(1, 2), rat(5, 4), rat(3, 2), rat(7, 3), int(2), int(3)],
        window: 12,
        window_max: Some(40),
        mode,
        seed,
        trials: 50,
        ..CheckConfig::default()
    }
}

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn first_failure(reports: &[CheckReport]) -> Option<String> {
    reports.iter().find(|r| !r.pass || r.skipped).map(|r| {
        format!(
            "{} seed {}: residual {}{}",
            r.id,
            r.seed,
            r.residual,
            r.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
        )
    })
}

fn timed_suite(mode: Mode) -> (Vec<CheckReport>, Duration) {
    let start = Instant::now();
    let reports = SEEDS
        .flat_map(|seed| run_suite(&[], &suite_config(mode, seed), Execution::Parallel))
        .collect();
    (reports, start.elapsed())
}

fn exact_suite() -> Verdict {
    let ids = registry().len();
    let (reports, took) = timed_suite(Mode::Exact);
    let budget = Duration::from_secs(60);
    let detail = format!(
        "{ids} ids x {} seeds, windows 12..=40, 50 trials, {:.1} s (budget {} s)",
        SEEDS.count(),
        took.as_secs_f64(),
        budget.as_secs()
    );
    if let Some(f) = first_failure(&reports) {
        return verdict(false, format!("{detail}; {f}"));
    }
    let exact = reports.iter().all(|r| r.residual == "0");
    verdict(ids >= 28 && exact && took < budget, detail)
}

fn float_suite() -> Verdict {
    let (reports, took) = timed_suite(Mode::Float);
    let worst = reports
        .iter()
        .filter_map(|r| r.residual.parse::<f64>().ok())
        .fold(0.0f64, f64::max);
    let budget = Duration::from_secs(30);
    let detail = format!(
        "largest relative residual {worst:e}, {:.1} s (budget {} s)",
        took.as_secs_f64(),
        budget.as_secs()
    );
    match first_failure(&reports) {
        Some(f) => verdict(false, format!("{detail}; {f}")),
        None => verdict(worst <= 1e-9 && took < budget, detail),
    }
}

fn convention_sensitivity() -> Verdict {
    let ids = ["dual-left-sum", "dual-left-diff"];
    let mut broken = 0;
    for seed in SEEDS {
        for id in ids {
            let mut cfg = suite_config(Mode::Exact, seed);
            let inclusive = match run_check(id, &cfg) {
                Ok(r) => r,
                Err(e) => return verdict(false, format!("{id} seed {seed}: {e}")),
            };
            cfg.convention = Some(Convention::Standard);
            let standard = match run_check(id, &cfg) {
                Ok(r) => r,
                Err(e) => return verdict(false, format!("{id} seed {seed} (standard): {e}")),
            };
            if !inclusive.pass || inclusive.residual != "0" {
                return verdict(
                    false,
                    format!("{id} seed {seed}: inclusive-base residual {}", inclusive.residual),
                );
            }
            if standard.pass || standard.residual == "0" {
                return verdict(false, format!("{id} seed {seed}: standard convention residual is 0"));
            }
            broken += standard.trial_residuals.iter().filter(|r| *r != "0").count();
        }
    }
    verdict(
        true,
        format!(
            "inclusive-base exact; standard nonzero in {broken} trials across {} seeds",
            SEEDS.count()
        ),
    )
}

/// Kernel value by its defining product, kept apart from the library.
fn naive_gbinom(alpha: &Rational, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    (1..=k).fold(Rational::one(), |acc, j| acc * (alpha + int(j - 1)) / int(j))
}

fn random_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    rat(rng.random_range(-max_num..=max_num), rng.random_range(1..=max_den))
}

fn power_rule_numbers() -> Verdict {
    let ones = GridFunction::constant(int(0), Orientation::Left, 4, int(1)).unwrap();
    let sum = nabla_left_sum(&ones, &rat(1, 2)).unwrap();
    let at3 = sum.at(&int(3)).unwrap().clone();
    let hand = int(1) + rat(1, 2) + rat(3, 8);
    if at3 != hand || hand != rat(15, 8) {
        return verdict(false, format!("sum at t = 3 is {at3}, want 15/8"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for pair in 0..100 {
        let alpha = random_rational(&mut rng, 40, 9);
        let mu = random_rational(&mut rng, 40, 9);
        let nu = &mu + int(1);
        let total = &alpha + &nu;
        for k in 1..=30usize {
            let lhs = (1..=k).fold(Rational::zero(), |acc, j| {
                acc + gbinom(&alpha, k - j) * gbinom(&nu, j - 1)
            });
            let rhs = gbinom(&total, k - 1);
            if lhs != rhs || rhs != naive_gbinom(&total, k as i64 - 1) {
                return verdict(
                    false,
                    format!("pair {pair} (alpha {alpha}, mu {mu}), k {k}: {lhs} vs {rhs}"),
                );
            }
        }
    }
    verdict(true, "15/8 at t = 3; Vandermonde exact for 100 pairs, k = 1..=30")
}

/// The equation in Grünwald-Letnikov form, solved forward for y_k.
fn recursion_oracle(
    alpha: &Rational,
    c: &Rational,
    lambda: &Rational,
    mu: &[Rational],
    horizon: usize,
) -> Vec<Rational> {
    let neg = -alpha.clone();
    let w: Vec<Rational> = (0..=horizon as i64).map(|j| naive_gbinom(&neg, j)).collect();
    let mut y = vec![c.clone()];
    for k in 1..=horizon {
        let mut acc = mu.get(k).cloned().unwrap_or_else(Rational::zero);
        for j in 1..=k {
            acc -= &w[j] * &y[k - j];
        }
        y.push(acc / (int(1) - lambda));
    }
    y
}

fn exact_trace(p: &IvProblem) -> fracdiff::Result<SolutionTrace<Rational>> {
    solve(p, &SolveOptions::default())
}

fn affine_problem(
    alpha: Rational,
    a: Rational,
    c: Rational,
    lambda: Rational,
    mu: Vec<Rational>,
    horizon: usize,
) -> IvProblem {
    let rhs = Rhs::Affine { lambda, mu };
    IvProblem::new(Order::new(alpha).unwrap(), a, Value::Exact(c), rhs, horizon).unwrap()
}

fn solver_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..20 {
        let q = rng.random_range(2..=7i64);
        let p = loop {
            let p = rng.random_range(1..3 * q);
            if p % q != 0 {
                break p;
            }
        };
        let alpha = rat(p, q);
        let lambda = loop {
            let l = random_rational(&mut rng, 5, 4);
            if l != int(1) {
                break l;
            }
        };
        let c = random_rational(&mut rng, 9, 5);
        let a = random_rational(&mut rng, 6, 3);
        let mu: Vec<Rational> = (0..rng.random_range(0..=8))
            .map(|_| random_rational(&mut rng, 6, 4))
            .collect();
        let problem = affine_problem(alpha.clone(), a, c.clone(), lambda.clone(), mu.clone(), 50);
        let trace = match exact_trace(&problem) {
            Ok(t) => t,
            Err(e) => return verdict(false, format!("problem {i}: {e}")),
        };
        if trace.values() != recursion_oracle(&alpha, &c, &lambda, &mu, 50).as_slice() {
            return verdict(
                false,
                format!("problem {i} (alpha {alpha}, lambda {lambda}): trace differs from recursion"),
            );
        }
        match residual(&problem, &trace) {
            Ok(r) if r.is_zero() => {}
            other => return verdict(false, format!("problem {i}: residual {other:?}")),
        }
    }

    let hom = affine_problem(rat(1, 2), int(0), int(1), int(0), Vec::new(), 10);
    let trace = exact_trace(&hom).unwrap();
    let kernel: Vec<Rational> = (0..=10).map(|k| naive_gbinom(&rat(1, 2), k)).collect();
    if trace.values() != kernel.as_slice() || trace.values()[..4] != [int(1), rat(1, 2), rat(3, 8), rat(5, 16)] {
        return verdict(false, "homogeneous alpha = 1/2 trace is not gbinom(1/2, k)");
    }
    let half = affine_problem(rat(1, 2), int(0), int(1), rat(1, 2), Vec::new(), 2);
    let trace = exact_trace(&half).unwrap();
    if trace.values()[1..] != [int(1), rat(5, 4)] {
        return verdict(false, format!("lambda = 1/2 trace {:?}", trace.values()));
    }
    verdict(
        true,
        "20 random affine problems equal the recursion, residual 0; 1, 1/2, 3/8, 5/16 and 1, 5/4 reproduced",
    )
}

fn gamma_form(beta: f64, m: f64) -> f64 {
    // (m+1)^{rising beta-1} / Gamma(beta) = Gamma(m + beta) / (Gamma(m + 1) Gamma(beta))
    use statrs::function::gamma::gamma;
    gamma(m + beta) / (gamma(m + 1.0) * gamma(beta))
}

fn telescoping() -> Verdict {
    let c = rat(3, 7);
    let mut chains = 0;
    for alpha in [rat(5, 4), rat(3, 2), rat(7, 4), rat(9, 4), rat(5, 2)] {
        let order = Order::new(alpha.clone()).unwrap();
        for a in [int(0), rat(-1, 2)] {
            let start = &a + int(order.n() as i64 - 1);
            for k in 0..10i64 {
                let t = &start + int(k);
                let stages: Vec<Rational> = match telescoping_stages(&order, &a, &c, &t) {
                    Ok(s) => s,
                    Err(e) => return verdict(false, format!("alpha {alpha}, t {t}: {e}")),
                };
                let single = &c * naive_gbinom(&alpha, k);
                if stages.len() != order.n() + 2 || stages.iter().any(|s| s != &single) {
                    return verdict(false, format!("alpha {alpha}, t {t}: stages {stages:?}"));
                }
                if order.n() == 2 && k >= 1 {
                    // The three-term, two-term and single-term forms of the n = 2 chain.
                    let o2 = naive_gbinom(&(&alpha - int(2)), k)
                        + naive_gbinom(&(&alpha - int(1)), k - 1)
                        + naive_gbinom(&alpha, k - 1);
                    let o3 = naive_gbinom(&(&alpha - int(1)), k) + naive_gbinom(&alpha, k - 1);
                    let last = naive_gbinom(&alpha, k);
                    if [&o2, &o3, &last] != [&stages[1] / &c, &stages[2] / &c, &stages[3] / &c].each_ref() {
                        return verdict(false, format!("alpha {alpha}, t {t}: n = 2 chain differs"));
                    }
                    let (al, m) = (rational_to_f64(&alpha), k as f64);
                    let written = gamma_form(al - 2.0, m) + gamma_form(al - 1.0, m - 1.0) + gamma_form(al, m - 1.0);
                    if (written - rational_to_f64(&o2)).abs() > 1e-12 * written.abs().max(1.0) {
                        return verdict(false, format!("alpha {alpha}, k {k}: gamma form {written} vs {o2}"));
                    }
                    chains += 1;
                }
            }
        }
    }
    verdict(
        true,
        format!("5 orders x 10 points x 2 bases collapse exactly; {chains} n = 2 chain points"),
    )
}

fn cauchy_integer() -> Verdict {
    let ids = [
        "cauchy-integer-left-delta",
        "cauchy-integer-right-delta",
        "cauchy-integer-left-nabla",
        "cauchy-integer-right-nabla",
    ];
    for seed in SEEDS {
        let cfg = CheckConfig {
            alphas: vec![int(1), int(2), int(3)],
            ..suite_config(Mode::Exact, seed)
        };
        for id in ids {
            match run_check(id, &cfg) {
                Ok(r) if r.pass && r.residual == "0" && r.per_alpha.len() == 3 => {}
                Ok(r) => return verdict(false, format!("{id} seed {seed}: residual {}", r.residual)),
                Err(e) => return verdict(false, format!("{id} seed {seed}: {e}")),
            }
        }
    }
    verdict(true, "4 checks exact for n = 1, 2, 3 over 5 seeds")
}

fn cli_determinism() -> Verdict {
    for case in common::CASES {
        let (first, second) = (common::run(case), common::run(case));
        if first.stdout != second.stdout || first.exit != second.exit {
            return verdict(false, format!("{}: runs differ", case.name));
        }
        if first.exit != case.exit || first.stdout != common::expected(case) {
            return verdict(false, format!("{}: output differs from golden file", case.name));
        }
    }
    verdict(
        true,
        format!("{} golden cases byte-identical across two runs", common::CASES.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact identity suite", exact_suite),
        ("float shadow", float_suite),
        ("convention sensitivity", convention_sensitivity),
        ("power-rule numbers", power_rule_numbers),
        ("solver oracle equivalence", solver_oracle),
        ("telescoping", telescoping),
        ("integer-order cauchy", cauchy_integer),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!(
            "[{}] {} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
