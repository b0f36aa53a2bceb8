//! Riemann nabla initial value problems of non-integer order `alpha`:
//!
//! ```text
//! nabla^alpha_{a(alpha)-1} y(t) = f(t, y(t)),   t = a(alpha)+1, a(alpha)+2, ...
//! y(a(alpha)) = c,                              a(alpha) = a + n - 1
//! ```
//!
//! A single initial value determines the solution, which is
//! `y(t) = c gbinom(alpha, k) + sum_{s=a(alpha)+1}^{t} gbinom(alpha, t-s) f(s, y(s))`
//! with `k = t - a(alpha)`. The `s = t` weight is 1, so each step is an
//! implicit scalar equation `y = F + f(t, y)`.

mod expr;
mod io;

pub use expr::{Expr, Func};
pub use io::{read_problem, trace_csv, trace_plot_csv, ProblemFile};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Orientation};
use crate::kernels::{gbinom_at, int, is_integer, weights, Mode, Order, Rational, Scalar, Value};
use crate::operators::{nabla_diff, nabla_left_diff, nabla_left_sum};

#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    /// `f = 0`.
    Zero,
    /// `f(t, y) = lambda y + mu[k]`, `k = t - a(alpha)`; missing entries are 0.
    Affine {
        lambda: Rational,
        mu: Vec<Rational>,
    },
    Expression(Expr),
}

impl Rhs {
    pub fn affine(lambda: Rational) -> Rhs {
        Rhs::Affine { lambda, mu: Vec::new() }
    }

    pub fn is_affine(&self) -> bool {
        match self {
            Rhs::Zero | Rhs::Affine { .. } => true,
            Rhs::Expression(e) => e.is_affine_in_y(),
        }
    }

    pub fn eval<S: Scalar>(&self, t: &Rational, k: usize, y: &S) -> Result<S> {
        match self {
            Rhs::Zero => Ok(S::zero()),
            Rhs::Affine { lambda, mu } => {
                let m = mu.get(k).map_or_else(S::zero, S::from_rational);
                Ok(S::from_rational(lambda) * y.clone() + m)
            }
            Rhs::Expression(e) => e.eval(t, k as i64, y),
        }
    }

    /// `(lambda, mu)` with `f(t, y) = lambda y + mu` at this step.
    fn linear_part<S: Scalar>(&self, t: &Rational, k: usize) -> Result<(S, S)> {
        let mu = self.eval(t, k, &S::zero())?;
        let lambda = self.eval(t, k, &S::one())? - mu.clone();
        Ok((lambda, mu))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IvProblem {
    order: Order,
    a: Rational,
    c: Value,
    rhs: Rhs,
    horizon: usize,
}

impl IvProblem {
    pub fn new(order: Order, a: Rational, c: Value, rhs: Rhs, horizon: usize) -> Result<IvProblem> {
        if order.is_integer() {
            return Err(Error::Domain(format!(
                "the initial value problem needs a non-integer order, got {}",
                order.alpha()
            )));
        }
        Ok(IvProblem {
            order,
            a,
            c,
            rhs,
            horizon,
        })
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// `a(alpha) = a + n - 1`, where the solution starts.
    pub fn start(&self) -> Rational {
        &self.a + int(self.order.n() as i64 - 1)
    }

    pub fn c(&self) -> &Value {
        &self.c
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(mut self, horizon: usize) -> IvProblem {
        self.horizon = horizon;
        self
    }

    fn c_as<S: Scalar>(&self) -> Result<S> {
        match &self.c {
            Value::Exact(r) => Ok(S::from_rational(r)),
            Value::Float(x) => {
                S::from_f64(*x).ok_or_else(|| Error::Mode(format!("initial value {x} is not rational; use float mode")))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrace<S> {
    /// The solution on `a(alpha), a(alpha)+1, ...`.
    pub y: GridFunction<S>,
    /// Implicit-solve iterations per step; 0 for closed-form steps.
    pub iterations: Vec<usize>,
    /// `nabla^{-(n-alpha)}_{a(alpha)-1} y` at `a(alpha)`, which must equal `c`.
    pub initial_sum: S,
}

impl<S: Scalar> SolutionTrace<S> {
    pub fn values(&self) -> &[S] {
        self.y.values()
    }
}

/// Steps the problem forward `horizon` times.
pub fn solve<S: Scalar>(p: &IvProblem, opts: &SolveOptions) -> Result<SolutionTrace<S>> {
    let affine = p.rhs.is_affine();
    if S::MODE == Mode::Exact && !affine {
        return Err(Error::Mode(
            "exact mode needs a right-hand side affine in y; use float mode".into(),
        ));
    }
    let c: S = p.c_as()?;
    let start = p.start();
    let w: Vec<S> = weights(p.order.alpha(), p.horizon + 1);
    let mut y = Vec::with_capacity(p.horizon + 1);
    let mut forcing: Vec<S> = Vec::with_capacity(p.horizon + 1);
    let mut iterations = Vec::with_capacity(p.horizon + 1);
    y.push(c.clone());
    forcing.push(S::zero());
    iterations.push(0);
    for k in 1..=p.horizon {
        let t = &start + int(k as i64);
        let mut memory = c.mul_ref(&w[k]);
        for j in 1..k {
            memory = memory + w[k - j].mul_ref(&forcing[j]);
        }
        let (yk, iters) = if affine {
            let (lambda, mu): (S, S) = p.rhs.linear_part(&t, k)?;
            let denom = S::one() - lambda;
            if denom.is_zero() {
                return Err(Error::Singular { k });
            }
            ((memory + mu) / denom, 0)
        } else {
            implicit_step(&p.rhs, &t, k, memory.to_f64(), opts)
                .map(|(v, i)| (S::from_f64(v).expect("float mode"), i))?
        };
        forcing.push(p.rhs.eval(&t, k, &yk)?);
        y.push(yk);
        iterations.push(iters);
    }
    let initial_sum = initial_sum(p, &c)?;
    Ok(SolutionTrace {
        y: GridFunction::new(start, Orientation::Left, y)?,
        iterations,
        initial_sum,
    })
}

// The initial condition in its summed form, through the operators module.
fn initial_sum<S: Scalar>(p: &IvProblem, c: &S) -> Result<S> {
    let nu = p.order.complement();
    let start = p.start();
    let g = GridFunction::new(&start - int(1), Orientation::Left, vec![S::zero(), c.clone()])?;
    nabla_left_sum(&g, &nu)?.at(&start).cloned()
}

/// Solves `y = F + f(t, y)` for a general right-hand side: damped fixed
/// point iteration first, bisection on `y - f(t, y) - F` if that stalls.
fn implicit_step(rhs: &Rhs, t: &Rational, k: usize, memory: f64, opts: &SolveOptions) -> Result<(f64, usize)> {
    let g = |y: f64| -> f64 { rhs.eval(t, k, &y).map(|f| y - f - memory).unwrap_or(f64::NAN) };
    let converged = |y: f64, step: f64| step.abs() <= opts.tol * y.abs().max(1.0);
    let fp_budget = opts.max_iter / 2;
    let mut y = memory;
    let mut best = (memory, f64::INFINITY);
    let mut omega = 1.0;
    let mut last_step = f64::INFINITY;
    let mut used = 0;
    while used < fp_budget {
        used += 1;
        let step = -g(y);
        if !step.is_finite() {
            break;
        }
        if step.abs() < best.1 {
            best = (y, step.abs());
        }
        if converged(y, step) {
            return Ok((y + step, used));
        }
        if step.abs() > last_step {
            omega *= 0.5;
        }
        last_step = step.abs();
        y += omega * step;
    }

    // Bracket a sign change of g around the best iterate, then bisect.
    let centre = best.0;
    let g0 = g(centre);
    if g0 == 0.0 {
        return Ok((centre, used));
    }
    let mut radius = centre.abs().max(1.0);
    let mut bracket = None;
    for _ in 0..64 {
        for other in [centre - radius, centre + radius] {
            let go = g(other);
            if go.is_finite() && g0.is_finite() && go.signum() != g0.signum() {
                bracket = Some(if other < centre {
                    (other, centre)
                } else {
                    (centre, other)
                });
                break;
            }
        }
        if bracket.is_some() {
            break;
        }
        radius *= 2.0;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return Err(Error::NonConvergence {
            k,
            iterations: used,
            last: centre,
        });
    };
    let lo_sign = g(lo).signum();
    let mut mid = 0.5 * (lo + hi);
    while used < opts.max_iter {
        used += 1;
        mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 || converged(mid, hi - lo) {
            return Ok((mid, used));
        }
        if gm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        k,
        iterations: used,
        last: mid,
    })
}

/// `|nabla^alpha_{a(alpha)-1} y(t) - f(t, y(t))|` for each step `t >= a(alpha)+1`,
/// with the difference recomputed by the operators module.
pub fn residual_profile<S: Scalar>(p: &IvProblem, trace: &SolutionTrace<S>) -> Result<Vec<(Rational, S)>> {
    let y = trace.values();
    if y.len() < 2 {
        return Err(Error::WindowTooShort {
            what: "residual".into(),
            needed: 2,
            got: y.len(),
        });
    }
    let start = p.start();
    let mut padded = Vec::with_capacity(y.len() + 1);
    padded.push(S::zero());
    padded.extend_from_slice(y);
    let g = GridFunction::new(&start - int(1), Orientation::Left, padded)?;
    let lhs = nabla_left_diff(&g, p.order.alpha())?;
    (1..y.len())
        .map(|k| {
            let t = &start + int(k as i64);
            let l = lhs.at(&t)?;
            let f = p.rhs.eval(&t, k, &y[k])?;
            Ok((t, S::discrepancy(l, &f)))
        })
        .collect()
}

pub fn residual<S: Scalar>(p: &IvProblem, trace: &SolutionTrace<S>) -> Result<S> {
    Ok(residual_profile(p, trace)?
        .into_iter()
        .map(|(_, r)| r)
        .fold(S::zero(), |acc, r| if r > acc { r } else { acc }))
}

/// Homogeneous part of the solution at `t` in its n-term form and in its
/// collapsed single-term form:
///
/// ```text
/// multi  = nabla^n [ c (t-a(alpha)+1)^{alpha-1 rising} / Gamma(alpha) ]
///          + sum_{j<n} c (t-a(alpha))^{alpha-n+j rising} / Gamma(alpha+j-n+1)
/// single = c (t-a(alpha)+1)^{alpha-1 rising} / Gamma(alpha)
/// ```
pub fn representation_terms<S: Scalar>(order: &Order, a: &Rational, c: &S, t: &Rational) -> Result<(S, S)> {
    let stages = telescoping_stages(order, a, c, t)?;
    Ok((stages[0].clone(), stages[stages.len() - 1].clone()))
}

/// The representation after each merge of its two leading terms. Entry 0
/// is the n-term form with the n-th difference taken numerically, entry 1
/// has that difference in closed form, and the last entry is the single
/// term. All entries agree.
pub fn telescoping_stages<S: Scalar>(order: &Order, a: &Rational, c: &S, t: &Rational) -> Result<Vec<S>> {
    if order.is_integer() {
        return Err(Error::Domain("the representation needs a non-integer order".into()));
    }
    let start = a + int(order.n() as i64 - 1);
    let gap = t - &start;
    if !is_integer(&gap) || gap.is_negative() {
        return Err(Error::OutsideWindow(t.to_string(), format!("N_{start}")));
    }
    let k = crate::kernels::as_i64(&gap).expect("integer gap");
    let n = order.n();
    let alpha = order.alpha();
    // (x)^{beta rising} / Gamma(beta + 1) = gbinom(beta + 1, x - 1) on integers x,
    // zero for x <= 0.
    let kernel = |beta: &Rational, x: i64| -> S { c.mul_ref(&gbinom_at(&S::from_rational(&(beta + int(1))), x - 1)) };
    let beta_of = |j: usize| alpha - int(n as i64) + int(j as i64);

    let tail = |from: usize| -> S { (from..n).fold(S::zero(), |acc, j| acc + kernel(&beta_of(j), k)) };

    // n-th difference of the single-term kernel, evaluated directly.
    let lo = k - n as i64;
    let h = GridFunction::from_fn(int(lo), Orientation::Left, n + 1, |x| {
        let x = crate::kernels::as_i64(x).expect("integer");
        kernel(&(alpha - int(1)), x + 1)
    })?;
    let diff = nabla_diff(&h, n, false)?.at(&int(k))?.clone();

    let mut stages = vec![diff + tail(0)];
    // After merging j pairs the leading term is c (t-a(alpha)+1)^{alpha-n+j-1} / Gamma(alpha-n+j).
    for j in 0..=n {
        let lead = kernel(&(beta_of(j) - int(1)), k + 1);
        stages.push(lead + tail(j));
    }
    Ok(stages)
}
