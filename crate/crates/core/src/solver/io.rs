//! Problem files (JSON) and trace output (CSV).
//!
//! ```json
//! {"alpha": "1/2", "a": "0", "c": "1", "horizon": 4, "mode": "exact",
//!  "rhs": {"kind": "affine", "lambda": "1/2", "mu": ["0", "1"]}}
//! ```
//!
//! `rhs.kind` is `zero`, `affine` (`mu` optional) or `expression`
//! (`"expr": "y/2 + sin(t)"`). `mode`, `tol` and `max_iter` are optional.

use serde::Deserialize;

use super::{residual_profile, Expr, IvProblem, Rhs, SolutionTrace, SolveOptions};
use crate::error::{Error, Result};
use crate::kernels::{format_rational, parse_rational, Mode, Order, Rational, Scalar, Value};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub alpha: Number,
    #[serde(default)]
    pub a: Option<Number>,
    pub c: Number,
    pub rhs: RhsFile,
    pub horizon: usize,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
}

/// A number written either as a string (`"3/4"`) or a JSON number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Text(String),
    Json(serde_json::Number),
}

impl Number {
    fn text(&self) -> String {
        match self {
            Number::Text(s) => s.clone(),
            Number::Json(n) => n.to_string(),
        }
    }

    fn rational(&self, what: &str) -> Result<Rational> {
        parse_rational(&self.text()).map_err(|_| Error::Mode(format!("{what} `{}` is not rational", self.text())))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RhsFile {
    Zero,
    Affine {
        lambda: Number,
        #[serde(default)]
        mu: Vec<Number>,
    },
    Expression {
        expr: String,
    },
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// The problem, the mode it should run in (`default_mode` unless the
    /// file says otherwise) and the solver options.
    pub fn into_problem(self, default_mode: Mode) -> Result<(IvProblem, Mode, SolveOptions)> {
        let mode = self.mode.unwrap_or(default_mode);
        let order = Order::new(self.alpha.rational("alpha")?)?;
        let a = match &self.a {
            Some(a) => a.rational("a")?,
            None => Rational::from_integer(0.into()),
        };
        let c = match mode {
            Mode::Exact => Value::Exact(self.c.rational("c")?),
            Mode::Float => Value::parse(&self.c.text(), Mode::Float)?,
        };
        let rhs = match self.rhs {
            RhsFile::Zero => Rhs::Zero,
            RhsFile::Affine { lambda, mu } => Rhs::Affine {
                lambda: lambda.rational("lambda")?,
                mu: mu.iter().map(|m| m.rational("mu")).collect::<Result<_>>()?,
            },
            RhsFile::Expression { expr } => Rhs::Expression(Expr::parse(&expr)?),
        };
        let defaults = SolveOptions::default();
        let opts = SolveOptions {
            tol: self.tol.unwrap_or(defaults.tol),
            max_iter: self.max_iter.unwrap_or(defaults.max_iter),
        };
        Ok((IvProblem::new(order, a, c, rhs, self.horizon)?, mode, opts))
    }
}

pub fn read_problem(text: &str, default_mode: Mode) -> Result<(IvProblem, Mode, SolveOptions)> {
    ProblemFile::parse(text)?.into_problem(default_mode)
}

pub fn trace_csv<S: Scalar>(trace: &SolutionTrace<S>) -> String {
    let mut out = String::from("k,t,y\n");
    for (k, (t, y)) in trace.y.points().enumerate() {
        out.push_str(&format!("{k},{},{}\n", format_rational(&t), y.to_csv()));
    }
    out
}

/// Long format `series,t,value` with the solution and, where defined, the
/// pointwise residual.
pub fn trace_plot_csv<S: Scalar>(p: &IvProblem, trace: &SolutionTrace<S>) -> Result<String> {
    let mut out = String::from("series,t,value\n");
    for (t, y) in trace.y.points() {
        out.push_str(&format!("y,{},{}\n", format_rational(&t), y.to_csv()));
    }
    if trace.values().len() >= 2 {
        for (t, r) in residual_profile(p, trace)? {
            out.push_str(&format!("residual,{},{}\n", format_rational(&t), r.to_csv()));
        }
    }
    Ok(out)
}
