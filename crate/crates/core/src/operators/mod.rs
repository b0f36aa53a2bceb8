//! The eight Riemann-type fractional sums and differences on one-step
//! lattices, plus integer-order forward and backward differences.
//!
//! Every operator works in index form. A left operator reads `x_k = f(a + k)`
//! and a right operator reads `x_k = f(b - k)`; in both cases the sum of
//! order `alpha` is the convolution with `gbinom(alpha, .)` and the outer
//! integer difference is an adjacent difference in `k`. Only the base and
//! the orientation of the result distinguish the eight cases.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Orientation};
use crate::kernels::{int, Order, Rational, Scalar};
use crate::par::{map_with, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    DeltaLeftSum,
    DeltaRightSum,
    NablaLeftSum,
    NablaRightSum,
    DeltaLeftDiff,
    DeltaRightDiff,
    NablaLeftDiff,
    NablaRightDiff,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::DeltaLeftSum,
        OperatorKind::DeltaRightSum,
        OperatorKind::NablaLeftSum,
        OperatorKind::NablaRightSum,
        OperatorKind::DeltaLeftDiff,
        OperatorKind::DeltaRightDiff,
        OperatorKind::NablaLeftDiff,
        OperatorKind::NablaRightDiff,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            OperatorKind::DeltaLeftSum => "delta-left-sum",
            OperatorKind::DeltaRightSum => "delta-right-sum",
            OperatorKind::NablaLeftSum => "nabla-left-sum",
            OperatorKind::NablaRightSum => "nabla-right-sum",
            OperatorKind::DeltaLeftDiff => "delta-left-diff",
            OperatorKind::DeltaRightDiff => "delta-right-diff",
            OperatorKind::NablaLeftDiff => "nabla-left-diff",
            OperatorKind::NablaRightDiff => "nabla-right-diff",
        }
    }

    pub fn is_left(self) -> bool {
        matches!(
            self,
            OperatorKind::DeltaLeftSum
                | OperatorKind::NablaLeftSum
                | OperatorKind::DeltaLeftDiff
                | OperatorKind::NablaLeftDiff
        )
    }

    pub fn is_sum(self) -> bool {
        matches!(
            self,
            OperatorKind::DeltaLeftSum
                | OperatorKind::DeltaRightSum
                | OperatorKind::NablaLeftSum
                | OperatorKind::NablaRightSum
        )
    }

    pub fn is_nabla(self) -> bool {
        matches!(
            self,
            OperatorKind::NablaLeftSum
                | OperatorKind::NablaRightSum
                | OperatorKind::NablaLeftDiff
                | OperatorKind::NablaRightDiff
        )
    }

    fn orientation(self) -> Orientation {
        if self.is_left() {
            Orientation::Left
        } else {
            Orientation::Right
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::UnknownOperator(s.to_string()))
    }
}

/// Where a nabla sum starts. `Standard` sums from `a + 1` (right: up to
/// `b - 1`); `InclusiveBase` also includes the base point itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    #[default]
    Standard,
    InclusiveBase,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Convention::Standard),
            "inclusive" | "inclusive-base" => Ok(Convention::InclusiveBase),
            other => Err(Error::Domain(format!("unknown convention `{other}`"))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Standard => f.write_str("standard"),
            Convention::InclusiveBase => f.write_str("inclusive-base"),
        }
    }
}

fn too_short(what: &str, needed: usize, got: usize) -> Error {
    Error::WindowTooShort {
        what: what.to_string(),
        needed,
        got,
    }
}

/// `m`-fold adjacent difference `d[i] = x[i+1] - x[i]`.
fn adjacent_diff<S: Scalar>(x: &[S], m: usize) -> Vec<S> {
    let mut d = x.to_vec();
    for _ in 0..m {
        d = d.windows(2).map(|w| w[1].clone() - &w[0]).collect();
    }
    d
}

fn step(o: Orientation) -> Rational {
    match o {
        Orientation::Left => int(1),
        Orientation::Right => int(-1),
    }
}

/// `m`-fold forward difference `Delta^m f`; `signed` multiplies by `(-1)^m`.
/// The result lives on the stored window minus its top `m` points.
pub fn delta_diff<S: Scalar>(f: &GridFunction<S>, m: usize, signed: bool) -> Result<GridFunction<S>> {
    if f.len() <= m {
        return Err(too_short("forward difference", m + 1, f.len()));
    }
    let mut d = adjacent_diff(&f.ascending(), m);
    if signed && m % 2 == 1 {
        d = d.into_iter().map(|v| -v).collect();
    }
    GridFunction::from_ascending(f.lowest_point(), d, f.orientation())
}

/// `m`-fold backward difference `nabla^m f`; `signed` multiplies by `(-1)^m`.
/// The result lives on the stored window minus its bottom `m` points.
pub fn nabla_diff<S: Scalar>(f: &GridFunction<S>, m: usize, signed: bool) -> Result<GridFunction<S>> {
    if f.len() <= m {
        return Err(too_short("backward difference", m + 1, f.len()));
    }
    let mut d = adjacent_diff(&f.ascending(), m);
    if signed && m % 2 == 1 {
        d = d.into_iter().map(|v| -v).collect();
    }
    GridFunction::from_ascending(f.lowest_point() + int(m as i64), d, f.orientation())
}

/// Index-form sum: `out_m = sum_{k <= m} gbinom(alpha, m - k) x_k`, with
/// `x_0` dropped when `skip_base` is set.
fn index_sum<S: Scalar>(x: &[S], alpha: &Rational, skip_base: bool) -> Vec<S> {
    if skip_base {
        let mut x = x.to_vec();
        x[0] = S::zero();
        S::fractional_sum(alpha, &x)
    } else {
        S::fractional_sum(alpha, x)
    }
}

fn positive(alpha: &Rational) -> Result<()> {
    if alpha.is_zero() || alpha < &Rational::zero() {
        return Err(Error::Domain(format!("order must be positive, got {alpha}")));
    }
    Ok(())
}

/// A configured fractional operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FracOperator {
    pub kind: OperatorKind,
    pub order: Order,
    pub convention: Convention,
    /// Delta differences only: keep the points below the shifted base where
    /// the inner sum is empty, giving `N_{a-alpha}` / `_{b+alpha}N`.
    pub extended: bool,
}

impl FracOperator {
    pub fn new(kind: OperatorKind, order: Order) -> Self {
        FracOperator {
            kind,
            order,
            convention: Convention::Standard,
            extended: false,
        }
    }

    pub fn with_convention(mut self, convention: Convention) -> Result<Self> {
        if convention == Convention::InclusiveBase && !self.kind.is_nabla() {
            return Err(Error::Domain(format!(
                "inclusive-base convention applies to nabla operators, not {}",
                self.kind
            )));
        }
        self.convention = convention;
        Ok(self)
    }

    pub fn extended(mut self) -> Self {
        self.extended = true;
        self
    }

    /// Applies the operator. Left operators anchor at the lowest stored
    /// point, right operators at the highest.
    pub fn apply<S: Scalar>(&self, f: &GridFunction<S>) -> Result<GridFunction<S>> {
        let orient = self.kind.orientation();
        let f = f.reoriented(orient);
        let s = step(orient);
        let p = f.base().clone();
        let x = f.values();
        let len = x.len();
        let alpha = self.order.alpha();
        let n = self.order.n();
        let inclusive = self.convention == Convention::InclusiveBase;
        match self.kind {
            OperatorKind::DeltaLeftSum | OperatorKind::DeltaRightSum => {
                GridFunction::new(p + &s * alpha, orient, index_sum(x, alpha, false))
            }
            OperatorKind::NablaLeftSum | OperatorKind::NablaRightSum => {
                GridFunction::new(p, orient, index_sum(x, alpha, !inclusive))
            }
            OperatorKind::DeltaLeftDiff | OperatorKind::DeltaRightDiff => {
                let nu = self.order.complement();
                let inner = if nu.is_zero() {
                    x.to_vec()
                } else {
                    index_sum(x, &nu, false)
                };
                let inner_base = p + &s * &nu;
                if self.extended {
                    let mut padded = vec![S::zero(); n];
                    padded.extend(inner);
                    let base = inner_base - &s * int(n as i64);
                    GridFunction::new(base, orient, adjacent_diff(&padded, n))
                } else {
                    if len <= n {
                        return Err(too_short(self.kind.tag(), n + 1, len));
                    }
                    GridFunction::new(inner_base, orient, adjacent_diff(&inner, n))
                }
            }
            OperatorKind::NablaLeftDiff | OperatorKind::NablaRightDiff => {
                if self.order.is_integer() {
                    if len <= n {
                        return Err(too_short(self.kind.tag(), n + 1, len));
                    }
                    return GridFunction::new(p + &s * int(n as i64), orient, adjacent_diff(x, n));
                }
                let nu = self.order.complement();
                let mut padded = vec![S::zero(); n];
                padded.extend(index_sum(x, &nu, !inclusive));
                let out = adjacent_diff(&padded, n);
                if inclusive {
                    GridFunction::new(p, orient, out)
                } else {
                    if len < 2 {
                        return Err(too_short(self.kind.tag(), 2, len));
                    }
                    GridFunction::new(p + s, orient, out[1..].to_vec())
                }
            }
        }
    }

    /// Applies the operator to many inputs; the output order matches the input.
    pub fn apply_batch<S: Scalar>(&self, inputs: &[GridFunction<S>], exec: Execution) -> Vec<Result<GridFunction<S>>> {
        map_with(exec, inputs.len(), |i| self.apply(&inputs[i]))
    }
}

fn apply<S: Scalar>(kind: OperatorKind, f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    positive(alpha)?;
    FracOperator::new(kind, Order::new(alpha.clone())?).apply(f)
}

/// `Delta_a^{-alpha} f` on `N_{a+alpha}`, `a` the lowest stored point.
pub fn delta_left_sum<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::DeltaLeftSum, f, alpha)
}

/// `_b Delta^{-alpha} f` on `_{b-alpha}N`, `b` the highest stored point.
pub fn delta_right_sum<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::DeltaRightSum, f, alpha)
}

/// `nabla_a^{-alpha} f` on `N_a`, zero at `a`.
pub fn nabla_left_sum<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::NablaLeftSum, f, alpha)
}

/// `_b nabla^{-alpha} f` on `_bN`, zero at `b`.
pub fn nabla_right_sum<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::NablaRightSum, f, alpha)
}

/// `Delta_a^alpha f = Delta^n Delta_a^{-(n-alpha)} f` on `N_{a+n-alpha}`.
pub fn delta_left_diff<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::DeltaLeftDiff, f, alpha)
}

/// `_b Delta^alpha f = (-1)^n nabla^n _b Delta^{-(n-alpha)} f` on `_{b-(n-alpha)}N`.
pub fn delta_right_diff<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::DeltaRightDiff, f, alpha)
}

/// `nabla_a^alpha f = nabla^n nabla_a^{-(n-alpha)} f`.
pub fn nabla_left_diff<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::NablaLeftDiff, f, alpha)
}

/// `_b nabla^alpha f = (-1)^n Delta^n _b nabla^{-(n-alpha)} f`.
pub fn nabla_right_diff<S: Scalar>(f: &GridFunction<S>, alpha: &Rational) -> Result<GridFunction<S>> {
    apply(OperatorKind::NablaRightDiff, f, alpha)
}

#[cfg(test)]
mod tests;
