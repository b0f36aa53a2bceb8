//! Functions on the one-step lattices `N_a = {a, a+1, ...}` and
//! `_bN = {b, b-1, ...}`, plus the domain bookkeeping of the operators.

mod io;

pub use io::{read_csv, read_json, write_csv, write_json};

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{as_i64, int, Order, Rational, Scalar};
use crate::operators::OperatorKind;

/// Forward jump `t + 1`.
pub fn sigma(t: &Rational) -> Rational {
    t + Rational::one()
}

/// Backward jump `t - 1`.
pub fn rho(t: &Rational) -> Rational {
    t - Rational::one()
}

/// `Left` stores `f(base + i)` at index `i`, `Right` stores `f(base - i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Left,
    Right,
}

impl Orientation {
    pub fn flip(self) -> Orientation {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
        }
    }

    fn step(self) -> i64 {
        match self {
            Orientation::Left => 1,
            Orientation::Right => -1,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Left => f.write_str("left"),
            Orientation::Right => f.write_str("right"),
        }
    }
}

/// A finite window of a lattice function. The abstract domain is infinite;
/// the stored window is exactly the set of points where values are known.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<S> {
    base: Rational,
    orientation: Orientation,
    values: Vec<S>,
}

impl<S: Scalar> GridFunction<S> {
    pub fn new(base: Rational, orientation: Orientation, values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::WindowTooShort {
                what: "grid function".into(),
                needed: 1,
                got: 0,
            });
        }
        Ok(GridFunction {
            base,
            orientation,
            values,
        })
    }

    pub fn from_fn(
        base: Rational,
        orientation: Orientation,
        len: usize,
        mut f: impl FnMut(&Rational) -> S,
    ) -> Result<Self> {
        let values = (0..len)
            .map(|i| f(&(&base + int(orientation.step() * i as i64))))
            .collect();
        Self::new(base, orientation, values)
    }

    pub fn constant(base: Rational, orientation: Orientation, len: usize, c: S) -> Result<Self> {
        Self::new(base, orientation, vec![c; len])
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Lattice point stored at index `i`.
    pub fn point(&self, i: usize) -> Rational {
        &self.base + int(self.orientation.step() * i as i64)
    }

    pub fn first_point(&self) -> Rational {
        self.point(0)
    }

    pub fn last_point(&self) -> Rational {
        self.point(self.len() - 1)
    }

    pub fn lowest_point(&self) -> Rational {
        match self.orientation {
            Orientation::Left => self.first_point(),
            Orientation::Right => self.last_point(),
        }
    }

    pub fn highest_point(&self) -> Rational {
        match self.orientation {
            Orientation::Left => self.last_point(),
            Orientation::Right => self.first_point(),
        }
    }

    pub fn index_of(&self, t: &Rational) -> Option<usize> {
        let offset = as_i64(&((t - &self.base) * int(self.orientation.step())))?;
        (offset >= 0 && (offset as usize) < self.len()).then_some(offset as usize)
    }

    /// Value at lattice point `t`; an error outside the stored window.
    pub fn at(&self, t: &Rational) -> Result<&S> {
        self.index_of(t)
            .map(|i| &self.values[i])
            .ok_or_else(|| Error::OutsideWindow(t.to_string(), self.window_label()))
    }

    pub fn window_label(&self) -> String {
        format!("[{}, {}]", self.lowest_point(), self.highest_point())
    }

    pub fn points(&self) -> impl Iterator<Item = (Rational, &S)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.point(i), v))
    }

    /// Values in increasing `t` order, starting at the lowest point.
    pub fn ascending(&self) -> Vec<S> {
        match self.orientation {
            Orientation::Left => self.values.clone(),
            Orientation::Right => self.values.iter().rev().cloned().collect(),
        }
    }

    /// Builds a function from values listed in increasing `t` starting at `low`.
    pub fn from_ascending(low: Rational, values: Vec<S>, orientation: Orientation) -> Result<Self> {
        match orientation {
            Orientation::Left => Self::new(low, orientation, values),
            Orientation::Right => {
                let base = &low + int(values.len() as i64 - 1);
                Self::new(base, orientation, values.into_iter().rev().collect())
            }
        }
    }

    /// Same function, stored from the other end of its window.
    pub fn reoriented(&self, orientation: Orientation) -> Self {
        if orientation == self.orientation {
            return self.clone();
        }
        GridFunction {
            base: self.last_point(),
            orientation,
            values: self.values.iter().rev().cloned().collect(),
        }
    }

    /// `g(t) = f(t + delta)`.
    pub fn shifted(&self, delta: &Rational) -> Self {
        GridFunction {
            base: &self.base - delta,
            orientation: self.orientation,
            values: self.values.clone(),
        }
    }

    /// Prepends `k` points on the far side of the base, filled with `fill`.
    pub fn pad_front(&self, k: usize, fill: S) -> Self {
        let mut values = vec![fill; k];
        values.extend(self.values.iter().cloned());
        GridFunction {
            base: &self.base - int(self.orientation.step() * k as i64),
            orientation: self.orientation,
            values,
        }
    }

    /// Drops the first `k` stored points.
    pub fn drop_front(&self, k: usize) -> Result<Self> {
        if k >= self.len() {
            return Err(Error::WindowTooShort {
                what: "drop_front".into(),
                needed: k + 1,
                got: self.len(),
            });
        }
        Ok(GridFunction {
            base: self.point(k),
            orientation: self.orientation,
            values: self.values[k..].to_vec(),
        })
    }

    /// Restriction to the points between `from` and `to` (inclusive, any order).
    pub fn restrict(&self, from: &Rational, to: &Rational) -> Result<Self> {
        let i = self.index_of(from);
        let j = self.index_of(to);
        match (i, j) {
            (Some(i), Some(j)) => {
                let (lo, hi) = (i.min(j), i.max(j));
                Ok(GridFunction {
                    base: self.point(lo),
                    orientation: self.orientation,
                    values: self.values[lo..=hi].to_vec(),
                })
            }
            _ => Err(Error::OutsideWindow(format!("[{from}, {to}]"), self.window_label())),
        }
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        GridFunction {
            base: self.base.clone(),
            orientation: self.orientation,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        if self.base != other.base || self.orientation != other.orientation || self.len() != other.len() {
            return Err(Error::Domain("grid functions have different windows".into()));
        }
        Ok(GridFunction {
            base: self.base.clone(),
            orientation: self.orientation,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }
}

/// Reflection `(Qf)(s) = f(a + b - s)` about the ends of the stored window.
pub fn q_reflect<S: Scalar>(f: &GridFunction<S>) -> GridFunction<S> {
    let pivot = f.lowest_point() + f.highest_point();
    reflect_about(f, &pivot)
}

/// `(Qf)(s) = f(a + b - s)` for explicit `a` and `b`, which must agree mod 1
/// with each other and with the lattice of `f`.
pub fn q_reflect_with<S: Scalar>(f: &GridFunction<S>, a: &Rational, b: &Rational) -> Result<GridFunction<S>> {
    if as_i64(&(b - a)).is_none() {
        return Err(Error::Congruence(a.to_string(), b.to_string()));
    }
    if as_i64(&(f.base() - a)).is_none() {
        return Err(Error::Congruence(a.to_string(), f.base().to_string()));
    }
    Ok(reflect_about(f, &(a + b)))
}

/// Values stay in place; the orientation flips and the base mirrors.
pub(crate) fn reflect_about<S: Scalar>(f: &GridFunction<S>, pivot: &Rational) -> GridFunction<S> {
    GridFunction {
        base: pivot - f.base(),
        orientation: f.orientation().flip(),
        values: f.values().to_vec(),
    }
}

/// A lattice together with the first index where an operator output is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSpec {
    pub base: Rational,
    pub orientation: Orientation,
    pub first_valid_index: i64,
}

impl DomainSpec {
    pub fn left(a: Rational) -> Self {
        DomainSpec {
            base: a,
            orientation: Orientation::Left,
            first_valid_index: 0,
        }
    }

    pub fn right(b: Rational) -> Self {
        DomainSpec {
            base: b,
            orientation: Orientation::Right,
            first_valid_index: 0,
        }
    }

    pub fn first_valid_point(&self) -> Rational {
        &self.base + int(self.orientation.step() * self.first_valid_index)
    }
}

/// Codomain of an operator in the form the domain observations state:
/// `N_{a+alpha}`, `_{b-alpha}N` for delta sums, `N_a`, `_bN` for nabla sums
/// (first valid point one step in), `N_{a+(n-alpha)}`, `_{b-(n-alpha)}N` for
/// delta differences and `N_{a+n}`, `_{b-n}N` for nabla differences.
pub fn operator_domain(kind: OperatorKind, order: &Order, input: &DomainSpec) -> Result<DomainSpec> {
    let expected = if kind.is_left() {
        Orientation::Left
    } else {
        Orientation::Right
    };
    if input.orientation != expected {
        return Err(Error::Domain(format!("{kind} acts on {expected}-oriented lattices")));
    }
    let start = input.first_valid_point();
    let alpha = order.alpha();
    let nu = order.complement();
    let n = order.n() as i64;
    let (shift, first_valid) = match kind {
        OperatorKind::DeltaLeftSum | OperatorKind::DeltaRightSum => (alpha.clone(), 0),
        OperatorKind::NablaLeftSum | OperatorKind::NablaRightSum => (Rational::zero(), 1),
        OperatorKind::DeltaLeftDiff | OperatorKind::DeltaRightDiff => (nu, 0),
        OperatorKind::NablaLeftDiff | OperatorKind::NablaRightDiff => (Rational::zero(), n),
    };
    let base = match expected {
        Orientation::Left => start + shift,
        Orientation::Right => start - shift,
    };
    Ok(DomainSpec {
        base,
        orientation: expected,
        first_valid_index: first_valid,
    })
}

/// Codomain as the definitions state it. Differs from [`operator_domain`]
/// only for nabla differences, which the definitions place on `N_{a+1}` and
/// `_{b-1}N`.
pub fn definitional_domain(kind: OperatorKind, order: &Order, input: &DomainSpec) -> Result<DomainSpec> {
    let mut d = operator_domain(kind, order, input)?;
    if matches!(kind, OperatorKind::NablaLeftDiff | OperatorKind::NablaRightDiff) {
        d.first_valid_index = 1;
    }
    Ok(d)
}
