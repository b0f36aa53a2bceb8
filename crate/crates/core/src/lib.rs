//! Discrete fractional calculus on one-step lattices: delta and nabla
//! fractional sums and Riemann-type differences, exact verification of
//! their identities, and an implicit solver for nabla initial value problems.

pub mod cli;
pub mod error;
pub mod grid;
pub mod identities;
pub mod kernels;
pub mod operators;
pub mod par;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{GridFunction, Orientation};
pub use kernels::{Mode, Order, Rational, Scalar, Value};
pub use operators::{Convention, FracOperator, OperatorKind};
