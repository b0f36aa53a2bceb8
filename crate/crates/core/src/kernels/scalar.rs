//! Dual-mode numbers: exact rationals and `f64`.
//!
//! Every operator in this crate is generic over [`Scalar`]. The two
//! implementations never mix at compile time; the runtime [`Value`] enum
//! carries a mode tag and refuses cross-mode arithmetic.

use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "rational" => Ok(Mode::Exact),
            "float" | "f64" => Ok(Mode::Float),
            other => Err(Error::Mode(format!("unknown mode `{other}`"))),
        }
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `p/q`, an integer, or a finite decimal (optionally with exponent)
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Mode(format!("`{s}` is not a rational number"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(numer);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -r } else { r })
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Integer value of `r`, if it is an integer that fits in `i64`.
pub fn as_i64(r: &Rational) -> Option<i64> {
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

/// Smallest integer not below `r`.
pub fn ceil_i64(r: &Rational) -> i64 {
    r.ceil().to_integer().to_i64().expect("order out of range")
}

/// Numeric type every operator is generic over.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + 'static
{
    const MODE: Mode;

    fn from_rational(r: &Rational) -> Self;

    fn from_i64(v: i64) -> Self;

    /// `None` in exact mode: a float cannot enter exact arithmetic.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn mul_ref(&self, rhs: &Self) -> Self;

    fn to_value(&self) -> Value;

    /// Pointwise discrepancy: absolute in exact mode, relative with a floor
    /// of one in float mode.
    fn discrepancy(lhs: &Self, rhs: &Self) -> Self;

    /// Whether a residual counts as a pass: exactly zero in exact mode,
    /// at most `tol` in float mode.
    fn accepts(residual: &Self, tol: f64) -> bool;

    /// `y[m] = sum_{k=0}^{m} w[m-k] x[k]` for `m < out_len`.
    fn convolve(w: &[Self], x: &[Self], out_len: usize) -> Vec<Self>;

    /// `y[m] = sum_{k=0}^{m} gbinom(alpha, m-k) x[k]`, same length as `x`.
    fn fractional_sum(alpha: &Rational, x: &[Self]) -> Vec<Self> {
        Self::convolve(&kernels::weights(alpha, x.len()), x, x.len())
    }

    /// `x^{rising beta} / Gamma(beta + 1)` at an integer `x`, zero for `x <= 0`.
    fn rising_kernel(x: i64, beta: &Rational) -> Result<Self>;

    /// `x^{(beta)} / Gamma(beta + 1)` (falling factorial power).
    fn falling_kernel(x: &Rational, beta: &Rational) -> Result<Self>;

    fn to_csv(&self) -> String;

    fn parse_csv(s: &str) -> Result<Self>;

    fn dot(a: &[Self], b: &[Self]) -> Self {
        a.iter().zip(b).fold(Self::zero(), |acc, (x, y)| acc + &x.mul_ref(y))
    }

    /// `prod_{j=1}^{k} (alpha + j - 1) / j`.
    fn gbinom(alpha: &Self, k: usize) -> Self {
        let mut acc = Self::one();
        for j in 1..=k {
            let num = alpha.clone() + Self::from_i64(j as i64 - 1);
            acc = acc.mul_ref(&num) / Self::from_i64(j as i64);
        }
        acc
    }
}

fn lcm_of<'a>(dens: impl Iterator<Item = &'a BigInt>) -> BigInt {
    dens.fold(BigInt::one(), |acc, d| {
        if d.is_one() || (&acc % d).is_zero() {
            acc
        } else {
            acc.lcm(d)
        }
    })
}

/// `gbinom(p/q, k) * q^(len-1) (len-1)!` for `k < len`: integer weights over
/// one denominator, built without any gcd.
fn integer_weights(alpha: &Rational, len: usize) -> (Vec<BigInt>, BigInt) {
    let (p, q) = (alpha.numer(), alpha.denom());
    // tail[k] = q^(len-1-k) (len-1)! / k!
    let mut tail = vec![BigInt::one(); len];
    for k in (1..len).rev() {
        tail[k - 1] = &tail[k] * q * BigInt::from(k);
    }
    let mut rising = BigInt::one();
    let mut w = Vec::with_capacity(len);
    for (k, t) in tail.iter().enumerate() {
        if k > 0 {
            rising *= p + q * BigInt::from(k - 1);
        }
        w.push(&rising * t);
    }
    (w, tail[0].clone())
}

/// Scales a slice of rationals to integers over one common denominator.
fn common_denominator(xs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = lcm_of(xs.iter().map(|x| x.denom()));
    let nums = xs
        .iter()
        .map(|x| {
            if x.denom() == &den {
                x.numer().clone()
            } else {
                x.numer() * (&den / x.denom())
            }
        })
        .collect();
    (nums, den)
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_i64(v: i64) -> Self {
        int(v)
    }

    fn from_f64(_: f64) -> Option<Self> {
        None
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn to_value(&self) -> Value {
        Value::Exact(self.clone())
    }

    fn discrepancy(lhs: &Self, rhs: &Self) -> Self {
        Signed::abs(&(lhs - rhs))
    }

    fn accepts(residual: &Self, _tol: f64) -> bool {
        residual.is_zero()
    }

    // Integer multiply-accumulate over common denominators; one reduction
    // per output instead of one per term.
    fn convolve(w: &[Self], x: &[Self], out_len: usize) -> Vec<Self> {
        let (wn, wd) = common_denominator(&w[..out_len.min(w.len())]);
        let (xn, xd) = common_denominator(&x[..out_len.min(x.len())]);
        let den = &wd * &xd;
        crate::par::map_indices(out_len, |m| {
            let mut acc = BigInt::zero();
            let lo = m.saturating_sub(wn.len() - 1);
            for k in lo..=m.min(xn.len() - 1) {
                let (a, b) = (&wn[m - k], &xn[k]);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            Rational::new(acc, den.clone())
        })
    }

    fn fractional_sum(alpha: &Rational, x: &[Self]) -> Vec<Self> {
        if x.is_empty() {
            return Vec::new();
        }
        let (wn, wd) = integer_weights(alpha, x.len());
        let (xn, xd) = common_denominator(x);
        let den = &wd * &xd;
        crate::par::map_indices(x.len(), |m| {
            let mut acc = BigInt::zero();
            for k in 0..=m {
                let (a, b) = (&wn[m - k], &xn[k]);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            Rational::new(acc, den.clone())
        })
    }

    fn dot(a: &[Self], b: &[Self]) -> Self {
        let len = a.len().min(b.len());
        let (an, ad) = common_denominator(&a[..len]);
        let (bn, bd) = common_denominator(&b[..len]);
        let acc = an.iter().zip(&bn).fold(BigInt::zero(), |acc, (x, y)| acc + x * y);
        Rational::new(acc, ad * bd)
    }

    // With alpha = p/q: prod (p + (j-1) q) / (q^k k!), reduced once.
    fn gbinom(alpha: &Self, k: usize) -> Self {
        let (p, q) = (alpha.numer(), alpha.denom());
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for j in 1..=k {
            let factor = p + q * BigInt::from(j - 1);
            if factor.is_zero() {
                return Rational::zero();
            }
            num *= factor;
            den *= q * BigInt::from(j);
        }
        Rational::new(num, den)
    }

    fn rising_kernel(x: i64, beta: &Rational) -> Result<Self> {
        if x <= 0 {
            return Ok(Rational::zero());
        }
        Ok(kernels::gbinom(&(beta + Rational::one()), (x - 1) as usize))
    }

    fn falling_kernel(x: &Rational, beta: &Rational) -> Result<Self> {
        let k = x - beta;
        match as_i64(&k) {
            Some(k) if k >= 0 => Ok(kernels::gbinom(&(beta + Rational::one()), k as usize)),
            Some(_) => Ok(Rational::zero()),
            None => Err(Error::Mode(format!("falling kernel {x}^({beta}) is not rational"))),
        }
    }

    fn to_csv(&self) -> String {
        format_rational(self)
    }

    fn parse_csv(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn to_value(&self) -> Value {
        Value::Float(*self)
    }

    fn discrepancy(lhs: &Self, rhs: &Self) -> Self {
        (lhs - rhs).abs() / 1f64.max(f64::abs(*lhs)).max(f64::abs(*rhs))
    }

    fn accepts(residual: &Self, tol: f64) -> bool {
        residual.is_finite() && *residual <= tol
    }

    fn convolve(w: &[Self], x: &[Self], out_len: usize) -> Vec<Self> {
        crate::par::map_indices(out_len, |m| {
            let lo = m.saturating_sub(w.len() - 1);
            (lo..=m.min(x.len() - 1)).map(|k| w[m - k] * x[k]).sum()
        })
    }

    fn rising_kernel(x: i64, beta: &Rational) -> Result<Self> {
        kernels::normalized_rising(x as f64, rational_to_f64(beta))
    }

    fn falling_kernel(x: &Rational, beta: &Rational) -> Result<Self> {
        kernels::normalized_falling(rational_to_f64(x), rational_to_f64(beta))
    }

    fn to_csv(&self) -> String {
        format!("{self}")
    }

    fn parse_csv(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            return parse_rational(s).map(|r| rational_to_f64(&r));
        }
        s.parse::<f64>()
            .map_err(|_| Error::Mode(format!("`{s}` is not a number")))
    }
}

/// A mode-tagged number for runtime boundaries (files, reports, CLI).
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn mode(&self) -> Mode {
        match self {
            Value::Exact(_) => Mode::Exact,
            Value::Float(_) => Mode::Float,
        }
    }

    pub fn parse(s: &str, mode: Mode) -> Result<Value> {
        match mode {
            Mode::Exact => parse_rational(s).map(Value::Exact),
            Mode::Float => f64::parse_csv(s).map(Value::Float),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    fn combine(
        &self,
        rhs: &Value,
        op: &str,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        float: impl Fn(f64, f64) -> f64,
    ) -> Result<Value> {
        match (self, rhs) {
            (Value::Exact(a), Value::Exact(b)) => Ok(Value::Exact(exact(a, b))),
            (Value::Float(a), Value::Float(b)) => Ok(Value::Float(float(*a, *b))),
            _ => Err(Error::Mode(format!(
                "cannot {op} {} and {} values",
                self.mode(),
                rhs.mode()
            ))),
        }
    }

    pub fn checked_add(&self, rhs: &Value) -> Result<Value> {
        self.combine(rhs, "add", |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Value) -> Result<Value> {
        self.combine(rhs, "subtract", |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, rhs: &Value) -> Result<Value> {
        self.combine(rhs, "multiply", |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, rhs: &Value) -> Result<Value> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        self.combine(rhs, "divide", |a, b| a / b, |a, b| a / b)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

/// A fractional order `alpha > 0` together with `n`, the smallest integer
/// not below `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Order {
    alpha: Rational,
    n: usize,
}

impl Order {
    pub fn new(alpha: Rational) -> Result<Order> {
        if !alpha.is_positive() {
            return Err(Error::Domain(format!("order must be positive, got {alpha}")));
        }
        let n = ceil_i64(&alpha) as usize;
        Ok(Order { alpha, n })
    }

    pub fn integer(n: usize) -> Result<Order> {
        Order::new(int(n as i64))
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_integer(&self) -> bool {
        is_integer(&self.alpha)
    }

    /// `n - alpha`, the order of the sum inside a Riemann difference.
    pub fn complement(&self) -> Rational {
        int(self.n as i64) - &self.alpha
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Order::new(parse_rational(s)?)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alpha)
    }
}
