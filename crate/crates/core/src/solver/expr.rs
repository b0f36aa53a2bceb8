//! Right-hand sides written as expressions in `t`, `k` and `y`.
//!
//! Grammar: numbers (`3`, `1/2` via division, `0.25`, `1e-3`), the variables
//! `t` (lattice point), `k` (step index) and `y`, binary `+ - * / ^`, unary
//! minus, parentheses and the functions `sin cos tan exp ln sqrt abs tanh`.
//! Exact mode evaluates `+ - * /` and integer powers in rational arithmetic;
//! anything else needs float mode.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kernels::{as_i64, parse_rational, Mode, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Tanh => x.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    T,
    K,
    Y,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(syntax(format!("unexpected `{}`", p.tokens[p.pos])));
        }
        Ok(e)
    }

    /// Polynomial degree in `y`, or `None` when `y` enters non-polynomially.
    pub fn degree_in_y(&self) -> Option<u32> {
        match self {
            Expr::Num(_) | Expr::T | Expr::K => Some(0),
            Expr::Y => Some(1),
            Expr::Neg(e) => e.degree_in_y(),
            Expr::Add(l, r) | Expr::Sub(l, r) => Some(l.degree_in_y()?.max(r.degree_in_y()?)),
            Expr::Mul(l, r) => Some(l.degree_in_y()? + r.degree_in_y()?),
            Expr::Div(l, r) => match r.degree_in_y()? {
                0 => l.degree_in_y(),
                _ => None,
            },
            Expr::Pow(base, exp) => {
                let d = base.degree_in_y()?;
                if d == 0 {
                    return (exp.degree_in_y()? == 0).then_some(0);
                }
                match exp.as_ref() {
                    Expr::Num(e) => as_i64(e).filter(|e| *e >= 0).map(|e| d * e as u32),
                    _ => None,
                }
            }
            Expr::Call(_, arg) => (arg.degree_in_y()? == 0).then_some(0),
        }
    }

    pub fn is_affine_in_y(&self) -> bool {
        self.degree_in_y().is_some_and(|d| d <= 1)
    }

    pub fn eval<S: Scalar>(&self, t: &Rational, k: i64, y: &S) -> Result<S> {
        Ok(match self {
            Expr::Num(r) => S::from_rational(r),
            Expr::T => S::from_rational(t),
            Expr::K => S::from_i64(k),
            Expr::Y => y.clone(),
            Expr::Neg(e) => -e.eval(t, k, y)?,
            Expr::Add(l, r) => l.eval(t, k, y)? + r.eval(t, k, y)?,
            Expr::Sub(l, r) => l.eval(t, k, y)? - r.eval(t, k, y)?,
            Expr::Mul(l, r) => l.eval(t, k, y)? * r.eval(t, k, y)?,
            Expr::Div(l, r) => {
                let den = r.eval(t, k, y)?;
                if den.is_zero() {
                    return Err(Error::Pole(format!("division by zero in `{self}` at t = {t}")));
                }
                l.eval(t, k, y)? / den
            }
            Expr::Pow(base, exp) => {
                let b = base.eval(t, k, y)?;
                let int_exp = match exp.as_ref() {
                    Expr::Num(e) => as_i64(e),
                    _ => None,
                };
                match int_exp {
                    Some(e) => int_pow(b, e, self, t)?,
                    None => {
                        let e = exp.eval(t, k, y)?;
                        float_only::<S>(self)?;
                        from_float(b.to_f64().powf(e.to_f64()))
                    }
                }
            }
            Expr::Call(f, arg) => {
                let x = arg.eval(t, k, y)?;
                float_only::<S>(self)?;
                from_float(f.apply(x.to_f64()))
            }
        })
    }
}

fn from_float<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("float mode")
}

fn float_only<S: Scalar>(e: &Expr) -> Result<()> {
    if S::MODE == Mode::Exact {
        return Err(Error::Mode(format!(
            "`{e}` cannot be evaluated exactly; use float mode"
        )));
    }
    Ok(())
}

fn int_pow<S: Scalar>(b: S, e: i64, whole: &Expr, t: &Rational) -> Result<S> {
    let mut acc = S::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * b.clone();
    }
    if e < 0 {
        if acc.is_zero() {
            return Err(Error::Pole(format!("zero to a negative power in `{whole}` at t = {t}")));
        }
        acc = S::one() / acc;
    }
    Ok(acc)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::T => f.write_str("t"),
            Expr::K => f.write_str("k"),
            Expr::Y => f.write_str("y"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(l, r) => write!(f, "({l} + {r})"),
            Expr::Sub(l, r) => write!(f, "({l} - {r})"),
            Expr::Mul(l, r) => write!(f, "({l} * {r})"),
            Expr::Div(l, r) => write!(f, "({l} / {r})"),
            Expr::Pow(l, r) => write!(f, "({l} ^ {r})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

fn syntax(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(r) => write!(f, "{r}"),
            Token::Ident(s) => f.write_str(s),
            Token::Op(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(
                parse_rational(&text).map_err(|_| syntax(format!("bad number `{text}`")))?,
            ));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(syntax(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(format!("expected `{op}`")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    // Unary minus binds looser than `^`: -y^2 = -(y^2).
    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(fold_constant(exp))));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax("unexpected end of expression"))?;
        self.pos += 1;
        match tok {
            Token::Num(r) => Ok(Expr::Num(r)),
            Token::Op('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::T),
                "k" => Ok(Expr::K),
                "y" => Ok(Expr::Y),
                _ => {
                    let func = Func::from_name(&name).ok_or_else(|| syntax(format!("unknown name `{name}`")))?;
                    self.expect('(')?;
                    let arg = self.sum()?;
                    self.expect(')')?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            },
            Token::Op(c) => Err(syntax(format!("unexpected `{c}`"))),
        }
    }
}

// So that `y^-2` and `y^(1/2)` see a literal exponent.
fn fold_constant(e: Expr) -> Expr {
    fn constant(e: &Expr) -> Option<Rational> {
        match e {
            Expr::Num(r) => Some(r.clone()),
            Expr::Neg(x) => constant(x).map(|r| -r),
            Expr::Add(l, r) => Some(constant(l)? + constant(r)?),
            Expr::Sub(l, r) => Some(constant(l)? - constant(r)?),
            Expr::Mul(l, r) => Some(constant(l)? * constant(r)?),
            Expr::Div(l, r) => {
                let d = constant(r)?;
                if d.is_zero() {
                    return None;
                }
                Some(constant(l)? / d)
            }
            _ => None,
        }
    }
    constant(&e).map_or(e, Expr::Num)
}
