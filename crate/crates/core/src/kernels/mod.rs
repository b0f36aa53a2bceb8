//! Factorial functions and the generalized binomial kernel.
//!
//! On the integer-step lattices every fractional-sum kernel reduces to
//! `gbinom(alpha, k) = Gamma(k + alpha) / (Gamma(k + 1) Gamma(alpha))`, which
//! is a finite product and therefore exact in rational arithmetic. The float
//! helpers below evaluate the same quantities through signed log-gamma and
//! serve as an independent route.

mod scalar;

pub use scalar::{
    as_i64, ceil_i64, format_rational, int, is_integer, parse_rational, rat, rational_to_f64, Mode, Order, Rational,
    Scalar, Value,
};

use num_traits::One;

use crate::error::{Error, Result};

/// `prod_{j=1}^{k} (alpha + j - 1) / j`.
pub fn gbinom<S: Scalar>(alpha: &S, k: usize) -> S {
    S::gbinom(alpha, k)
}

/// `gbinom(alpha, k)` with zero for negative `k`.
pub fn gbinom_at<S: Scalar>(alpha: &S, k: i64) -> S {
    if k < 0 {
        S::zero()
    } else {
        gbinom(alpha, k as usize)
    }
}

/// Runtime-checked variant for mode-tagged inputs.
pub fn gbinom_value(alpha: &Value, k: i64, mode: Mode) -> Result<Value> {
    if k < 0 {
        return Err(Error::Domain(format!("gbinom needs k >= 0, got {k}")));
    }
    match (alpha, mode) {
        (Value::Exact(a), Mode::Exact) => Ok(Value::Exact(gbinom(a, k as usize))),
        (Value::Exact(a), Mode::Float) => Ok(Value::Float(gbinom(&rational_to_f64(a), k as usize))),
        (Value::Float(a), Mode::Float) => Ok(Value::Float(gbinom(a, k as usize))),
        (Value::Float(a), Mode::Exact) => Err(Error::Mode(format!(
            "exact kernel requested for non-rational order {a}"
        ))),
    }
}

/// The first `len` kernel weights `gbinom(alpha, 0..len)`, by the Pascal
/// recurrence `w_k = w_{k-1} (alpha + k - 1) / k`.
pub fn weights<S: Scalar>(alpha: &Rational, len: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(len);
    if S::MODE == Mode::Exact {
        let mut w = Rational::one();
        for k in 0..len {
            if k > 0 {
                w = w * (alpha + int(k as i64 - 1)) / int(k as i64);
            }
            out.push(S::from_rational(&w));
        }
    } else {
        let a = rational_to_f64(alpha);
        let mut w = 1.0f64;
        for k in 0..len {
            if k > 0 {
                w *= (a + k as f64 - 1.0) / k as f64;
            }
            out.push(S::from_f64(w).expect("float mode"));
        }
    }
    out
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// `(ln |Gamma(x)|, sign Gamma(x))`, or `None` at a pole.
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if is_pole(x) || !x.is_finite() {
        return None;
    }
    if x >= 0.5 {
        return Some((statrs::function::gamma::ln_gamma(x), 1.0));
    }
    // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
    let s = (std::f64::consts::PI * x).sin();
    let ln = std::f64::consts::PI.ln() - s.abs().ln() - statrs::function::gamma::ln_gamma(1.0 - x);
    Some((ln, s.signum()))
}

/// `prod Gamma(num) / prod Gamma(den)` through log-gamma differences.
///
/// More poles below than above gives zero; more above is a pole error; an
/// equal nonzero number of poles is an indeterminate form and also an error.
pub fn gamma_quotient(num: &[f64], den: &[f64]) -> Result<f64> {
    let poles_num = num.iter().filter(|&&x| is_pole(x)).count();
    let poles_den = den.iter().filter(|&&x| is_pole(x)).count();
    if poles_den > poles_num {
        return Ok(0.0);
    }
    if poles_num > 0 {
        return Err(Error::Pole(format!("Gamma quotient {num:?} / {den:?} is undefined")));
    }
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &x in num {
        let (l, s) = ln_gamma_signed(x).expect("pole excluded");
        ln += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = ln_gamma_signed(x).expect("pole excluded");
        ln -= l;
        sign *= s;
    }
    Ok(sign * ln.exp())
}

fn nonnegative_integer(x: f64) -> Option<u64> {
    (x >= 0.0 && x.fract() == 0.0 && x < 1e6).then_some(x as u64)
}

/// Falling factorial `t^(alpha) = Gamma(t + 1) / Gamma(t + 1 - alpha)`.
///
/// A pole in the denominator alone yields zero. When both arguments sit on
/// poles and `alpha` is a non-negative integer, the finite product
/// `t (t - 1) ... (t - alpha + 1)` is used.
pub fn falling_factorial(t: f64, alpha: f64) -> Result<f64> {
    let (top, bottom) = (t + 1.0, t + 1.0 - alpha);
    if is_pole(top) && is_pole(bottom) {
        return match nonnegative_integer(alpha) {
            Some(m) => Ok((0..m).map(|j| t - j as f64).product()),
            None => Err(Error::Pole(format!("{t}^({alpha}) is undefined"))),
        };
    }
    if let Some(m) = nonnegative_integer(alpha) {
        if m <= 64 {
            return Ok((0..m).map(|j| t - j as f64).product());
        }
    }
    gamma_quotient(&[top], &[bottom])
}

/// Rising factorial `t^{rising alpha} = Gamma(t + alpha) / Gamma(t)`, with
/// `0^{rising alpha} = 0`.
pub fn rising_factorial(t: f64, alpha: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if is_pole(t) {
        return Err(Error::Domain(format!(
            "rising factorial undefined at negative integer t = {t}"
        )));
    }
    if let Some(m) = nonnegative_integer(alpha) {
        if m <= 64 {
            return Ok((0..m).map(|k| t + k as f64).product());
        }
    }
    gamma_quotient(&[t + alpha], &[t])
}

/// `x^{rising beta} / Gamma(beta + 1)` at integer `x`; zero for `x <= 0`.
pub fn normalized_rising(x: f64, beta: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if beta.fract() == 0.0 {
        // 1/Gamma(beta + 1) vanishes for negative integers; the polynomial
        // form carries the right limit through the cancelling poles.
        return Ok(gbinom(&(beta + 1.0), (x - 1.0) as usize));
    }
    gamma_quotient(&[x + beta], &[x, beta + 1.0])
}

/// `x^{(beta)} / Gamma(beta + 1)`.
pub fn normalized_falling(x: f64, beta: f64) -> Result<f64> {
    match gamma_quotient(&[x + 1.0], &[x + 1.0 - beta, beta + 1.0]) {
        Ok(v) => Ok(v),
        Err(e) => match nonnegative_integer(x - beta) {
            Some(k) => Ok(gbinom(&(beta + 1.0), k as usize)),
            None => Err(e),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * 1f64.max(a.abs()).max(b.abs())
    }

    #[test]
    fn gbinom_examples() {
        assert_eq!(gbinom(&rat(7, 3), 0), int(1));
        for k in 0..10 {
            assert_eq!(gbinom(&int(2), k), int(k as i64 + 1));
        }
        assert_eq!(gbinom(&rat(1, 2), 2), rat(3, 8));
        // lgamma route: Gamma(2.5) / (Gamma(3) Gamma(0.5))
        let via_gamma = gamma_quotient(&[2.5], &[3.0, 0.5]).unwrap();
        assert!(close(via_gamma, 0.375, 1e-14));
    }

    #[test]
    fn gbinom_value_checks_domain_and_mode() {
        assert!(matches!(
            gbinom_value(&Value::Exact(rat(1, 2)), -1, Mode::Exact),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gbinom_value(&Value::Float(0.5), 2, Mode::Exact),
            Err(Error::Mode(_))
        ));
        assert_eq!(
            gbinom_value(&Value::Exact(rat(1, 2)), 2, Mode::Exact).unwrap(),
            Value::Exact(rat(3, 8))
        );
        assert_eq!(
            gbinom_value(&Value::Float(0.5), 2, Mode::Float).unwrap(),
            Value::Float(0.375)
        );
    }

    #[test]
    fn weights_follow_product_formula() {
        let alpha = rat(5, 4);
        let w: Vec<Rational> = weights(&alpha, 12);
        for (k, wk) in w.iter().enumerate() {
            assert_eq!(wk, &gbinom(&alpha, k));
        }
        let wf: Vec<f64> = weights(&alpha, 12);
        for (k, wk) in wf.iter().enumerate() {
            assert!(close(*wk, rational_to_f64(&w[k]), 1e-14));
        }
    }

    #[test]
    fn falling_factorial_examples() {
        assert!(close(falling_factorial(3.0, 3.0).unwrap(), 6.0, 1e-15));
        let mu = 2.5;
        assert!(close(
            falling_factorial(mu, mu).unwrap(),
            statrs::function::gamma::gamma(mu + 1.0),
            1e-13
        ));
        assert_eq!(falling_factorial(1.7, 0.0).unwrap(), 1.0);
        assert_eq!(falling_factorial(2.0, 5.0).unwrap(), 0.0);
        // (2)(1)(0)(-1)(-2) truncated product agrees
        assert_eq!((0..5).map(|j| 2.0 - j as f64).product::<f64>(), 0.0);
        assert_eq!(falling_factorial(2.0, 4.0).unwrap(), 0.0);
        assert!(matches!(falling_factorial(-2.0, 0.5), Err(Error::Pole(_))));
        assert!(matches!(falling_factorial(-2.0, -1.0), Err(Error::Pole(_))));
    }

    #[test]
    fn rising_factorial_examples() {
        assert_eq!(rising_factorial(2.0, 3.0).unwrap(), 24.0);
        assert_eq!(rising_factorial(0.0, 0.7).unwrap(), 0.0);
        assert!(matches!(rising_factorial(-3.0, 0.5), Err(Error::Domain(_))));
        // 3^{rising (1/2 - 1)} / Gamma(1/2) = gbinom(1/2, 2) = 3/8
        let lhs = rising_factorial(3.0, -0.5).unwrap() / statrs::function::gamma::gamma(0.5);
        assert!(close(lhs, 0.375, 1e-13));
        assert!(close(
            rising_factorial(1.5, 2.25).unwrap(),
            gamma_quotient(&[3.75], &[1.5]).unwrap(),
            1e-14
        ));
    }

    #[test]
    fn signed_log_gamma_matches_gamma_for_negative_arguments() {
        for &x in &[-0.5, -1.5, -2.25, 0.3, 4.7] {
            let (l, s) = ln_gamma_signed(x).unwrap();
            assert!(close(s * l.exp(), statrs::function::gamma::gamma(x), 1e-12), "x = {x}");
        }
        assert!(ln_gamma_signed(-2.0).is_none());
        assert!(ln_gamma_signed(0.0).is_none());
    }

    #[test]
    fn large_arguments_do_not_overflow() {
        // Gamma(300) alone overflows f64; the ratio does not.
        let v = falling_factorial(299.5, 1.5).unwrap();
        let expected = (statrs::function::gamma::ln_gamma(300.5) - statrs::function::gamma::ln_gamma(299.0)).exp();
        assert!(close(v, expected, 1e-12));
    }

    #[test]
    fn pascal_recurrence_and_hockey_stick_exact() {
        for alpha in [rat(1, 2), rat(5, 4), rat(7, 3), rat(-3, 5), int(3)] {
            let mut partial = Rational::zero();
            for k in 0..25usize {
                if k > 0 {
                    assert_eq!(
                        gbinom(&alpha, k),
                        gbinom(&alpha, k - 1) * (&alpha + int(k as i64 - 1)) / int(k as i64)
                    );
                }
                partial += gbinom(&alpha, k);
                assert_eq!(partial, gbinom(&(&alpha + int(1)), k), "alpha {alpha} k {k}");
            }
        }
    }

    const ALPHAS: [f64; 5] = [0.5, 1.25, 1.5, 2.3333333333333335, 3.7];

    #[test]
    fn difference_laws_at_lattice_points() {
        let tol = 1e-10;
        for &alpha in &ALPHAS {
            for t in 3..25 {
                let t = t as f64;
                // forward difference of the falling power
                let lhs = falling_factorial(t + 1.0, alpha).unwrap() - falling_factorial(t, alpha).unwrap();
                let rhs = alpha * falling_factorial(t, alpha - 1.0).unwrap();
                assert!(close(lhs, rhs, tol), "delta falling alpha={alpha} t={t}");
                // backward difference of the rising power
                let lhs = rising_factorial(t, alpha).unwrap() - rising_factorial(t - 1.0, alpha).unwrap();
                let rhs = alpha * rising_factorial(t, alpha - 1.0).unwrap();
                assert!(close(lhs, rhs, tol), "nabla rising alpha={alpha} t={t}");
                // rising power as shifted falling power
                let lhs = rising_factorial(t, alpha).unwrap();
                let rhs = falling_factorial(t + alpha - 1.0, alpha).unwrap();
                assert!(close(lhs, rhs, tol), "rising/falling alpha={alpha} t={t}");
            }
        }
    }

    #[test]
    fn two_variable_difference_laws() {
        let tol = 1e-10;
        for &alpha in &ALPHAS {
            for s in 8..20 {
                for t in 1..5 {
                    let (s, t) = (s as f64, t as f64);
                    // Delta_t (s - rho(t))^{rising alpha}
                    let f = |t: f64| rising_factorial(s - (t - 1.0), alpha).unwrap();
                    let lhs = f(t + 1.0) - f(t);
                    let rhs = -alpha * rising_factorial(s - (t - 1.0), alpha - 1.0).unwrap();
                    assert!(close(lhs, rhs, tol), "oper3 alpha={alpha} s={s} t={t}");
                    // nabla_s (s - t)^{(alpha - 1)}
                    let g = |s: f64| falling_factorial(s - t, alpha - 1.0).unwrap();
                    let lhs = g(s) - g(s - 1.0);
                    let rhs = (alpha - 1.0) * falling_factorial(s - 1.0 - t, alpha - 2.0).unwrap();
                    assert!(close(lhs, rhs, tol), "ou1 alpha={alpha} s={s} t={t}");
                    // nabla_t (rho(s) - t)^{(alpha - 1)}
                    let h = |t: f64| falling_factorial(s - 1.0 - t, alpha - 1.0).unwrap();
                    let lhs = h(t) - h(t - 1.0);
                    let rhs = -(alpha - 1.0) * falling_factorial(s - 1.0 - t, alpha - 2.0).unwrap();
                    assert!(close(lhs, rhs, tol), "ou2 alpha={alpha} s={s} t={t}");
                }
            }
        }
    }

    #[test]
    fn falling_factorial_product_laws() {
        let tol = 1e-10;
        for &mu in &[0.5, 1.25, 2.0, 3.7] {
            for &beta in &[0.5, 1.5, 2.25] {
                for t in 6..20 {
                    let t = t as f64;
                    let lhs = (t - mu) * falling_factorial(t, mu).unwrap();
                    assert!(close(lhs, falling_factorial(t, mu + 1.0).unwrap(), tol));
                    let lhs = falling_factorial(t, mu + beta).unwrap();
                    let rhs = falling_factorial(t - beta, mu).unwrap() * falling_factorial(t, beta).unwrap();
                    assert!(close(lhs, rhs, tol), "mu={mu} beta={beta} t={t}");
                }
            }
        }
    }

    #[test]
    fn monotonicity_spot_checks() {
        // t <= r implies t^(alpha) <= r^(alpha), on the branch t > alpha - 1
        for &(t, r, alpha) in &[(1.0, 2.0, 1.5), (3.0, 4.5, 2.5), (2.0, 2.5, 2.75)] {
            assert!(falling_factorial(t, alpha).unwrap() <= falling_factorial(r, alpha).unwrap() + 1e-12);
        }
        // 0 < alpha < 1 gives t^(alpha nu) >= (t^(nu))^alpha
        for &(t, nu, alpha) in &[(5.0, 2.0, 0.5), (9.0, 3.0, 0.25), (7.5, 1.5, 0.75)] {
            let lhs = falling_factorial(t, alpha * nu).unwrap();
            let rhs = falling_factorial(t, nu).unwrap().powf(alpha);
            assert!(lhs >= rhs - 1e-12, "t={t} nu={nu} alpha={alpha}");
        }
    }

    #[test]
    fn normalized_kernels_agree_with_gbinom() {
        for &beta in &[-0.5, 0.25, 1.5, -2.0, 0.0, 2.0] {
            for x in 1..15 {
                let v = normalized_rising(x as f64, beta).unwrap();
                let g = gbinom(&(beta + 1.0), x as usize - 1);
                assert!(close(v, g, 1e-11), "beta={beta} x={x}");
            }
        }
        assert_eq!(normalized_rising(0.0, 0.5).unwrap(), 0.0);
        for &beta in &[0.5, 1.25, 2.75] {
            for k in 0..15 {
                let v = normalized_falling(beta + k as f64, beta).unwrap();
                assert!(close(v, gbinom(&(beta + 1.0), k), 1e-11));
            }
        }
    }
}
