//! The identity evaluators. Each one builds both sides from library
//! operators (or literal sums where the identity is about a closed form),
//! then hands them to [`Ctx::compare`].

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{reflect_about, GridFunction, Orientation};
use crate::kernels::{as_i64, int, Order, Rational, Scalar};
use crate::operators::{
    delta_diff, delta_left_diff, delta_left_sum, delta_right_diff, delta_right_sum, nabla_diff, nabla_left_diff,
    nabla_left_sum, nabla_right_diff, nabla_right_sum, Convention, FracOperator, OperatorKind,
};

use Orientation::{Left, Right};

/// Where test functions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Numerators in [-100, 100], denominators in [1, 20].
    Random,
    /// Values used in order, cycling when a check needs more points.
    Explicit(Vec<Rational>),
}

pub(super) fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.random_range(-100i64..=100);
    let den = rng.random_range(1i64..=20);
    Rational::new(num.into(), den.into())
}

/// A rational in `(lo, 5]`, `lo` in {-1, 0}.
pub(super) fn random_exponent(rng: &mut ChaCha8Rng, lo: i64) -> Rational {
    let den = rng.random_range(1i64..=20);
    let num = rng.random_range(lo * den + 1..=5 * den);
    Rational::new(num.into(), den.into())
}

pub(super) struct Ctx<'a, S> {
    pub order: &'a Order,
    pub a: Rational,
    pub len: usize,
    pub p: usize,
    pub beta: Rational,
    pub mu: Option<Rational>,
    pub convention: Convention,
    pub source: &'a Source,
    pub rng: ChaCha8Rng,
    cursor: usize,
    pub residual: S,
    pub points: usize,
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl<'a, S: Scalar> Ctx<'a, S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        order: &'a Order,
        a: Rational,
        len: usize,
        p: usize,
        beta: Rational,
        mu: Option<Rational>,
        convention: Convention,
        source: &'a Source,
        rng: ChaCha8Rng,
    ) -> Self {
        Ctx {
            order,
            a,
            len,
            p,
            beta,
            mu,
            convention,
            source,
            rng,
            cursor: 0,
            residual: S::zero(),
            points: 0,
            lo: None,
            hi: None,
        }
    }

    fn alpha(&self) -> &Rational {
        self.order.alpha()
    }

    fn n(&self) -> usize {
        self.order.n()
    }

    fn b(&self) -> Rational {
        &self.a + int(self.len as i64 - 1)
    }

    fn value(&mut self) -> S {
        match self.source {
            Source::Random => S::from_rational(&random_rational(&mut self.rng)),
            Source::Explicit(vals) => {
                let v = S::from_rational(&vals[self.cursor % vals.len()]);
                self.cursor += 1;
                v
            }
        }
    }

    fn func(&mut self, base: Rational, orientation: Orientation, len: usize) -> GridFunction<S> {
        let values = (0..len).map(|_| self.value()).collect();
        GridFunction::new(base, orientation, values).expect("non-empty window")
    }

    fn mu(&mut self, lo: i64) -> Rational {
        match &self.mu {
            Some(mu) => mu.clone(),
            None => random_exponent(&mut self.rng, lo),
        }
    }

    fn record(&mut self, t: &Rational, l: &S, r: &S) {
        let d = S::discrepancy(l, r);
        if d > self.residual {
            self.residual = d;
        }
        self.points += 1;
        if self.lo.as_ref().is_none_or(|lo| t < lo) {
            self.lo = Some(t.clone());
        }
        if self.hi.as_ref().is_none_or(|hi| t > hi) {
            self.hi = Some(t.clone());
        }
    }

    /// Compares two functions on the intersection of their windows,
    /// further restricted by `keep`. An empty comparison is an error.
    fn compare_where(
        &mut self,
        what: &str,
        lhs: &GridFunction<S>,
        rhs: &GridFunction<S>,
        keep: impl Fn(&Rational) -> bool,
    ) -> Result<()> {
        let mut hits = 0;
        for (t, l) in lhs.points() {
            if !keep(&t) {
                continue;
            }
            if let Some(i) = rhs.index_of(&t) {
                self.record(&t, l, &rhs.values()[i]);
                hits += 1;
            }
        }
        if hits == 0 {
            return Err(Error::EmptyWindow(format!(
                "{what}: lhs {} vs rhs {}",
                lhs.window_label(),
                rhs.window_label()
            )));
        }
        Ok(())
    }

    fn compare(&mut self, what: &str, lhs: &GridFunction<S>, rhs: &GridFunction<S>) -> Result<()> {
        self.compare_where(what, lhs, rhs, |_| true)
    }

    fn scalar(&mut self, t: &Rational, l: &S, r: &S) {
        self.record(t, l, r);
    }
}

fn at<S: Scalar>(f: &GridFunction<S>, t: &Rational) -> Result<S> {
    f.at(t).cloned()
}

fn map_points<S: Scalar>(
    f: &GridFunction<S>,
    mut g: impl FnMut(&Rational, &S) -> Result<S>,
) -> Result<GridFunction<S>> {
    let values = f.points().map(|(t, v)| g(&t, v)).collect::<Result<Vec<_>>>()?;
    GridFunction::new(f.base().clone(), f.orientation(), values)
}

fn tabulate<S: Scalar>(
    base: Rational,
    orientation: Orientation,
    len: usize,
    mut g: impl FnMut(&Rational) -> Result<S>,
) -> Result<GridFunction<S>> {
    let step = if orientation == Left { 1 } else { -1 };
    let values = (0..len)
        .map(|i| g(&(&base + int(step * i as i64))))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(base, orientation, values)
}

fn lattice_gap(t: &Rational, s: &Rational) -> i64 {
    as_i64(&(t - s)).expect("points on one lattice")
}

fn op(kind: OperatorKind, alpha: &Rational) -> Result<FracOperator> {
    Ok(FracOperator::new(kind, Order::new(alpha.clone())?))
}

/// `x (x-1) ... (x-m+1) / m!`
fn falling_over_factorial<S: Scalar>(x: i64, m: usize) -> S {
    let mut acc = S::one();
    for j in 0..m as i64 {
        acc = acc * S::from_i64(x - j) / S::from_i64(j + 1);
    }
    acc
}

/// `x (x+1) ... (x+m-1) / m!`
fn rising_over_factorial<S: Scalar>(x: i64, m: usize) -> S {
    let mut acc = S::one();
    for j in 0..m as i64 {
        acc = acc * S::from_i64(x + j) / S::from_i64(j + 1);
    }
    acc
}

pub(super) fn eval<S: Scalar>(id: &str, c: &mut Ctx<'_, S>) -> Result<()> {
    match id {
        "commute-delta-left" => commute_delta_left(c),
        "commute-delta-right" => commute_delta_right(c),
        "commute-nabla-left-shifted" => commute_nabla_left_shifted(c),
        "commute-nabla-left" => commute_nabla_left(c),
        "commute-nabla-right" => commute_nabla_right(c),
        "commute-nabla-left-higher" => {
            let a = c.a.clone();
            commute_nabla_left_p(c, &a - int(c.p as i64 - 1), a)
        }
        "commute-nabla-left-restricted" => {
            let a = c.a.clone();
            commute_nabla_left_p(c, a.clone(), a + int(c.p as i64 - 1))
        }
        "commute-nabla-right-higher" => {
            let b = c.b();
            commute_nabla_right_p(c, &b + int(c.p as i64 - 1), b)
        }
        "commute-nabla-right-restricted" => {
            let b = c.b();
            commute_nabla_right_p(c, b.clone(), b - int(c.p as i64 - 1))
        }
        "dual-left-sum" => dual_left_sum(c),
        "dual-left-diff" => dual_left_diff(c),
        "dual-left-base" => dual_left_base(c),
        "dual-right-sum" => dual_right_sum(c),
        "dual-right-diff" => dual_right_diff(c),
        "dual-right-base" => dual_right_base(c),
        "power-delta-right" => power_delta_right(c),
        "power-nabla-right" => power_nabla(c, Right),
        "power-nabla-left" => power_nabla(c, Left),
        "semigroup-delta-right" => semigroup(c, OperatorKind::DeltaRightSum),
        "semigroup-nabla-right" => semigroup(c, OperatorKind::NablaRightSum),
        "semigroup-nabla-left" => semigroup(c, OperatorKind::NablaLeftSum),
        "ibp-sum-nabla" => ibp_sum_nabla(c),
        "ibp-diff-nabla" => ibp_diff_nabla(c),
        "ibp-sum-delta" => ibp_sum_delta(c),
        "ibp-diff-delta" => ibp_diff_delta(c),
        "compose-left" => compose_left(c),
        "compose-right" => compose_right(c),
        "q-dual-delta-sum" => q_dual(c, OperatorKind::DeltaLeftSum, OperatorKind::DeltaRightSum),
        "q-dual-delta-diff" => q_dual(c, OperatorKind::DeltaLeftDiff, OperatorKind::DeltaRightDiff),
        "q-dual-nabla-sum" => q_dual(c, OperatorKind::NablaLeftSum, OperatorKind::NablaRightSum),
        "q-dual-nabla-diff" => q_dual(c, OperatorKind::NablaLeftDiff, OperatorKind::NablaRightDiff),
        "cauchy-integer-left-delta" => cauchy_left_delta(c),
        "cauchy-integer-right-delta" => cauchy_right_delta(c),
        "cauchy-integer-left-nabla" => cauchy_left_nabla(c),
        "cauchy-integer-right-nabla" => cauchy_right_nabla(c),
        other => Err(Error::UnknownCheck(other.to_string())),
    }
}

// Delta_a^{-alpha} Delta f = Delta Delta_a^{-alpha} f - (t-a)^{(alpha-1)}/Gamma(alpha) f(a)
fn commute_delta_left<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, alpha) = (c.a.clone(), c.alpha().clone());
    let f = c.func(a.clone(), Left, c.len);
    let lhs = delta_left_sum(&delta_diff(&f, 1, false)?, &alpha)?;
    let fa = at(&f, &a)?;
    let beta = &alpha - int(1);
    let rhs = map_points(&delta_diff(&delta_left_sum(&f, &alpha)?, 1, false)?, |t, v| {
        Ok(v.clone() - S::falling_kernel(&(t - &a), &beta)? * &fa)
    })?;
    c.compare("commute", &lhs, &rhs)
}

// _bDelta^{-alpha} nabla_- f = nabla_- _bDelta^{-alpha} f - (b-t)^{(alpha-1)}/Gamma(alpha) f(b)
fn commute_delta_right<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (b, alpha) = (c.b(), c.alpha().clone());
    let f = c.func(b.clone(), Right, c.len);
    let lhs = delta_right_sum(&nabla_diff(&f, 1, true)?, &alpha)?;
    let fb = at(&f, &b)?;
    let beta = &alpha - int(1);
    let rhs = map_points(&nabla_diff(&delta_right_sum(&f, &alpha)?, 1, true)?, |t, v| {
        Ok(v.clone() - S::falling_kernel(&(&b - t), &beta)? * &fb)
    })?;
    c.compare("commute", &lhs, &rhs)
}

// Sums from the base itself on both sides:
// nabla_{a+1}^{-alpha} nabla f = nabla nabla_a^{-alpha} f - (t-a+1)^{rising(alpha-1)}/Gamma(alpha) f(a)
fn commute_nabla_left_shifted<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, alpha) = (c.a.clone(), c.alpha().clone());
    let f = c.func(a.clone(), Left, c.len);
    let sum = op(OperatorKind::NablaLeftSum, &alpha)?.with_convention(Convention::InclusiveBase)?;
    let lhs = sum.apply(&nabla_diff(&f, 1, false)?)?;
    let fa = at(&f, &a)?;
    let beta = &alpha - int(1);
    let rhs = map_points(&nabla_diff(&sum.apply(&f)?, 1, false)?, |t, v| {
        Ok(v.clone() - S::rising_kernel(lattice_gap(t, &a) + 1, &beta)? * &fa)
    })?;
    c.compare("commute", &lhs, &rhs)
}

// nabla_a^{-alpha} nabla f = nabla nabla_a^{-alpha} f - (t-a)^{rising(alpha-1)}/Gamma(alpha) f(a),
// and the same with -alpha in place of alpha for non-integer alpha.
fn commute_nabla_left<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, alpha) = (c.a.clone(), c.alpha().clone());
    let f = c.func(a.clone(), Left, c.len);
    let fa = at(&f, &a)?;
    let g = nabla_diff(&f, 1, false)?.pad_front(1, S::zero());
    let beta = &alpha - int(1);
    let lhs = nabla_left_sum(&g, &alpha)?;
    let rhs = map_points(&nabla_diff(&nabla_left_sum(&f, &alpha)?, 1, false)?, |t, v| {
        Ok(v.clone() - S::rising_kernel(lattice_gap(t, &a), &beta)? * &fa)
    })?;
    c.compare("sum", &lhs, &rhs)?;
    if !c.order.is_integer() {
        let beta = -&alpha - int(1);
        let lhs = nabla_left_diff(&g, &alpha)?;
        let rhs = map_points(&nabla_diff(&nabla_left_diff(&f, &alpha)?, 1, false)?, |t, v| {
            Ok(v.clone() - S::rising_kernel(lattice_gap(t, &a), &beta)? * &fa)
        })?;
        c.compare("difference", &lhs, &rhs)?;
    }
    Ok(())
}

// _b nabla^{-alpha} _-Delta f = _-Delta _b nabla^{-alpha} f - (b-t)^{rising(alpha-1)}/Gamma(alpha) f(b)
fn commute_nabla_right<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (b, alpha) = (c.b(), c.alpha().clone());
    let f = c.func(b.clone(), Right, c.len);
    let fb = at(&f, &b)?;
    let g = delta_diff(&f, 1, true)?.pad_front(1, S::zero());
    let beta = &alpha - int(1);
    let lhs = nabla_right_sum(&g, &alpha)?;
    let rhs = map_points(&delta_diff(&nabla_right_sum(&f, &alpha)?, 1, true)?, |t, v| {
        Ok(v.clone() - S::rising_kernel(lattice_gap(&b, t), &beta)? * &fb)
    })?;
    c.compare("sum", &lhs, &rhs)?;
    if !c.order.is_integer() {
        let beta = -&alpha - int(1);
        let lhs = nabla_right_diff(&g, &alpha)?;
        let rhs = map_points(&delta_diff(&nabla_right_diff(&f, &alpha)?, 1, true)?, |t, v| {
            Ok(v.clone() - S::rising_kernel(lattice_gap(&b, t), &beta)? * &fb)
        })?;
        c.compare("difference", &lhs, &rhs)?;
    }
    Ok(())
}

// nabla_c^{-alpha} nabla^p f = nabla^p nabla_c^{-alpha} f
//     - sum_{k<p} (t-c)^{rising(alpha-p+k)}/Gamma(alpha+k-p+1) nabla^k f(c),
// f stored from `low`, sums based at `c`. The difference form (-alpha) is
// checked for non-integer alpha.
fn commute_nabla_left_p<S: Scalar>(c: &mut Ctx<'_, S>, low: Rational, base: Rational) -> Result<()> {
    let (p, alpha) = (c.p, c.alpha().clone());
    let extra = lattice_gap(&base, &low) as usize;
    let f = c.func(low, Left, c.len + extra);
    let from_base = f.drop_front(extra)?;
    let h = nabla_diff(&f, p, false)?.restrict(&(&base + int(1)), &f.last_point())?;
    let h = h.pad_front(1, S::zero());
    let jets = (0..p)
        .map(|k| at(&nabla_diff(&f, k, false)?, &base))
        .collect::<Result<Vec<_>>>()?;
    let correct = |t: &Rational, v: &S, sign: &Rational| -> Result<S> {
        let mut out = v.clone();
        for (k, jet) in jets.iter().enumerate() {
            let beta = sign - int(p as i64) + int(k as i64);
            out = out - S::rising_kernel(lattice_gap(t, &base), &beta)? * jet;
        }
        Ok(out)
    };
    let lhs = nabla_left_sum(&h, &alpha)?;
    let core = nabla_diff(&nabla_left_sum(&from_base, &alpha)?, p, false)?;
    let rhs = map_points(&core, |t, v| correct(t, v, &alpha))?;
    c.compare("sum", &lhs, &rhs)?;
    if !c.order.is_integer() {
        let lhs = nabla_left_diff(&h, &alpha)?;
        let core = nabla_diff(&nabla_left_diff(&from_base, &alpha)?, p, false)?;
        let rhs = map_points(&core, |t, v| correct(t, v, &-alpha.clone()))?;
        c.compare("difference", &lhs, &rhs)?;
    }
    Ok(())
}

// Mirror of the left form with _-Delta^p and sums ending at `base`.
fn commute_nabla_right_p<S: Scalar>(c: &mut Ctx<'_, S>, high: Rational, base: Rational) -> Result<()> {
    let (p, alpha) = (c.p, c.alpha().clone());
    let extra = lattice_gap(&high, &base) as usize;
    let f = c.func(high, Right, c.len + extra);
    let from_base = f.drop_front(extra)?;
    let h = delta_diff(&f, p, true)?.restrict(&(&base - int(1)), &f.last_point())?;
    let h = h.pad_front(1, S::zero());
    let jets = (0..p)
        .map(|k| at(&delta_diff(&f, k, true)?, &base))
        .collect::<Result<Vec<_>>>()?;
    let correct = |t: &Rational, v: &S, sign: &Rational| -> Result<S> {
        let mut out = v.clone();
        for (k, jet) in jets.iter().enumerate() {
            let beta = sign - int(p as i64) + int(k as i64);
            out = out - S::rising_kernel(lattice_gap(&base, t), &beta)? * jet;
        }
        Ok(out)
    };
    let lhs = nabla_right_sum(&h, &alpha)?;
    let core = delta_diff(&nabla_right_sum(&from_base, &alpha)?, p, true)?;
    let rhs = map_points(&core, |t, v| correct(t, v, &alpha))?;
    c.compare("sum", &lhs, &rhs)?;
    if !c.order.is_integer() {
        let lhs = nabla_right_diff(&h, &alpha)?;
        let core = delta_diff(&nabla_right_diff(&from_base, &alpha)?, p, true)?;
        let rhs = map_points(&core, |t, v| correct(t, v, &-alpha.clone()))?;
        c.compare("difference", &lhs, &rhs)?;
    }
    Ok(())
}

fn nabla_with<S: Scalar>(
    kind: OperatorKind,
    alpha: &Rational,
    convention: Convention,
    f: &GridFunction<S>,
) -> Result<GridFunction<S>> {
    op(kind, alpha)?.with_convention(convention)?.apply(f)
}

// (Delta_a^{-alpha} y)(t + alpha) = nabla_a^{-alpha} y(t), t in N_a
fn dual_left_sum<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let alpha = c.alpha().clone();
    let y = c.func(c.a.clone(), Left, c.len);
    let lhs = delta_left_sum(&y, &alpha)?.shifted(&alpha);
    let rhs = nabla_with(OperatorKind::NablaLeftSum, &alpha, c.convention, &y)?;
    c.compare("dual", &lhs, &rhs)
}

// (Delta_a^alpha y)(t - alpha) = nabla_a^alpha y(t), t in N_{a+n}
fn dual_left_diff<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let alpha = c.alpha().clone();
    let y = c.func(c.a.clone(), Left, c.len);
    let lhs = delta_left_diff(&y, &alpha)?.shifted(&-alpha.clone());
    let rhs = nabla_with(OperatorKind::NablaLeftDiff, &alpha, c.convention, &y)?;
    let from = &c.a + int(c.n() as i64);
    c.compare_where("dual", &lhs, &rhs, |t| t >= &from)
}

// y on N_{alpha-n}:
// Delta_{alpha-n}^alpha y(t) = (nabla_{alpha-n}^alpha y)(t + alpha), t in N_{-n}
// Delta_{alpha-n}^{-(n-alpha)} y(t) = (nabla_{alpha-n}^{-(n-alpha)} y)(t - n + alpha), t in N_0
fn dual_left_base<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let alpha = c.alpha().clone();
    let nu = c.order.complement();
    let base = -nu.clone();
    let y = c.func(base, Left, c.len);
    let lhs = op(OperatorKind::DeltaLeftDiff, &alpha)?.extended().apply(&y)?;
    let rhs = nabla_with(OperatorKind::NablaLeftDiff, &alpha, c.convention, &y)?.shifted(&alpha);
    c.compare("difference", &lhs, &rhs)?;
    if !nu.is_zero() {
        let lhs = delta_left_sum(&y, &nu)?;
        let rhs = nabla_with(OperatorKind::NablaLeftSum, &nu, c.convention, &y)?.shifted(&-nu.clone());
        c.compare("sum", &lhs, &rhs)?;
    }
    Ok(())
}

// y on _{b+1}N: (_bDelta^{-alpha} y)(t - alpha) = _{b+1}nabla^{-alpha} y(t), t in _bN
fn dual_right_sum<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let alpha = c.alpha().clone();
    let y = c.func(c.b() + int(1), Right, c.len + 1);
    let lhs = delta_right_sum(&y.drop_front(1)?, &alpha)?.shifted(&-alpha.clone());
    let rhs = nabla_right_sum(&y, &alpha)?;
    c.compare("dual", &lhs, &rhs)
}

// y on _{b+1}N: (_bDelta^alpha y)(t + alpha) = _{b+1}nabla^alpha y(t), t in _{b-n}N
fn dual_right_diff<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let alpha = c.alpha().clone();
    let y = c.func(c.b() + int(1), Right, c.len + 1);
    let lhs = delta_right_diff(&y.drop_front(1)?, &alpha)?.shifted(&alpha);
    let rhs = nabla_right_diff(&y, &alpha)?;
    c.compare("dual", &lhs, &rhs)
}

// y on _{n-alpha}N:
// _{n-alpha}Delta^alpha y(t) = _{n-alpha+1}nabla^alpha y(t - alpha), t in _nN
// _{n-alpha}Delta^{-(n-alpha)} y(t) = _{n-alpha+1}nabla^{-(n-alpha)} y(t + n - alpha), t in _0N
fn dual_right_base<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let alpha = c.alpha().clone();
    let nu = c.order.complement();
    let y = c.func(&nu + int(1), Right, c.len + 1);
    let on_b = y.drop_front(1)?;
    let lhs = op(OperatorKind::DeltaRightDiff, &alpha)?.extended().apply(&on_b)?;
    let rhs = nabla_right_diff(&y, &alpha)?.shifted(&-alpha.clone());
    // An integer-order nabla difference at t = nu + 1 reads y(nu + 1), which
    // the delta side never sees.
    let top = &nu + int(1);
    c.compare_where("difference", &lhs, &rhs, |t| !nu.is_zero() || t < &top)?;
    if !nu.is_zero() {
        let lhs = delta_right_sum(&on_b, &nu)?;
        let rhs = nabla_right_sum(&y, &nu)?.shifted(&nu);
        c.compare("sum", &lhs, &rhs)?;
    }
    Ok(())
}

// _{b-mu}Delta^{-alpha} (b-t)^{(mu)}/Gamma(mu+1) = (b-t)^{(mu+alpha)}/Gamma(mu+alpha+1)
fn power_delta_right<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let alpha = c.alpha().clone();
    let mu = c.mu(0);
    let b = c.b();
    let f = tabulate(&b - &mu, Right, c.len, |t| S::falling_kernel(&(&b - t), &mu))?;
    let lhs = delta_right_sum(&f, &alpha)?;
    let total = &mu + &alpha;
    let rhs = map_points(&lhs, |t, _| S::falling_kernel(&(&b - t), &total))?;
    c.compare("power", &lhs, &rhs)
}

// nabla_a^{-alpha} (t-a)^{rising mu}/Gamma(mu+1) = (t-a)^{rising(alpha+mu)}/Gamma(alpha+mu+1),
// and the mirror on _bN.
fn power_nabla<S: Scalar>(c: &mut Ctx<'_, S>, side: Orientation) -> Result<()> {
    let alpha = c.alpha().clone();
    let mu = c.mu(-1);
    let (anchor, kind) = match side {
        Left => (c.a.clone(), OperatorKind::NablaLeftSum),
        Right => (c.b(), OperatorKind::NablaRightSum),
    };
    let gap = |t: &Rational| lattice_gap(t, &anchor).abs();
    let f = tabulate(anchor.clone(), side, c.len, |t| S::rising_kernel(gap(t), &mu))?;
    let lhs = op(kind, &alpha)?.apply(&f)?;
    let total = &mu + &alpha;
    let rhs = map_points(&lhs, |t, _| S::rising_kernel(gap(t), &total))?;
    c.compare("power", &lhs, &rhs)
}

// Composition of two sums of the same family, in both orders.
fn semigroup<S: Scalar>(c: &mut Ctx<'_, S>, kind: OperatorKind) -> Result<()> {
    let alpha = c.alpha().clone();
    let beta = c.beta.clone();
    let side = if kind.is_left() { Left } else { Right };
    let anchor = if kind.is_left() { c.a.clone() } else { c.b() };
    let f = c.func(anchor, side, c.len);
    let whole = op(kind, &(&alpha + &beta))?.apply(&f)?;
    let ab = op(kind, &alpha)?.apply(&op(kind, &beta)?.apply(&f)?)?;
    let ba = op(kind, &beta)?.apply(&op(kind, &alpha)?.apply(&f)?)?;
    c.compare("alpha after beta", &ab, &whole)?;
    c.compare("beta after alpha", &ba, &whole)
}

fn interior_sum<S: Scalar>(a: &Rational, b: &Rational, mut term: impl FnMut(&Rational) -> Result<S>) -> Result<S> {
    let mut acc = S::zero();
    let mut s = a + int(1);
    while &s < b {
        acc = acc + &term(&s)?;
        s += int(1);
    }
    Ok(acc)
}

// sum_{s=a+1}^{b-1} g(s) nabla_a^{-alpha} f(s) = sum_{s=a+1}^{b-1} f(s) _b nabla^{-alpha} g(s)
fn ibp_sum_nabla<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, b, alpha) = (c.a.clone(), c.b(), c.alpha().clone());
    let f = c.func(a.clone(), Left, c.len);
    let g = c.func(b.clone(), Right, c.len);
    let lf = nabla_left_sum(&f, &alpha)?;
    let rg = nabla_right_sum(&g, &alpha)?;
    let lhs = interior_sum(&a, &b, |s| Ok(at(&g, s)? * &at(&lf, s)?))?;
    let rhs = interior_sum(&a, &b, |s| Ok(at(&f, s)? * &at(&rg, s)?))?;
    c.scalar(&b, &lhs, &rhs);
    Ok(())
}

// sum_{s=a+1}^{b-1} f(s) nabla_a^alpha g(s) = sum_{s=a+1}^{b-1} g(s) _b nabla^alpha f(s)
fn ibp_diff_nabla<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, b, alpha) = (c.a.clone(), c.b(), c.alpha().clone());
    let g = c.func(a.clone(), Left, c.len);
    let f = c.func(b.clone(), Right, c.len);
    let lg = nabla_left_diff(&g, &alpha)?;
    let rf = nabla_right_diff(&f, &alpha)?;
    let lhs = interior_sum(&a, &b, |s| Ok(at(&f, s)? * &at(&lg, s)?))?;
    let rhs = interior_sum(&a, &b, |s| Ok(at(&g, s)? * &at(&rf, s)?))?;
    c.scalar(&b, &lhs, &rhs);
    Ok(())
}

// sum g(s) (Delta_{a+1}^{-alpha} f)(s+alpha) = sum f(s) _{b-1}Delta^{-alpha} g(s-alpha)
fn ibp_sum_delta<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, b, alpha) = (c.a.clone(), c.b(), c.alpha().clone());
    let f = c.func(a.clone(), Left, c.len);
    let g = c.func(b.clone(), Right, c.len);
    let (lo, hi) = (&a + int(1), &b - int(1));
    let lf = delta_left_sum(&f.restrict(&lo, &hi)?, &alpha)?;
    let rg = delta_right_sum(&g.restrict(&hi, &lo)?, &alpha)?;
    let lhs = interior_sum(&a, &b, |s| Ok(at(&g, s)? * &at(&lf, &(s + &alpha))?))?;
    let rhs = interior_sum(&a, &b, |s| Ok(at(&f, s)? * &at(&rg, &(s - &alpha))?))?;
    c.scalar(&b, &lhs, &rhs);
    Ok(())
}

// sum f(s) Delta_{a+1}^alpha g(s-alpha) = sum g(s) _{b-1}Delta^alpha f(s+alpha)
fn ibp_diff_delta<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, b, alpha) = (c.a.clone(), c.b(), c.alpha().clone());
    let g = c.func(a.clone(), Left, c.len);
    let f = c.func(b.clone(), Right, c.len);
    let (lo, hi) = (&a + int(1), &b - int(1));
    let lg = op(OperatorKind::DeltaLeftDiff, &alpha)?
        .extended()
        .apply(&g.restrict(&lo, &hi)?)?;
    let rf = op(OperatorKind::DeltaRightDiff, &alpha)?
        .extended()
        .apply(&f.restrict(&hi, &lo)?)?;
    let lhs = interior_sum(&a, &b, |s| Ok(at(&f, s)? * &at(&lg, &(s - &alpha))?))?;
    let rhs = interior_sum(&a, &b, |s| Ok(at(&g, s)? * &at(&rf, &(s + &alpha))?))?;
    c.scalar(&b, &lhs, &rhs);
    Ok(())
}

// nabla_a^alpha nabla_a^{-alpha} f = f;
// nabla_a^{-alpha} nabla_a^alpha f = f (alpha not an integer);
// nabla_a^{-n} nabla_a^n f = f - sum_{k<n} (t-a)^{rising k}/k! nabla^k f(a).
fn compose_left<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, alpha, n) = (c.a.clone(), c.alpha().clone(), c.n());
    let f = c.func(a.clone(), Left, c.len);
    let back = nabla_left_diff(&nabla_left_sum(&f, &alpha)?, &alpha)?;
    c.compare("difference of sum", &back, &f)?;
    if !c.order.is_integer() {
        let nu = c.order.complement();
        let at_base = at(&nabla_left_sum(&f, &nu)?, &a)?;
        c.scalar(&a, &at_base, &S::zero());
        let d = nabla_left_diff(&f, &alpha)?.pad_front(1, S::zero());
        let back = nabla_left_sum(&d, &alpha)?;
        c.compare_where("sum of difference", &back, &f, |t| t > &a)
    } else {
        let g = c.func(&a - int(n as i64 - 1), Left, c.len + n - 1);
        let jets = (0..n)
            .map(|k| at(&nabla_diff(&g, k, false)?, &a))
            .collect::<Result<Vec<_>>>()?;
        let d = nabla_left_diff(&g, &alpha)?.pad_front(1, S::zero());
        let back = nabla_left_sum(&d, &alpha)?;
        let rhs = map_points(&g.drop_front(n - 1)?, |t, v| {
            let x = lattice_gap(t, &a);
            Ok(jets
                .iter()
                .enumerate()
                .fold(v.clone(), |acc, (k, jet)| acc - rising_over_factorial::<S>(x, k) * jet))
        })?;
        c.compare_where("taylor remainder", &back, &rhs, |t| t > &a)
    }
}

fn compose_right<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (b, alpha, n) = (c.b(), c.alpha().clone(), c.n());
    let f = c.func(b.clone(), Right, c.len);
    let back = nabla_right_diff(&nabla_right_sum(&f, &alpha)?, &alpha)?;
    c.compare("difference of sum", &back, &f)?;
    if !c.order.is_integer() {
        let nu = c.order.complement();
        let at_base = at(&nabla_right_sum(&f, &nu)?, &b)?;
        c.scalar(&b, &at_base, &S::zero());
        let d = nabla_right_diff(&f, &alpha)?.pad_front(1, S::zero());
        let back = nabla_right_sum(&d, &alpha)?;
        c.compare_where("sum of difference", &back, &f, |t| t < &b)
    } else {
        let g = c.func(&b + int(n as i64 - 1), Right, c.len + n - 1);
        let jets = (0..n)
            .map(|k| at(&delta_diff(&g, k, true)?, &b))
            .collect::<Result<Vec<_>>>()?;
        let d = nabla_right_diff(&g, &alpha)?.pad_front(1, S::zero());
        let back = nabla_right_sum(&d, &alpha)?;
        let rhs = map_points(&g.drop_front(n - 1)?, |t, v| {
            let x = lattice_gap(&b, t);
            Ok(jets
                .iter()
                .enumerate()
                .fold(v.clone(), |acc, (k, jet)| acc - rising_over_factorial::<S>(x, k) * jet))
        })?;
        c.compare_where("taylor remainder", &back, &rhs, |t| t < &b)
    }
}

// left(Qf)(t) = Q(right f)(t), (Qh)(t) = h(a + b - t)
fn q_dual<S: Scalar>(c: &mut Ctx<'_, S>, left: OperatorKind, right: OperatorKind) -> Result<()> {
    let alpha = c.alpha().clone();
    let (a, b) = (c.a.clone(), c.b());
    let pivot = &a + &b;
    let f = c.func(a, Left, c.len);
    let lhs = op(left, &alpha)?.apply(&reflect_about(&f, &pivot))?;
    let rhs = reflect_about(&op(right, &alpha)?.apply(&f)?, &pivot);
    c.compare("Q-dual", &lhs, &rhs)
}

fn cauchy_left_delta<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, n) = (c.a.clone(), c.n());
    let f = c.func(a.clone(), Left, c.len);
    // u(t) = sum_{s=a}^{t-1} (t - sigma(s))^{(n-1)}/(n-1)! f(s)
    let u = tabulate(a.clone(), Left, c.len + 1, |t| {
        let mut acc = S::zero();
        for (s, v) in f.points().take_while(|(s, _)| s < t) {
            acc = acc + falling_over_factorial::<S>(lattice_gap(t, &s) - 1, n - 1) * v;
        }
        Ok(acc)
    })?;
    for j in 0..n {
        let t = &a + int(j as i64);
        c.scalar(&t, &at(&u, &t)?, &S::zero());
    }
    c.compare("sum operator", &delta_left_sum(&f, c.alpha())?, &u)?;
    c.compare("initial value problem", &delta_diff(&u, n, false)?, &f)
}

fn cauchy_right_delta<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (b, n) = (c.b(), c.n());
    let f = c.func(b.clone(), Right, c.len);
    // u(t) = sum_{s=t+1}^{b} (rho(s) - t)^{(n-1)}/(n-1)! f(s)
    let u = tabulate(b.clone(), Right, c.len + 1, |t| {
        let mut acc = S::zero();
        for (s, v) in f.points().take_while(|(s, _)| s > t) {
            acc = acc + falling_over_factorial::<S>(lattice_gap(&s, t) - 1, n - 1) * v;
        }
        Ok(acc)
    })?;
    for j in 0..n {
        let t = &b - int(j as i64);
        c.scalar(&t, &at(&u, &t)?, &S::zero());
    }
    c.compare("sum operator", &delta_right_sum(&f, c.alpha())?, &u)?;
    c.compare("initial value problem", &nabla_diff(&u, n, true)?, &f)
}

// Sums with reversed limits are oriented: sum_{s=a+1}^{t} = -sum_{s=t+1}^{a} for t < a.
fn cauchy_left_nabla<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (a, n) = (c.a.clone(), c.n());
    let low = &a - int(n as i64 - 1);
    let f = c.func(low.clone(), Left, c.len + n - 1);
    let kernel = |t: &Rational, s: &Rational| rising_over_factorial::<S>(lattice_gap(t, s) + 1, n - 1);
    let y = tabulate(low, Left, c.len + n - 1, |t| {
        let mut acc = S::zero();
        for (s, v) in f.points() {
            if s > a && &s <= t {
                acc = acc + kernel(t, &s) * v;
            } else if &s > t && s <= a {
                acc = acc - kernel(t, &s) * v;
            }
        }
        Ok(acc)
    })?;
    for i in 0..n {
        c.scalar(&a, &at(&nabla_diff(&y, i, false)?, &a)?, &S::zero());
    }
    let from_a = f.drop_front(n - 1)?;
    c.compare("sum operator", &nabla_left_sum(&from_a, c.alpha())?, &y)?;
    let a1 = &a + int(1);
    c.compare_where("initial value problem", &nabla_diff(&y, n, false)?, &f, |t| t >= &a1)
}

fn cauchy_right_nabla<S: Scalar>(c: &mut Ctx<'_, S>) -> Result<()> {
    let (b, n) = (c.b(), c.n());
    let high = &b + int(n as i64 - 1);
    let f = c.func(high.clone(), Right, c.len + n - 1);
    let kernel = |t: &Rational, s: &Rational| rising_over_factorial::<S>(lattice_gap(s, t) + 1, n - 1);
    let y = tabulate(high, Right, c.len + n - 1, |t| {
        let mut acc = S::zero();
        for (s, v) in f.points() {
            if s < b && &s >= t {
                acc = acc + kernel(t, &s) * v;
            } else if &s < t && s >= b {
                acc = acc - kernel(t, &s) * v;
            }
        }
        Ok(acc)
    })?;
    for i in 0..n {
        c.scalar(&b, &at(&delta_diff(&y, i, true)?, &b)?, &S::zero());
    }
    let from_b = f.drop_front(n - 1)?;
    c.compare("sum operator", &nabla_right_sum(&from_b, c.alpha())?, &y)?;
    let b1 = &b - int(1);
    c.compare_where("initial value problem", &delta_diff(&y, n, true)?, &f, |t| t <= &b1)
}
