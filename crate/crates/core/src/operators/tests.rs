use super::*;
use crate::grid::q_reflect;
use crate::kernels::{rat, Scalar};

fn ones(base: Rational, orientation: Orientation, len: usize) -> GridFunction<Rational> {
    GridFunction::constant(base, orientation, len, int(1)).unwrap()
}

fn sample(base: Rational, orientation: Orientation) -> GridFunction<Rational> {
    let vals = [rat(3, 2), int(-2), rat(1, 7), int(5), rat(-9, 4), int(0), rat(2, 3)];
    GridFunction::new(base, orientation, vals.to_vec()).unwrap()
}

/// Literal definitional sums over lattice points, kernels evaluated as
/// normalized factorial powers.
mod literal {
    use super::*;

    fn lattice(lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut s = lo.clone();
        while &s <= hi {
            out.push(s.clone());
            s += int(1);
        }
        out
    }

    pub fn delta_left(f: &GridFunction<Rational>, alpha: &Rational, t: &Rational) -> Rational {
        let a = f.lowest_point();
        let mut acc = Rational::zero();
        for s in lattice(&a, &(t - alpha)) {
            let k = Rational::falling_kernel(&(t - &s - int(1)), &(alpha - int(1))).unwrap();
            acc += k * f.at(&s).unwrap();
        }
        acc
    }

    pub fn delta_right(f: &GridFunction<Rational>, alpha: &Rational, t: &Rational) -> Rational {
        let b = f.highest_point();
        let mut acc = Rational::zero();
        for s in lattice(&(t + alpha), &b) {
            let k = Rational::falling_kernel(&(&s - int(1) - t), &(alpha - int(1))).unwrap();
            acc += k * f.at(&s).unwrap();
        }
        acc
    }

    pub fn nabla_left(f: &GridFunction<Rational>, alpha: &Rational, t: &Rational) -> Rational {
        let a = f.lowest_point();
        let mut acc = Rational::zero();
        for s in lattice(&(&a + int(1)), t) {
            let x = crate::kernels::as_i64(&(t - &s + int(1))).unwrap();
            let k = Rational::rising_kernel(x, &(alpha - int(1))).unwrap();
            acc += k * f.at(&s).unwrap();
        }
        acc
    }

    pub fn nabla_right(f: &GridFunction<Rational>, alpha: &Rational, t: &Rational) -> Rational {
        let b = f.highest_point();
        let mut acc = Rational::zero();
        for s in lattice(t, &(&b - int(1))) {
            let x = crate::kernels::as_i64(&(&s - t + int(1))).unwrap();
            let k = Rational::rising_kernel(x, &(alpha - int(1))).unwrap();
            acc += k * f.at(&s).unwrap();
        }
        acc
    }
}

#[test]
fn integer_differences() {
    let f = GridFunction::new(int(0), Orientation::Left, vec![int(1), int(3), int(6)]).unwrap();
    let d = delta_diff(&f, 1, false).unwrap();
    assert_eq!(d.values(), &[int(2), int(3)]);
    assert_eq!(d.first_point(), int(0));
    assert_eq!(nabla_diff(&f, 0, false).unwrap(), f);
    let n = nabla_diff(&f, 1, false).unwrap();
    assert_eq!(n.first_point(), int(1));
    assert_eq!(n.at(&int(2)).unwrap(), &int(3));
    assert_eq!(delta_diff(&f, 2, true).unwrap(), delta_diff(&f, 2, false).unwrap());
    assert_eq!(delta_diff(&f, 1, true).unwrap().values(), &[int(-2), int(-3)]);
    assert!(matches!(delta_diff(&f, 3, false), Err(Error::WindowTooShort { .. })));
}

#[test]
fn differences_respect_orientation() {
    let f = sample(int(6), Orientation::Right);
    let d = delta_diff(&f, 1, false).unwrap();
    for (t, v) in d.points() {
        assert_eq!(v, &(f.at(&(&t + int(1))).unwrap() - f.at(&t).unwrap()));
    }
    let n = nabla_diff(&f, 2, false).unwrap();
    for (t, v) in n.points() {
        let expect = f.at(&t).unwrap() - int(2) * f.at(&(&t - int(1))).unwrap() + f.at(&(&t - int(2))).unwrap();
        assert_eq!(v, &expect);
    }
}

#[test]
fn nabla_left_sum_examples() {
    let f = ones(int(0), Orientation::Left, 4);
    let s = nabla_left_sum(&f, &rat(1, 2)).unwrap();
    assert_eq!(s.values(), &[int(0), int(1), rat(3, 2), rat(15, 8)]);

    let g = sample(int(0), Orientation::Left);
    let p = nabla_left_sum(&g, &int(1)).unwrap();
    let mut acc = Rational::zero();
    for (i, (t, v)) in p.points().enumerate() {
        if i > 0 {
            acc += g.at(&t).unwrap();
        }
        assert_eq!(v, &acc);
    }
}

#[test]
fn nabla_right_sum_examples() {
    let f = ones(int(5), Orientation::Right, 6);
    let s = nabla_right_sum(&f, &rat(1, 2)).unwrap();
    assert_eq!(s.at(&int(5)).unwrap(), &int(0));
    assert_eq!(s.at(&int(4)).unwrap(), &int(1));
    assert_eq!(s.at(&int(3)).unwrap(), &rat(3, 2));

    let g = sample(int(5), Orientation::Right);
    let mirrored = q_reflect(&nabla_left_sum(&q_reflect(&g), &rat(2, 3)).unwrap());
    assert_eq!(nabla_right_sum(&g, &rat(2, 3)).unwrap(), mirrored);
}

#[test]
fn delta_sum_examples() {
    let f = ones(int(0), Orientation::Left, 3);
    let s = delta_left_sum(&f, &rat(1, 2)).unwrap();
    assert_eq!(s.at(&rat(5, 2)).unwrap(), &rat(15, 8));
    let single = GridFunction::new(int(0), Orientation::Left, vec![rat(4, 9)]).unwrap();
    assert_eq!(delta_left_sum(&single, &rat(7, 3)).unwrap().values(), &[rat(4, 9)]);

    let r = ones(int(5), Orientation::Right, 3);
    let s = delta_right_sum(&r, &rat(1, 2)).unwrap();
    assert_eq!(s.at(&rat(5, 2)).unwrap(), &rat(15, 8));
    assert_eq!(s.at(&rat(9, 2)).unwrap(), &int(1));

    let g = sample(int(2), Orientation::Right);
    let lhs = delta_left_sum(&q_reflect(&g), &rat(5, 4)).unwrap();
    let rhs = delta_right_sum(&g, &rat(5, 4)).unwrap();
    // (Qh)(t) = h(a + b - t) with a, b the ends of the original window.
    let pivot = g.lowest_point() + g.highest_point();
    for (t, v) in lhs.points() {
        assert_eq!(v, rhs.at(&(&pivot - &t)).unwrap());
    }
}

#[test]
fn sums_match_literal_definitions() {
    for alpha in [rat(1, 2), rat(5, 4), int(2), rat(7, 3)] {
        let f = sample(rat(1, 3), Orientation::Left);
        for (t, v) in delta_left_sum(&f, &alpha).unwrap().points() {
            assert_eq!(v, &literal::delta_left(&f, &alpha, &t), "alpha {alpha} t {t}");
        }
        for (t, v) in nabla_left_sum(&f, &alpha).unwrap().points() {
            assert_eq!(v, &literal::nabla_left(&f, &alpha, &t), "alpha {alpha} t {t}");
        }
        let g = sample(rat(11, 3), Orientation::Right);
        for (t, v) in delta_right_sum(&g, &alpha).unwrap().points() {
            assert_eq!(v, &literal::delta_right(&g, &alpha, &t), "alpha {alpha} t {t}");
        }
        for (t, v) in nabla_right_sum(&g, &alpha).unwrap().points() {
            assert_eq!(v, &literal::nabla_right(&g, &alpha, &t), "alpha {alpha} t {t}");
        }
    }
}

#[test]
fn nabla_left_diff_examples() {
    let f = ones(int(0), Orientation::Left, 4);
    let d = nabla_left_diff(&f, &rat(1, 2)).unwrap();
    assert_eq!(d.first_point(), int(1));
    assert_eq!(d.values(), &[int(1), rat(1, 2), rat(3, 8)]);

    let g = sample(int(0), Orientation::Left);
    let one = nabla_left_diff(&g, &int(1)).unwrap();
    assert_eq!(one, nabla_diff(&g, 1, false).unwrap());

    let r = q_reflect(&f);
    let dr = nabla_right_diff(&r, &rat(1, 2)).unwrap();
    assert_eq!(q_reflect(&dr).values(), d.values());
}

#[test]
fn nabla_left_diff_matches_grunwald_letnikov() {
    // nabla_a^alpha f(a+i) = sum_{j=1}^{i} gbinom(-alpha, i-j) f(a+j).
    for alpha in [rat(1, 2), rat(5, 4), rat(7, 3), rat(9, 4)] {
        let f = sample(rat(-1, 2), Orientation::Left);
        let d = nabla_left_diff(&f, &alpha).unwrap();
        let x = f.values();
        for (t, v) in d.points() {
            let i = crate::kernels::as_i64(&(&t - f.base())).unwrap() as usize;
            let mut acc = Rational::zero();
            for (j, xj) in x.iter().enumerate().take(i + 1).skip(1) {
                acc += crate::kernels::gbinom(&-alpha.clone(), i - j) * xj;
            }
            assert_eq!(v, &acc, "alpha {alpha} t {t}");
        }
        let g = sample(int(4), Orientation::Right);
        let dr = nabla_right_diff(&g, &alpha).unwrap();
        for (t, v) in dr.points() {
            let i = crate::kernels::as_i64(&(g.base() - &t)).unwrap() as usize;
            let mut acc = Rational::zero();
            for j in 1..=i {
                acc += crate::kernels::gbinom(&-alpha.clone(), i - j) * &g.values()[j];
            }
            assert_eq!(v, &acc, "alpha {alpha} t {t}");
        }
    }
}

#[test]
fn delta_diff_windows_and_reductions() {
    let f = sample(int(0), Orientation::Left);
    assert_eq!(delta_left_diff(&f, &int(1)).unwrap(), delta_diff(&f, 1, false).unwrap());
    let d = delta_left_diff(&f, &rat(3, 2)).unwrap();
    assert_eq!(d.first_point(), rat(1, 2));
    assert_eq!(d.len(), f.len() - 2);

    let g = sample(int(5), Orientation::Right);
    let d = delta_right_diff(&g, &rat(3, 2)).unwrap();
    assert_eq!(d.first_point(), rat(9, 2));
    assert_eq!(delta_right_diff(&g, &int(1)).unwrap(), nabla_diff(&g, 1, true).unwrap());

    // Extended form agrees on the ordinary window and adds n points below.
    let op = FracOperator::new(OperatorKind::DeltaLeftDiff, Order::new(rat(3, 2)).unwrap()).extended();
    let e = op.apply(&f).unwrap();
    assert_eq!(e.first_point(), rat(-3, 2));
    let plain = delta_left_diff(&f, &rat(3, 2)).unwrap();
    for (t, v) in plain.points() {
        assert_eq!(e.at(&t).unwrap(), v);
    }
}

#[test]
fn integer_sums_solve_their_initial_value_problems() {
    let f = sample(int(0), Orientation::Left);
    for n in 1..=3usize {
        let u = delta_left_sum(&f, &int(n as i64)).unwrap();
        // u vanishes at a, ..., a+n-1 (empty sums), so pad and difference.
        let padded = u.pad_front(n, Rational::zero());
        let d = delta_diff(&padded, n, false).unwrap();
        for (t, v) in d.points() {
            assert_eq!(v, f.at(&t).unwrap());
        }

        let g = sample(int(9), Orientation::Right);
        let u = delta_right_sum(&g, &int(n as i64)).unwrap();
        let padded = u.pad_front(n, Rational::zero());
        let d = nabla_diff(&padded, n, true).unwrap();
        for (t, v) in d.points() {
            assert_eq!(v, g.at(&t).unwrap());
        }
    }
}

#[test]
fn windows_are_reported_and_enforced() {
    let f = ones(int(0), Orientation::Left, 2);
    assert!(matches!(
        delta_left_diff(&f, &rat(5, 2)),
        Err(Error::WindowTooShort { .. })
    ));
    let s = delta_left_sum(&f, &rat(1, 2)).unwrap();
    assert!(s.at(&int(0)).is_err());
    assert!(nabla_left_sum(&f, &int(0)).is_err());
    assert!(
        FracOperator::new(OperatorKind::DeltaLeftSum, Order::new(int(1)).unwrap())
            .with_convention(Convention::InclusiveBase)
            .is_err()
    );
}

#[test]
fn float_mode_tracks_exact_mode() {
    let f = sample(int(0), Orientation::Left);
    let ff = GridFunction::new(
        int(0),
        Orientation::Left,
        f.values().iter().map(|v| v.to_f64()).collect(),
    )
    .unwrap();
    for kind in OperatorKind::ALL {
        let op = FracOperator::new(kind, Order::new(rat(7, 4)).unwrap());
        let e = op.apply(&f).unwrap();
        let x = op.apply(&ff).unwrap();
        for (a, b) in e.values().iter().zip(x.values()) {
            assert!((a.to_f64() - b).abs() < 1e-12, "{kind}");
        }
    }
}

#[test]
fn batch_matches_single() {
    let op = FracOperator::new(OperatorKind::NablaRightDiff, Order::new(rat(4, 3)).unwrap());
    let inputs: Vec<_> = (0..5).map(|k| sample(int(k), Orientation::Right)).collect();
    let seq = op.apply_batch(&inputs, Execution::Sequential);
    let par = op.apply_batch(&inputs, Execution::Parallel);
    assert_eq!(seq, par);
    assert_eq!(seq[2].as_ref().unwrap(), &op.apply(&inputs[2]).unwrap());
}

#[test]
fn kinds_parse() {
    for kind in OperatorKind::ALL {
        assert_eq!(kind.tag().parse::<OperatorKind>().unwrap(), kind);
    }
    assert!("delta-sideways-sum".parse::<OperatorKind>().is_err());
}
