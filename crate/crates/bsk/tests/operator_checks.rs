//! End-to-end checks of the operator pipeline against an exact rational
//! reference implementation, plus structural properties (linearity,
//! positivity, tensorization, classical reduction, budget enforcement).

mod common;

use bsk::operator::{
    bsk_apply, bsk_apply_budgeted, kantorovich_classical, moment_first, moment_second,
    BskEvaluator,
};
use bsk::quadrature::QuadratureRule;
use bsk::{catalog, Error, OperatorParams, ScalarField, DEFAULT_TERM_BUDGET};
use common::{bsk_monomial_exact, monomial_field, rat, to_f64};

fn rule() -> QuadratureRule {
    QuadratureRule::gauss_legendre(8).unwrap()
}

#[test]
fn univariate_values_match_exact_rational_arithmetic() {
    // (n, r) pairs include wide shifts allowed in one dimension (n >= r
    // but not necessarily n > 2r).
    let cases = [(5usize, 0usize), (5, 2), (7, 3), (7, 5), (9, 1), (12, 5)];
    let points = [rat(1, 3), rat(2, 5), rat(7, 8)];
    for &(n, r) in &cases {
        let params = OperatorParams::new(n, r, 1).unwrap();
        for exps in [[2usize], [3usize]] {
            let f = monomial_field(&exps);
            for xq in &points {
                let exact = to_f64(&bsk_monomial_exact(n, r, &exps, std::slice::from_ref(xq)));
                let got = bsk_apply(&params, &f, &[to_f64(xq)], &rule()).unwrap();
                assert!(
                    (got - exact).abs() < 1e-12,
                    "n={n} r={r} exps={exps:?}: got {got}, exact {exact}"
                );
            }
        }
    }
}

#[test]
fn bivariate_values_match_exact_rational_arithmetic() {
    let cases = [(5usize, 2usize), (7, 3), (9, 1)];
    let points = [[rat(1, 3), rat(3, 7)], [rat(1, 2), rat(1, 5)]];
    for &(n, r) in &cases {
        let params = OperatorParams::new(n, r, 2).unwrap();
        for exps in [[1usize, 2usize], [2, 2]] {
            let f = monomial_field(&exps);
            for xq in &points {
                let exact = to_f64(&bsk_monomial_exact(n, r, &exps, xq));
                let x = [to_f64(&xq[0]), to_f64(&xq[1])];
                let got = bsk_apply(&params, &f, &x, &rule()).unwrap();
                assert!(
                    (got - exact).abs() < 1e-12,
                    "n={n} r={r} exps={exps:?}: got {got}, exact {exact}"
                );
            }
        }
    }
}

#[test]
fn moment_closed_forms_match_exact_oracle() {
    let x = rat(2, 7);
    for (n, r) in [(5usize, 2usize), (9, 4), (17, 0), (33, 3)] {
        let params = OperatorParams::new(n, r, 1).unwrap();
        let xf = to_f64(&x);
        let first = moment_first(&params, 0, &[xf]).unwrap();
        let second = moment_second(&params, 0, &[xf]).unwrap();
        let first_exact = to_f64(&bsk_monomial_exact(n, r, &[1], std::slice::from_ref(&x)));
        let second_exact = to_f64(&bsk_monomial_exact(n, r, &[2], std::slice::from_ref(&x)));
        assert!(
            (first - first_exact).abs() < 1e-13,
            "first moment n={n} r={r}: {first} vs {first_exact}"
        );
        assert!(
            (second - second_exact).abs() < 1e-13,
            "second moment n={n} r={r}: {second} vs {second_exact}"
        );
    }
}

#[test]
fn operator_is_linear_in_the_function() {
    let (a, b) = (0.3f64, -1.7f64);
    for d in [1usize, 2] {
        let params = OperatorParams::new(9, 2, d).unwrap();
        let f1 = bsk::catalog_entry("sq1", d).unwrap();
        let f2 = bsk::catalog_entry("kink", d).unwrap();
        let (f1c, f2c) = (f1.clone(), f2.clone());
        let combo = ScalarField::from_closure(
            "combo",
            d,
            f2.singularities().to_vec(),
            move |x: &[f64]| a * f1c.eval(x).unwrap() + b * f2c.eval(x).unwrap(),
        );
        let points: Vec<Vec<f64>> = match d {
            1 => vec![vec![0.0], vec![0.31], vec![0.5], vec![1.0]],
            _ => vec![vec![0.31, 0.77], vec![0.5, 0.5], vec![1.0, 0.0]],
        };
        for x in &points {
            let lhs = bsk_apply(&params, &combo, x, &rule()).unwrap();
            let rhs = a * bsk_apply(&params, &f1, x, &rule()).unwrap()
                + b * bsk_apply(&params, &f2, x, &rule()).unwrap();
            assert!(
                (lhs - rhs).abs() < 1e-12,
                "d={d} x={x:?}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn positive_functions_stay_positive_and_bounded() {
    // Every catalog entry is nonnegative; a positive operator that
    // averages the function must stay inside [0, sup f].
    for d in [1usize, 2] {
        let params = OperatorParams::new(7, 3, d).unwrap();
        for f in catalog(d) {
            let ev = BskEvaluator::new(params, &f, &rule(), DEFAULT_TERM_BUDGET).unwrap();
            // Sample sup f on a grid that contains the extreme points of
            // every catalog entry (corners and the centre line).
            let axis: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
            let mut sup_f = 0.0f64;
            let mut idx = vec![0usize; d];
            'outer: loop {
                let x: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
                sup_f = sup_f.max(f.eval(&x).unwrap());
                for ax in (0..d).rev() {
                    idx[ax] += 1;
                    if idx[ax] <= 100 {
                        continue 'outer;
                    }
                    idx[ax] = 0;
                }
                break;
            }
            let coarse: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
            let grid: Vec<Vec<f64>> = (0..d).map(|_| coarse.clone()).collect();
            let values = ev.eval_grid(&grid).unwrap();
            for v in values {
                assert!(v >= -1e-12, "operator broke positivity: {v} on `{}`", f.label());
                assert!(
                    v <= sup_f + 1e-12,
                    "operator exceeded sup: {v} > {sup_f} on `{}`",
                    f.label()
                );
            }
        }
    }
}

#[test]
fn product_functions_factor_across_axes() {
    // Tensor weights and cell means both factor, so the bivariate value
    // of x1^2 * x2 is the product of two univariate applications.
    let n = 7;
    let r = 3;
    let params2 = OperatorParams::new(n, r, 2).unwrap();
    let params1 = OperatorParams::new(n, r, 1).unwrap();
    let f2 = monomial_field(&[2, 1]);
    let g_sq = monomial_field(&[2]);
    let g_lin = monomial_field(&[1]);
    for (x1, x2) in [(0.21, 0.84), (0.5, 0.5), (0.0, 0.99)] {
        let joint = bsk_apply(&params2, &f2, &[x1, x2], &rule()).unwrap();
        let split = bsk_apply(&params1, &g_sq, &[x1], &rule()).unwrap()
            * bsk_apply(&params1, &g_lin, &[x2], &rule()).unwrap();
        assert!(
            (joint - split).abs() < 1e-12,
            "x=({x1},{x2}): joint {joint} vs split {split}"
        );
    }
}

#[test]
fn shifts_zero_and_one_reproduce_the_classical_operator() {
    for n in [4usize, 9, 16] {
        for f in catalog(1) {
            for x in [0.0, 0.3, 1.0] {
                let classical = kantorovich_classical(n, &f, x, &rule()).unwrap();
                for r in [0usize, 1] {
                    let params = OperatorParams::new(n, r, 1).unwrap();
                    let shifted = bsk_apply(&params, &f, &[x], &rule()).unwrap();
                    assert!(
                        (shifted - classical).abs() < 1e-12,
                        "n={n} r={r} x={x} `{}`: {shifted} vs {classical}",
                        f.label()
                    );
                }
            }
        }
    }
}

#[test]
fn term_budget_is_enforced() {
    let params = OperatorParams::new(99, 0, 2).unwrap();
    let f = monomial_field(&[1, 1]);
    let err = bsk_apply_budgeted(&params, &f, &[0.5, 0.5], &rule(), 100).unwrap_err();
    match err {
        Error::Budget { terms, budget } => {
            assert_eq!(terms, 10_000);
            assert_eq!(budget, 100);
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
    assert_eq!(err.exit_code(), 4);
    // The evaluator constructor enforces the same limit.
    assert!(matches!(
        BskEvaluator::new(params, &f, &rule(), 100),
        Err(Error::Budget { .. })
    ));
}

#[test]
fn bivariate_needs_the_strict_regime() {
    // n = 2r is fine univariately but rejected for tensor operators.
    let f1 = monomial_field(&[2]);
    let params1 = OperatorParams::new(4, 2, 1).unwrap();
    assert!(bsk_apply(&params1, &f1, &[0.5], &rule()).is_ok());

    let f2 = monomial_field(&[2, 1]);
    let params2 = OperatorParams::new(4, 2, 2).unwrap();
    let err = bsk_apply(&params2, &f2, &[0.5, 0.5], &rule()).unwrap_err();
    assert!(matches!(err, Error::Regime { n: 4, r: 2 }));
    assert_eq!(err.exit_code(), 3);
}
