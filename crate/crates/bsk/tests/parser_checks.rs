//! Behavioural tests for the expression language: precedence, the
//! supported function forms, break detection, dimension gating, and
//! clean failure on malformed input.

use bsk::expr::{detect_breaks, differentiate, eval, parse, parse_for_dimension, pretty};
use bsk::{Error, ScalarField};

fn eval_str(text: &str, x: &[f64]) -> f64 {
    eval(&parse(text).unwrap(), x)
}

#[test]
fn precedence_and_associativity() {
    assert_eq!(eval_str("1 - 2 - 3", &[]), -4.0);
    assert_eq!(eval_str("2*3 + 4/8", &[]), 6.5);
    assert_eq!(eval_str("2^3^2", &[]), 512.0); // right-associative power
    assert_eq!(eval_str("-x1^2", &[0.5]), -0.25); // negation binds last
    assert_eq!(eval_str("(1 + 2) * (3 - 5)", &[]), -6.0);
    assert_eq!(eval_str("2*x1 - x2/4", &[0.5, 1.0]), 0.75);
}

#[test]
fn function_forms_evaluate() {
    assert_eq!(eval_str("abs(x1 - 0.75)", &[0.25]), 0.5);
    assert_eq!(eval_str("step(x1 - 0.5)", &[0.25]), 0.0);
    assert_eq!(eval_str("step(x1 - 0.5)", &[0.75]), 1.0);
    assert_eq!(eval_str("step(x1 - 0.5)", &[0.5]), 1.0); // >= 0 convention
    assert_eq!(eval_str("min(x1, 0.3, 1 - x1)", &[0.875]), 0.125);
    assert_eq!(eval_str("max(x1, 1 - x1)", &[0.25]), 0.75);
}

#[test]
fn axis_aligned_breaks_are_detected() {
    let kink = parse("abs(x1 - 0.25)").unwrap();
    let breaks = detect_breaks(&kink);
    assert_eq!(breaks.len(), 1);
    assert_eq!(breaks[0].axis, 0);
    assert!((breaks[0].coord - 0.25).abs() < 1e-15);
    assert!(!breaks[0].jump);

    let jump = parse("step(x2 - 0.5)").unwrap();
    let breaks = detect_breaks(&jump);
    assert_eq!(breaks.len(), 1);
    assert_eq!(breaks[0].axis, 1);
    assert!((breaks[0].coord - 0.5).abs() < 1e-15);
    assert!(breaks[0].jump);

    let smooth = parse("x1^2 + 3").unwrap();
    assert!(detect_breaks(&smooth).is_empty());
}

#[test]
fn dimension_gating_rejects_foreign_variables() {
    assert!(parse_for_dimension("x1 + x2", 2).is_ok());
    let err = parse_for_dimension("x1 + x2", 1).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    // The same gate guards field construction.
    assert!(ScalarField::from_expression("x3", 2).is_err());
}

#[test]
fn malformed_inputs_fail_cleanly() {
    for text in ["", "1 +", "foo(x1)", "x0", "((1)", "1..2", "min()", "*3"] {
        let err = parse(text).unwrap_err();
        assert!(
            matches!(err, Error::Parse { .. }),
            "`{text}` produced {err:?}"
        );
        assert_eq!(err.exit_code(), 2, "`{text}`");
    }
}

#[test]
fn pretty_output_reparses_to_the_same_values() {
    let samples = [
        "x1^2*x2 + x2^3",
        "abs(x1 - 0.5) + step(x2 - 0.25)",
        "min(x1, 1 - x1) * max(x2, 0.5)",
        "-(x1 + 2)/4",
        "1/(1 + 25*(x1 - 0.5)^2)",
    ];
    for text in samples {
        let original = parse(text).unwrap();
        let round = parse(&pretty(&original)).unwrap();
        for i in 0..=4 {
            for j in 0..=4 {
                let x = [i as f64 / 4.0, j as f64 / 4.0];
                let a = eval(&original, &x);
                let b = eval(&round, &x);
                assert!(
                    (a - b).abs() < 1e-15,
                    "`{text}` at {x:?}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn symbolic_derivatives_match_closed_forms() {
    let e = parse("x1^3 + 2*x1").unwrap();
    let de = differentiate(&e, 0).expect("polynomial derivative");
    for i in 0..=10 {
        let x = [i as f64 / 10.0];
        let want = 3.0 * x[0] * x[0] + 2.0;
        let got = eval(&de, &x);
        assert!((got - want).abs() < 1e-12, "x={}: {got} vs {want}", x[0]);
    }
    // Differentiating through a kink has no symbolic answer.
    let kink = parse("abs(x1 - 0.5)").unwrap();
    assert!(differentiate(&kink, 0).is_none());
    // A variable exponent blocks the power rule only when the axis
    // appears in the exponent itself.
    let pow = parse("x1^x2").unwrap();
    assert!(differentiate(&pow, 0).is_some());
    assert!(differentiate(&pow, 1).is_none());
}

#[test]
fn expression_fields_carry_their_singularities() {
    let f = ScalarField::from_expression("abs(x1 - 0.25) + step(x2 - 0.5)", 2).unwrap();
    assert!(!f.is_singularity_free());
    assert!(f.singular_on_axis(0));
    assert!(f.singular_on_axis(1));
    assert_eq!(f.singular_coords(0), vec![0.25]);
    assert_eq!(f.singular_coords(1), vec![0.5]);
    let smooth = ScalarField::from_expression("x1*x2", 2).unwrap();
    assert!(smooth.is_singularity_free());
}
