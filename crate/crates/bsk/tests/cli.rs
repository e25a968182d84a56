//! Black-box tests of the command-line interface: output shapes, the
//! stable exit-code contract, and byte-level determinism of repeated runs.

use std::process::{Command, Output};

fn bsk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsk"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (signal?)")
}

#[test]
fn eval_prints_one_readable_number() {
    let out = bsk(&["eval", "--func", "sq1", "--x", "0.5", "-n", "9", "-r", "2"]);
    assert_eq!(exit_code(&out), 0);
    let value: f64 = stdout(&out).trim().parse().expect("bare float");
    // The closed-form second moment at 1/2 for n = 9, r = 2.
    let params = bsk::OperatorParams::new(9, 2, 1).unwrap();
    let expected = bsk::operator::moment_second(&params, 0, &[0.5]).unwrap();
    assert!((value - expected).abs() < 1e-12, "{value} vs {expected}");
}

#[test]
fn eval_accepts_inline_expressions() {
    let out = bsk(&[
        "eval",
        "--func",
        "expr:x1*x2",
        "--x",
        "0.5,0.5",
        "-n",
        "8",
        "-r",
        "2",
        "-d",
        "2",
    ]);
    assert_eq!(exit_code(&out), 0);
    let value: f64 = stdout(&out).trim().parse().unwrap();
    assert!((value - 0.25).abs() < 0.02, "{value}");
}

#[test]
fn moments_and_bounds_report_labeled_lines() {
    let out = bsk(&["moments", "-n", "9", "-r", "2", "--x", "0.5"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("first ="), "{text}");
    assert!(text.contains("second ="), "{text}");
    assert!(text.contains("central ="), "{text}");

    let out = bsk(&["bounds", "-n", "9", "-r", "2"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("a_nr ="), "{text}");
    assert!(text.contains("m_r ="), "{text}");
    assert!(text.contains("b_r ="), "{text}");
}

#[test]
fn modulus_profile_prints_csv() {
    let out = bsk(&[
        "modulus", "--func", "step", "--kind", "tau", "--delta", "0.1,0.2", "--grid", "65",
        "--h-grid", "17",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,value");
    assert_eq!(lines.len(), 3);
    // The averaged modulus of a centred jump is exactly delta.
    let value: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 0.1).abs() < 3e-3, "tau(step, 0.1) = {value}");
}

#[test]
fn converge_emits_the_pinned_csv_schema() {
    let out = bsk(&[
        "converge", "--func", "x1", "-r", "1", "--n-geom", "4:16", "--p", "1,2", "--cells", "17",
        "--grid", "33", "--h-grid", "9",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,p,error_lp,error_sup,a_nr,tau_scale,omega_scale,ratio_tau,ratio_omega"
    );
    // Degrees 4, 8, 16 by two exponents.
    assert_eq!(lines.len(), 1 + 6);
    for line in &lines[1..] {
        assert_eq!(line.matches(',').count(), 8);
    }
}

#[test]
fn verify_emits_ratio_rows() {
    let out = bsk(&[
        "verify",
        "--theorem",
        "lp-norm-bound",
        "--func",
        "step",
        "-r",
        "2",
        "--n-list",
        "5,9",
        "--cells",
        "33",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,lhs,rhs,ratio");
    assert_eq!(lines.len(), 3);
    let ratio: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!(ratio <= 1.0 + 1e-9);
}

#[test]
fn exit_codes_follow_the_contract() {
    // 2: malformed expression.
    let out = bsk(&["eval", "--func", "expr:x1+", "--x", "0.5", "-n", "5"]);
    assert_eq!(exit_code(&out), 2);
    assert!(!out.stderr.is_empty());
    // 2: unknown catalog entry.
    let out = bsk(&["eval", "--func", "nope", "--x", "0.5", "-n", "5"]);
    assert_eq!(exit_code(&out), 2);
    // 2: point outside the domain.
    let out = bsk(&["eval", "--func", "x1", "--x", "1.5", "-n", "5"]);
    assert_eq!(exit_code(&out), 2);
    // 2: clap usage error (missing required flag).
    let out = bsk(&["eval", "--func", "x1", "--x", "0.5"]);
    assert_eq!(exit_code(&out), 2);
    // 3: moments demand the strict regime.
    let out = bsk(&["moments", "-n", "4", "-r", "2", "--x", "0.5"]);
    assert_eq!(exit_code(&out), 3);
    // 3: bivariate evaluation demands the strict regime.
    let out = bsk(&[
        "eval", "--func", "one", "--x", "0.5,0.5", "-n", "4", "-r", "2", "-d", "2",
    ]);
    assert_eq!(exit_code(&out), 3);
    // 4: term budget.
    let out = bsk(&[
        "eval", "--func", "one", "--x", "0.5,0.5", "-n", "99", "-r", "0", "-d", "2", "--budget",
        "100",
    ]);
    assert_eq!(exit_code(&out), 4);
    // 5: unwritable output path.
    let out = bsk(&[
        "converge",
        "--func",
        "x1",
        "-r",
        "2",
        "--n-list",
        "8",
        "--cells",
        "9",
        "--grid",
        "17",
        "--h-grid",
        "5",
        "--out",
        "/nonexistent-dir-for-sure/report.csv",
    ]);
    assert_eq!(exit_code(&out), 5);
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let args = [
        "converge", "--func", "kink", "-r", "2", "--n-geom", "5:32", "--p", "1,2", "--cells",
        "17", "--grid", "33", "--h-grid", "9",
    ];
    let first = bsk(&args);
    let second = bsk(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(exit_code(&second), 0);
    assert!(!first.stdout.is_empty());
    assert_eq!(first.stdout, second.stdout, "CSV output drifted between runs");

    let mut json_args = args.to_vec();
    json_args.extend_from_slice(&["--format", "json"]);
    let first = bsk(&json_args);
    let second = bsk(&json_args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "JSON output drifted between runs");
}

#[test]
fn output_files_match_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let args = [
        "converge", "--func", "x1", "-r", "1", "--n-list", "4,8", "--cells", "9", "--grid",
        "17", "--h-grid", "5",
    ];
    let on_stdout = bsk(&args);
    assert_eq!(exit_code(&on_stdout), 0);
    let mut file_args = args.to_vec();
    let path_str = path.to_str().unwrap();
    file_args.extend_from_slice(&["--out", path_str]);
    let to_file = bsk(&file_args);
    assert_eq!(exit_code(&to_file), 0);
    assert!(to_file.stdout.is_empty(), "file mode should not print the report");
    let file_text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file_text.as_bytes(), &on_stdout.stdout[..]);
}
