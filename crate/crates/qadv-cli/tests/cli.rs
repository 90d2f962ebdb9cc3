//! CLI behavior: exit codes, JSON shape, schema conformance, file inputs.

use std::io::Write;
use std::process::{Command, Output};

fn qadv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qadv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn parse_errors_exit_one() {
    for args in [
        vec!["bound", "x1 & x1", "--epsilon", "0.1"],
        vec!["bound", "x1 &", "--epsilon", "0.1"],
        vec!["critical", "((x1)"],
        vec!["nonsense-subcommand"],
        vec!["simulate", "grover-or", "--epsilon", "0.1"], // missing --n
        vec!["simulate", "xor2", "--n", "3", "--epsilon", "0.1"],
        vec!["simulate", "grover-or", "--n", "3", "--formula", "x1 | x2", "--epsilon", "0.1"],
    ] {
        let out = qadv(&args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}: {out:?}");
        assert!(out.stdout.is_empty(), "errors must not write reports: {args:?}");
    }
}

#[test]
fn bad_epsilon_exits_one() {
    for eps in ["0.5", "0", "-0.2", "0.75"] {
        let out = qadv(&["bound", "x1 & x2", "--epsilon", eps]);
        assert_eq!(out.status.code(), Some(1), "bound epsilon {eps}");
        let out = qadv(&["simulate", "xor2", "--epsilon", eps]);
        assert_eq!(out.status.code(), Some(1), "simulate epsilon {eps}");
    }
}

#[test]
fn assertion_failures_exit_two() {
    // an impossible residual tolerance turns a passing check into a failure
    let out = qadv(&["verify-foc", "(x1|x2)&(x3|x4)", "--foc-tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_json(&out);
    assert_eq!(report["assertions_passed"], serde_json::json!(false));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(qadv(&["--help"]).status.code(), Some(0));
    assert_eq!(qadv(&["--version"]).status.code(), Some(0));
    assert_eq!(qadv(&["bound", "--help"]).status.code(), Some(0));
}

#[test]
fn seed_is_accepted_and_ignored() {
    let with = qadv(&["--seed", "7", "bound", "x1 & x2", "--epsilon", "0.1"]);
    let without = qadv(&["bound", "x1 & x2", "--epsilon", "0.1"]);
    assert_eq!(with.status.code(), Some(0));
    assert_eq!(with.stdout, without.stdout);
}

#[test]
fn counts_flag_suppresses_sets() {
    let out = qadv(&["critical", "(x1|x2)&(x3|x4)", "--counts"]);
    let report = stdout_json(&out);
    assert_eq!(report["x_count"], serde_json::json!(4));
    assert_eq!(report["y_count"], serde_json::json!(4));
    assert_eq!(report["r_count"], serde_json::json!(8));
    assert!(report.get("x").is_none());
    assert!(report.get("r").is_none());
}

#[test]
fn remapped_variables_are_reported() {
    let out = qadv(&["critical", "x5 & !x2", "--counts"]);
    let report = stdout_json(&out);
    assert_eq!(report["formula"], serde_json::json!("(x1 & x2)"));
    assert_eq!(report["var_map"], serde_json::json!([[2, 2], [5, 1]]));
    assert_eq!(report["negations"], serde_json::json!([2]));
}

#[test]
fn table_output_is_plain_text() {
    let out = qadv(&["bound", "x1 & x2", "--epsilon", "0.1", "--table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theorem bound"));
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_err());
}

#[test]
fn gamma_and_alpha_files_drive_the_bound() {
    let dir = std::env::temp_dir().join(format!("qadv-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let gamma_path = dir.join("gamma.txt");
    let alpha_path = dir.join("alpha.txt");
    let mut gamma = std::fs::File::create(&gamma_path).unwrap();
    writeln!(gamma, "# unit weights on the AND_2 neighbor pairs").unwrap();
    writeln!(gamma, "01,11 1.0").unwrap();
    writeln!(gamma, "10,11 1.0  # trailing comment").unwrap();
    let mut alpha = std::fs::File::create(&alpha_path).unwrap();
    writeln!(alpha, "01 0.5").unwrap();
    writeln!(alpha, "10 0.5").unwrap();
    writeln!(alpha, "11 {}", std::f64::consts::FRAC_1_SQRT_2).unwrap();

    let out = qadv(&[
        "bound",
        "x1 & x2",
        "--epsilon",
        "0.1",
        "--gamma",
        gamma_path.to_str().unwrap(),
        "--alpha",
        alpha_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    // objective = 2 * 0.5 * (1/sqrt 2) = 1/sqrt 2
    let objective = report["objective"].as_f64().unwrap();
    assert!((objective - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

    // a support violation in the file is an input error
    let mut bad = std::fs::File::create(&gamma_path).unwrap();
    writeln!(bad, "01,10 1.0").unwrap();
    let out = qadv(&[
        "bound",
        "x1 & x2",
        "--epsilon",
        "0.1",
        "--gamma",
        gamma_path.to_str().unwrap(),
        "--alpha",
        alpha_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    // so is a bit-length mismatch against the formula
    let mut wrong_width = std::fs::File::create(&gamma_path).unwrap();
    writeln!(wrong_width, "010,111 1.0").unwrap();
    let out = qadv(&[
        "bound",
        "x1 & x2",
        "--epsilon",
        "0.1",
        "--gamma",
        gamma_path.to_str().unwrap(),
        "--alpha",
        alpha_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_accepts_a_matching_formula() {
    let out = qadv(&[
        "simulate",
        "grover-or",
        "--n",
        "4",
        "--formula",
        "x1 | x2 | x3 | x4",
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["measured_error"], serde_json::json!(0.0));
}

#[test]
fn all_inputs_flag_tracks_the_full_cube() {
    let out = qadv(&["simulate", "identity", "--n", "3", "--epsilon", "0.3", "--all-inputs"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["trace"]["tracked"].as_array().unwrap().len(), 8);

    let out = qadv(&["simulate", "identity", "--n", "9", "--epsilon", "0.3", "--all-inputs"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_validate_against_the_published_schema() {
    let schema_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/report.schema.json"
    ))
    .unwrap();
    let schema: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();

    let cases: &[&[&str]] = &[
        &["critical", "(x1|x2)&(x3|x4)"],
        &["critical", "x1", "--counts"],
        &["bound", "(x1|x2)&(x3|x4)", "--epsilon", "0.1"],
        &["verify-foc", "x1 & (x2|x3|x4)"],
        &["oracle-check", "(x1&x2&x3)|(x4&x5&x6)|(x7&x8&x9)"],
        &["simulate", "grover-or", "--n", "4", "--epsilon", "0.1"],
        &["simulate", "xor2", "--epsilon", "0.25"],
        &["simulate", "identity", "--n", "2", "--iters", "1", "--epsilon", "0.45"],
    ];
    for args in cases {
        let out = qadv(args);
        assert!(
            out.status.code() == Some(0) || out.status.code() == Some(2),
            "args {args:?}: {out:?}"
        );
        let report = stdout_json(&out);
        let errors: Vec<String> = validator
            .iter_errors(&report)
            .map(|e| format!("{e}"))
            .collect();
        assert!(errors.is_empty(), "schema violations for {args:?}: {errors:?}");
    }
}
