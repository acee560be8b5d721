//! End-to-end tests of the command-line surface: exit codes, report
//! stability, file emission, and the verify/goodness workflows.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bfsynth"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary must run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Report text without the timing lines.
fn stable(text: &str) -> String {
    text.lines()
        .filter(|l| !l.split('=').next().unwrap_or("").ends_with("time_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn synth_equality_and_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen", "equality", "--n", "8", "--out", "eq8.aag"], dir.path());
    assert!(out.status.success());

    let out = run(
        &["synth", "eq8.aag", "--out", "eq8_skolem.aag"],
        dir.path(),
    );
    assert!(out.status.success(), "synth failed: {}", stdout(&out));
    let report = stdout(&out);
    assert!(report.contains("result=done-phase1"));
    assert!(report.contains("goodness.num=0"));

    let out = run(&["verify", "eq8.aag", "eq8_skolem.aag"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("correct"));

    // Verilog emission is also accepted by downstream tooling checks.
    let out = run(
        &[
            "synth",
            "eq8.aag",
            "--out",
            "eq8.v",
            "--format",
            "verilog",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let verilog = std::fs::read_to_string(dir.path().join("eq8.v")).unwrap();
    assert!(verilog.starts_with("module skolem("));
}

#[test]
fn verify_flipped_function_exits_one_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen", "equality", "--n", "2", "--out", "eq2.aag"], dir.path());
    assert!(out.status.success());
    // psi_1 = !y1 (flipped), psi_2 = y2.
    std::fs::write(
        dir.path().join("bad.aag"),
        "aag 2 2 0 2 0\n2\n4\n3\n4\ni0 y1\ni1 y2\no0 x1\no1 x2\n",
    )
    .unwrap();
    let out = run(&["verify", "eq2.aag", "bad.aag"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("incorrect"));
    assert!(text.contains("y1="));
}

#[test]
fn check_wdnnf_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "equality", "--n", "3", "--out", "eq3.aag"], dir.path());
    // The equality family is weakly decomposable as written.
    let out = run(&["check-wdnnf", "eq3.aag"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "PASS");

    // A 2QBF matrix with a mixed-polarity output under a conjunction fails,
    // but its BDD compilation passes.
    std::fs::write(
        dir.path().join("mixed.qdimacs"),
        "p cnf 3 2\na 2 3 0\ne 1 0\n1 2 0\n-1 3 0\n",
    )
    .unwrap();
    let out = run(&["check-wdnnf", "mixed.qdimacs"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("FAIL"));
    let out = run(&["check-wdnnf", "mixed.qdimacs", "--pipeline", "bdd"], dir.path());
    assert_eq!(stdout(&out).trim(), "PASS");
}

#[test]
fn goodness_reports_exact_fraction() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "equality", "--n", "1", "--out", "eq1.aag"], dir.path());
    // psi_1 = !y1 fails on every input: ratio 1.
    std::fs::write(
        dir.path().join("bad.aag"),
        "aag 1 1 0 1 0\n2\n3\ni0 y1\no0 x1\n",
    )
    .unwrap();
    let out = run(&["goodness", "eq1.aag", "bad.aag"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "goodness=1/1");

    // The identity is correct: ratio 0.
    std::fs::write(
        dir.path().join("good.aag"),
        "aag 1 1 0 1 0\n2\n2\ni0 y1\no0 x1\n",
    )
    .unwrap();
    let out = run(&["goodness", "eq1.aag", "good.aag"], dir.path());
    assert_eq!(stdout(&out).trim(), "goodness=0");
}

#[test]
fn qdimacs_synthesis_path() {
    let dir = tempfile::tempdir().unwrap();
    // forall y1 y2 exists x: clauses make x track y1 | y2.
    std::fs::write(
        dir.path().join("or.qdimacs"),
        "p cnf 3 2\na 2 3 0\ne 1 0\n-1 2 3 0\n1 -2 0\n",
    )
    .unwrap();
    let out = run(
        &["synth", "or.qdimacs", "--out", "or_skolem.aag"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run(&["verify", "or.qdimacs", "or_skolem.aag"], dir.path());
    assert!(out.status.success());
}

#[test]
fn clique_generation_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gen", "clique", "--n", "3", "--out", "clique3.aag"], dir.path());
    assert!(out.status.success());
    assert!(dir.path().join("clique3.aag").exists());
    let truth = std::fs::read_to_string(dir.path().join("clique3.truth")).unwrap();
    assert!(truth.lines().count() > 0);
    assert!(truth.starts_with("edges="));

    // The generated file synthesizes end to end with both pipelines.
    let out = run(
        &["synth", "clique3.aag", "--pipeline", "both", "--seed", "1"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("pipeline.chosen="));
}

#[test]
fn fixed_seed_reports_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "clique", "--n", "3", "--out", "c3.aag"], dir.path());
    let a = run(&["synth", "c3.aag", "--seed", "9"], dir.path());
    let b = run(&["synth", "c3.aag", "--seed", "9"], dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(stable(&stdout(&a)), stable(&stdout(&b)));
}

#[test]
fn timeout_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "equality", "--n", "4", "--out", "eq4.aag"], dir.path());
    let out = run(&["synth", "eq4.aag", "--timeout", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("result=timeout"));

    // The environment variable supplies the default budget.
    let out = bin()
        .args(["synth", "eq4.aag"])
        .env("BFSYNTH_TIMEOUT", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // An explicit flag overrides it.
    let out = bin()
        .args(["synth", "eq4.aag", "--timeout", "60"])
        .env("BFSYNTH_TIMEOUT", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // Missing file.
    let out = run(&["synth", "nope.aag"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    // Latch-bearing circuit.
    std::fs::write(
        dir.path().join("latch.aag"),
        "aag 2 1 1 1 0\n2\n4 2\n2\ni0 x1\n",
    )
    .unwrap();
    let out = run(&["synth", "latch.aag"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    // Bad quantifier shape.
    std::fs::write(dir.path().join("bad.qdimacs"), "p cnf 1 1\ne 1 0\n1 0\n").unwrap();
    let out = run(&["synth", "bad.qdimacs"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}
