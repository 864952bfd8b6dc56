use std::path::Path;
use std::process::{Command, Output};

fn blocklie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blocklie")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn bracket_prints_the_value() {
    let o = blocklie(&["bracket", "L[1,0]", "L[0,0]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "L[1,0]\n");
    let o = blocklie(&["bracket", "L[2,0]", "L[-2,0]"]);
    assert_eq!(stdout(&o), "4*L[0,0]\n");
}

#[test]
fn apply_and_cocycle() {
    let o = blocklie(&["apply", "--derivation", "ad(L[2,1]) + 3d", "L[0,0]"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "3*L[2,1]\n"));
    let o = blocklie(&["cocycle", "L[2,0]", "L[-2,0]"]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn jacobi_report() {
    let o = blocklie(&["check-jacobi", "--window", "-1", "1", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("PASS: 0 violations over 216 triples"));
    assert_eq!(stdout(&o).lines().nth(1), Some("seed: 0"));
}

#[test]
fn antisymmetry_and_cocycle_reports_pass() {
    for cmd in ["check-antisym", "check-cocycle"] {
        let o = blocklie(&[cmd, "--window", "-2", "2", "1"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        assert!(stdout(&o).starts_with("PASS: "));
    }
}

#[test]
fn parse_errors_exit_two_with_a_caret() {
    let o = blocklie(&["bracket", "L[1,", "L[0,0]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains('^'));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(blocklie(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(blocklie(&["check-jacobi", "--window", "3", "-3", "1"]).status.code(), Some(2));
    assert_eq!(blocklie(&["check-derivation", "--table", "/nonexistent/t.txt"]).status.code(), Some(2));
    assert_eq!(blocklie(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_derivation_flags_a_non_derivation() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.txt", &blocklie::expr_io::format_derivation_table(
        &blocklie::parse_derivation("ad(L[1,1]) - 2d").unwrap().to_table(blocklie::Window::new(-2, 2, 2).unwrap()),
    ));
    let o = blocklie(&["check-derivation", "--table", &good, "--pairs", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut table = String::from("window -1 1 1\n");
    for a in -1..=1 {
        for i in 0..=1 {
            let v = if (a, i) == (0, 0) { "L[0,0]" } else { "0" };
            table.push_str(&format!("L[{a},{i}] -> {v}\n"));
        }
    }
    let bad = write(dir.path(), "bad.txt", &table);
    let o = blocklie(&["check-derivation", "--table", &bad, "--pairs", "200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL: "));
    let o = blocklie(&["decompose", "--table", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL: Inconsistent"));
    let o = blocklie(&["decompose", "--table", &good]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("derivation: ad(L[1,1]) - 2*d"), "{}", stdout(&o));
}

#[test]
fn seeded_runs_are_deterministic() {
    let args = ["--seed", "17", "check-derivation", "--spec", "ad(L[0,1]) + d", "--pairs", "30"];
    let (a, b) = (blocklie(&args), blocklie(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("seed: 17"));
}

#[test]
fn lemma_commands() {
    let o = blocklie(&["lemma31", "--beta", "3", "--j", "1", "--spec", "ad(3/4*L[0,0] + L[4,2]) + d"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = blocklie(&["lemma31", "--beta", "3", "--j", "1", "--spec", "ad(L[0,0]) + d"]);
    assert_eq!(o.status.code(), Some(2), "precondition failure is an input error");
    let o = blocklie(&["lemma34", "--p", "1", "--spec", "ad(L[0,0])"]);
    assert_eq!(o.status.code(), Some(2));
    let o = blocklie(&["lemma34", "--p", "1", "--spec", "ad(0)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn witness_commands() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = write(
        dir.path(),
        "kernel.toml",
        "hidden = \"ad(-2*L[0,0]) - 2d\"\n\n[[perturbations]]\nx = \"L[0,0]\"\ny = \"L[1,0]\"\nkernel = \"ad(L[0,0]) + d\"\ncoeff = \"1/2\"\n",
    );
    for cmd in ["lemma32", "lemma33", "audit", "reconstruct"] {
        let o = blocklie(&[cmd, "--witness", &kernel]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stdout(&o));
    }
    let o = blocklie(&["reconstruct", "--witness", &kernel]);
    assert!(stdout(&o).contains("xi: 1/2"), "{}", stdout(&o));

    let broken = write(
        dir.path(),
        "broken.toml",
        "hidden = \"ad(L[2,1]) + 3d\"\n\n[[perturbations]]\nx = \"L[0,0]\"\ny = \"L[1,0]\"\nkernel = \"d\"\ncoeff = 1\n",
    );
    let o = blocklie(&["reconstruct", "--witness", &broken]);
    assert_eq!(o.status.code(), Some(2), "invalid kernels are refused at load");
    let o = blocklie(&["reconstruct", "--witness", &broken, "--no-validate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL: AnchorContractViolation"));
    let o = blocklie(&["audit", "--witness", &broken, "--no-validate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn annihilators_command() {
    let o = blocklie(&["annihilators", "--targets", "L[0,0];L[1,0]", "--search", "-2", "2", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("PASS: annihilator space has dimension 1"), "{text}");
    assert!(text.contains("[0] ad(L[0,0]) + d"), "{text}");
}
