use std::io::Write;
use std::process::{Command, Output};

use normval_core::corpus;
use normval_core::document::ReportDocument;
use normval_core::subspace::SVal;
use normval_core::vc::Verdict;

fn normval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normval")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> ReportDocument {
    ReportDocument::from_toml(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a report")
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn gaussian_field_holds() {
    let out = normval(&["vc", "quadratic-q2", "--pair", "I/base"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.pairs[0].verdict, Some(Verdict::Holds));
    assert!(r.pairs[0].witness.is_none());
}

#[test]
fn root_two_fails_with_a_witness_that_reloads() {
    let out = normval(&["vc", "quadratic-q2", "--pair", "S/base"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let w = r.pairs[0].witness.as_ref().expect("witness");
    assert_eq!(w.normal, Some(false));

    let stored = temp_file(&r.to_toml());
    let check = normval(&["check", "quadratic-q2", stored.path().to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    assert!(report(&check).all_checks_pass());
}

#[test]
fn tampered_witness_is_rejected() {
    let out = normval(&["vc", "quadratic-q2", "--pair", "S/base"]);
    let mut r = report(&out);
    let w = r.pairs[0].witness.as_mut().unwrap();
    w.valuation = Some(w.valuation.unwrap() + 1);
    let stored = temp_file(&r.to_toml());
    let check = normval(&["check", "quadratic-q2", stored.path().to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(1));
    assert!(!report(&check).all_checks_pass());
}

#[test]
fn sval_of_the_z32_module() {
    let out = normval(&[
        "sval",
        "z32",
        "--pair",
        "top/K",
        "z^9 - (z^4 + z^12)*z^3 - z",
        "z^27 - (z^4 + z^12)*z^9 - z^3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let s = &r.pairs[0].svals[0];
    assert_eq!(s.dim, 2);
    assert_eq!(s.s, SVal::new(8, [2, 6]));
    assert_eq!(s.spanning[0].valuation, Some(10));
    // s(V⊥) is the complement of d̄ - s(V) with d̄ = 7.
    assert_eq!(s.s_perp, Some(SVal::new(8, [0, 2, 3, 4, 6, 7])));
}

#[test]
fn reproduce_matches_stored_values() {
    for name in ["z32", "cp2", "quadratic-q2", "equal-char"] {
        let out = normval(&["reproduce", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert!(!r.checks.is_empty() && r.all_checks_pass(), "{name}");
    }
}

#[test]
fn reproduce_rejects_unknown_examples() {
    assert_eq!(normval(&["reproduce", "q3-zeta9"]).status.code(), Some(3));
}

#[test]
fn monte_carlo_alone_is_undecided_on_a_holding_pair() {
    let out = normval(&["--methods", "monte-carlo", "--trials", "50", "vc", "quadratic-q2", "--pair", "I/base"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out).pairs[0].verdict, Some(Verdict::Undecided));
}

#[test]
fn settings_are_embedded_and_output_is_deterministic() {
    let args = ["--seed", "7", "--trials", "30", "--precision", "80", "vc", "cp2"];
    let a = normval(&args);
    let b = normval(&args);
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!((r.settings.seed, r.settings.trials, r.settings.precision), (7, 30, 80));
    assert_eq!(a.status.code(), Some(1));
}

#[test]
fn invariants_from_a_definition_file() {
    let def = temp_file(corpus::source("cp2").unwrap());
    let out = normval(&["invariants", def.path().to_str().unwrap(), "--pair", "top/K", "--pair", "top/M"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let d: Vec<i64> = r.pairs.iter().map(|p| p.invariants.as_ref().unwrap().d).collect();
    assert_eq!(d, vec![16, 8]);
    assert!(r.pairs[0].factorizations.iter().all(|f| f.n == 4));
}

#[test]
fn errors_exit_with_three() {
    let bad_label = temp_file(
        "schema = 1\n[base]\nkind = \"p-adic\"\np = 2\n\n[[steps]]\nlabel = \"i\"\nkind = \"general\"\npoly = [\"j\", \"0\", \"1\"]\n",
    );
    let out = normval(&["invariants", bad_label.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`j`"));
    assert!(out.stdout.is_empty());

    for args in [
        &["vc", "no-such-definition"][..],
        &["vc", "z32", "--pair", "top"],
        &["vc", "z32", "--pair", "top/nowhere"],
        &["--precision", "9000", "invariants", "z32"],
        &["--methods", "guess", "vc", "z32"],
        &["--bogus"],
    ] {
        assert_eq!(normval(args).status.code(), Some(3), "{args:?}");
    }
}
