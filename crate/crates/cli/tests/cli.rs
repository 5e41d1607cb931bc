//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use biquo_core::distinguish::IsoSearchResult;
use biquo_core::{
    builtins, verify_certificate, verify_graded_iso, verify_witness, CohomologyRing,
    StarCertificate, StarWitness,
};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_biquo")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn biquo")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("biquo-cli-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("fixture dir");
    dir
}

fn write_fixture(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write fixture");
    path.to_string_lossy().into_owned()
}

#[test]
fn star_check_holds_and_evidence_reverifies() {
    let out = run(&["star", "check", "cp2cp2", "--json"]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["evidence"]["verdict"], "holds");
    let cert: StarCertificate =
        serde_json::from_value(report["evidence"]["certificate"].clone()).unwrap();
    assert!(verify_certificate(&builtins::cp2cp2(), &cert).unwrap());
    assert_eq!(cert.stages.len(), 1);
}

#[test]
fn star_check_fails_with_reverifiable_witness() {
    let out = run(&["star", "check", "s2xs2", "--json"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["evidence"]["verdict"], "fails");
    let witness: StarWitness =
        serde_json::from_value(report["evidence"]["witness"].clone()).unwrap();
    assert!(verify_witness(&builtins::s2xs2(), &witness));
    assert_eq!(report["evidence"]["witness"]["tuple"], serde_json::json!([[1, 0]]));
}

#[test]
fn star_check_unknown_exits_2() {
    let dir = fixture_dir();
    // indefinite anisotropic square form: no certificate, no bounded witness
    let hard = write_fixture(
        &dir,
        "hard.json",
        r#"{"k": 2, "relations": [ {"1,2": 1}, {"1,1": 1, "2,2": 3} ]}"#,
    );
    let out = run(&["star", "check", &hard, "--budget", "1"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let out = run(&["star", "check", &hard, "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_json(&out);
    assert_eq!(report["evidence"]["verdict"], "unknown");
}

#[test]
fn reports_are_byte_identical_modulo_timing() {
    let strip = |out: &Output| {
        let mut v = stdout_json(out);
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = run(&["star", "check", "rp:3:3", "--json"]);
    let b = run(&["star", "check", "rp:3:3", "--json"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn ring_show_reads_files_and_builtins() {
    let dir = fixture_dir();
    let path = write_fixture(
        &dir,
        "ring.json",
        r#"{"k": 2, "generators": ["u", "v"],
            "relations": [ {"1,1": 1, "2,2": -1}, {"1,2": 1} ]}"#,
    );
    let out = run(&["ring", "show", &path]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(text.contains("free rank 1"), "{text}");
    let out = run(&["ring", "show", "eschenburg", "--json"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["result"]["h4_free_rank"], 2);
    // the emitted definition parses back into the same ring
    let def = serde_json::to_string(&report["result"]["definition"]).unwrap();
    let ring = CohomologyRing::from_json(&def).unwrap();
    assert_eq!(ring.relations(), builtins::eschenburg().relations());
}

#[test]
fn bundle_chern_and_inverse() {
    let dir = fixture_dir();
    let bundle = write_fixture(&dir, "bundle.json", r#"{"lines": [[1, 0], [-1, 0]]}"#);
    let out = run(&["bundle", "chern", "cp2cp2", &bundle, "--json"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["result"]["rank"], 2);
    assert_eq!(report["result"]["c1"], serde_json::json!([0, 0]));

    let line_u = write_fixture(&dir, "line_u.json", r#"{"lines": [[1, 0]]}"#);
    let out = run(&["bundle", "inverse", "cp2cp2", &line_u, "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["result"], "no_biquotient_inverse");

    let trivial = write_fixture(&dir, "trivial.json", r#"{"lines": [], "extra_trivial": 2}"#);
    let out = run(&["bundle", "inverse", "cp2cp2", &trivial, "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["result"], "has_biquotient_inverse");

    // property not established: exit 2
    let out = run(&["bundle", "inverse", "s2xs2", &line_u]);
    assert_eq!(out.status.code(), Some(2));

    // realified bundle: p1 instead of Chern data
    let real = write_fixture(&dir, "real.json", r#"{"lines": [[1, 0]], "real": true}"#);
    let out = run(&["bundle", "chern", "cp2cp2", &real, "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["result"]["real"], true);
}

#[test]
fn free_subcommand() {
    let dir = fixture_dir();
    let admissible = write_fixture(&dir, "free_a.json", r#"{"matrix": [[1, 2], [1, 1]]}"#);
    let out = run(&["free", &admissible, "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["result"]["freeness"], "free");

    let nonfree = write_fixture(
        &dir,
        "free_b.json",
        r#"{"a_weights": [[1, 0], [0, 1]], "b_weights": [[1, 1], [1, 1]]}"#,
    );
    let out = run(&["free", &nonfree, "--json"]);
    assert!(out.status.success(), "non-free is still a definite verdict");
    let report = stdout_json(&out);
    assert_eq!(report["result"]["freeness"], "non_free");
    assert_eq!(report["result"]["isotropy"]["kind"], "positive_dimensional");
}

#[test]
fn family_subcommands() {
    let dir = fixture_dir();
    let matrix = write_fixture(&dir, "a.json", "[[1, 2], [1, 1]]");
    let out = run(&["family", "ra", &matrix]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(text.contains("u1^2 + 2*u1*u2"), "{text}");

    let out = run(&["family", "rp", "-p", "5", "-k", "4", "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["result"]["h4_free_rank"], 6);

    // non-admissible input is an input error
    let bad = write_fixture(&dir, "bad.json", "[[1, 0], [0, 1]]");
    assert_eq!(run(&["family", "ra", &bad]).status.code(), Some(1));

    let out = run(&["family", "q", "--s", "1", "--t", "0"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("= 4"));

    let out = run(&["family", "q", "--table", "-10..10", "--json"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["result"]["table"].as_array().unwrap().len(), 441);
    assert!(report["result"]["distinct_abs_values"].as_u64().unwrap() >= 20);
}

#[test]
fn iso_search_found_and_reverified() {
    let dir = fixture_dir();
    let ra = write_fixture(
        &dir,
        "ra2.json",
        r#"{"k": 2, "relations": [ {"1,1": 1, "1,2": 2}, {"2,2": 1, "1,2": 1} ]}"#,
    );
    let out = run(&["iso", "cp2cp2", &ra, "--bound", "1", "--json"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    let found: IsoSearchResult = serde_json::from_value(report["evidence"].clone()).unwrap();
    let IsoSearchResult::FoundIso { matrix } = found else {
        panic!("expected FoundIso: {report}");
    };
    let ring_b = CohomologyRing::from_json(
        &std::fs::read_to_string(&ra).unwrap(),
    )
    .unwrap();
    assert!(verify_graded_iso(&matrix, &builtins::cp2cp2(), &ring_b).unwrap());

    // bounded failure is inconclusive: exit 2
    let out = run(&["iso", "rp:3:3", "rp:5:3", "--bound", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn distinguish_small_bounds() {
    let out = run(&[
        "distinguish", "-p", "3", "-q", "5", "-k", "3", "--pair-height", "3", "--iso-bound",
        "2", "--obstruction-box", "15", "--json",
    ]);
    assert!(out.status.success(), "{out:?}");
    let report = stdout_json(&out);
    assert_eq!(report["evidence"]["verdict"], "distinct");
    assert_eq!(report["evidence"]["evidence"]["obstruction_checked"], true);

    // equal primes: input error
    let out = run(&["distinguish", "-p", "3", "-q", "3", "-k", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_json_checks_conditions() {
    let out = run(&["catalog", "--check-conditions", "--json"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    let rows = report["result"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(row["conditions"]["real_inverse_guaranteed"], true, "{row}");
        assert_eq!(row["conditions"]["complex_inverse_guaranteed"], true, "{row}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = fixture_dir();
    let path = dir.join("report.json");
    let out = run(&["family", "q", "--s", "0", "--t", "0", "--json", "--out",
        path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["result"]["p1"], 6);
}

#[test]
fn malformed_inputs_exit_1_with_diagnostics() {
    let dir = fixture_dir();
    let bad = write_fixture(&dir, "broken.json", "{ not json");
    for args in [
        vec!["ring", "show", &bad],
        vec!["star", "check", "/does/not/exist.json"],
        vec!["frobnicate"],
        vec!["family", "rp", "-p", "4", "-k", "3"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}
