use std::path::PathBuf;
use std::process::{Command, Output};

use expsum_ode::document::SolutionDocument;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsum-ode")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_gaussian_roots_reports_two_solutions() {
    let p = corpus("gaussian_roots.json");
    let out = run(&["solve", path(&p)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("basis (2 of at most 2)"), "{text}");
    for root in ["-1 ", "-1i", "1i"] {
        assert!(text.contains(root), "missing root {root}: {text}");
    }
    assert!(text.contains("rank: 2"));

    let out = run(&["solve", path(&p), "--json", "-"]);
    let doc = SolutionDocument::from_json(&stdout(&out)).unwrap();
    let meta = doc.metadata.unwrap();
    assert_eq!(doc.basis.len(), 2);
    assert_eq!(meta.rank, 2);
    let roots: Vec<&str> = meta.roots.iter().map(|r| r.value.as_str()).collect();
    assert_eq!(roots, ["-1", "-1i", "1i"]);
}

#[test]
fn solve_no_solutions_explains_empty_basis() {
    let out = run(&["solve", path(&corpus("no_solutions.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("no finite-order solutions"), "{text}");
    assert!(text.contains("root -1: the u-equation has no polynomial solution"), "{text}");
    assert!(text.contains("root 0: the u-equation has no polynomial solution"), "{text}");
}

#[test]
fn malformed_frequency_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"order": 1, "coefficients": [[{"freq": "1/0", "coef": "1"}]]}"#).unwrap();
    let out = run(&["solve", path(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(run(&["solve", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", path(&corpus("resonant.json")), path(&corpus("resonant.candidate.json"))]);
    assert_eq!(ok.status.code(), Some(0));

    let bad = run(&[
        "verify",
        path(&corpus("triple_root.json")),
        path(&corpus("triple_root_z2.candidate.json")),
        "--json",
        "-",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(report["candidates"][0]["verification"]["worst_frequency"], "2");
}

#[test]
fn irregular_problems_verify_but_do_not_solve() {
    let p = corpus("mixed_signs.json");
    let v = run(&["verify", path(&p), path(&corpus("mixed_signs.candidate.json"))]);
    assert_eq!(v.status.code(), Some(0));
    for cmd in ["solve", "indicial", "transform"] {
        assert_eq!(run(&[cmd, path(&p)]).status.code(), Some(3), "{cmd}");
    }
}

#[test]
fn emitted_json_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["resonant", "resonant_half", "gaussian_roots", "triple_root", "negative_frequency"] {
        let problem = corpus(&format!("{name}.json"));
        let out = dir.path().join(format!("{name}.solution.json"));
        let solved = run(&["solve", path(&problem), "--json", path(&out)]);
        assert_eq!(solved.status.code(), Some(0), "{name}");
        let verified = run(&["verify", path(&problem), path(&out)]);
        assert_eq!(verified.status.code(), Some(0), "{name}: {}", stdout(&verified));

        let numeric = dir.path().join(format!("{name}.numeric.json"));
        run(&["solve", path(&problem), "--mode", "numeric", "--json", path(&numeric)]);
        assert_eq!(run(&["verify", path(&problem), path(&numeric)]).status.code(), Some(0), "{name} numeric");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["solve", "triple_root.json"],
        vec!["solve", "gaussian_roots.json", "--json", "-"],
        vec!["solve", "gaussian_roots.json", "--mode", "numeric", "--json", "-"],
        vec!["indicial", "resonant.json"],
        vec!["transform", "no_solutions.json", "--json", "-"],
    ] {
        let p = corpus(args[1]);
        let mut full: Vec<&str> = args.clone();
        full[1] = path(&p);
        assert_eq!(run(&full).stdout, run(&full).stdout, "{args:?}");
    }
}

#[test]
fn indicial_and_transform_reports() {
    let out = run(&["indicial", path(&corpus("resonant.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("λ³ − 4/3·λ + 16/27"));

    let out = run(&["transform", path(&corpus("no_solutions.json")), "--json", "-"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["alpha"], serde_json::json!(["t", "2", "1"]));
}

#[test]
fn degree_cap_exits_with_five() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cap.json");
    // f'' + e^z f' - 10 e^z f = 0 has a polynomial part of degree 10
    std::fs::write(
        &p,
        r#"{"order": 2, "coefficients": [[{"freq": "1", "coef": "-10"}], [{"freq": "1", "coef": "1"}]]}"#,
    )
    .unwrap();
    assert_eq!(run(&["solve", path(&p), "--max-degree", "2"]).status.code(), Some(5));
    assert_eq!(run(&["solve", path(&p)]).status.code(), Some(0));
}
