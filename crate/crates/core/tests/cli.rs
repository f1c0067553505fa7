use std::path::Path;
use std::process::{Command, Output};

use popgame::library;
use popgame::text::{parse_matrix, parse_protocol};

fn popgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popgame"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn export(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.pp"));
    let o = popgame(&["export", "--name", name, "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn recognize_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = export(dir.path(), "threshold2");
    let o = popgame(&["recognize", "--protocol", &t2]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("pavlovian"));

    let cycle = export(dir.path(), "cycle3-counterexample");
    let o = popgame(&["recognize", "--protocol", &cycle]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("0 >= 3"));

    let o = popgame(&["--json", "recognize", "--protocol", &cycle]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "infeasible");
    assert_eq!(v["counterexample"]["steps"].as_array().unwrap().len(), 3);
}

#[test]
fn check_majority_over_a_range() {
    let o = popgame(&[
        "check",
        "--protocol",
        "lib:majority",
        "--predicate",
        "count(sigma) >= count(tau)",
        "--n",
        "2..6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);

    let o = popgame(&["--json", "check", "--protocol", "lib:xor-weak", "--predicate", "count(one) mod 2 == 1", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["verdict"], "fails");
    assert_eq!(v["counterexample"]["configuration"]["one"], 1);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pp");
    std::fs::write(&bad, "states: a b\nrule: a b -> a\n").unwrap();
    let o = popgame(&["recognize", "--protocol", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(popgame(&["check", "--protocol", "lib:or"]).status.code(), Some(2));
    assert_eq!(popgame(&["recognize", "--protocol", "lib:no-such"]).status.code(), Some(2));
    assert_eq!(popgame(&["recognize", "--protocol", "/nonexistent/file"]).status.code(), Some(2));
}

#[test]
fn export_then_parse_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in library::names() {
        let path = export(dir.path(), name);
        let a = library::get(name).unwrap();
        let p = parse_protocol(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(p, a.protocol, "{name}");
        if let Some(m) = &a.matrix {
            let text = std::fs::read_to_string(Path::new(&path).with_extension("matrix")).unwrap();
            assert_eq!(&parse_matrix(&text).unwrap(), m, "{name}");
        }
    }
}

#[test]
fn derive_from_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("t2.matrix");
    std::fs::write(&matrix, "states: zero sigma two\n0 0 -1\n0 -1 -1\n1 1 1\n").unwrap();
    let out = dir.path().join("t2.pp");
    let o = popgame(&[
        "derive",
        "--matrix",
        matrix.to_str().unwrap(),
        "--inputs",
        "sigma->sigma zero->zero",
        "--outputs",
        "two=1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let p = parse_protocol(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(p.same_relation(&library::get("threshold2").unwrap().protocol));
}

#[test]
fn simulate_threshold2_reaches_all_two() {
    let o = popgame(&["simulate", "--protocol", "lib:threshold2", "--input", "sigma:2,zero:3", "--steps", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("final={two:5}"), "{}", stdout(&o));

    let o = popgame(&["simulate", "--protocol", "lib:pavlov-pd", "--graph", "ring:8", "--absorb", "C", "--steps", "1000000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("absorbed"));
    let o = popgame(&["simulate", "--protocol", "lib:pavlov-pd", "--graph", "ring:8", "--absorb", "C", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn symmetrize_writes_a_symmetric_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sym.pp");
    let o = popgame(&["symmetrize", "--protocol", "lib:leader-classic", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = popgame(&["leader-check", "--protocol", out.to_str().unwrap(), "--leader-states", "L,L_p", "--n", "3..4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn enumerate_two_states_reports_summary() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let o = popgame(&[
        "enumerate",
        "--states",
        "2",
        "--predicate",
        "count(sigma) >= 3",
        "--n-max",
        "4",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "candidates=128 survivors=0");
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.lines().last().unwrap().starts_with("candidates="));
}
