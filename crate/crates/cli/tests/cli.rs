use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const EXAMPLE: &str = "a | b.\nc | e :- d.\nd :- b, not e.\ne :- b, not d.\nb :- e, not d.\nd :- not b.\n";

const PATHS: &str = "p djp 4 3 1\na 1 3\na 3 2\na 1 4\nd 1 2\n";

fn twsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twsat")).args(args).output().expect("run twsat")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn translate_writes_dimacs_and_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let prog = write(dir.path(), "p.lp", EXAMPLE);
    for reduction in ["ordered", "bijective"] {
        let o = twsat(&["translate", &prog, "--reduction", reduction, "--certify"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.lines().any(|l| l.starts_with("p cnf ")));
        assert!(text.contains("c v 1 atom("));
    }
    // completion needs a normal program
    assert_eq!(twsat(&["translate", &prog, "--reduction", "completion"]).status.code(), Some(2));
    let normal = write(dir.path(), "n.lp", "a :- not b.\nb :- not a.\nc :- a.\n");
    let out = dir.path().join("out.cnf");
    let o = twsat(&["translate", &normal, "--reduction", "completion", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(out).unwrap().contains("p cnf"));
}

#[test]
fn translate_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let prog = write(dir.path(), "p.lp", EXAMPLE);
    let a = twsat(&["translate", &prog, "--strengthen", "--seed", "5"]);
    let b = twsat(&["translate", &prog, "--strengthen", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_distinguishes_the_modes() {
    let dir = tempfile::tempdir().unwrap();
    let prog = write(dir.path(), "p.lp", EXAMPLE);
    assert_eq!(twsat(&["verify", &prog]).status.code(), Some(0));
    assert_eq!(twsat(&["verify", &prog, "--reduction", "bijective", "--mode", "bijective"]).status.code(), Some(0));
    // the ordered reduction has several models per answer set
    let o = twsat(&["verify", &prog, "--mode", "bijective"]);
    assert_eq!(o.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.is_object());
}

#[test]
fn decompose_emits_pace() {
    let dir = tempfile::tempdir().unwrap();
    let prog = write(dir.path(), "p.lp", EXAMPLE);
    let o = twsat(&["decompose", &prog, "--nice"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("s td ")));
    let td = write(dir.path(), "p.td", &stdout(&o));
    assert_eq!(twsat(&["translate", &prog, "--td", &td, "--certify"]).status.code(), Some(0));
}

#[test]
fn gen_hardness_writes_a_program() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.djp", PATHS);
    let td_out = dir.path().join("g.td");
    let o = twsat(&["gen-hardness", &inst, "--emit-td", td_out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("e_1_3"));
    assert!(fs::read_to_string(td_out).unwrap().starts_with("s td"));
}

#[test]
fn bench_reports_are_json() {
    let o = twsat(&["bench", "--scenario", "s2b", "--count", "2", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[0]["translation"], "-");
    let again = twsat(&["bench", "--scenario", "s2b", "--count", "2", "--no-timing", "--sequential"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(twsat(&["translate", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(twsat(&["bench", "--scenario", "s9"]).status.code(), Some(1));
    let missing = dir.path().join("missing.lp");
    assert_eq!(twsat(&["translate", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.lp", "a :- \n");
    let o = twsat(&["translate", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let prog = write(dir.path(), "p.lp", EXAMPLE);
    let td = write(dir.path(), "bad.td", "s td 1 1 5\nb 1 1 2\n");
    assert_eq!(twsat(&["translate", &prog, "--td", &td]).status.code(), Some(2));
    assert_eq!(twsat(&["--help"]).status.code(), Some(0));
}
