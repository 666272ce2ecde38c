use std::path::Path;
use std::process::{Command, Output};

use spherefib_core::homotopy::embedded_source;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherefib")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn problem(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn construct_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = problem(dir.path(), "p.toml", "n = 4\nk = 2\ninverse = [[0, 1], [1, 0]]\ntorsion = [1, 1]\n");
    let out = dir.path().join("c.json");
    let o = run(&["construct", "--input", &input, "--out", out.to_str().unwrap(), "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&out).unwrap().contains("n4_lookup"));
    assert_eq!(code(&run(&["verify", "--input", out.to_str().unwrap()])), 0);

    let o = run(&["construct", "--input", &input]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with('{'));
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = problem(dir.path(), "p.toml", "n = 2\nk = 3\ninverse = [[1, 0, 0], [0, 1, 0], [0, 0, -1]]\n");
    let out = dir.path().join("c.json");
    assert_eq!(code(&run(&["construct", "--input", &input, "--out", out.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    std::fs::write(&out, text.replacen("a3.eta", "a2.eta", 1)).unwrap();
    assert_eq!(code(&run(&["verify", "--input", out.to_str().unwrap()])), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k1 = problem(dir.path(), "k1.toml", "n = 4\nk = 1\ninverse = [[1]]\n");
    assert_eq!(code(&run(&["construct", "--input", &k1])), 1);
    let bad = problem(dir.path(), "bad.toml", "n = 4\nk = 2\ninverse = [[0, 1]]\n");
    assert_eq!(code(&run(&["construct", "--input", &bad])), 1);
    let ob = problem(
        dir.path(),
        "ob.toml",
        "n = 10\nk = 2\ninverse = [[-6, 5], [5, -4]]\nstable_model = [3]\nstable = [[1], [0]]\n",
    );
    let o = run(&["construct", "--input", &ob]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no primitive"));
    assert_eq!(code(&run(&["construct", "--input", "/nonexistent/p.toml"])), 1);
    assert_eq!(code(&run(&["hilbert", "--n", "4", "--k", "2", "--order", "65"])), 1);
    assert_eq!(code(&run(&["search-n8", "--bound", "21"])), 1);
}

#[test]
fn hilbert_compare() {
    let o = run(&["hilbert", "--n", "4", "--k", "3", "--order", "12"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("manifold series: 1, 0, 0, 3, 0, 0, 8, 0, 0, 21, 0, 0, 55"), "{s}");
    assert!(s.contains("3  3  2"));
    assert!(s.contains("for all d <= 12: true"));
}

#[test]
fn examples_with_table_dirs() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["n2.toml", "n4.toml"] {
        std::fs::write(dir.path().join(f), embedded_source(f).unwrap()).unwrap();
    }
    let d = dir.path().to_str().unwrap();
    let o = run(&["examples", "--table-dir", d]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("SKIP checksum n8.toml: file missing"));

    let n4 = dir.path().join("n4.toml");
    let mut text = std::fs::read_to_string(&n4).unwrap();
    text.push('\n');
    std::fs::write(&n4, text).unwrap();
    let o = run(&["examples", "--table-dir", d]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL checksum n4.toml"));
    assert_eq!(code(&run(&["search-n8", "--table-dir", d])), 1);
}

#[test]
fn search_reports_bound() {
    let o = run(&["search-n8", "--bound", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("pair: mu = (1, -1), delta = a2.sigma - [a1, a2]"));
}

#[test]
fn form_tools() {
    let o = run(&["form-tools", "extend", "--vector", "2,3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "[[1,2],[1,3]]");
    let o = run(&["form-tools", "characteristic", "--matrix", "1,0;0,-1"]);
    assert!(stdout(&o).contains("characteristic vector: 1, 1"));
    let o = run(&["form-tools", "primitive", "--matrix", "1,0,0;0,1,0;0,0,-1", "--m", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["form-tools", "primitive", "--matrix", "1,0;0,-1", "--m", "8"])), 1);
    assert_eq!(code(&run(&["form-tools", "diagonalize", "--matrix", "1,x;0,1", "--p", "3"])), 1);
}
