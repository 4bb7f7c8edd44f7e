use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bufsched::{parse_instance, parse_schedule, Instance};

fn bufsched(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bufsched"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SINGLE: &str = "buffers 1\n2\npackets 3\n0 0 1 3 0\n1 0 1 4 0\n2 0 3 1 0\n";

#[test]
fn gen_random_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--m", "2", "--n", "10", "--caps", "1,2", "--seed", "7", "-o"];
    for name in ["a.txt", "b.txt"] {
        let mut full = args.to_vec();
        full.push(name);
        assert!(bufsched(dir.path(), &full).status.success());
    }
    let a = fs::read_to_string(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b.txt")).unwrap());
    let inst: Instance = parse_instance(&a).unwrap();
    assert_eq!((inst.num_buffers(), inst.len()), (2, 10));
}

#[test]
fn gen_family_and_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = bufsched(
        dir.path(),
        &["gen", "--family", "sort_hard", "--size", "100", "-o", "t.txt"],
    );
    assert!(o.status.success());
    let o = bufsched(dir.path(), &["run", "--algo", "dos", "-i", "t.txt", "-o", "s.txt"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "delivered 100 value 100");
    let sched = parse_schedule(&fs::read_to_string(dir.path().join("s.txt")).unwrap()).unwrap();
    assert_eq!(sched.len(), 100);
    let o = bufsched(dir.path(), &["verify", "-i", "t.txt", "-s", "s.txt"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_flags_violations() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.txt"), SINGLE).unwrap();
    fs::write(dir.path().join("s.txt"), "0 0\n1 1\n").unwrap();
    let o = bufsched(dir.path(), &["verify", "-i", "t.txt", "-s", "s.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation"));
}

#[test]
fn oracle_prints_optimum() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.txt"), SINGLE).unwrap();
    let o = bufsched(dir.path(), &["oracle", "-i", "t.txt"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("optimal value 5 count 2\n"));
}

#[test]
fn compare_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.txt"), SINGLE).unwrap();
    let o = bufsched(dir.path(), &["compare", "-i", "t.txt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("ts inapplicable"));
    assert!(!dir.path().join("counterexamples").exists());

    let o = bufsched(
        dir.path(),
        &["gen", "--family", "overflow_trap", "--size", "4", "-o", "trap.txt"],
    );
    assert!(o.status.success());
    let o = bufsched(dir.path(), &["compare", "-i", "trap.txt", "--algo", "ts,greedy-ts"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn guard_and_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = bufsched(
        dir.path(),
        &["gen", "--family", "sort_hard", "--size", "20", "-o", "big.txt"],
    );
    assert!(o.status.success());
    assert_eq!(
        bufsched(dir.path(), &["oracle", "-i", "big.txt"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bufsched(dir.path(), &["run", "--algo", "nope", "-i", "big.txt"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bufsched(dir.path(), &["run", "--algo", "ts", "-i", "big.txt"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bufsched(dir.path(), &["gen", "--family", "zigzag"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bufsched(dir.path(), &["oracle", "-i", "missing.txt"]).status.code(),
        Some(2)
    );
}

#[test]
fn bench_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = bufsched(dir.path(), &["bench", "--algo", "greedy-ts", "--sizes", "50,100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().next().unwrap().contains("ratio"));
    assert_eq!(
        bufsched(dir.path(), &["bench", "--algo", "dos", "--sizes", "100,50"])
            .status
            .code(),
        Some(2)
    );
}
