use std::io::Write;
use std::process::{Command, Output, Stdio};

fn pmcb(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pmcb"))
        .args(args)
        .env_remove("PMCB_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // commands that fail on their arguments exit without reading stdin
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const C4: &str = "PLG 1\nsize 4 4\nv 1 0 0\nv 2 1 0\nv 3 1 1\nv 4 0 1\ne 1 2 1\ne 2 3 1\ne 3 4 1\ne 4 1 1\n";

#[test]
fn test_gen_lower_bound() {
    let o = pmcb(&["gen", "--family", "lower-bound", "--n", "5"], "");
    assert!(o.status.success());
    let s = text(&o);
    assert!(s.starts_with("PLG 1\nsize 5 7\n"));
    assert_eq!(s.lines().filter(|l| l.starts_with("e ")).count(), 7);
}

#[test]
fn test_gen_is_deterministic_and_seed_env() {
    let a = pmcb(&["gen", "--family", "random", "--n", "40", "--seed", "3"], "");
    let b = pmcb(&["gen", "--family", "random", "--n", "40", "--seed", "3"], "");
    assert_eq!(text(&a), text(&b));
    let c = Command::new(env!("CARGO_BIN_EXE_pmcb"))
        .args(["gen", "--family", "random", "--n", "40"])
        .env("PMCB_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(text(&c), text(&a));
}

#[test]
fn test_oracle_on_c4() {
    let o = pmcb(&["oracle", "-", "--query", "1", "3"], C4);
    assert!(o.status.success());
    assert_eq!(text(&o), "2\n");
    let o = text(&pmcb(&["oracle", "-", "--query", "1", "3", "--cut"], C4));
    let cut: Vec<&str> = o.lines().nth(1).unwrap().split(' ').collect();
    assert_eq!(cut.len(), 2);
}

#[test]
fn test_verify_random_graph() {
    let g = text(&pmcb(&["gen", "--family", "random", "--n", "48", "--seed", "11"], ""));
    let o = pmcb(&["verify", "-"], &g);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("weights match oracle"));
}

#[test]
fn test_weight_vector_lower_bound() {
    let g = text(&pmcb(&["gen", "--family", "lower-bound", "--n", "5"], ""));
    let o = pmcb(&["weight-vector", "-"], &g);
    assert_eq!(text(&o), "1 1 1\n");
}

#[test]
fn test_mcb_forms() {
    let g = text(&pmcb(&["gen", "--family", "lower-bound", "--n", "6"], ""));
    let imp = text(&pmcb(&["mcb", "-", "--implicit"], &g));
    assert!(imp.starts_with("IMCB 1\n"));
    assert_eq!(text(&pmcb(&["mcb", "-"], &g)), imp);
    let exp = text(&pmcb(&["mcb", "-", "--explicit"], &g));
    assert!(exp.starts_with("cycles 4 weight 4 length 18\n"), "{exp}");
    let both = pmcb(&["mcb", "-", "--implicit", "--explicit"], &g);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn test_gomory_hu_output() {
    let o = pmcb(&["gomory-hu", "-"], C4);
    let s = text(&o);
    assert!(s.starts_with("GH 1\nedges 3\n"));
    assert!(s.lines().skip(2).all(|l| l.split(' ').nth(3) == Some("2")));
}

#[test]
fn test_exit_codes() {
    assert_eq!(pmcb(&["verify", "-"], "PLG 1\nsize 2\n").status.code(), Some(2));
    assert_eq!(pmcb(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(pmcb(&["oracle", "-", "--query", "1", "1"], C4).status.code(), Some(2));
    let o = pmcb(&["verify", "/nonexistent/file.plg"], "");
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn test_bench_single() {
    let o = pmcb(&["bench", "--n", "256"], "");
    assert!(o.status.success());
    let s = text(&o);
    assert_eq!(s.lines().count(), 2);
    assert!(s.starts_with("n m seconds"));
    assert!(s.lines().nth(1).unwrap().starts_with("256 "));
}
