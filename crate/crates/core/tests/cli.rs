use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boolgebra"))
}

fn bench(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmarks").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decision_file_of_all_rewrites_matches_the_pass() {
    let dir = tempfile::tempdir().unwrap();
    let aig = bench("alu4.aag");
    let g = boolgebra::aig::read_aiger_file(&aig).unwrap();
    let csv = dir.path().join("all_rw.csv");
    std::fs::write(&csv, "0\n".repeat(g.num_slots() - 1)).unwrap();
    let (a, b) = (dir.path().join("a.aag"), dir.path().join("b.aag"));
    assert!(run(&["opt", s(&aig), "--decisions", s(&csv), "-o", s(&a)]).status.success());
    assert!(run(&["opt", s(&aig), "--op", "rw", "-o", s(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn self_check_is_equivalent() {
    let aig = bench("c17.aag");
    let out = run(&["verify", s(&aig), s(&aig), "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("equivalent"));
}

#[test]
fn failures_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["opt", "x.aag", "--frobnicate"]).status.code(), Some(2));
    let bad = dir.path().join("bad.aag");
    std::fs::write(&bad, "aag 1 2 3\n").unwrap();
    assert_eq!(run(&["stats", s(&bad)]).status.code(), Some(3));
    assert_eq!(run(&["verify", s(&bench("c17.aag")), s(&bench("adder4.aag"))]).status.code(), Some(4));
    let flipped = dir.path().join("flipped.aag");
    let text = std::fs::read_to_string(bench("c17.aag")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[6] = (lines[6].parse::<u32>().unwrap() ^ 1).to_string();
    std::fs::write(&flipped, lines.join("\n") + "\n").unwrap();
    assert_eq!(run(&["verify", s(&bench("c17.aag")), s(&flipped)]).status.code(), Some(4));
    assert_eq!(run(&["stats", s(&dir.path().join("missing.aag"))]).status.code(), Some(6));
    let cfg = dir.path().join("flow.cfg");
    std::fs::write(&cfg, "top_k = 0\n").unwrap();
    assert_eq!(run(&["flow", s(&bench("c17.aag")), "--model", "none.bin", "--config", s(&cfg)]).status.code(), Some(5));
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let aig = bench("sop8.aag");
    let data = d.join("data");
    assert!(run(&["sample", s(&aig), "--count", "60", "--seed", "2", "--out", s(&data)]).status.success());
    let manifest = data.join("sop8.jsonl");
    assert_eq!(std::fs::read_to_string(&manifest).unwrap().lines().count(), 60);
    let model = d.join("m.bin");
    let curve = d.join("curve.csv");
    let out = run(&["train", s(&manifest), "--profile", "tiny", "--epochs", "3", "-o", s(&model), "--curve", s(&curve)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(run(&["predict", s(&model), s(&manifest), "-o", s(&d.join("p.csv"))]).status.success());
    let report = d.join("report.csv");
    let out = run(&["flow", s(&aig), s(&bench("c17.aag")), "--model", s(&model), "--samples", "50", "-o", s(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').nth(10) == Some("equivalent")));
    let feats = d.join("f.csv");
    let edges = d.join("e.txt");
    assert!(run(&["features", s(&aig), "--out", s(&feats), "--edges", s(&edges)]).status.success());
    assert!(std::fs::read_to_string(&feats).unwrap().starts_with("node,left_inv"));
}
