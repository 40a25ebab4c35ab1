use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;
use tempfile::TempDir;

const FOUR_CYCLE: &str = "ccf 1\n4 3\n0 1 2 2\n2 0 1 2\n2 2 0 1\n1 2 2 0\n";

fn cyclosep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclosep"))
        .args(args)
        .env_remove("CYCLOSEP_SEARCH_BUDGET")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn lines(o: &Output) -> Vec<Value> {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let file = dir.path().join(name);
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", path(&file)]);
    let o = cyclosep(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    file
}

#[test]
fn exceptional_table_lists_exactly_the_failing_pairs() {
    let start = Instant::now();
    let o = cyclosep(&["exceptional-table"]);
    assert!(start.elapsed() < Duration::from_secs(1));
    assert_eq!(code(&o), 0);
    let got: BTreeSet<(u64, u64)> = lines(&o)
        .iter()
        .filter(|v| v["kind"] == "exceptional-pair")
        .map(|v| (v["p"].as_u64().unwrap(), v["d"].as_u64().unwrap()))
        .collect();
    let expected: BTreeSet<(u64, u64)> = (2..=12)
        .chain([14, 15, 16, 18, 20])
        .map(|d| (2, d))
        .chain([2, 3, 4, 5, 6, 8, 10].map(|d| (3, d)))
        .chain([2, 3, 4, 6].map(|d| (5, d)))
        .collect();
    assert_eq!(got, expected);
    let rows: Vec<Value> = lines(&o).into_iter().filter(|v| v["kind"] == "open-degrees").collect();
    assert_eq!(rows.len(), 3);
    assert!(rows
        .iter()
        .any(|r| r["row"]["p"] == 5 && r["row"]["consistent"] == false));
}

#[test]
fn build_validate_analyze() {
    let dir = TempDir::new().unwrap();
    let paley = build(&dir, "p13.ccf", &["paley", "13"]);
    let o = cyclosep(&["validate", path(&paley)]);
    assert_eq!(code(&o), 0);
    assert_eq!(lines(&o)[0]["valencies"], serde_json::json!([1, 6, 6]));
    assert_eq!(code(&cyclosep(&["analyze", path(&paley)])), 1);

    let thin = build(&dir, "thin.ccf", &["cyclotomic", "2", "3", "7"]);
    let o = cyclosep(&["analyze", path(&thin), "--deep"]);
    assert_eq!(code(&o), 0);
    let report = &lines(&o)[0];
    assert_eq!(report["conclusion"], "fission-separable-certified");
    assert_eq!(report["condition_report"]["condition_i"]["verdict"], "holds");

    let c = build(&dir, "c8.ccf", &["cscheme", "2", "3"]);
    let o = cyclosep(&["witness", path(&c)]);
    assert_eq!(code(&o), 0);
    assert_eq!(lines(&o)[0]["isomorphisms"], "42");
    let o = cyclosep(&["aut", path(&c)]);
    assert_eq!(lines(&o)[0]["order"], "21");
    let o = cyclosep(&["aiso", path(&c), path(&c)]);
    assert_eq!(lines(&o)[0]["count"], 2);
    let o = cyclosep(&["couples-check", path(&c), "--mu", "0", "--delta-size", "2"]);
    assert_eq!(lines(&o)[0]["delta_size"], 2);
}

#[test]
fn invalid_files_exit_one_with_diagnostics() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("cycle.ccf");
    std::fs::write(&file, FOUR_CYCLE).unwrap();
    let o = cyclosep(&["validate", path(&file)]);
    assert_eq!(code(&o), 1);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "invalid");
    std::fs::write(&file, "ccf 1\n3 2\n0 1 1\n1 0 1\n").unwrap();
    let o = cyclosep(&["validate", path(&file)]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 3"));
}

#[test]
fn usage_and_budget_exit_codes() {
    assert_eq!(code(&cyclosep(&[])), 2);
    assert_eq!(code(&cyclosep(&["field-info", "4", "2"])), 2);
    assert_eq!(code(&cyclosep(&["build", "paley", "7", "--kind", "graph"])), 2);
    assert_eq!(code(&cyclosep(&["validate", "/nonexistent/file.ccf"])), 2);
    assert_eq!(code(&cyclosep(&["paley-bound", "13"])), 0);
    assert_eq!(code(&cyclosep(&["paley-bound", "81"])), 1);
    let o = cyclosep(&["paley-bound", "125"]);
    assert_eq!(code(&o), 1);
    assert!(!lines(&o)[0]["flags"].as_array().unwrap().is_empty());

    let dir = TempDir::new().unwrap();
    let c = build(&dir, "c27.ccf", &["cscheme", "3", "3"]);
    let o = Command::new(env!("CARGO_BIN_EXE_cyclosep"))
        .args(["witness", path(&c)])
        .env("CYCLOSEP_SEARCH_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn closure_and_extensions() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("c5.txt");
    std::fs::write(
        &graph,
        "# 5-cycle\n5\n0 1\n1 0\n1 2\n2 1\n2 3\n3 2\n3 4\n4 3\n4 0\n0 4\n",
    )
    .unwrap();
    let closed = dir.path().join("c5.ccf");
    assert_eq!(code(&cyclosep(&["closure", path(&graph), "-o", path(&closed)])), 0);
    let o = cyclosep(&["validate", path(&closed)]);
    assert_eq!(lines(&o)[0]["rank"], 3);

    let o = cyclosep(&["extend", path(&closed), "--point", "0"]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ccf 1\n5 "));
    let o = cyclosep(&["extend", path(&closed), "--m", "2"]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ccf 1\n25 "));
    assert_eq!(code(&cyclosep(&["extend", path(&closed), "--m", "3"])), 2);
    assert_eq!(code(&cyclosep(&["extend", path(&closed)])), 2);
}

#[test]
fn two_separability() {
    let o = cyclosep(&["two-sep", "3", "2", "1"]);
    assert_eq!(code(&o), 1);
    let report = &lines(&o)[0];
    assert_eq!(report["restricted_rank"], 2);
    assert_eq!(report["needs_small_case_check"], true);
    let o = cyclosep(&["two-sep", "7", "2", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(lines(&o)[0]["exceptional"], false);
}

#[test]
fn ingest_catalogs() {
    let dir = TempDir::new().unwrap();
    let p13 = build(&dir, "p13.ccf", &["paley", "13"]);
    let c13 = build(&dir, "c13.ccf", &["cyclotomic", "13", "1", "4"]);
    let good = format!(
        "{}\n{}",
        std::fs::read_to_string(&c13).unwrap(),
        std::fs::read_to_string(&p13).unwrap()
    );
    let catalog = dir.path().join("cat.txt");
    std::fs::write(&catalog, &good).unwrap();
    let o = cyclosep(&[
        "ingest",
        path(&catalog),
        "--format",
        "ccf-multi",
        "--locate",
        path(&p13),
    ]);
    assert_eq!(code(&o), 0);
    let out = lines(&o);
    assert_eq!(out.len(), 3);
    assert_eq!(out[2]["located"], serde_json::json!([2]));

    std::fs::write(&catalog, format!("{good}\n{FOUR_CYCLE}")).unwrap();
    let o = cyclosep(&["ingest", path(&catalog), "--format", "ccf-multi"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("block 3"));
    let o = cyclosep(&["ingest", path(&catalog), "--format", "ccf-multi", "--lenient"]);
    assert_eq!(code(&o), 1);
    assert_eq!(lines(&o).len(), 3);

    std::fs::write(&catalog, "3\n0 1 1\n1 0 1\n1 1 0\n").unwrap();
    assert_eq!(
        code(&cyclosep(&["ingest", path(&catalog), "--format", "matrix-list"])),
        0
    );
    assert_eq!(code(&cyclosep(&["ingest", path(&catalog), "--format", "xml"])), 2);
}
