//! End-to-end runs of the `pirc` binary.

use std::path::Path;
use std::process::{Command, Output};

use pir_codes::hamming::build_hamming;
use serde_json::Value;

fn pirc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pirc"))
        .args(args)
        .env_remove("PIRC_THREADS")
        .output()
        .expect("pirc runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn hamming_table(dir: &Path) -> String {
    let e = build_hamming(3).unwrap().encoder();
    let text: String = e
        .table()
        .iter()
        .enumerate()
        .map(|(d, c)| format!("{d:04b} {c}\n"))
        .collect();
    let path = dir.join("hamming.txt");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn hamming_table_is_not_3pir() {
    let dir = tempfile::tempdir().unwrap();
    let table = hamming_table(dir.path());
    let out = pirc(&[
        "--format",
        "json",
        "verify",
        "pir",
        "--t",
        "3",
        "--encoder",
        &table,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "fails");
    assert_eq!(v["k"], 4);
    assert_eq!(v["n"], 7);
}

#[test]
fn constructed_code_round_trips_through_json() {
    let out = pirc(&["--format", "json", "construct", "pir3", "--k", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n"], 9);
    let rows: Vec<String> = v["generator"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap().to_string())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, rows.join("\n")).unwrap();
    let out = pirc(&[
        "--format",
        "json",
        "verify",
        "pir",
        "--t",
        "3",
        "--generator",
        path.to_str().unwrap(),
    ]);
    assert_eq!(json(&out)["verdict"], "holds");
    let out = pirc(&[
        "--format",
        "json",
        "verify",
        "batch",
        "--t",
        "3",
        "--generator",
        path.to_str().unwrap(),
    ]);
    assert_eq!(json(&out)["verdict"], "holds");
}

#[test]
fn heuristic_search_is_reproducible() {
    let args = [
        "--format",
        "json",
        "search",
        "codes",
        "--n",
        "8",
        "--size",
        "16",
        "--dmin",
        "3",
        "--mode",
        "heuristic",
        "--seed",
        "11",
        "--iterations",
        "6",
    ];
    let a = pirc(&args);
    let b = pirc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn packing_number_and_table() {
    let out = pirc(&["packing", "number", "--r", "12"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "9");
    let out = pirc(&[
        "--format",
        "json",
        "optimal-table",
        "--t",
        "3",
        "--kmax",
        "6",
    ]);
    let v = json(&out);
    let ns: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["n"].as_u64().unwrap())
        .collect();
    assert_eq!(ns, vec![3, 5, 6, 8, 9, 10]);
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let usage = pirc(&["no-such-command"]);
    let missing = pirc(&[
        "verify",
        "pir",
        "--t",
        "3",
        "--encoder",
        dir.path().join("absent").to_str().unwrap(),
    ]);
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "not a table\n").unwrap();
    let input = pirc(&[
        "verify",
        "pir",
        "--t",
        "3",
        "--encoder",
        bad.to_str().unwrap(),
    ]);
    let ck = dir.path().join("ck");
    std::fs::write(&ck, "garbage\n").unwrap();
    let checkpoint = pirc(&[
        "search",
        "codes",
        "--n",
        "7",
        "--size",
        "16",
        "--checkpoint",
        ck.to_str().unwrap(),
    ]);
    let budget = pirc(&[
        "--budget", "1", "search", "codes", "--n", "8", "--size", "20",
    ]);
    let codes: Vec<i32> = [usage, input, checkpoint, budget, missing]
        .iter()
        .map(|o| o.status.code().unwrap())
        .collect();
    assert_eq!(codes, vec![2, 3, 4, 5, 6]);
}

#[test]
fn hamming_check_reports_no_encoder() {
    let out = pirc(&["--format", "json", "hamming", "check", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "no_encoder");
    assert_eq!(v["triples"], 1701);
}
