//! End-to-end runs of the `svt` binary.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn svt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svt"))
        .args(args)
        .env("SVT_TEST", "1")
        .output()
        .expect("run svt")
}

fn stdout(args: &[&str]) -> String {
    let out = svt(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn single_cell_samples() {
    let out = stdout(&["sample", "--shape", "1", "--n", "3", "--count", "2", "--seed", "7"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, [r#"{"shape":[1],"n":3,"cells":[[[1,2,3]]]}"#; 2]);
}

#[test]
fn raw_split_is_even() {
    let out = stdout(&["sample", "--shape", "2", "--n", "3", "--raw", "--count", "10000", "--seed", "1"]);
    let left = out.lines().filter(|l| l.contains("[[1,2],[3]]")).count() as f64;
    let total = out.lines().count() as f64;
    assert_eq!(total, 10000.0);
    // 4 sigma of a fair coin over 10^4 draws
    assert!((left / total - 0.5).abs() <= 4.0 * 0.005, "{left}");
}

#[test]
fn uncertifiable_steps_exit_4() {
    let out = svt(&["sample", "--shape", "5,5,5", "--n", "40", "--bias", "0.01", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot certify"));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(svt(&["sample", "--shape", "1", "--n", "3"]).status.code(), Some(2));
    assert_eq!(svt(&["exact", "--shape", "1,2"]).status.code(), Some(2));
    assert_eq!(svt(&["exact", "--shape", "2", "--n", "1"]).status.code(), Some(2));
    assert_eq!(svt(&["sample", "--shape", "2", "--bias", "2", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(svt(&["count", "--shape", "2", "--epsilon", "0", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(svt(&["bogus"]).status.code(), Some(2));
}

#[test]
fn feasibility_guard_exits_3() {
    let out = svt(&["diagnose", "--shape", "3,3", "--n", "9"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn counts() {
    assert_eq!(stdout(&["exact", "--shape", "2,1", "--n", "4"]).trim(), "8");
    assert_eq!(stdout(&["syt", "--shape", "3,2"]).trim(), "5");
    let single: Value = serde_json::from_str(&stdout(&["count", "--shape", "1", "--n", "9", "--seed", "0"])).unwrap();
    assert_eq!(single["estimate"], "1/1");
}

#[test]
fn approximate_count_of_a_row() {
    let out = stdout(&[
        "count", "--shape", "2", "--n", "5", "--epsilon", "0.3", "--delta", "0.25", "--samples", "5000", "--steps",
        "10", "--seed", "3",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let (num, den) = v["estimate"].as_str().unwrap().split_once('/').unwrap();
    let est = num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap();
    assert!((2.8..=5.2).contains(&est), "{est}");
    assert_eq!(v["reps"], 17);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["levels"].as_array().unwrap().len(), 5);
}

#[test]
fn diagnose_two_states() {
    let v: Value = serde_json::from_str(&stdout(&["diagnose", "--shape", "2", "--n", "3"])).unwrap();
    assert_eq!(v["phi"], "1/2");
    assert_eq!(v["t_mix"], 1);
    assert_eq!(v["states"], 2);
}

#[test]
fn dumped_tableaux_revalidate() {
    let out = stdout(&["exact", "--shape", "2,1", "--n", "5", "--dump"]);
    let count: usize = stdout(&["exact", "--shape", "2,1", "--n", "5"]).trim().parse().unwrap();
    assert_eq!(out.lines().count(), count);
    for line in out.lines() {
        let t: svt_core::PreTableau = serde_json::from_str(line).unwrap();
        assert!(t.is_complete());
    }
    let law: Value = serde_json::from_str(&stdout(&["exact", "--shape", "2,1", "--n", "4", "--law"])).unwrap();
    assert_eq!(law.as_array().unwrap().len(), 8);
}

#[test]
fn start_file_restricts_completions() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"shape":[2,1],"n":5,"cells":[[[],[5]],[[]]]}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let total: usize = stdout(&["exact", "--start", path]).trim().parse().unwrap();
    let dumped = stdout(&["exact", "--start", path, "--dump"]);
    assert_eq!(dumped.lines().count(), total);
    for line in dumped.lines() {
        let t: svt_core::PreTableau = serde_json::from_str(line).unwrap();
        assert_eq!(t.cells()[1].last(), Some(&5));
    }
    let samples = stdout(&["sample", "--start", path, "--count", "5", "--seed", "2"]);
    for line in samples.lines() {
        let t: svt_core::PreTableau = serde_json::from_str(line).unwrap();
        assert_eq!(t.cells()[1].last(), Some(&5));
    }
    let out = svt(&["exact", "--start", path, "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format() {
    let out = stdout(&["sample", "--shape", "2,1", "--n", "3", "--count", "1", "--seed", "1", "--format", "text"]);
    assert!(out.lines().next().unwrap().contains(" | "));
    let out = stdout(&["diagnose", "--shape", "2", "--n", "3", "--format", "text"]);
    assert!(out.contains("phi         1/2"));
}
