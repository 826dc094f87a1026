use std::io::Write;
use std::process::{Command, Output};

use fibpairs::Identity;
use serde_json::Value;

fn fibpairs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibpairs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn pairs_list_and_show() {
    let out = fibpairs(&["pairs", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "thm11",
        "rank2_fr",
        "rank2_25",
        "prop21",
        "rank3_wx",
        "rank3_zv",
        "singular_zv",
    ] {
        assert!(text.contains(name), "{name}");
    }
    let out = fibpairs(&["pairs", "show", "thm11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[[1, 1], [1, 0]]"));
    assert!(text.contains("det w:      -1"));
    assert!(text.contains("X^2 - X - 1"));
}

#[test]
fn show_with_parameter() {
    let out = fibpairs(&["--format", "json", "pairs", "show", "rank2_fr", "--param", "r=3"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["params"]["r"], 3);
    assert_eq!(v["scale"], "F[r]");
    assert_eq!(v["w"], "[[3/2, 1/2], [1/2, -1/2]]");
}

#[test]
fn certify_exit_codes() {
    let out = fibpairs(&["pairs", "certify", "rank3_zv", "--range", "1..8"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("ok"));
    assert_eq!(fibpairs(&["pairs", "certify", "nosuch"]).status.code(), Some(2));
    assert_eq!(
        fibpairs(&["pairs", "certify", "singular_zv", "--range", "-3..3"])
            .status
            .code(),
        Some(2)
    );
    assert!(fibpairs(&["pairs", "certify", "thm11", "--range", "-8..8"])
        .status
        .success());
}

#[test]
fn gen_matrix_family() {
    let out = fibpairs(&["gen", "rank2_fr", "matrix", "WW"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| !l.starts_with(' ')).count(), 4);
    assert!(text.starts_with("M1: "));
    assert_eq!(text.matches("proven").count(), 4);
}

#[test]
fn gen_trace_table_entry() {
    let out = fibpairs(&["gen", "rank2_25", "trace", "fricke", "--M", "w:even", "--N", "xw:odd"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("T6: "));
}

#[test]
fn gen_errors_exit_two() {
    assert_eq!(fibpairs(&["gen", "rank3_wx", "trace", "fricke"]).status.code(), Some(2));
    assert_eq!(fibpairs(&["gen", "thm11", "matrix", "XY"]).status.code(), Some(2));
    assert_eq!(fibpairs(&["gen", "thm11", "sideways"]).status.code(), Some(2));
}

#[test]
fn corpus_proves_and_verifies() {
    let out = fibpairs(&["corpus", "print"]);
    assert!(out.status.success());
    let file = temp_file(&stdout(&out));
    let path = file.path().to_str().unwrap();
    let proved = fibpairs(&["prove", path]);
    assert!(proved.status.success(), "{}", stdout(&proved));
    assert!(stdout(&proved).contains("42 entries, 0 failed"));
    let verified = fibpairs(&["verify", path, "--grid", "n=-6..6,m=-6..6,r=1..4"]);
    assert!(verified.status.success(), "{}", stdout(&verified));
    assert!(fibpairs(&["corpus", "run"]).status.success());
}

#[test]
fn mutated_entry_reports_witness() {
    let file = temp_file("M4 | | L[n]*L[m] + 5*F[n]*F[m] = 3*L[m+n] | mutated\n");
    let path = file.path().to_str().unwrap();
    let out = fibpairs(&["--format", "json", "verify", path]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["status"], "failed");
    assert_eq!(v[0]["witness"], serde_json::json!({"m": 0, "n": 0}));
    assert_eq!(fibpairs(&["prove", path]).status.code(), Some(1));
}

#[test]
fn parse_error_names_line() {
    let file = temp_file("# header\nA | | F[n = 1 | x\n");
    let out = fibpairs(&["prove", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn compute_values() {
    for (args, want) in [(["fib", "10"], "55"), (["lucas", "0"], "2"), (["fib", "-4"], "-3")] {
        let out = fibpairs(&["compute", args[0], args[1]]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), want);
    }
}

#[test]
fn json_round_trip() {
    let out = fibpairs(&[
        "--format", "json", "gen", "thm11", "trace", "BAB", "--M", "xw", "--N", "w",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 1);
    let rec = &records[0];
    assert_eq!(rec["status"], "proven");
    let text = format!("{} = {}", rec["lhs"].as_str().unwrap(), rec["rhs"].as_str().unwrap());
    let id = Identity::parse(rec["label"].as_str().unwrap(), &text).unwrap();
    assert_eq!(id.to_string(), text);
    let vars: Vec<String> = serde_json::from_value(rec["variables"].clone()).unwrap();
    assert_eq!(vars, id.variables);
    assert!(id.prove().unwrap().is_proven());
}
