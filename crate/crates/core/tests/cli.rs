use std::path::PathBuf;
use std::process::{Command, Output};

use quasiquad::cli::{exit_code, EXIT_ORACLE};
use quasiquad::verify::VerifyReport;
use quasiquad::Error;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quasiquad"));
    c.env_remove("QUASIQUAD_CORPUS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quasiquad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bound_example() {
    let v = json(&[
        "bound", "--a", "0", "--b", "1", "--q", "2", "--d2a", "2", "--d2b", "2",
    ]);
    assert!((v["best"].as_f64().unwrap() - 0.182_574_185_835_055_37).abs() < 1e-15);
    assert_eq!(v["winner"], "V1");

    let human = run(&[
        "bound", "--a", "0", "--b", "1", "--q", "2", "--d2a", "2", "--d2b", "2",
    ]);
    assert!(human.status.success());
    assert!(String::from_utf8_lossy(&human.stdout).contains("0.1825741858 (V1)"));
}

#[test]
fn integrate_example() {
    let v = json(&[
        "integrate",
        "--fn",
        "poly:0,0,1",
        "--a",
        "0",
        "--b",
        "1",
        "--q",
        "1",
        "--eps",
        "1e-4",
    ]);
    let value = v["value"].as_f64().unwrap();
    let cert = v["certificate"]["total"].as_f64().unwrap();
    assert!((value - 1.0 / 3.0).abs() <= 1e-4);
    assert!(cert <= 1e-4);
    assert_eq!(
        v["certificate"]["per_interval"].as_array().unwrap().len(),
        64
    );
}

#[test]
fn means_example() {
    let v = json(&[
        "means", "--prop", "P6", "--na", "1", "--nb", "2", "--n", "2", "--q", "1",
    ]);
    assert!((v["lhs"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert!((v["rhs"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(v["holds"], true);
}

#[test]
fn negative_endpoints_parse() {
    let v = json(&[
        "bound", "--a", "-2", "--b", "-1", "--q", "1", "--d2a", "3", "--d2b", "1",
    ]);
    assert!((v["best"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn verify_json_round_trips() {
    let out = run(&["--format", "json", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let report: VerifyReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.passed());
    assert_eq!(report.records.len(), 77);

    let again = serde_json::to_vec_pretty(&report).unwrap();
    let reparsed: VerifyReport = serde_json::from_slice(&again).unwrap();
    for (x, y) in report.records.iter().zip(&reparsed.records) {
        for (u, v) in [
            (x.lhs_error, y.lhs_error),
            (x.best, y.best),
            (x.margin, y.margin),
        ] {
            assert!((u - v).abs() <= 1e-15 * u.abs().max(1.0));
        }
    }
}

#[test]
fn csv_floats_round_trip() {
    let out = run(&["--format", "csv", "verify", "--q-grid", "1,2,3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let json_out = json(&["verify", "--q-grid", "1,2,3"]);
    let records = json_out["records"].as_array().unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), records.len());
    for (row, rec) in rows.iter().zip(records) {
        for field in ["lhs_error", "best", "margin"] {
            let from_csv: f64 = row[col(field)].parse().unwrap();
            assert_eq!(from_csv, rec[field].as_f64().unwrap(), "{field}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    for format in ["json", "csv", "human"] {
        let first = run(&["--format", format, "verify"]);
        let second = run(&["--format", format, "verify"]);
        assert_eq!(
            first.stdout, second.stdout,
            "{format} output differs between runs"
        );
    }
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("bound.json");
    let out = run(&[
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
        "bound",
        "--a",
        "0",
        "--b",
        "1",
        "--q",
        "1",
        "--d2a",
        "2",
        "--d2b",
        "2",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["winner"], "V2");
}

#[test]
fn corpus_override_from_environment_and_flag() {
    let path = scratch("tiny.txt");
    std::fs::write(
        &path,
        "# two entries\nonly_square poly:0,0,1 0 1\nonly_cube poly:0,0,0,1 1 2\n",
    )
    .unwrap();

    let listed = bin()
        .args(["corpus"])
        .env("QUASIQUAD_CORPUS", &path)
        .output()
        .unwrap();
    let text = String::from_utf8(listed.stdout).unwrap();
    assert!(text.contains("only_square") && text.contains("only_cube"));
    assert_eq!(text.lines().count(), 2);

    let v = json(&[
        "verify",
        "--corpus",
        path.to_str().unwrap(),
        "--q-grid",
        "1,2",
    ]);
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(
        code(&["bound", "--a", "1", "--b", "0", "--q", "2", "--d2a", "1", "--d2b", "1"]),
        Some(1)
    );
    assert_eq!(
        code(&["means", "--prop", "P5", "--na", "1", "--nb", "2", "--n", "3", "--q", "1.5"]),
        Some(1)
    );
    assert_eq!(
        code(&[
            "integrate",
            "--fn",
            "poly:0,0,1",
            "--a",
            "0",
            "--b",
            "1",
            "--eps",
            "1e-12",
            "--max-n",
            "4"
        ]),
        Some(1)
    );
    assert_eq!(code(&["bogus"]), Some(64));
    assert_eq!(code(&["bound", "--a", "zero"]), Some(64));
    assert_eq!(
        code(&[
            "integrate",
            "--fn",
            "sin:1",
            "--a",
            "0",
            "--b",
            "1",
            "--eps",
            "1e-3"
        ]),
        Some(64)
    );
    assert_eq!(code(&["--help"]), Some(0));

    let path = scratch("g.txt");
    std::fs::write(&path, "kinked g -1 1\n").unwrap();
    assert_eq!(
        code(&[
            "verify",
            "--corpus",
            path.to_str().unwrap(),
            "--q-grid",
            "1,2"
        ]),
        Some(2)
    );

    assert_eq!(exit_code(&Error::OracleFailure("x".into())), EXIT_ORACLE);
}
