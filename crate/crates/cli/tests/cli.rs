use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyslice"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn polyslice")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&a)).unwrap()
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema")
}

const CHEAP: &[(&str, &[&str])] = &[
    (
        "volume",
        &[
            "volume",
            "--p",
            "9",
            "--a",
            "0.6,0.8,0.3",
            "--engine",
            "quad",
            "--tol",
            "1e-6",
        ],
    ),
    (
        "kernel",
        &["kernel", "--p", "4", "--s-max", "2", "--step", "0.5"],
    ),
    (
        "crossing",
        &["crossing", "--p", "9", "--n-max", "6", "--tol", "1e-6"],
    ),
    ("verify", &["verify", "--suite", "sufficient"]),
    (
        "clt",
        &[
            "clt",
            "--p",
            "4",
            "--n-list",
            "4,8",
            "--samples",
            "2000",
            "--seed",
            "3",
        ],
    ),
    (
        "optimize",
        &[
            "optimize",
            "--p",
            "4",
            "--n",
            "3",
            "--engine",
            "mc",
            "--budget",
            "20",
            "--tol",
            "1e-2",
            "--samples",
            "2000",
        ],
    ),
];

#[test]
fn closed_form_row_matches_square_root_of_two() {
    let out = stdout(&["volume", "--p", "4", "--a2", "3", "--engine", "closed"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "closed_form");
    assert_eq!(row[4], "1.4142135623730951");
    assert_eq!(row[4].parse::<f64>().unwrap(), 2f64.sqrt());
}

#[test]
fn polydisc_diagonal_of_two_routes_to_closed_form() {
    let v = json(&["volume", "--p", "inf", "--diag", "2", "--engine", "quad"]);
    let row = &v["rows"][0];
    assert_eq!(row["value"], 2.0);
    assert_eq!(row["engine"], "closed_form");
    assert_eq!(row["p"], "inf");
    let csv = stdout(&["volume", "--p", "inf", "--diag", "2", "--engine", "quad"]);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("closed_form,inf,2,"));
}

#[test]
fn crossing_at_nine_certifies_by_twenty_three() {
    let v = json(&["crossing", "--p", "9", "--n-max", "30", "--tol", "1e-6"]);
    let first = v["first_n_holds"].as_u64().expect("a certified crossing");
    assert!(first <= 23, "first_n_holds = {first}");
    assert_eq!(v["holds_for_all_tail"], true);
}

#[test]
fn csv_headers_match_schema_file() {
    let text = std::fs::read_to_string(schema_dir().join("csv_headers.txt")).unwrap();
    for (name, args) in CHEAP {
        let want = text
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{name}: ")))
            .unwrap_or_else(|| panic!("{name} missing from csv_headers.txt"));
        let out = stdout(args);
        assert_eq!(out.lines().next().unwrap(), want, "{name}");
    }
}

#[test]
fn json_output_validates_against_schema() {
    let raw = std::fs::read_to_string(schema_dir().join("output.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&raw).unwrap();
    let validator = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    assert!(!validator.is_valid(&serde_json::json!({"command": "volume", "rows": [{}]})));
    for (name, args) in CHEAP {
        let doc = json(args);
        assert_eq!(doc["command"], *name);
        if let Err(errors) = validator.validate(&doc) {
            let msgs: Vec<String> = errors
                .map(|e| format!("{e} at {}", e.instance_path))
                .collect();
            panic!("{name}: {msgs:?}");
        }
        let reparsed: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(reparsed, doc);
    }
}

#[test]
fn identical_flags_give_identical_bytes() {
    for (name, args) in CHEAP {
        for fmt in ["csv", "json"] {
            let mut a = args.to_vec();
            a.extend(["--format", fmt]);
            assert_eq!(stdout(&a), stdout(&a), "{name} {fmt}");
        }
    }
}

#[test]
fn output_path_receives_the_same_bytes() {
    let dir = std::env::temp_dir().join(format!("polyslice-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("kernel.csv");
    let args = ["kernel", "--p", "inf", "--s-max", "3", "--step", "1"];
    let mut with_path = args.to_vec();
    with_path.extend(["--output-path", path.to_str().unwrap()]);
    let out = run(&with_path);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&args));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn floats_round_trip_through_csv() {
    let out = stdout(&[
        "kernel", "--p", "3", "--s-max", "4", "--step", "0.7", "--tol", "1e-12",
    ]);
    for line in out.lines().skip(1) {
        for cell in line.split(',') {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(format!("{x:?}"), cell);
        }
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(
        code(&["volume", "--p", "4", "--diag", "3", "--engine", "quad", "--bogus"]),
        Some(2)
    );
    assert_eq!(
        code(&["volume", "--p", "0.5", "--diag", "3", "--engine", "quad"]),
        Some(2)
    );
    assert_eq!(
        code(&["volume", "--p", "Infinity", "--diag", "3", "--engine", "quad"]),
        Some(2)
    );
    assert_eq!(code(&["volume", "--p", "4", "--engine", "quad"]), Some(2));
    assert_eq!(
        code(&["volume", "--p", "4", "--diag", "3", "--engine", "closed"]),
        Some(2)
    );
    assert_eq!(
        code(&["volume", "--p", "4", "--diag", "3", "--engine", "quad", "--tol", "-1"]),
        Some(2)
    );
    assert_eq!(code(&["crossing", "--p", "2", "--n-max", "5"]), Some(2));
    assert_eq!(
        code(&["kernel", "--p", "3", "--s-max", "1000", "--step", "1000", "--tol", "1e-17"]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "kernel",
            "--p",
            "3",
            "--s-max",
            "1",
            "--step",
            "1",
            "--output-path",
            "/nonexistent/dir/x.csv"
        ]),
        Some(1)
    );
    assert_eq!(code(&["verify", "--suite", "lemma1"]), Some(0));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn diagnostics_stay_off_stdout() {
    let out = run(&["volume", "--p", "4", "--diag", "3", "--engine", "closed"]);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn informational_rows_do_not_fail_verify() {
    let v = json(&["verify", "--suite", "lemma1"]);
    assert_eq!(v["violations"], 0);
    let rows = v["rows"].as_array().unwrap();
    let sharp = rows
        .iter()
        .find(|r| r["name"] == "g_value" && r["rhs"] == 1.039)
        .expect("sharper g(7) row");
    assert_eq!(sharp["satisfied"], false);
    assert_eq!(sharp["required"], false);
}
