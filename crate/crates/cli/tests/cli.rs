use std::path::PathBuf;
use std::process::{Command, Output};

fn hltriple(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hltriple"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn hltriple_with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hltriple"))
        .env("HLTRIPLE_THREADS", threads)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hltriple-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn count_examples() {
    for (args, want) in [
        (vec!["count", "pi_1ab", "100", "1", "1"], 4),
        (vec!["count", "D_1ab", "30", "2", "2"], 7),
        (vec!["count", "pi_1ab", "4", "1", "1"], 0),
        (vec!["count", "pi_1r", "20", "1"], 4),
    ] {
        let out = hltriple(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let v = json(&out);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rows"][0]["count"], want, "{args:?}");
    }
}

#[test]
fn count_rejects_bad_input_with_usage_exit() {
    for args in [
        vec!["count", "D_1ab", "31", "2", "2"],
        vec!["count", "pi_1ab", "100", "1"],
        vec!["count", "nope", "100", "1", "1"],
        vec!["frobnicate"],
    ] {
        let out = hltriple(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verify_contains_margin_row_and_passes() {
    let out = hltriple(&["verify", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 25);
    let margin = rows.iter().find(|r| r["label"] == "margin").unwrap();
    assert_eq!(margin["paper"], "13.05253");
    assert_eq!(margin["direction"], "lower");
}

#[test]
fn verify_flags_exit_two_and_full_override_passes() {
    let strict = hltriple(&["verify", "--default-tolerance", "0"]);
    assert_eq!(strict.status.code(), Some(2));
    let mut args = vec!["verify", "--default-tolerance", "0"];
    let labels: Vec<String> = json(&strict)["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| format!("{}=100", r["label"].as_str().unwrap()))
        .collect();
    for l in &labels {
        args.push("--tolerance");
        args.push(l);
    }
    assert_eq!(hltriple(&args).status.code(), Some(0));
    assert_eq!(hltriple(&["verify", "--tolerance", "margin=100"]).status.code(), Some(0));
    assert_eq!(hltriple(&["verify", "--tolerance", "S99=5"]).status.code(), Some(1));
}

#[test]
fn csv_and_json_carry_identical_values() {
    let j = json(&hltriple(&["verify", "--no-timestamp"]));
    let c = hltriple(&["verify", "--no-timestamp", "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(c.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["label", "computed", "paper", "direction", "rel_diff", "verdict"]
    );
    let rows = j["rows"].as_array().unwrap();
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(rows) {
        for (h, field) in headers.iter().zip(rec.iter()) {
            let jv = &row[h];
            match jv.as_f64() {
                Some(x) => assert_eq!(field.parse::<f64>().unwrap(), x, "{h}"),
                None => assert_eq!(jv.as_str().unwrap(), field, "{h}"),
            }
        }
    }
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let cases: [&[&str]; 3] = [
        &["verify", "--no-timestamp"],
        &["count", "D_sr", "1000000", "1", "2", "--no-timestamp"],
        &["ratio", "pi_1ab", "1", "1", "--checkpoints", "100000,2000000", "--no-timestamp", "--format", "csv"],
    ];
    for args in cases {
        let a = hltriple(args).stdout;
        let b = hltriple(args).stdout;
        let one = hltriple_with_threads("1", args).stdout;
        let many = hltriple_with_threads("6", args).stdout;
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
        assert_eq!(a, one, "{args:?}");
        assert_eq!(a, many, "{args:?}");
    }
    assert_eq!(hltriple_with_threads("zero", &["constants"]).status.code(), Some(1));
}

#[test]
fn timestamp_line_is_present_unless_suppressed() {
    let with = hltriple(&["constants", "C2", "--format", "csv"]);
    assert!(String::from_utf8_lossy(&with.stdout).starts_with("# generated_unix="));
    let without = hltriple(&["constants", "C2", "--format", "csv", "--no-timestamp"]);
    assert!(String::from_utf8_lossy(&without.stdout).starts_with("name,value\n"));
}

#[test]
fn functions_spot_values_and_row_errors() {
    let out = hltriple(&["functions", "f0", "--points", "3", "--format", "csv", "--no-timestamp"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "function,point,value,error\nf0,3.000000,0.693147,\n");
    let v = json(&hltriple(&["functions", "F0", "--points", "2"]));
    assert_eq!(v["rows"][0]["value"], 1.0);
    let w = json(&hltriple(&["functions", "w", "--points", "3"]));
    assert_eq!(w["rows"][0]["value"], 0.564382);
    let bad = hltriple(&["functions", "F0", "--points", "2,7.5"]);
    assert_eq!(bad.status.code(), Some(2));
    let rows = json(&bad)["rows"].as_array().unwrap().clone();
    assert!(rows[1]["value"].is_null());
    assert!(rows[1]["error"].as_str().unwrap().contains("7.5"));
}

#[test]
fn constants_command() {
    let v = json(&hltriple(&["constants", "C2", "C3", "CN=30", "C0"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["value"], 1.320324);
    assert_eq!(rows[1]["value"], 2.858249);
    assert_eq!(rows[2]["name"], "CN=30");
    assert_eq!(rows[3]["value"], 0.003886);
    assert_eq!(hltriple(&["constants", "CN=31"]).status.code(), Some(1));
    assert_eq!(hltriple(&["constants", "C9"]).status.code(), Some(1));
}

#[test]
fn ratio_command_rows() {
    let v = json(&hltriple(&["ratio", "pi_1ab", "1", "1", "--checkpoints", "100,1000"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["count"], 4);
    assert_eq!(hltriple(&["ratio", "pi_1ab", "1", "1", "--checkpoints", "1000,100"]).status.code(), Some(1));
}

#[test]
fn out_file_is_written_atomically() {
    let path = scratch("report.csv");
    let out = hltriple(&["constants", "C2", "--format", "csv", "--no-timestamp", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "name,value\nC2,1.320324\n");
    let leftovers: Vec<_> = std::fs::read_dir(path.parent().unwrap())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());

    let missing_dir = scratch("no/such/dir/report.json");
    let failed = hltriple(&["constants", "--out", missing_dir.to_str().unwrap()]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(!missing_dir.exists());
}
