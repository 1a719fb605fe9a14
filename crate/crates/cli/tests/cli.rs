use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn putlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_putlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    (header, r.records().map(Result::unwrap).collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn curves_for_four_show_advantage_throughout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v4.csv");
    let o = putlab(&["curves", "--v", "4", "--eta", "1.0", "--eps-min", "0.05", "--eps-max", "2", "--eps-steps", "40", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_rows(&out);
    assert_eq!(
        header,
        ["v", "eta", "eps", "s_quantum", "s_classical_upper", "ratio_s", "a_quantum", "a_classical", "ratio_a", "k_opt_s", "k_opt_a", "quantum_provenance"]
    );
    assert_eq!(rows.len(), 40);
    let rs = column(&header, "ratio_s");
    for r in &rows {
        assert!(r[rs].parse::<f64>().unwrap() > 1.0);
    }
}

#[test]
fn binary_alphabet_shows_no_advantage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v2.csv");
    let o = putlab(&["curves", "--v", "2", "--eta", "1", "--eps-min", "0.001", "--eps-max", "4", "--eps-steps", "60", "--log-grid", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_rows(&out);
    let rs = column(&header, "ratio_s");
    let ra = column(&header, "a_quantum");
    for r in &rows {
        assert!(r[rs].parse::<f64>().unwrap() <= 1.0 + 1e-9);
        // numeric fallback is on by default
        assert!(!r[ra].is_empty());
    }
}

#[test]
fn smoothed_nine_keeps_asymmetric_advantage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v9.csv");
    let o = putlab(&["curves", "--v", "9", "--eta", "0.91", "--eps-min", "0.01", "--eps-max", "1", "--eps-steps", "30", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_rows(&out);
    let ra = column(&header, "ratio_a");
    for r in &rows {
        assert!(r[ra].parse::<f64>().unwrap() > 1.0);
    }
}

#[test]
fn disabled_fallback_leaves_empty_cells() {
    let o = putlab(&["curves", "--v", "5", "--eta", "1", "--eps-min", "0.5", "--eps-max", "1", "--eps-steps", "2", "--no-numeric"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells.len(), 12);
    assert_eq!(cells[6], "");
    assert_eq!(cells[8], "");
    assert_eq!(cells[11], "s=closed;a=none");
}

#[test]
fn json_format_mirrors_rows() {
    let o = putlab(&["curves", "--v", "4", "--eta", "1", "--eps-min", "0.5", "--eps-max", "1", "--eps-steps", "3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].as_object().unwrap().len(), 12);
}

#[test]
fn invalid_flags_exit_two() {
    assert_eq!(code(&putlab(&["curves", "--v", "4"])), 2);
    assert_eq!(code(&putlab(&["curves", "--v", "4", "--eta", "1", "--eps-min", "2", "--eps-max", "1", "--eps-steps", "3"])), 2);
    assert_eq!(code(&putlab(&["curves", "--v", "4", "--eta", "1.5", "--eps-min", "0.1", "--eps-max", "1", "--eps-steps", "3"])), 2);
    assert_eq!(code(&putlab(&["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&putlab(&["bogus"])), 2);
}

#[test]
fn unsupported_alphabet_exits_three() {
    let o = putlab(&["curves", "--v", "10", "--eta", "1", "--eps-min", "0.1", "--eps-max", "1", "--eps-steps", "3"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&putlab(&["mechanism", "build", "--type", "proposed", "--v", "12", "--eps", "1"])), 3);
}

#[test]
fn verify_suites_pass() {
    let o = putlab(&["verify", "--suite", "sic"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    for suite in ["qldp", "achievability", "taylor"] {
        assert_eq!(code(&putlab(&["verify", "--suite", suite])), 0, "{suite}");
    }
}

#[test]
fn seeded_full_run_is_deterministic() {
    let a = putlab(&["verify", "--suite", "all", "--seed", "7"]);
    let b = putlab(&["verify", "--suite", "all", "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn failing_check_exits_one_with_name() {
    // clamping half the spectrum to zero breaks the numeric quantum utilities
    let o = Command::new(env!("CARGO_BIN_EXE_putlab"))
        .args(["verify", "--suite", "achievability"])
        .env("PUTLAB_TOLERANCE", "eig_clamp=0.5")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("quantum closed forms v=4") && err.contains("margin"));
}

#[test]
fn bad_tolerance_override_exits_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_putlab"))
        .args(["verify", "--suite", "sic"])
        .env("PUTLAB_TOLERANCE", "bogus=1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn proposed_mechanism_file_shape() {
    let o = putlab(&["mechanism", "build", "--type", "proposed", "--v", "4", "--eps", "1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["type"], "cq");
    assert_eq!(v["dim"], 2);
    let outputs = v["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 4);
    for m in outputs {
        let rows = m.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 2));
        assert_eq!(rows[0][0].as_array().unwrap().len(), 2);
    }
}

#[test]
fn check_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let rr = dir.path().join("rr.json");
    let ln4 = 4f64.ln().to_string();
    let o = putlab(&["mechanism", "build", "--type", "rr", "--v", "2", "--eps", &ln4, "--out", rr.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = putlab(&["mechanism", "check", "--in", rr.to_str().unwrap(), "--eps", &ln4]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("PASS"));
    // ln 4 rounded down to 1.386 is slightly too strict for a likelihood ratio of exactly 4
    let o = putlab(&["mechanism", "check", "--in", rr.to_str().unwrap(), "--eps", "1.386"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("FAIL"));
    // the recorded eps is used when the flag is omitted
    assert_eq!(code(&putlab(&["mechanism", "check", "--in", rr.to_str().unwrap()])), 0);

    let q = dir.path().join("q.json");
    putlab(&["mechanism", "build", "--type", "proposed", "--v", "9", "--eps", "0.5", "--out", q.to_str().unwrap()]);
    assert_eq!(code(&putlab(&["mechanism", "check", "--in", q.to_str().unwrap(), "--eps", "0.5"])), 0);
    assert_eq!(code(&putlab(&["mechanism", "check", "--in", q.to_str().unwrap(), "--eps", "0.45"])), 1);
}

#[test]
fn decompose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("random3x5.json");
    // columns with ratios inside e^1 in every column
    let text = r#"{"type": "classical", "v": 3, "eps": 1.0, "cols": 5, "matrix": [
        [0.30, 0.10, 0.20, 0.25, 0.15],
        [0.15, 0.20, 0.25, 0.20, 0.20],
        [0.20, 0.15, 0.30, 0.15, 0.20]]}"#;
    fs::write(&input, text).unwrap();
    let out = dir.path().join("dec.json");
    let o = putlab(&["mechanism", "decompose", "--in", input.to_str().unwrap(), "--eps", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stderr).unwrap().contains("reconstruction residual"));
    let dec: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(dec["theta"].as_array().unwrap().len(), 8);
    assert_eq!(dec["post_processing"].as_array().unwrap().len(), 8);
    assert!(dec["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn decompose_rejects_non_private_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sharp.json");
    fs::write(&input, r#"{"type": "classical", "v": 2, "cols": 2, "matrix": [[0.9, 0.1], [0.1, 0.9]]}"#).unwrap();
    assert_eq!(code(&putlab(&["mechanism", "decompose", "--in", input.to_str().unwrap(), "--eps", "1"])), 5);
}

#[test]
fn malformed_json_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, "{not json").unwrap();
    assert_eq!(code(&putlab(&["mechanism", "check", "--in", input.to_str().unwrap(), "--eps", "1"])), 4);
    fs::write(&input, r#"{"type": "classical", "v": 2, "cols": 2, "matrix": [[0.9, 0.3], [0.1, 0.9]]}"#).unwrap();
    assert_eq!(code(&putlab(&["mechanism", "decompose", "--in", input.to_str().unwrap(), "--eps", "1"])), 4);
}

#[test]
fn limits_table_rows() {
    let o = putlab(&["limits", "--v-range", "2..9"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let row = |v: &str| text.lines().find(|l| l.split_whitespace().next() == Some(v)).unwrap().to_string();
    let four: Vec<f64> = row("4").split_whitespace().take(3).map(|x| x.parse().unwrap()).collect();
    assert_eq!(four[1], 1.5);
    assert!((four[2] / four[1] - 1.0).abs() < 0.02);
    assert!(row("9").split_whitespace().nth(1).unwrap().starts_with("1.2"));
    assert!(row("2").contains("no advantage"));
    assert_eq!(code(&putlab(&["limits", "--v-range", "5..3"])), 2);
}
