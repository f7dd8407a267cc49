use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fftfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fftfold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, n: usize, kind: &str) -> PathBuf {
    let path = dir.path().join(name);
    let out = fftfold(&[
        "gen",
        "--n",
        &n.to_string(),
        "--kind",
        kind,
        path_str(&path),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn report(output: &Path) -> Value {
    let mut p = output.as_os_str().to_owned();
    p.push(".report.json");
    serde_json::from_str(&fs::read_to_string(PathBuf::from(p)).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn transform_impulse_reports_zero_error() {
    let dir = TempDir::new().unwrap();
    let input = gen(&dir, "imp.json", 8, "impulse");
    let output = dir.path().join("out.json");
    let out = fftfold(&["transform", "--check", path_str(&input), path_str(&output)]);
    assert!(out.status.success());
    assert_eq!(report(&output)["max_abs_error"].as_f64(), Some(0.0));

    let y: Value = serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(y["n"], 8);
    assert!(y["samples"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s[0].as_f64() == Some(1.0) && s[1].as_f64() == Some(0.0)));
}

#[test]
fn transform_random_n64_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let input = gen(&dir, "r.json", 64, "random");
    let output = dir.path().join("out.json");
    let out = fftfold(&[
        "transform",
        "--check",
        "--raw",
        path_str(&input),
        path_str(&output),
    ]);
    assert!(out.status.success());
    let r = report(&output);
    let err = r["max_abs_error"].as_f64().unwrap();
    assert!(err <= 4.0 * 64.0 * 2f64.powi(-15), "{err}");
    assert_eq!(r["cycles"], 6);
    assert_eq!(r["butterfly_units"], 32);
    assert!(fs::read_to_string(&output)
        .unwrap()
        .contains("\"raw\": true"));
}

#[test]
fn non_power_of_two_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("twelve.json");
    let samples = vec![[0.0, 0.0]; 12];
    let body = serde_json::json!({"n": 12, "format": {"int_bits": 2, "frac_bits": 15}, "samples": samples});
    fs::write(&input, body.to_string()).unwrap();
    let out = fftfold(&[
        "transform",
        path_str(&input),
        path_str(&dir.path().join("o.json")),
    ]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&out.stderr).contains("power of two"));

    fs::write(&input, "{not json").unwrap();
    let out = fftfold(&[
        "trace",
        path_str(&input),
        path_str(&dir.path().join("t.csv")),
    ]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn missing_input_is_an_io_error() {
    let out = fftfold(&["transform", "/nonexistent/in.json", "/tmp/unused.json"]);
    assert_eq!(out.status.code(), Some(74));
}

#[test]
fn trace_rows_follow_control_protocol() {
    let dir = TempDir::new().unwrap();
    for (n, rows) in [(2usize, 1usize), (8, 3), (16, 4)] {
        let input = gen(&dir, &format!("in{n}.json"), n, "random");
        let trace = dir.path().join(format!("trace{n}.csv"));
        assert!(fftfold(&["trace", path_str(&input), path_str(&trace)])
            .status
            .success());
        let text = fs::read_to_string(&trace).unwrap();
        assert_eq!(text.lines().next().unwrap().split(',').count(), 4 + n);
        let table = csv_rows(&trace);
        assert_eq!(table.len(), rows);
        let sb: Vec<&str> = table.iter().map(|r| r[1].as_str()).collect();
        let want: Vec<String> = (1..=rows).map(|s| s.to_string()).collect();
        assert_eq!(sb, want);
        assert_eq!(table[0][2], "0");
        assert_eq!(table[rows - 1][3], "1");
        assert!(table[..rows - 1].iter().all(|r| r[3] == "0"));
        assert!(table[1..].iter().all(|r| r[2] == "1"));
    }
}

#[test]
fn resources_reproduce_butterfly_table() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("res.csv");
    let out = fftfold(&[
        "resources",
        "--min",
        "8",
        "--max",
        "1024",
        "--wide",
        path_str(&csv),
    ]);
    assert!(out.status.success());
    let bu: Vec<(String, String, String)> = csv_rows(&csv)
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone(), r[2].clone()))
        .collect();
    let want = [
        ("8", "12", "4"),
        ("16", "32", "8"),
        ("32", "80", "16"),
        ("64", "192", "32"),
        ("128", "448", "64"),
        ("256", "1024", "128"),
        ("512", "2304", "256"),
        ("1024", "5120", "512"),
    ];
    assert_eq!(bu.len(), 8);
    for (got, w) in bu.iter().zip(want) {
        assert_eq!((got.0.as_str(), got.1.as_str(), got.2.as_str()), w);
    }
}

#[test]
fn resources_alpha_column() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("res.csv");
    assert!(fftfold(&[
        "resources",
        "--min",
        "8",
        "--max",
        "32",
        "--figures",
        path_str(&csv)
    ])
    .status
    .success());
    let alpha: Vec<(String, String)> = csv_rows(&csv)
        .into_iter()
        .filter(|r| r[1] == "folded")
        .map(|r| (r[7].clone(), r[8].clone()))
        .collect();
    assert_eq!(
        alpha,
        vec![
            ("1".into(), "3".into()),
            ("1".into(), "4".into()),
            ("1".into(), "5".into())
        ]
    );
    assert_eq!(
        csv_rows(&dir.path().join("res_multipliers.csv"))[0],
        vec!["8", "12", "4"]
    );
    assert_eq!(
        csv_rows(&dir.path().join("res_adders.csv"))[2],
        vec!["32", "160", "32"]
    );

    let single = dir.path().join("two.csv");
    assert!(fftfold(&[
        "resources",
        "--min",
        "2",
        "--max",
        "2",
        "--wide",
        path_str(&single)
    ])
    .status
    .success());
    let rows = csv_rows(&single);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][7], "1");

    let bad = fftfold(&["resources", "--min", "64", "--max", "8", path_str(&single)]);
    assert_eq!(bad.status.code(), Some(65));
    let bad = fftfold(&["resources", "--min", "6", "--max", "8", path_str(&single)]);
    assert_eq!(bad.status.code(), Some(65));
}

#[test]
fn rom_dump_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("rom.csv");
    assert!(fftfold(&["rom", "--n", "8", path_str(&csv)])
        .status
        .success());
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 12);
    // stage 3, column 1 holds W_8^1 = (1/sqrt2, -1/sqrt2) in Q5.15
    assert_eq!(rows[9], vec!["3", "1", "23170", "-23170"]);
    assert_eq!(rows[5], vec!["2", "1", "0", "-32768"]);
}

#[test]
fn selftest_passes_and_honors_seed() {
    let out = Command::new(env!("CARGO_BIN_EXE_fftfold"))
        .args(["selftest", "--max-n", "32", "--frames", "3"])
        .env("FFTFOLD_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("seed 42"));
    assert!(text.contains("[PASS] degenerate_n2"));
    assert!(!text.contains("FAIL"));

    let out = Command::new(env!("CARGO_BIN_EXE_fftfold"))
        .args(["selftest", "--max-n", "8"])
        .env("FFTFOLD_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn batch_processes_every_file() {
    let dir = TempDir::new().unwrap();
    let inputs: Vec<PathBuf> = (0..4)
        .map(|i| gen(&dir, &format!("f{i}.json"), 16 << i, "random"))
        .collect();
    let out_dir = dir.path().join("out");
    let mut args = vec![
        "batch",
        "--jobs",
        "2",
        "--check",
        "--out-dir",
        path_str(&out_dir),
    ];
    args.extend(inputs.iter().map(|p| path_str(p)));
    let out = fftfold(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for (i, input) in inputs.iter().enumerate() {
        let r = report(&out_dir.join(input.file_name().unwrap()));
        assert_eq!(r["n"], 16 << i);
        assert!(r["max_abs_error"].as_f64().unwrap() <= r["tolerance"].as_f64().unwrap());
    }
}
