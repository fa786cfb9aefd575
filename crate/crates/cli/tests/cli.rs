use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cesaro-lab"));
    c.env_remove("CESARO_LAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn orbit_writes_a_dyadic_history() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(
        dir.path(),
        "x.json",
        r#"{"prefix": [0, 1, 1, 1], "limit": 1}"#,
    );
    let out = dir.path().join("hist.csv");
    let o = run(&[
        "orbit",
        "--input",
        &x,
        "--nmax",
        "1024",
        "--N",
        "100000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# seed=0\n"));
    assert!(text.contains("# N=100000\n"));
    assert!(text.contains("n,value,sqrt_n_scaled,boundary_flag\n"));
    let ns: Vec<usize> = data_rows(&text)
        .iter()
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ns, vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]);
    // the limit gap keeps every value at 1
    for r in data_rows(&text) {
        assert_eq!(r.split(',').nth(1).unwrap(), "1");
    }
}

#[test]
fn rate_reads_an_orbit_history() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hist.csv");
    let o = run(&[
        "orbit",
        "--example",
        "random-range",
        "--N",
        "2000",
        "--nmax",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = run(&["rate", "--history", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["window"], serde_json::json!([8, 64]));
    assert!(v["result"]["slope"].as_f64().unwrap() < 0.0);
}

#[test]
fn laguerre_ratio_table() {
    let o = run(&["laguerre", "ratio", "--alpha", "0.25", "--nmax", "40"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("n,alpha,abs_integral,signed_closed_form,ratio\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 41);
    let r40: f64 = rows[40].split(',').nth(4).unwrap().parse().unwrap();
    assert!((r40 - 1.0).abs() < 0.1);
}

#[test]
fn malformed_flag_exits_with_usage() {
    let o = run(&["opnorm", "--N", "4096", "--nmax", "512", "--strde", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_successfully() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn input_errors_exit_with_one() {
    let o = run(&["range-check", "--input", "/nonexistent/x.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["laguerre", "signed", "--n", "3", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["borel", "integral", "--name", "log-slow"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    let o = run(&[
        "borel",
        "integral",
        "--name",
        "inv-square",
        "--abs-tol",
        "1e-20",
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn output_is_reproducible_across_runs_and_threads() {
    let args = ["opnorm", "--N", "300", "--nmax", "16", "--seed", "5"];
    let a = bin().args(args).arg("--threads").arg("1").output().unwrap();
    let b = bin()
        .args(args)
        .env("CESARO_LAB_THREADS", "3")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("# seed=5\n"));
    let c = run(&[
        "orbit",
        "--example",
        "random-range",
        "--N",
        "500",
        "--nmax",
        "8",
        "--seed",
        "9",
    ]);
    let d = run(&[
        "orbit",
        "--example",
        "random-range",
        "--N",
        "500",
        "--nmax",
        "8",
        "--seed",
        "9",
    ]);
    let e = run(&[
        "orbit",
        "--example",
        "random-range",
        "--N",
        "500",
        "--nmax",
        "8",
        "--seed",
        "10",
    ]);
    assert_eq!(c.stdout, d.stdout);
    assert_ne!(c.stdout, e.stdout);
}

#[test]
fn json_commands_embed_parameters() {
    let o = run(&[
        "range-check",
        "--example",
        "telescoping",
        "--N",
        "4096",
        "--order",
        "1",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["params"]["command"], "range-check");
    assert_eq!(v["params"]["N"], "4096");
    assert!(v["result"]["status"].is_string());
    let o = run(&["spectrum", "--z", "1,0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["location"], "boundary");
}

#[test]
fn preimage_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(
        dir.path(),
        "x.json",
        r#"{"prefix": [0, 0.5, [0.25, 1], -0.75], "limit": 0}"#,
    );
    let o = run(&["preimage", "--input", &x, "--y0", "2,1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        v["result"]["seq"]["prefix"][0],
        serde_json::json!([2.0, 1.0])
    );
}

#[test]
fn continuous_and_dual_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        r#"{"space": "interval", "kind": "poly", "coeffs": [0, 1]}"#,
    );
    let o = run(&[
        "continuous",
        "orbit",
        "--input",
        &f,
        "--nmax",
        "8",
        "--grid",
        "16",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o))
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>();
    assert_eq!(rows[0], "1,0.5,0.5,false");
    let o = run(&["continuous", "range", "--function", "invlog"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["status"], "non_member");
    let o = run(&["continuous", "preimage", "--input", &f, "--points", "4"]);
    assert!(stdout(&o).contains("\n0.5,0,0\n"));
    let o = run(&["dual", "orbit", "--coordinate", "5", "--nmax", "3"]);
    assert_eq!(
        data_rows(&stdout(&o))[1],
        "1,1.666666666666667,0.9999999999999999"
    );
}
