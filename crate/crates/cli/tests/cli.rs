use std::path::Path;
use std::process::{Command, Output};

fn pa_urn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pa-urn"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_row_count_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = pa_urn(&["simulate", "--n", "1000", "--d", "3", "--samples", "0", "--out", "a"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&dir.path().join("a/trajectory.csv"));
    assert_eq!(h, ["t", "x_0", "x_1", "x_2", "x_3", "x_bar"]);
    assert_eq!(rows.len(), 1001);
    assert_eq!(rows[1000][0].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn ensemble_histogram_counts_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = pa_urn(&["simulate", "--n", "50", "--samples", "10000", "--out", "."], dir.path());
    assert!(o.status.success());
    let (h, rows) = read_csv(&dir.path().join("histogram.csv"));
    assert_eq!(h.last().unwrap(), "runs");
    let total: u64 = rows.iter().map(|r| r.last().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 10_000);
    let s = json(&dir.path().join("summary.json"));
    assert_eq!(s["schema_version"], 1);
    let in_json: u64 = s["histogram"].as_array().unwrap().iter().map(|r| r["runs"].as_u64().unwrap()).sum();
    assert_eq!(in_json, 10_000);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["x", "y"] {
        let o = pa_urn(&["simulate", "--n", "300", "--seed", "42", "--samples", "100", "--out", out], dir.path());
        assert!(o.status.success());
    }
    for f in ["trajectory.csv", "histogram.csv", "summary.json"] {
        let a = std::fs::read(dir.path().join("x").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("y").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn lln_figure_one_slices() {
    let dir = tempfile::tempdir().unwrap();
    let o = pa_urn(&["lln", "--preset", "figure-one", "--d", "40", "--out", "."], dir.path());
    assert!(o.status.success());
    let (h, rows) = read_csv(&dir.path().join("lln.csv"));
    assert_eq!(h, ["t", "k", "value", "cumulative_value", "complement", "envelope_low", "envelope_high"]);
    let mut times: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    times.dedup();
    let times: Vec<f64> = times.iter().map(|t| t.parse().unwrap()).collect();
    assert_eq!(times, [0.01, 0.1, 1.0]);
    assert_eq!(rows.len(), 3 * 41);
    for r in &rows {
        let v: Vec<f64> = r[3..].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[2] <= v[0] + 1e-9 && v[0] <= v[3] + 1e-9);
    }
}

#[test]
fn lln_initial_slice_is_profile() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"command": "lln", "schedule": [{"t_start": 0.0, "p": 0.1, "beta": 2.0}],
            "profile": {"c": [0.3, 0.2, 0.1]}, "times": [0.0, 0.5], "d": 4}"#,
    )
    .unwrap();
    let o = pa_urn(&["lln", "--config", "c.json", "--out", "."], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&dir.path().join("lln.csv"));
    let expect = [0.3, 0.2, 0.1, 0.0, 0.0];
    for (r, e) in rows.iter().take(5).zip(expect) {
        assert_eq!(r[0].parse::<f64>().unwrap(), 0.0);
        assert!((r[2].parse::<f64>().unwrap() - e).abs() < 1e-15);
    }
}

#[test]
fn homogeneous_tail_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = pa_urn(&["lln", "--preset", "homogeneous", "--d", "250", "--times", "1", "--out", "."], dir.path());
    assert!(o.status.success());
    let (_, rows) = read_csv(&dir.path().join("lln.csv"));
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| (20..=200).contains(&r[1].parse::<usize>().unwrap()))
        .map(|r| (r[1].parse::<f64>().unwrap().ln(), r[4].parse::<f64>().unwrap().ln()))
        .collect();
    // least-squares slope of log complement against log k
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = num / den;
    assert!((slope + 2.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn envelope_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let o = pa_urn(&["envelope", "--preset", "figure-one", "--d", "10", "--out", "."], dir.path());
    assert!(o.status.success());
    let s = json(&dir.path().join("envelope.json"));
    assert_eq!(s["eta_exponent"], 10.0);
    assert_eq!(s["eta_prime_exponent"], 3.0);
}

#[test]
fn rate_presets() {
    let dir = tempfile::tempdir().unwrap();
    let ln2 = 2f64.ln();
    let o = pa_urn(&["rate", "--preset", "star", "--out", "star"], dir.path());
    assert!(o.status.success());
    let r = json(&dir.path().join("star/rate.json"));
    assert!((r["value"].as_f64().unwrap() - ln2).abs() < 1e-12);
    assert!((r["condensation_term"].as_f64().unwrap() - ln2).abs() < 1e-12);
    assert_eq!(r["schema_version"], 1);

    let o = pa_urn(&["rate", "--preset", "straight-road", "--out", "road"], dir.path());
    assert!(o.status.success());
    assert_eq!(json(&dir.path().join("road/rate.json"))["value"], "inf");

    let o = pa_urn(&["rate", "--preset", "lln", "--out", "lln"], dir.path());
    assert!(o.status.success());
    assert!(json(&dir.path().join("lln/rate.json"))["value"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn rate_from_knot_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.csv"), "t,x_0,x_bar\n0,0,0\n0.5,0.5,0\n1,1,0\n").unwrap();
    let o = pa_urn(&["rate", "--path", "p.csv", "--out", "."], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("rate.json"));
    assert!((r["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = pa_urn(&["rate", "--preset", "bogus", "--out", "."], dir.path());
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(dir.path().join("bad.json"), r#"{"schedule": [], "colour": 1}"#).unwrap();
    let o = pa_urn(&["simulate", "--config", "bad.json", "--out", "."], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = pa_urn(&["simulate", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(dir.path().join("empty.json"), r#"{"profile": {"c": []}}"#).unwrap();
    let o = pa_urn(&["simulate", "--config", "empty.json", "--out", "."], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_reduced_budget() {
    let dir = tempfile::tempdir().unwrap();
    let o = pa_urn(&["verify", "--budget", "reduced", "--out", "."], dir.path());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("2^-n: PASS"));
    assert!(text.contains("skipped: 9, 11"));
    let r = json(&dir.path().join("verify.json"));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["outcomes"].as_array().unwrap().len(), 11);
    // the literal weighted-sum clause of criterion 5 fails, so the exit code is 1
    let failed: Vec<u64> = r["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|o| o["status"] == "fail")
        .map(|o| o["id"].as_u64().unwrap())
        .collect();
    assert_eq!(failed, [5]);
    assert_eq!(o.status.code(), Some(1));
}
