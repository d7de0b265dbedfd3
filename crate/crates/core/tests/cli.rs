use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_leomec");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn analytic_sweep_writes_one_row_per_point_and_task() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let o = run(&[
        "analytic",
        "--out",
        out.to_str().unwrap(),
        "--sweep",
        "a_s=500,800,1000",
        "--sweep",
        "N_s=200,2500",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&out);
    assert_eq!(rows.len(), 3 * 2 * 4);
    let t = column(&h, "t_mean");
    let a = column(&h, "altitude_km");
    assert_eq!(rows[8][a], "8.0000000000000000e2");
    for block in rows.chunks(8) {
        let low: f64 = block[0][t].parse().unwrap();
        let high: f64 = block[4][t].parse().unwrap();
        assert!(high < low, "delay must fall with more satellites");
    }
}

#[test]
fn compare_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("c{k}.csv"));
        let o = run(&[
            "compare",
            "--out",
            out.to_str().unwrap(),
            "--trials",
            "3000",
            "--seed",
            "7",
            "--threads",
            threads,
            "--sweep",
            "N_s=600,1000",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let other = dir.path().join("seed8.csv");
    run(&[
        "compare",
        "--out",
        other.to_str().unwrap(),
        "--trials",
        "3000",
        "--seed",
        "8",
        "--sweep",
        "N_s=600,1000",
    ]);
    assert_ne!(std::fs::read(other).unwrap(), outputs[0]);
}

#[test]
fn trial_dump_lists_every_trial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let dump = dir.path().join("d.csv");
    let o = run(&[
        "simulate",
        "--out",
        out.to_str().unwrap(),
        "--trials",
        "500",
        "--dump-trials",
        dump.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (h, rows) = read_csv(&dump);
    assert_eq!(h[0], "point");
    assert_eq!(rows.len(), 500);
}

#[test]
fn empty_sweep_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["analytic", "--out", out.to_str().unwrap(), "--sweep", "N_s="]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("constellation.satellites"));
    assert!(!out.exists());
}

#[test]
fn config_errors_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    assert_eq!(
        run(&["analytic", "--out", out, "--set", "link.alpha=1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["analytic", "--out", out, "--set", "link.no_such_key=1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["analytic", "--out", out, "--config", "/nonexistent/scenario.toml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["analytic", "--out", out, "--sweep", "N_s=1000,600"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["analytic", "--out", out, "--threads", "0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let o = run(&["preset", "--out", out, "--name", "iridium"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("starlink-1584"));
}

#[test]
fn config_file_and_overrides_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    let text = leomec::params::REFERENCE_TOML.replace("altitude_km = 500.0", "altitude_km = 700.0");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("a.csv");
    let o = run(&[
        "analytic",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "link.tau_db=3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (h, rows) = read_csv(&out);
    assert_eq!(rows[0][column(&h, "altitude_km")], "7.0000000000000000e2");
    assert_eq!(rows[0][column(&h, "tau_db")], "3.0000000000000000e0");
}

#[test]
fn unstable_tier_is_reported_in_row_not_aborted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let o = run(&["analytic", "--out", out.to_str().unwrap(), "--set", "link.cpu_cs_ghz=1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = read_csv(&out);
    assert!(
        rows[0][column(&h, "status")].contains("unstable"),
        "{}",
        rows[0][column(&h, "status")]
    );
}

#[test]
fn single_preset_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    assert!(run(&["preset", "--out", out.to_str().unwrap(), "--name", "starlink-1584"])
        .status
        .success());
    let (h, rows) = read_csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][column(&h, "altitude_km")], "5.5000000000000000e2");
    assert_eq!(rows[0][column(&h, "satellites")], "1584");
}

#[test]
fn server_only_baseline_is_flat_in_satellite_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    assert!(run(&["baselines", "--out", out.to_str().unwrap()]).status.success());
    let (h, rows) = read_csv(&out);
    let c = column(&h, "t_cs_only");
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[c] == rows[0][c]));
}
