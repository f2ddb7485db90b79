use std::path::Path;
use std::process::{Command, Output};

fn chirp_tls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chirp-tls"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Data rows of a CSV file with `#` comment lines.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn fig3_simulation_has_one_block_per_backend() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let out = chirp_tls(&[
        "simulate",
        "--preset",
        "fig3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&path);
    assert_eq!(
        header,
        ["method", "j", "t", "omega_t", "delta_t", "r_x", "r_y", "r_z", "p_x"]
    );
    let n = rows
        .iter()
        .map(|r| r[1].parse::<usize>().unwrap())
        .max()
        .unwrap();
    assert!((170..=180).contains(&n), "{n}");
    assert_eq!(rows.len(), 4 * (n + 1));
    for method in ["exact", "rwa", "magnus1", "magnus2"] {
        let block: Vec<_> = rows.iter().filter(|r| r[0] == method).collect();
        assert_eq!(block.len(), n + 1);
        for (j, row) in block.iter().enumerate() {
            assert_eq!(row[1], j.to_string());
            let rx = f(&row[5]);
            assert!((f(&row[8]) - (0.5 * (1.0 - rx)).clamp(0.0, 1.0)).abs() <= 1e-15);
        }
    }
    assert!(stderr(&out).contains("max |dP_x|"));
}

#[test]
fn undriven_system_keeps_its_population() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta0.csv");
    let out = chirp_tls(&[
        "simulate",
        "--preset",
        "fig3",
        "--eta",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_csv(&path);
    let p0 = f(&rows[0][8]);
    for row in &rows {
        assert!((f(&row[8]) - p0).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn missing_drive_frequency_is_a_config_error() {
    let out = chirp_tls(&[
        "simulate",
        "--delta0",
        "6",
        "--eta",
        "0.02",
        "--alpha",
        "0.001",
        "--n-periods",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("omega0_ghz"), "{}", stderr(&out));
}

#[test]
fn lz_sweep_limits_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lz.csv");
    let out = chirp_tls(&[
        "lz-sweep",
        "--delta0",
        "1",
        "--eta",
        "0.01",
        "--alpha-ratios",
        "0.1,1,100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "alpha,p_exact,p_formula,abs_err");
    let (_, rows) = read_csv(&path);
    let p: Vec<f64> = rows.iter().map(|r| f(&r[1])).collect();
    assert!(p[0] > 0.99);
    assert!((p[1] - (1.0 - (-std::f64::consts::FRAC_PI_2).exp())).abs() < 0.02);
    assert!(p[2] < 0.05);
}

#[test]
fn lz_sweep_requires_chirp_rates() {
    let out = chirp_tls(&["lz-sweep", "--preset", "fig3", "--alphas", ""]);
    assert_eq!(out.status.code(), Some(2));
    let out = chirp_tls(&["lz-sweep", "--preset", "fig3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha"));
}

#[test]
fn lz_sweep_rejects_narrow_window() {
    let out = chirp_tls(&[
        "lz-sweep",
        "--preset",
        "fig3",
        "--alpha-ratios",
        "1",
        "--window",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("20"), "{}", stderr(&out));
}

#[test]
fn bloch_siegert_reports_shifted_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bs.csv");
    let out = chirp_tls(&[
        "bloch-siegert",
        "--delta0",
        "1",
        "--eta",
        "0.05",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&path);
    assert_eq!(
        header,
        ["method", "omega0_peak", "shift", "predicted_shift"]
    );
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let ratio = f(&row[2]) / f(&row[3]);
        match row[0].as_str() {
            "exact" | "magnus2" => assert!((ratio - 1.0).abs() < 0.15, "{row:?}"),
            _ => assert!(ratio.abs() < 1e-6, "{row:?}"),
        }
    }
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = chirp_tls(&[
        "simulate",
        "--preset",
        "shalibo",
        "--eta",
        "0.02",
        "--dump-config",
    ]);
    assert!(first.status.success());
    let path = dir.path().join("run.toml");
    std::fs::write(&path, &first.stdout).unwrap();
    let second = chirp_tls(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--dump-config",
    ]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&first.stdout).contains("eta_ghz = 0.02"));
}

#[test]
fn command_line_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "eta_ghz = 0.05\nomega0_ghz = 5.0\n").unwrap();
    let out = chirp_tls(&[
        "simulate",
        "--preset",
        "fig3",
        "--config",
        path.to_str().unwrap(),
        "--eta",
        "0.01",
        "--dump-config",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("eta_ghz = 0.01"), "{text}");
    assert!(text.contains("omega0_ghz = 5.0"), "{text}");
    assert!(text.contains("delta0_ghz = 6.0"), "{text}");
}

#[test]
fn malformed_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "omega_zero = 5\n").unwrap();
    let out = chirp_tls(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("omega_zero"), "{}", stderr(&out));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = chirp_tls(&[
            "simulate",
            "--preset",
            "fig3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let text = std::fs::read_to_string(&path).unwrap();
        // the output path is echoed in the header
        text.replace(name, "")
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn integrator_failure_exits_with_numerical_code() {
    let out = chirp_tls(&[
        "simulate",
        "--delta0",
        "6",
        "--omega0",
        "6",
        "--alpha",
        "0",
        "--eta",
        "1e9",
        "--n-periods",
        "1",
        "--initial-step",
        "1",
        "--backends",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = chirp_tls(&[
        "simulate",
        "--preset",
        "fig3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
