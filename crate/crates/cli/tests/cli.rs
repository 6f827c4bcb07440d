use qroutesim_layout::{check_layout, parse_layout_json, GridSpec};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn qroutesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qroutesim"))
        .args(args)
        .env_remove("QROUTESIM_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn counts_per_router() {
    for (scheme, want) in [("clifford", "20 16 30"), ("tcg-non-eraser", "2 6 8"), ("tcg-eraser", "6 6 12")] {
        let o = qroutesim(&["counts", "--scheme", scheme]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o).trim(), want);
    }
    let o = qroutesim(&["counts", "--scheme", "tcg-magic"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn counts_of_a_query_match_compile() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = qroutesim(&["counts", "--scheme", "tcg-eraser", "--layers", "2"]);
    assert!(o.status.success());
    let counts: Vec<u64> = stdout(&o).split_whitespace().map(|x| x.parse().unwrap()).collect();
    let o = qroutesim(&["compile", "--layers", "2", "--scheme", "tcg-eraser", "--out", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = summary(dir.path(), "compile");
    let got: Vec<u64> = s["summary"]["counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(got, counts);
    let circ = std::fs::read_to_string(dir.path().join("compile.circ")).unwrap();
    let parsed = qroutesim_gates::parse_circuit(&circ).unwrap();
    assert_eq!(qroutesim_routing::gate_counts(&parsed), (counts[0] as usize, counts[1] as usize, counts[2] as usize));
}

#[test]
fn compile_rejects_bad_combinations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = qroutesim(&["compile", "--scheme", "sp-tcg", "--mode", "full", "--out", d]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = qroutesim(&["compile", "--layers", "11", "--out", d]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn layout_fits_four_layers_on_the_device_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = qroutesim(&["layout", "--grid", "12x6", "--layers", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("layout-tree.json")).unwrap();
    let layout = parse_layout_json(&text).unwrap();
    assert!(check_layout(&GridSpec::new(12, 6), &layout).is_valid());
    assert_eq!(layout.len(), 15);
    let csv = std::fs::read_to_string(dir.path().join("layout.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "triangle,layer,role,row,col"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 4 * 15);
}

#[test]
fn layout_capacity_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for layers in ["5", "6"] {
        let o = qroutesim(&["layout", "--grid", "12x6", "--layers", layers, "--out", d]);
        assert_eq!(o.status.code(), Some(3), "{layers}: {}", stderr(&o));
        assert!(stderr(&o).contains("deepest that fits: 4"));
    }
}

#[test]
fn layout_reads_defect_masks() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("mask.txt");
    std::fs::write(&mask, "......\n..x...\n......\n...x..\n......\n......\n").unwrap();
    let out = dir.path().join("out");
    let o = qroutesim(&["layout", "--mask", mask.to_str().unwrap(), "--layers", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let layout = parse_layout_json(&std::fs::read_to_string(out.join("layout-tree.json")).unwrap()).unwrap();
    let g = GridSpec::from_mask("......\n..x...\n......\n...x..\n......\n......\n").unwrap();
    assert!(check_layout(&g, &layout).is_valid());
    std::fs::write(&mask, "..?\n...\n").unwrap();
    let o = qroutesim(&["layout", "--mask", mask.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 3\n\n[noise]\ng10 = 0.1\ng99 = 2\n").unwrap();
    let o = qroutesim(&["theta-scan", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 5") && err.contains("g99"), "{err}");

    std::fs::write(&cfg, "[rat]\ntrials = \"many\"\n").unwrap();
    let o = qroutesim(&["rat", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    std::fs::write(&cfg, "[noise]\nleakage = 1.5\n").unwrap();
    let o = qroutesim(&["rat", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("noise.leakage"));

    let o = qroutesim(&["rat", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_versioned_and_self_describing() {
    let dir = tempfile::tempdir().unwrap();
    let o = qroutesim(&["theta-scan", "--noiseless", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("theta-scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# qroutesim-schema v1"));
    assert_eq!(lines.next(), Some("# subcommand: theta-scan"));
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next(), Some("theta,p_l,p_r,p_i,sin2_theta"));
    assert_eq!(lines.count(), 101);
    let s = summary(dir.path(), "theta-scan");
    assert_eq!(s["schema"], "qroutesim-schema v1");
    assert_eq!(s["config"]["noise"]["enabled"], false);
    assert!(s["metadata"]["created_unix"].is_u64());
    assert!(s["summary"]["max_abs_p_l_minus_sin2"].as_f64().unwrap() < 1e-9);
}

#[test]
fn embedded_config_reproduces_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let o = qroutesim(&["rat", "--n-max", "4", "--trials", "3", "--shots", "200", "--seed", "11", "--out", first.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(first.join("rat.csv")).unwrap();
    let echoed = csv.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();
    let cfg = dir.path().join("echo.json");
    std::fs::write(&cfg, echoed).unwrap();
    let second = dir.path().join("b");
    let o = qroutesim(&["rat", "--config", cfg.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(second.join("rat.csv")).unwrap(), csv.as_bytes());
    // a different seed changes the sampled values
    let third = dir.path().join("c");
    let o = qroutesim(&["rat", "--config", cfg.to_str().unwrap(), "--seed", "12", "--out", third.to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(std::fs::read(third.join("rat.csv")).unwrap(), csv.as_bytes());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qroutesim"))
        .args(["noise-curves", "--points", "11"])
        .env("QROUTESIM_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("noise-curves.csv").exists());
}

#[test]
fn noise_curves_report_the_balance_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = qroutesim(&["noise-curves", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = summary(dir.path(), "noise-curves");
    let bp = s["summary"]["balance_point_us"].as_f64().unwrap();
    assert!((bp - 15.0 * 5f64.ln()).abs() < 1e-9);
    let csv = std::fs::read_to_string(dir.path().join("noise-curves.csv")).unwrap();
    assert!(csv.contains("# balance_point_us: "));
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("t_us"))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 601);
    assert_eq!(rows[0][1..], [1.0, 1.0, 1.0, 1.0, 1.0]);
    // post-selected |120⟩ ahead of |110⟩ until the balance point, behind after
    let before = rows.iter().find(|r| r[0] > 5.0).unwrap();
    let after = rows.iter().find(|r| r[0] > bp + 5.0).unwrap();
    assert!(before[2] > before[3] && after[2] < after[3]);
}

#[test]
fn floquet_calibration_recovers_pi() {
    let dir = tempfile::tempdir().unwrap();
    let start = (0.95 * std::f64::consts::PI).to_string();
    let o = qroutesim(&["floquet", "--noiseless", "--calibrate-from", &start, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = summary(dir.path(), "floquet");
    assert!((s["summary"]["cost"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let theta = s["summary"]["calibration"]["theta"].as_f64().unwrap();
    assert!((theta - std::f64::consts::PI).abs() < 1e-3, "{theta}");
}

#[test]
fn scans_qst_and_rat2_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = qroutesim(&["phi-scan", "--noiseless", "--out", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(summary(dir.path(), "phi-scan")["summary"]["fit_rms"].as_f64().unwrap() < 1e-9);

    let o = qroutesim(&["qst", "--noiseless", "--shots", "20000", "--out", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = summary(dir.path(), "qst");
    assert!((s["summary"]["exact"]["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let o = qroutesim(&["rat2", "--noiseless", "--n-max", "2", "--trials", "2", "--out", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("rat2.csv")).unwrap();
    for row in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let m: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((m - 1.0).abs() < 1e-9, "{row}");
    }
}
