use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

/// Copies a bundled scenario into `dir`, applying textual replacements.
fn variant(dir: &TempDir, name: &str, edits: &[(&str, &str)]) -> PathBuf {
    let mut text = fs::read_to_string(scenario(name)).unwrap();
    for (from, to) in edits {
        assert!(text.contains(from), "{from} not in {name}");
        text = text.replace(from, to);
    }
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn qtraj(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtraj"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_free_field_passes_and_is_euclidean_off_axis() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = qtraj(
        &["verify", s(&scenario("free_1d.scn")), "--out", s(&out)],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS"));
    let r = json(&out);
    assert!(r["max_qshje_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["points_evaluated"], 21 * 21 * 21);
    let census = r["signature_census"].as_object().unwrap();
    assert_eq!(census.len(), 1);
    assert_eq!(census["(+,+,+)"], 9261);
}

#[test]
fn verify_prints_the_report_without_out() {
    let dir = TempDir::new().unwrap();
    let path = variant(&dir, "free_1d.scn", &[("a = 2.0", "a = 1.0")]);
    let o = qtraj(&["verify", s(&path), "--grid", "5,5,5"], dir.path());
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["points_evaluated"], 125);
    assert_eq!(r["signature_census"]["(+,+,+)"], 125);
    assert_eq!(r["passed"], true);
}

#[test]
fn verify_numerov_harmonic_field() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("h.json");
    let o = qtraj(
        &[
            "verify",
            s(&scenario("harmonic_numerov.scn")),
            "--out",
            s(&out),
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let r = json(&out);
    assert!(r["max_qshje_residual"].as_f64().unwrap() < 1e-5);
    for axis in ["x", "y", "z"] {
        assert!(
            r["wronskian_drift"][axis].as_f64().unwrap() < 1e-9,
            "{axis}"
        );
    }
}

#[test]
fn plane_wave_trajectory_ends_on_the_straight_line() {
    let dir = TempDir::new().unwrap();
    let path = variant(&dir, "free_1d.scn", &[("a = 2.0", "a = 1.0")]);
    let o = qtraj(&["trajectory", s(&path), "--plot"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("free_1d.csv");
    let header = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(
        header,
        "t,x,y,z,vx,vy,vz,dS0dx,dS0dy,dS0dz,law_residual,energy_residual"
    );
    let last = csv_rows(&csv).pop().unwrap();
    assert_eq!(last[0], 5.0);
    assert!((last[1] - 5.0).abs() < 1e-9);
    let side = json(&dir.path().join("free_1d.termination.json"));
    assert_eq!(side["termination"]["type"], "completed");
    assert!(dir.path().join("free_1d.gp").exists());
}

#[test]
fn trajectory_residual_column_stays_small() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    let o = qtraj(
        &["trajectory", s(&scenario("free_1d.scn")), "--out", s(&csv)],
        dir.path(),
    );
    assert!(o.status.success());
    let rows = csv_rows(&csv);
    assert!(rows.len() > 2);
    assert!(rows
        .iter()
        .all(|r| r[10].abs() < 1e-9 && r[11].abs() < 1e-9));
    assert!(rows.iter().all(|r| r[2] == 0.0 && r[3] == 0.0));
}

#[test]
fn trajectory_from_a_node_reports_a_singularity() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("node.csv");
    let path = variant(
        &dir,
        "free_2d.scn",
        &[("a = 1.5", "a = 1.0"), ("b = 0.5", "b = 0.0")],
    );
    let r0 = format!(
        "{},{},0",
        std::f64::consts::FRAC_PI_2,
        -std::f64::consts::FRAC_PI_2
    );
    let o = qtraj(
        &["trajectory", s(&path), "--r0", &r0, "--out", s(&csv)],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    let side = json(&dir.path().join("node.termination.json"));
    assert_eq!(side["termination"]["type"], "singularity_event");
    assert_eq!(side["termination"]["t"], 0.0);
    assert!(csv_rows(&csv).is_empty());
}

#[test]
fn trajectory_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let o = qtraj(
            &[
                "trajectory",
                s(&scenario("oscillator.scn")),
                "--out",
                s(&csv),
            ],
            dir.path(),
        );
        assert!(o.status.success());
        fs::read(csv).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn metric_of_the_plane_wave_at_the_origin() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let o = qtraj(
        &[
            "metric",
            s(&scenario("free_1d.scn")),
            "--at",
            "0,0,0",
            "--out",
            s(&out),
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let p = &json(&out)["points"][0];
    let a: Vec<f64> = p["a_upper"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(a, [0.25, 1.0, 1.0]);
    let j = &p["jacobian"];
    assert_eq!(j[0][0], 0.5);
    assert_eq!(j[1][1], 1.0);
    assert_eq!(j[2][2], 1.0);
    assert!(p["residuals"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v.as_f64().unwrap() < 1e-14));
}

#[test]
fn metric_flags_non_riemannian_points() {
    let dir = TempDir::new().unwrap();
    let o = qtraj(&["metric", s(&scenario("forbidden.scn"))], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("signature (-,+,+)"));
    assert!(text.contains("not Riemannian"));
}

#[test]
fn invalid_scenarios_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    let path = variant(
        &dir,
        "free_1d.scn",
        &[
            ("a = 2.0", "a = 0.0"),
            ("mass = 1.0", "mass = 1.0\nspin = 3"),
        ],
    );
    let o = qtraj(&["verify", s(&path)], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("action.a"), "{err}");
    assert!(err.contains("spin"), "{err}");

    let path = variant(&dir, "free_1d.scn", &[("r0 = 0, 0, 0\n", "")]);
    let o = qtraj(&["trajectory", s(&path)], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_files_exit_with_code_4() {
    let dir = TempDir::new().unwrap();
    let o = qtraj(&["verify", s(&dir.path().join("absent.scn"))], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let o = qtraj(
        &[
            "trajectory",
            s(&scenario("free_1d.scn")),
            "--out",
            s(&dir.path().join("no/such/dir/t.csv")),
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
}
