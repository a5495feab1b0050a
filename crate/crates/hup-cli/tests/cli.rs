//! End-to-end checks of the `hup` binary: exit codes, file outputs,
//! determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hup"))
        .args(args)
        .output()
        .expect("spawn hup")
}

fn write_gaussian_measure(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("gauss.json");
    fs::write(
        &p,
        r#"{"label":"unit gaussian","density":{"kind":"gaussian","width":1.0}}"#,
    )
    .unwrap();
    p
}

#[test]
fn region_emits_grid_and_figure_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("r1");
    let out2 = dir.path().join("r2");
    for out in [&out1, &out2] {
        let o = hup(&["region", "--grid-n", "60", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv1 = fs::read(out1.join("region.csv")).unwrap();
    let csv2 = fs::read(out2.join("region.csv")).unwrap();
    assert_eq!(csv1, csv2, "region runs must be byte-identical");

    let text = String::from_utf8(csv1).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,beta,in_A,c_lemma");
    assert_eq!(lines.len(), 1 + 60 * 60);
    // The near-origin corner lies inside A, the far corner outside.
    assert!(lines[1].ends_with("true,1"), "corner row: {}", lines[1]);
    assert!(lines.last().unwrap().contains("false"));
    let svg = fs::read_to_string(out1.join("region.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    assert!(fs::metadata(out1.join("config.json")).is_ok());
}

#[test]
fn region_rejects_tiny_grids() {
    let dir = tempfile::tempdir().unwrap();
    let o = hup(&[
        "region",
        "--grid-n",
        "10",
        "--out",
        dir.path().join("r").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_identity_passes_for_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let measure = write_gaussian_measure(dir.path());
    let out = dir.path().join("v");
    let o = hup(&[
        "verify",
        "--measure",
        measure.to_str().unwrap(),
        "--mode",
        "identity",
        "--points",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_failed_numeric_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let measure = write_gaussian_measure(dir.path());
    // A residual threshold no finite-difference stencil can meet.
    let o = hup(&[
        "verify",
        "--measure",
        measure.to_str().unwrap(),
        "--mode",
        "residual",
        "--points",
        "2",
        "--threshold",
        "1e-30",
        "--out",
        dir.path().join("v").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_rejects_malformed_measure_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ this is not json").unwrap();
    let o = hup(&[
        "verify",
        "--measure",
        bad.to_str().unwrap(),
        "--mode",
        "identity",
        "--out",
        dir.path().join("v").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_unknown_mode_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let measure = write_gaussian_measure(dir.path());
    let o = hup(&[
        "verify",
        "--measure",
        measure.to_str().unwrap(),
        "--mode",
        "nonsense",
        "--out",
        dir.path().join("v").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bootstrap_trajectory_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bs");
    let o = hup(&[
        "bootstrap",
        "--alpha",
        "0.2",
        "--beta",
        "0.2",
        "--c",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "step,j,k");
    assert_eq!(lines.next().unwrap(), "0,2,6");
    assert_eq!(lines.next().unwrap(), "1,22,86");
    assert!(csv.trim_end().ends_with("# verdict: diverged"));

    // α + β = 1 violates the threshold formula's domain.
    let o = hup(&[
        "bootstrap",
        "--alpha",
        "0.5",
        "--beta",
        "0.5",
        "--out",
        dir.path().join("bs2").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn counterexample_small_run_and_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cx");
    let o = hup(&[
        "counterexample",
        "--n-max",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["mass"].as_f64().unwrap() > 0.0);
    assert!(report["max_abs"].as_f64().unwrap() < 1e-9);
    assert!(report["second_line_max"].as_f64().unwrap() >= 1e-3);
    let csv = fs::read_to_string(out.join("lambda_abs.csv")).unwrap();
    assert!(csv.starts_with("xi,eta,abs,est_error\n"));

    let o = hup(&[
        "counterexample",
        "--r",
        "1.5",
        "--c2",
        "1.0",
        "--out",
        dir.path().join("cx2").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn lambda_points_and_moebius_map() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"branches":[{"line":{"type":"through_origin","slope":2.0},"c":1.0,"exponent":-0.4,"start_index":1}]}"#,
    )
    .unwrap();
    let out = dir.path().join("lam");
    let o = hup(&[
        "lambda",
        "--spec",
        spec.to_str().unwrap(),
        "--n-max",
        "5",
        "--map",
        "0,1,-1,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let pts = fs::read_to_string(out.join("points.csv")).unwrap();
    assert_eq!(pts.lines().count(), 1 + 10);
    // The inversion sends the through-origin branch onto the vertical pair.
    let mapped: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("mapped_spec.json")).unwrap()).unwrap();
    let branch = &mapped["branches"][0];
    assert!(branch["line"]["type"] == "vertical");

    // A spec whose points hit the pole must fail with exit 3.
    let spec2 = dir.path().join("spec2.json");
    fs::write(
        &spec2,
        r#"{"branches":[{"line":{"type":"horizontal","height":0.0},"c":1.0,"exponent":0.5,"start_index":0}]}"#,
    )
    .unwrap();
    let o = hup(&[
        "lambda",
        "--spec",
        spec2.to_str().unwrap(),
        "--map",
        "0,1,-1,0",
        "--out",
        dir.path().join("lam2").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn eval_grid_has_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let measure = write_gaussian_measure(dir.path());
    let out = dir.path().join("ev");
    let o = hup(&[
        "eval",
        "--measure",
        measure.to_str().unwrap(),
        "--xi-n",
        "5",
        "--eta-n",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("grid.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "xi,eta,re,im,abs,est_error");
    assert_eq!(lines.count(), 20);
    // |μ̂| never exceeds the unit mass.
    for line in csv.lines().skip(1) {
        let abs: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!(abs <= 1.0 + 1e-9);
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("r");
    fs::write(
        &cfg,
        format!(
            r#"{{"grid_n": 55, "svg": false, "out": "{}"}}"#,
            out.display()
        ),
    )
    .unwrap();
    let o = hup(&["region", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("region.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 55 * 55);
    assert!(
        fs::metadata(out.join("region.svg")).is_err(),
        "svg disabled by config"
    );

    // Flag overrides the config's grid_n.
    let out2 = dir.path().join("r2");
    let cfg2 = dir.path().join("run2.json");
    fs::write(
        &cfg2,
        format!(r#"{{"grid_n": 55, "out": "{}"}}"#, out2.display()),
    )
    .unwrap();
    let o = hup(&[
        "region",
        "--config",
        cfg2.to_str().unwrap(),
        "--grid-n",
        "60",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out2.join("region.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 60 * 60);
}

#[test]
fn hup_threads_env_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let measure = write_gaussian_measure(dir.path());
    let o = Command::new(env!("CARGO_BIN_EXE_hup"))
        .env("HUP_THREADS", "1")
        .args([
            "eval",
            "--measure",
            measure.to_str().unwrap(),
            "--xi-n",
            "3",
            "--eta-n",
            "3",
            "--out",
            dir.path().join("ev").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
