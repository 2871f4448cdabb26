use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crooked_tiling::config::example_config;
use serde_json::Value;

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.json")
}

fn crooked(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crooked"))
        .args(args)
        .env_remove("CROOKED_TOL")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn validate_accepts_the_shipped_configs() {
    for name in ["example.json", "example-intervals.json"] {
        let path = example().with_file_name(name);
        let o = crooked(&["validate", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert_eq!(r["ok"], true);
        assert!((r["delta0"]["distance"].as_f64().unwrap() - 0.541_951_646_804_1).abs() < 1e-9);
        assert!((r["eps0"].as_f64().unwrap() - 0.517_638_090_205_041).abs() < 1e-12);
        assert_eq!(r["separations"].as_array().unwrap().len(), 6);
    }
}

#[test]
fn malformed_json_reports_its_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "bad.json", "{\n  \"m\": 2,\n  \"half_spaces\": [,]\n}\n");
    let o = crooked(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn missing_file_and_bad_usage_exit_1() {
    assert_eq!(code(&crooked(&["validate", "/nonexistent/config.json"])), 1);
    assert_eq!(code(&crooked(&["frobnicate"])), 1);
    assert_eq!(code(&crooked(&["locate", example().to_str().unwrap()])), 1);
    assert_eq!(code(&crooked(&["--help"])), 0);
}

#[test]
fn bad_tolerance_in_environment_exits_1() {
    let o = Command::new(env!("CARGO_BIN_EXE_crooked"))
        .args(["validate", example().to_str().unwrap()])
        .env("CROOKED_TOL", "tight")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn broken_pairing_exits_2_with_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = example_config(4.0);
    c.generators[0].translation = Some([0.0, 4.1, 0.0]);
    let p = write(&dir, "broken.json", &c.to_json());
    let o = crooked(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    assert_eq!(r["ok"], false);
    assert!((r["vertex_residual"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    assert!(String::from_utf8_lossy(&o.stderr).contains("vertex pairing residual"));
}

#[test]
fn non_isometry_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = example_config(4.0);
    c.generators[0].linear = Some([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    let p = write(&dir, "scaled.json", &c.to_json());
    assert_eq!(code(&crooked(&["validate", p.to_str().unwrap()])), 2);
}

#[test]
fn locate_inside_and_one_step_out() {
    let cfg = example();
    let o = crooked(&["locate", cfg.to_str().unwrap(), "--point", "0.5", "-0.25", "0.1"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["display"], "[]");
    assert_eq!(r["status"], "interior");

    // h_1 moves the origin, which lies in X, into H_1^+.
    let o = crooked(&["locate", cfg.to_str().unwrap(), "--point", "0", "4", "0"]);
    let r = json(&o);
    assert_eq!(code(&o), 0);
    assert_eq!(r["display"], "[1+]");
    for (c, e) in r["final_point"].as_array().unwrap().iter().zip([0.0, 0.0, 0.0]) {
        assert!((c.as_f64().unwrap() - e).abs() < 1e-12);
    }
}

#[test]
fn locate_exhausting_the_budget_exits_3() {
    let o = crooked(&["locate", example().to_str().unwrap(), "--point", "0", "60", "1", "--max-steps", "1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["status"], "not_located");
    assert!(String::from_utf8_lossy(&o.stderr).contains("not located"));
}

#[test]
fn locate_batch_places_every_point() {
    let o = crooked(&["locate", example().to_str().unwrap(), "--random", "1000", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["located"], 1000);
    assert!(r["max_round_trip_error"].as_f64().unwrap() < 1e-7);
}

fn svg_counts(svg: &str) -> usize {
    // Every coordinate must be a finite number.
    for chunk in svg.split("points=\"").skip(1) {
        let pts = &chunk[..chunk.find('"').unwrap()];
        for v in pts.split([' ', ',']) {
            assert!(v.parse::<f64>().unwrap().is_finite());
        }
    }
    svg.matches("<polyline").count()
}

fn assert_well_formed(svg: &str) {
    assert!(svg.starts_with("<?xml"));
    let mut depth = 0i64;
    for tag in svg.split('<').skip(1) {
        let tag = &tag[..tag.find('>').expect("tag closes")];
        if tag.starts_with('?') || tag.ends_with('/') {
            continue;
        }
        depth += if tag.starts_with('/') { -1 } else { 1 };
        assert!(depth >= 0);
    }
    assert_eq!(depth, 0);
}

#[test]
fn tile_counts_and_well_formedness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = example();
    for (depth, expected) in [("0", 4), ("1", 20), ("2", 68)] {
        let out = dir.path().join(format!("d{depth}.svg"));
        let o = crooked(&["tile", cfg.to_str().unwrap(), "--depth", depth, "--plane", "0.5", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let svg = std::fs::read_to_string(&out).unwrap();
        assert_well_formed(&svg);
        assert_eq!(svg_counts(&svg), expected);
        assert_eq!(json(&o)["zigzags"], expected);
    }
}

#[test]
fn tile_through_a_vertex_warns_and_moves() {
    let o = crooked(&["tile", example().to_str().unwrap(), "--depth", "0", "--plane", "0"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert_eq!(svg_counts(&String::from_utf8_lossy(&o.stdout)), 4);
}

#[test]
fn tile_is_byte_deterministic() {
    let cfg = example();
    let args = ["tile", cfg.to_str().unwrap(), "--depth", "2", "--plane", "1.5", "--viewport", "-10", "10", "-8", "8"];
    let (a, b) = (crooked(&args), crooked(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let cfg = example();
    let args = ["verify", cfg.to_str().unwrap(), "--samples", "300", "--seed", "42", "--csv", csv.to_str().unwrap()];
    let a = crooked(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let first_csv = std::fs::read(&csv).unwrap();
    let b = crooked(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first_csv, std::fs::read(&csv).unwrap());
    let r = json(&a);
    assert_eq!(r["rng"], "ChaCha8");
    assert_eq!(r["ok"], true);
    let text = String::from_utf8(first_csv).unwrap();
    assert!(text.starts_with("k,rho_Lk_Lk1,bound,pass\n"));
    assert!(text.lines().count() > 1);
}

#[test]
fn verify_with_tight_tolerance_blames_tolerance() {
    let o = crooked(&["--tol", "1e-15", "verify", example().to_str().unwrap(), "--samples", "300"]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failed.is_empty());
    for c in failed {
        assert_eq!(c["failure"], "tolerance", "{c}");
    }
}

#[test]
fn verify_names_the_failing_check_of_a_perturbed_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = example_config(4.0);
    c.generators[1].translation = Some([-4.5, 0.0, 0.0]);
    let p = write(&dir, "perturbed.json", &c.to_json());
    let o = crooked(&["verify", p.to_str().unwrap(), "--samples", "200"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("check pairing failed (mathematics)"), "{err}");
}
