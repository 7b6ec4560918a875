//! Exit codes, report files and witness reproduction through the binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use olab_core::field::{ball_mean, sample};
use olab_core::harness::default_bank;
use olab_core::{Ball, FieldSpec, SampledField, Window};
use serde_json::{json, Value};

fn olab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_olab")).args(args).output().expect("run olab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn preset(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "presets", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn write_config(dir: &Path, cfg: &Value) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, cfg.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn small_config(props: &[&str]) -> Value {
    json!({
        "name": "cli",
        "window": { "n": 1, "L": 4.0 },
        "refinement": [64],
        "seed": 2,
        "young": { "phi": { "family": "Power", "params": { "p": 2.0 } } },
        "growth": { "vp": { "family": "PowerNeg", "params": { "lambda": 1.0 } } },
        "properties": props,
    })
}

#[test]
fn empty_property_list_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config(&[]));
    let out = olab(&["experiment", &cfg, "--out", &dir.path().join("r").to_string_lossy()]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_function_json_exits_with_validation_code() {
    assert_eq!(code(&olab(&["check-young", "--phi", "{\"family\":\"Nope\"}"])), 1);
    assert_eq!(code(&olab(&["check-growth", "--g", "not json"])), 1);
}

#[test]
fn check_young_reports_the_complementary_function() {
    let out = olab(&["check-young", "--phi", r#"{"family":"Power","params":{"p":3}}"#]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["complementary"].as_str().unwrap().contains("1.5"), "{v}");
    assert_eq!(v["delta2"]["holds"], json!(true));
    assert_eq!(v["nabla2"]["holds"], json!(true));
}

#[test]
fn check_pairing_exit_code_follows_the_condition() {
    let inputs = |alpha: f64| {
        json!({
            "phi": { "family": "Power", "params": { "p": 2.0 } },
            "psi_y": { "family": "Power", "params": { "p": 4.0 } },
            "vp": { "family": "PowerNeg", "params": { "lambda": 1.0 } },
            "rho": { "family": "PowerPos", "params": { "alpha": alpha } },
        })
        .to_string()
    };
    assert_eq!(code(&olab(&["check-pairing", "--kind", "maximal", "--inputs", &inputs(0.25)])), 0);
    assert_eq!(code(&olab(&["check-pairing", "--kind", "maximal", "--inputs", &inputs(1.5)])), 3);
}

#[test]
fn verify_fails_goodlambda_on_a_non_dyadic_cell_size() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(&["CHI_NORM"]);
    cfg["window"]["L"] = json!(3.0);
    let path = write_config(dir.path(), &cfg);
    let out = olab(&["verify", "GOODLAMBDA", "--config", &path]);
    assert_eq!(code(&out), 3);
    assert_eq!(stdout_json(&out)["verdict"], json!("fail"));
}

#[test]
fn preset_experiment_passes_and_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = olab(&["experiment", &preset("cz-decreasing.json"), "--out", &d.to_string_lossy()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ja = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(ja, std::fs::read(b.join("report.json")).unwrap());
    assert!(a.join("summary.csv").exists());
}

#[test]
fn mean_bound_witness_is_reproduced_by_norm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config(&["MEAN_BOUND"]));
    let out = olab(&["verify", "MEAN_BOUND", "--config", &cfg]);
    assert_eq!(code(&out), 0);
    let rep = stdout_json(&out);
    let worst = rep["worst_ratio"].as_f64().unwrap();
    let wit = &rep["witness"];
    let idx: usize = wit["field_id"].as_str().unwrap()[1..3].parse().unwrap();
    let w = Window::new(1, 4.0, 64).unwrap();
    let mut spec = default_bank(4.0, 2)[idx].clone();
    if let FieldSpec::RandomStep { depth, .. } = &mut spec {
        *depth = (*depth).min(w.log2_cells());
    }
    let c2 = &wit["ball"]["center2"];
    let radius = wit["ball"]["radius"].as_f64().unwrap();
    let center2 = format!("{},{}", c2[0], c2[1]);
    let spec_json = serde_json::to_string(&spec).unwrap();
    let out = olab(&[
        "norm", "--spec", &spec_json, "--cells", "64", "--l", "4", "--kind", "ball", "--center2", &center2, "--radius",
        &radius.to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let norm = stdout_json(&out)["value"].as_f64().unwrap();
    let f = sample(&spec, &w).unwrap();
    let ball = Ball { center2: [c2[0].as_i64().unwrap(), c2[1].as_i64().unwrap()], radius };
    let mean = ball_mean(&f.abs(), &ball).unwrap();
    // Φ = t², φ(r) = 1/r: Φ⁻¹(φ(r)) = r^{-1/2}.
    let ratio = mean / (radius.powf(-0.5) * norm);
    assert!((ratio - worst).abs() <= 1e-12 * worst, "{ratio} vs {worst}");
}

#[test]
fn apply_writes_a_field_that_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("m.csv");
    let out = olab(&[
        "apply", "--spec", r#"{"kind":"Constant","c":1.0}"#, "--cells", "32", "--op", "M", "--out",
        &out_path.to_string_lossy(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = SampledField::load(&out_path).unwrap();
    assert!(m.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    let missing_b = olab(&[
        "apply", "--spec", r#"{"kind":"Constant","c":1.0}"#, "--cells", "32", "--op", "commT", "--out",
        &out_path.to_string_lossy(),
    ]);
    assert_eq!(code(&missing_b), 1);
}
