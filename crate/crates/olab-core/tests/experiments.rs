//! End-to-end runs of the property harness on small configurations.

use std::path::PathBuf;

use olab_core::harness::{run_config, run_experiment, EXIT_FAIL, EXIT_PASS};
use olab_core::{Error, ExperimentConfig, Verdict};
use serde_json::json;

fn preset(name: &str) -> ExperimentConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "presets", name].iter().collect();
    ExperimentConfig::load(&path).unwrap()
}

fn config(l: f64, refinement: &[usize], props: &[&str]) -> serde_json::Value {
    json!({
        "name": "it",
        "window": { "n": 1, "L": l },
        "refinement": refinement,
        "seed": 3,
        "young": { "phi": { "family": "Power", "params": { "p": 2.0 } } },
        "growth": { "vp": { "family": "PowerNeg", "params": { "lambda": 1.0 } } },
        "properties": props,
    })
}

#[test]
fn empty_property_list_is_a_validation_error() {
    let err = ExperimentConfig::from_json(&config(4.0, &[32], &[]).to_string()).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
}

#[test]
fn unknown_property_and_bad_refinement_are_rejected() {
    assert!(ExperimentConfig::from_json(&config(4.0, &[32], &["NOT_A_PROPERTY"]).to_string()).is_err());
    assert!(ExperimentConfig::from_json(&config(4.0, &[48], &["CHI_NORM"]).to_string()).is_err());
    assert!(ExperimentConfig::from_json(&config(4.0, &[64, 32], &["CHI_NORM"]).to_string()).is_err());
}

#[test]
fn goodlambda_needs_a_dyadic_cell_size() {
    let cfg = ExperimentConfig::from_json(&config(3.0, &[32], &["GOODLAMBDA"]).to_string()).unwrap();
    let rep = run_config(&cfg).unwrap();
    assert_eq!(rep.properties[0].verdict, Verdict::Fail);
    assert_eq!(rep.exit_code, EXIT_FAIL);
    assert!(rep.properties[0].error.as_deref().unwrap_or("").contains("power of two"));
}

#[test]
fn smoke_2d_passes_at_64() {
    let cfg = preset("smoke-2d.json");
    assert_eq!(cfg.window.n, 2);
    assert_eq!(cfg.refinement, vec![64]);
    let rep = run_config(&cfg).unwrap();
    for p in &rep.properties {
        assert_eq!(p.verdict, Verdict::Pass, "{}: {:?}", p.property, p.error);
        assert!(p.worst_ratio.is_finite(), "{}", p.property);
    }
    assert_eq!(rep.exit_code, EXIT_PASS);
}

#[test]
fn reports_are_written_and_reproducible() {
    let cfg = ExperimentConfig::from_json(&config(4.0, &[32, 64], &["CHI_NORM", "HOLDER_BALL", "SHARP_LOWER"]).to_string())
        .unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_experiment(&cfg, a.path()).unwrap();
    let rb = run_experiment(&cfg, b.path()).unwrap();
    assert_eq!(ra.report.exit_code, EXIT_PASS);
    assert_eq!(std::fs::read(&ra.json).unwrap(), std::fs::read(&rb.json).unwrap());
    let csv = std::fs::read_to_string(&ra.csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "property,N,pass,worst_ratio,witness_id,seconds");
    // Two levels for each of the three properties.
    assert_eq!(lines.count(), 6);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&ra.json).unwrap()).unwrap();
    assert_eq!(v["properties"].as_array().unwrap().len(), 3);
    assert!(!std::fs::read_to_string(&ra.json).unwrap().contains("seconds"));
}

#[test]
fn a_different_seed_changes_the_random_bank() {
    let mk = |seed: u64| {
        let mut c = config(4.0, &[64], &["HOLDER_BALL"]);
        c["seed"] = json!(seed);
        let cfg = ExperimentConfig::from_json(&c.to_string()).unwrap();
        serde_json::to_string(&run_config(&cfg).unwrap().properties).unwrap()
    };
    assert_eq!(mk(5), mk(5));
    assert_ne!(mk(5), mk(6));
}
