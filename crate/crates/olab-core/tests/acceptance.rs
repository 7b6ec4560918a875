//! Acceptance run: one PASS/FAIL line per criterion with its wall time and
//! budget. Exits with status 1 when any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use olab_core::field::{sample, Region};
use olab_core::harness::{run_config, run_experiment};
use olab_core::integral::{commutator, frac_integral, CommutatorOp, KernelSpec};
use olab_core::{ExperimentConfig, FieldSpec, GrowthFunction, PropertyReport, Verdict, Window};

const PRESETS: [&str; 7] = [
    "morrey-bmo.json",
    "chanillo.json",
    "maximal-2-4.json",
    "maximal-1.5-3.json",
    "cz-decreasing.json",
    "ir-decreasing.json",
    "smoke-2d.json",
];

fn preset(name: &str) -> ExperimentConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "presets", name].iter().collect();
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Run `props` with the functions and levels of a preset.
fn run(name: &str, props: &[&str]) -> Vec<PropertyReport> {
    let mut cfg = preset(name);
    cfg.properties = props.iter().map(|s| s.to_string()).collect();
    run_config(&cfg).unwrap_or_else(|e| panic!("{name}: {e}")).properties
}

/// Conjunction of the verdicts with a short summary of each property.
fn judge(tag: &str, reports: &[PropertyReport]) -> (bool, String) {
    let ok = reports.iter().all(|r| r.verdict == Verdict::Pass);
    let summary = reports
        .iter()
        .map(|r| {
            let drift = r.stability.as_ref().map(|s| format!(", drift {:.3}", s.drift)).unwrap_or_default();
            format!("{tag}{} {:?} worst {:.4}{drift}", r.property, r.verdict, r.worst_ratio)
        })
        .collect::<Vec<_>>()
        .join("; ");
    (ok, summary)
}

fn merge(parts: Vec<(bool, String)>) -> (bool, String) {
    let ok = parts.iter().all(|p| p.0);
    (ok, parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("; "))
}

fn hilbert_commutator_spot_check() -> (bool, String) {
    let w = Window::new(1, 4.0, 256).unwrap();
    let b = sample(&FieldSpec::Coordinate { axis: 0 }, &w).unwrap();
    let chi = sample(&FieldSpec::Indicator { region: Region::Cube { center: [0.0, 0.0], half_side: 1.0 } }, &w).unwrap();
    let c = commutator(&CommutatorOp::Cz { kernel: KernelSpec::hilbert() }, &b, &chi).unwrap().field;
    let err = (0..w.cells)
        .filter(|&i| w.coord(i).abs() > 1.0)
        .map(|i| (c.values()[i] - std::f64::consts::FRAC_2_PI).abs())
        .fold(0.0, f64::max);
    (err <= 1e-3, format!("[b,H]chi off-support max error {err:.2e}"))
}

fn fractional_integral_spot_check() -> (bool, String) {
    let w = Window::new(1, 4.0, 256).unwrap();
    let alpha = 0.5;
    let chi = sample(&FieldSpec::Indicator { region: Region::Cube { center: [0.0, 0.0], half_side: 1.0 } }, &w).unwrap();
    let out = frac_integral(&chi, &GrowthFunction::power_pos(alpha)).unwrap().field;
    let exact = |x: f64| {
        let a = x.abs();
        if a < 1.0 {
            ((1.0 + a).powf(alpha) + (1.0 - a).powf(alpha)) / alpha
        } else {
            ((a + 1.0).powf(alpha) - (a - 1.0).powf(alpha)) / alpha
        }
    };
    let err = (0..w.cells).map(|i| (out.values()[i] - exact(w.coord(i))).abs()).fold(0.0, f64::max);
    (err <= 1e-4, format!("I_0.5 chi max error {err:.2e}"))
}

fn determinism() -> (bool, String) {
    let mut bad = Vec::new();
    for name in PRESETS {
        let cfg = preset(name);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let fa = run_experiment(&cfg, a.path()).unwrap();
        let fb = run_experiment(&cfg, b.path()).unwrap();
        if std::fs::read(&fa.json).unwrap() != std::fs::read(&fb.json).unwrap() {
            bad.push(name);
        }
    }
    if bad.is_empty() {
        (true, format!("{} presets byte-identical over two runs", PRESETS.len()))
    } else {
        (false, format!("reports differ for {bad:?}"))
    }
}

type Criterion = (&'static str, u64, Box<dyn Fn() -> (bool, String)>);

fn criteria() -> Vec<Criterion> {
    vec![
        ("INVERSE_SANDWICH", 1, Box::new(|| judge("", &run("morrey-bmo.json", &["INVERSE_SANDWICH"])))),
        ("COMPL_PRODUCT", 1, Box::new(|| judge("", &run("morrey-bmo.json", &["COMPL_PRODUCT"])))),
        (
            "CHI_NORM",
            5,
            Box::new(|| {
                let reports: Vec<PropertyReport> = PRESETS.iter().flat_map(|p| run(p, &["CHI_NORM"])).collect();
                let c = reports.iter().map(|r| r.worst_ratio).fold(f64::NEG_INFINITY, f64::max);
                let (ok, _) = judge("", &reports);
                (ok && c <= 8.0, format!("{} presets, single sandwich constant {c:.4} (cap 8)", reports.len()))
            }),
        ),
        ("HOLDER_BALL", 5, Box::new(|| judge("", &run("morrey-bmo.json", &["HOLDER_BALL"])))),
        ("GOODLAMBDA", 10, Box::new(|| judge("", &run("morrey-bmo.json", &["GOODLAMBDA"])))),
        ("DYADIC_MODULAR", 10, Box::new(|| judge("", &run("morrey-bmo.json", &["DYADIC_MODULAR"])))),
        (
            "MR_POINTWISE + MR_BOUNDED",
            60,
            Box::new(|| {
                merge(vec![
                    judge("(2,4,1) ", &run("maximal-2-4.json", &["MR_POINTWISE", "MR_BOUNDED"])),
                    judge("(1.5,3,1) ", &run("maximal-1.5-3.json", &["MR_POINTWISE", "MR_BOUNDED"])),
                ])
            }),
        ),
        (
            "SHARP_LOWER / SHARP_MORREY / BRIDGE",
            60,
            Box::new(|| judge("", &run("morrey-bmo.json", &["SHARP_LOWER", "SHARP_MORREY", "BRIDGE"]))),
        ),
        (
            "COMM_BOUND_CZ / COMM_BOUND_IR",
            300,
            Box::new(|| {
                merge(vec![
                    judge("", &run("morrey-bmo.json", &["COMM_BOUND_CZ"])),
                    judge("", &run("chanillo.json", &["COMM_BOUND_IR"])),
                    hilbert_commutator_spot_check(),
                    fractional_integral_spot_check(),
                ])
            }),
        ),
        (
            "TAIL_* / OSC_GROWTH / JN_EQUIV",
            60,
            Box::new(|| {
                merge(vec![
                    judge("", &run("morrey-bmo.json", &["TAIL_CZ", "OSC_GROWTH", "JN_EQUIV"])),
                    judge("", &run("chanillo.json", &["TAIL_IR", "TAIL_IR_PSI"])),
                ])
            }),
        ),
        ("Determinism", 600, Box::new(determinism)),
    ]
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria().into_iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        let status = if pass { "PASS" } else { "FAIL" };
        let late = if in_time { "" } else { " over budget" };
        println!(
            "{status} {:>2} {name}: {detail} [{:.2} s of {budget} s{late}]",
            i + 1,
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
