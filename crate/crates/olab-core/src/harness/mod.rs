//! The property catalog, empirical operator norms and end-to-end experiments.
//!
//! A property runs at every refinement level of a configuration. Each level
//! yields a worst ratio with its witness; the verdict combines the levels and,
//! for properties with an unspecified constant, the drift of that constant
//! between the two finest levels.

pub mod bank;
pub mod catalog;
pub mod checks;
pub mod config;
pub mod empirical;
pub mod outcome;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};

pub use bank::{default_b_bank, default_bank, BankField, Level};
pub use catalog::{Kind, Need, Property};
pub use config::{ExperimentConfig, OperatorKind, Tolerances};
pub use empirical::{empirical_norm, FieldRatio, NormSpec, RatioReport};
pub use outcome::{relative_drift, LevelOutcome, PropertyReport, Scan, Stability, TrendPoint, Verdict, Witness};

/// Exit status of an experiment whose properties all pass.
pub const EXIT_PASS: i32 = 0;
/// Exit status for configuration and validation errors.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status when a property is unstable or a limit did not settle.
pub const EXIT_NONCONVERGENT: i32 = 2;
/// Exit status when a property fails.
pub const EXIT_FAIL: i32 = 3;

/// Run one property at one refinement level.
pub fn run_level(prop: Property, lv: &Level) -> Result<LevelOutcome> {
    use checks::{dyadic, norms, operators, young};
    use Property::*;
    match prop {
        InverseSandwich => young::inverse_sandwich(lv.cfg),
        ComplProduct => young::compl_product(lv.cfg),
        ChiNorm => norms::chi_norm(lv),
        HolderBall => norms::holder_ball(lv),
        MeanBound => norms::mean_bound(lv),
        GoodLambda => dyadic::good_lambda(lv),
        DyadicModular => dyadic::dyadic_modular(lv),
        SharpLower => norms::sharp_lower(lv),
        SharpEquiv => norms::sharp_equiv(lv),
        SharpMorrey => norms::sharp_morrey(lv),
        Bridge => norms::bridge(lv),
        JnEquiv => norms::jn_equiv(lv),
        Chain => norms::chain(lv),
        OscGrowth => norms::osc_growth(lv),
        TailCz => operators::tail_cz(lv),
        TailIr => operators::tail_ir(lv),
        TailIrPsi => operators::tail_ir_psi(lv),
        MrPointwise => operators::mr_pointwise(lv),
        MrBounded => operators::mr_bounded(lv),
        CommPwCz => operators::comm_pw_cz(lv),
        CommPwIr => operators::comm_pw_ir(lv),
        MeanVanish => operators::mean_vanish(lv),
        CommBoundCz => operators::comm_bound_cz(lv),
        CommBoundIr => operators::comm_bound_ir(lv),
        CommBoundCzDec => operators::comm_bound_cz_dec(lv),
        CommBoundIrDec => operators::comm_bound_ir_dec(lv),
        NecessityRatio => operators::necessity_ratio(lv),
    }
}

fn grid_free(prop: Property, cfg: &ExperimentConfig) -> Result<LevelOutcome> {
    match prop {
        Property::InverseSandwich => checks::young::inverse_sandwich(cfg),
        Property::ComplProduct => checks::young::compl_product(cfg),
        _ => unreachable!("only the Young function scans are grid free"),
    }
}

fn failed_report(prop: Property, levels: Vec<LevelOutcome>, err: &Error) -> PropertyReport {
    let verdict = match err {
        Error::Divergent(_) => Verdict::Nonconvergent,
        _ => Verdict::Fail,
    };
    PropertyReport {
        property: prop.name().to_string(),
        verdict,
        worst_ratio: f64::NAN,
        witness: Some(Witness::field("").with_note(err.to_string())),
        trend: levels.iter().map(|l| TrendPoint { cells: l.cells, worst_ratio: l.worst_ratio }).collect(),
        stability: None,
        levels,
        error: Some(err.to_string()),
    }
}

/// Largest relative drift of the tracked constants between two levels.
fn stability(coarse: &LevelOutcome, fine: &LevelOutcome, tolerance: f64) -> Stability {
    let mut worst = ("worst_ratio".to_string(), relative_drift(coarse.worst_ratio, fine.worst_ratio));
    for (name, &v) in &fine.constants {
        if let Some(&u) = coarse.constants.get(name) {
            let d = relative_drift(u, v);
            if d > worst.1 {
                worst = (name.clone(), d);
            }
        }
    }
    Stability {
        coarse_n: coarse.cells.unwrap_or(0),
        fine_n: fine.cells.unwrap_or(0),
        drift: worst.1,
        tolerance,
        constant: worst.0,
    }
}

/// Run a property across all refinement levels of `cfg` and judge it.
pub fn run_property(prop: Property, cfg: &ExperimentConfig) -> PropertyReport {
    let mut levels = Vec::new();
    if prop.level_free() {
        let t = Instant::now();
        match grid_free(prop, cfg) {
            Ok(mut out) => {
                out.seconds = t.elapsed().as_secs_f64();
                levels.push(out);
            }
            Err(e) => return failed_report(prop, levels, &e),
        }
    } else {
        let windows = match cfg.windows() {
            Ok(w) => w,
            Err(e) => return failed_report(prop, levels, &e),
        };
        for w in windows {
            let t = Instant::now();
            let res = Level::new(cfg, w).and_then(|lv| run_level(prop, &lv));
            match res {
                Ok(mut out) => {
                    out.cells = Some(w.cells);
                    out.seconds = t.elapsed().as_secs_f64();
                    levels.push(out);
                }
                Err(e) => return failed_report(prop, levels, &e),
            }
        }
    }
    judge(prop, cfg, levels)
}

fn judge(prop: Property, cfg: &ExperimentConfig, levels: Vec<LevelOutcome>) -> PropertyReport {
    let trend = levels.iter().map(|l| TrendPoint { cells: l.cells, worst_ratio: l.worst_ratio }).collect();
    let all_pass = levels.iter().all(|l| l.pass);
    let all_converged = levels.iter().all(|l| l.converged);
    let stability = match prop.kind() {
        Kind::Constant { commutator } if levels.len() >= 2 => {
            let tol = if commutator { cfg.tolerances.commutator_stability } else { cfg.tolerances.stability };
            let k = levels.len();
            Some(stability(&levels[k - 2], &levels[k - 1], tol))
        }
        _ => None,
    };
    let stable = stability.as_ref().is_none_or(|s| s.drift <= s.tolerance);
    let verdict = if !all_pass {
        Verdict::Fail
    } else if !all_converged {
        Verdict::Nonconvergent
    } else if !stable {
        Verdict::Unstable
    } else {
        Verdict::Pass
    };
    let worst = levels.iter().map(|l| l.worst_ratio).fold(f64::NEG_INFINITY, |a, b| if b.is_nan() || b > a { b } else { a });
    // The witness of the first failing level, else of the level with the worst ratio.
    let witness = levels
        .iter()
        .find(|l| !l.pass)
        .or_else(|| levels.iter().find(|l| l.worst_ratio == worst || l.worst_ratio.is_nan()))
        .and_then(|l| l.witness.clone());
    PropertyReport {
        property: prop.name().to_string(),
        verdict,
        worst_ratio: worst,
        witness,
        trend,
        stability,
        levels,
        error: None,
    }
}

/// Exit status for a set of verdicts: failures dominate instability.
pub fn exit_code(reports: &[PropertyReport]) -> i32 {
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        EXIT_FAIL
    } else if reports.iter().any(|r| r.verdict != Verdict::Pass) {
        EXIT_NONCONVERGENT
    } else {
        EXIT_PASS
    }
}

/// The full JSON report of an experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: ExperimentConfig,
    pub exit_code: i32,
    pub properties: Vec<PropertyReport>,
}

/// Paths written by [`run_experiment`].
#[derive(Clone, Debug)]
pub struct ExperimentFiles {
    pub report: ExperimentReport,
    pub json: PathBuf,
    pub csv: PathBuf,
}

/// Run every listed property of a validated configuration.
pub fn run_config(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let props = cfg.property_list()?;
    let reports: Vec<PropertyReport> = props.iter().map(|&p| run_property(p, cfg)).collect();
    Ok(ExperimentReport { name: cfg.name.clone(), config: cfg.clone(), exit_code: exit_code(&reports), properties: reports })
}

/// `report.json` (deterministic for a fixed config and seed) and `summary.csv`
/// with one row per property and level.
pub fn write_reports(report: &ExperimentReport, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir)?;
    let json = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(&json, text)?;
    let csv_path = out_dir.join("summary.csv");
    let mut wr = csv::Writer::from_path(&csv_path).map_err(csv_error)?;
    wr.write_record(["property", "N", "pass", "worst_ratio", "witness_id", "seconds"]).map_err(csv_error)?;
    for p in &report.properties {
        if p.levels.is_empty() {
            let wid = p.witness.as_ref().map(|w| w.field_id.clone()).unwrap_or_default();
            wr.write_record([p.property.as_str(), "", "false", &format!("{}", p.worst_ratio), &wid, ""])
                .map_err(csv_error)?;
        }
        for l in &p.levels {
            let n = l.cells.map(|c| c.to_string()).unwrap_or_default();
            let wid = l.witness.as_ref().map(|w| w.field_id.clone()).unwrap_or_default();
            wr.write_record([
                p.property.clone(),
                n,
                l.pass.to_string(),
                format!("{}", l.worst_ratio),
                wid,
                format!("{:.6}", l.seconds),
            ])
            .map_err(csv_error)?;
        }
    }
    wr.flush()?;
    Ok((json, csv_path))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Load, run and write an experiment.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentFiles> {
    let report = run_config(cfg)?;
    let (json, csv) = write_reports(&report, out_dir)?;
    Ok(ExperimentFiles { report, json, csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(props: &[&str]) -> ExperimentConfig {
        let text = serde_json::json!({
            "name": "unit",
            "window": { "n": 1, "L": 4.0 },
            "refinement": [32, 64],
            "young": { "phi": { "family": "Power", "params": { "p": 2.0 } } },
            "growth": { "vp": { "family": "PowerNeg", "params": { "lambda": 1.0 } } },
            "properties": props,
        });
        ExperimentConfig::from_json(&text.to_string()).unwrap()
    }

    #[test]
    fn exit_code_precedence() {
        let mk = |v| PropertyReport {
            property: "X".into(),
            verdict: v,
            worst_ratio: 1.0,
            witness: None,
            trend: vec![],
            stability: None,
            levels: vec![],
            error: None,
        };
        assert_eq!(exit_code(&[mk(Verdict::Pass)]), EXIT_PASS);
        assert_eq!(exit_code(&[mk(Verdict::Pass), mk(Verdict::Unstable)]), EXIT_NONCONVERGENT);
        assert_eq!(exit_code(&[mk(Verdict::Nonconvergent), mk(Verdict::Fail)]), EXIT_FAIL);
    }

    #[test]
    fn grid_free_properties_run_once() {
        let cfg = base(&["INVERSE_SANDWICH"]);
        let r = run_property(Property::InverseSandwich, &cfg);
        assert_eq!(r.levels.len(), 1);
        assert!(r.levels[0].cells.is_none());
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn constant_field_sharp_lower_is_trivial() {
        let mut cfg = base(&["SHARP_LOWER"]);
        cfg.bank = Some(vec![crate::field::FieldSpec::Constant { c: 3.0 }]);
        let r = run_property(Property::SharpLower, &cfg);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.worst_ratio, 0.0);
    }
}
