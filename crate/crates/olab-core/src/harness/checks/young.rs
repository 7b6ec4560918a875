//! Grid-free checks on Young functions.

use serde_json::json;

use crate::error::Result;
use crate::young::YoungFunction;

use super::super::config::ExperimentConfig;
use super::super::outcome::{LevelOutcome, Scan, Witness};

/// Relative violation allowed by the inverse and product inequalities.
pub const INVERSE_TOL: f64 = 1e-9;

/// Number of scanned arguments per Young function.
pub const SCAN_POINTS: usize = 1000;

/// `SCAN_POINTS` log-spaced points on `[1e-6, 1e6]`.
pub fn scan_grid() -> Vec<f64> {
    (0..SCAN_POINTS)
        .map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / (SCAN_POINTS - 1) as f64))
        .collect()
}

/// The configured Young functions followed by a fixed list covering every family.
pub fn young_families(cfg: &ExperimentConfig) -> Result<Vec<YoungFunction>> {
    let mut out: Vec<YoungFunction> = Vec::new();
    let y = &cfg.young;
    for f in [Some(&y.phi), y.psi.as_ref(), y.theta.as_ref(), y.phi0.as_ref()].into_iter().flatten() {
        out.push(f.clone());
    }
    out.extend([
        YoungFunction::power(1.0)?,
        YoungFunction::power(1.5)?,
        YoungFunction::power(2.0)?,
        YoungFunction::power(3.0)?,
        YoungFunction::power_log(1.0, 1.0)?,
        YoungFunction::power_log(2.0, -0.5)?,
        YoungFunction::ExpMinusOne,
        YoungFunction::ExpConjugate,
        YoungFunction::LinearCap,
        YoungFunction::piecewise(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)], false)?,
        YoungFunction::piecewise(vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)], true)?,
        YoungFunction::scaled(YoungFunction::power(2.0)?, 3.0)?,
    ]);
    let mut unique: Vec<YoungFunction> = Vec::new();
    for f in out {
        if !unique.contains(&f) {
            unique.push(f);
        }
    }
    Ok(unique)
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 || (num.is_finite() && den == f64::INFINITY) {
        0.0
    } else {
        num / den
    }
}

/// `Φ(Φ⁻¹(u)) ≤ u ≤ Φ⁻¹(Φ(u))` on the scan grid for every family.
pub fn inverse_sandwich(cfg: &ExperimentConfig) -> Result<LevelOutcome> {
    let grid = scan_grid();
    let mut scan = Scan::new();
    let mut per_family = Vec::new();
    for (k, phi) in young_families(cfg)?.iter().enumerate() {
        let mut fam = Scan::new();
        for &u in &grid {
            let left = ratio(phi.eval(phi.inverse(u)), u);
            fam.observe(left, || Witness::field(phi.label()).with("u", u).with("side", 0.0).with("family", k as f64));
            let right = ratio(u, phi.inverse(phi.eval(u)));
            fam.observe(right, || Witness::field(phi.label()).with("u", u).with("side", 1.0).with("family", k as f64));
        }
        per_family.push(json!({ "family": phi.label(), "worst_ratio": fam.worst }));
        scan.merge(fam);
    }
    Ok(LevelOutcome::bounded(scan, 1.0 + INVERSE_TOL)
        .with_details(json!({ "grid": "1000 log-spaced points on [1e-6, 1e6]", "families": per_family })))
}

/// `t ≤ Φ⁻¹(t) Φ̃⁻¹(t) ≤ 2t` on the scan grid for every family and its complement.
pub fn compl_product(cfg: &ExperimentConfig) -> Result<LevelOutcome> {
    let grid = scan_grid();
    let mut scan = Scan::new();
    let mut per_family = Vec::new();
    for (k, phi) in young_families(cfg)?.iter().enumerate() {
        let conj = phi.complementary();
        let mut fam = Scan::new();
        let mut lower = 0.0f64;
        let mut upper = 0.0f64;
        for &t in &grid {
            let prod = phi.inverse(t) * conj.inverse(t);
            let lo = t / prod;
            let hi = prod / (2.0 * t);
            lower = lower.max(lo);
            upper = upper.max(hi);
            let label = || format!("{} / {}", phi.label(), conj.label());
            fam.observe(lo, || Witness::field(label()).with("t", t).with("side", 0.0).with("family", k as f64));
            fam.observe(hi, || Witness::field(label()).with("t", t).with("side", 1.0).with("family", k as f64));
        }
        per_family.push(json!({
            "family": phi.label(),
            "complement": conj.label(),
            "max_t_over_product": lower,
            "max_product_over_2t": upper,
        }));
        scan.merge(fam);
    }
    Ok(LevelOutcome::bounded(scan, 1.0 + INVERSE_TOL)
        .with_details(json!({ "grid": "1000 log-spaced points on [1e-6, 1e6]", "pairs": per_family })))
}
