//! Verdict records returned by the hypothesis checks.

use serde::Serialize;

/// Outcome of scanning a defining ratio over a finite grid.
///
/// `best_constant` is the largest observed ratio (or the smallest admissible
/// parameter, for conditions of the `∃k` kind) and `witness` holds the grid
/// coordinates where it was attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub holds: bool,
    pub best_constant: f64,
    pub witness: Vec<f64>,
    pub grid: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<ConditionReport>,
}

impl ConditionReport {
    pub fn new(name: impl Into<String>, grid: impl Into<String>) -> Self {
        ConditionReport {
            name: name.into(),
            holds: true,
            best_constant: 0.0,
            witness: Vec::new(),
            grid: grid.into(),
            parts: Vec::new(),
        }
    }

    /// Record a ratio observed at `at`, keeping the first maximum in scan order.
    pub fn observe(&mut self, ratio: f64, at: &[f64]) {
        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
        if self.witness.is_empty() || ratio > self.best_constant {
            self.best_constant = ratio;
            self.witness = at.to_vec();
        }
    }

    /// Set `holds` from the recorded maximum and a cap.
    pub fn finish(mut self, cap: f64) -> Self {
        self.holds = self.best_constant.is_finite() && self.best_constant <= cap;
        self
    }

    /// Combine sub-verdicts: holds iff all hold, constant is the largest.
    pub fn combined(name: impl Into<String>, grid: impl Into<String>, parts: Vec<ConditionReport>) -> Self {
        let mut out = ConditionReport::new(name, grid);
        for p in &parts {
            out.observe(p.best_constant, &p.witness);
        }
        out.holds = parts.iter().all(|p| p.holds);
        out.parts = parts;
        out
    }
}

/// Geometric grid `{base^k : k = lo..=hi}`.
pub fn geometric_grid(base: f64, lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| base.powi(k)).collect()
}

/// The default scan grid `{2^k : k = -20..=20}`.
pub fn default_r_grid() -> Vec<f64> {
    geometric_grid(2.0, -20, 20)
}

/// Human-readable description of a grid stored in reports.
pub fn describe_grid(grid: &[f64]) -> String {
    match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => format!("{} points in [{a:e}, {b:e}]", grid.len()),
        _ => "empty grid".to_string(),
    }
}
