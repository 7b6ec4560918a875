//! Per-level outcomes, property reports and the witness records.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::field::{Ball, Window};

/// Final judgement of a property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Bounded at every level, but the constant moved too much between the
    /// two finest levels.
    Unstable,
    /// A limit required by the check did not settle.
    Nonconvergent,
}

/// Where a ratio was observed: enough to reproduce it with one `norm` or
/// `apply` call.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witness {
    pub field_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellWitness>,
    /// Extra scalars (λ, γ, r, s, function labels by index).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallWitness {
    pub center: [f64; 2],
    pub radius: f64,
    pub center2: [i64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellWitness {
    pub index: usize,
    pub center: [f64; 2],
}

impl Witness {
    pub fn field(id: impl Into<String>) -> Self {
        Witness { field_id: id.into(), ..Default::default() }
    }

    pub fn with_b(mut self, id: impl Into<String>) -> Self {
        self.b_id = Some(id.into());
        self
    }

    pub fn with_ball(mut self, w: &Window, b: &Ball) -> Self {
        self.ball = Some(BallWitness { center: b.center(w), radius: b.radius, center2: b.center2 });
        self
    }

    pub fn with_cell(mut self, w: &Window, idx: usize) -> Self {
        self.cell = Some(CellWitness { index: idx, center: w.center(idx) });
        self
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn with_note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }
}

/// Running maximum of a ratio with the witness of its first attainment.
#[derive(Clone, Debug, Default)]
pub struct Scan {
    pub worst: f64,
    pub witness: Option<Witness>,
    pub observations: usize,
}

impl Scan {
    pub fn new() -> Self {
        Scan::default()
    }

    /// Record `ratio`; NaN counts as `+∞`. The witness is built only when
    /// the maximum moves.
    pub fn observe<F: FnOnce() -> Witness>(&mut self, ratio: f64, witness: F) {
        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
        self.observations += 1;
        if self.witness.is_none() || ratio > self.worst {
            self.worst = ratio;
            self.witness = Some(witness());
        }
    }

    pub fn merge(&mut self, other: Scan) {
        if let Some(w) = other.witness {
            self.observations += other.observations - 1;
            self.observe(other.worst, || w);
        }
    }
}

/// Result of running a property at one refinement level.
#[derive(Clone, Debug, Serialize)]
pub struct LevelOutcome {
    /// Cells per axis; absent for grid-free properties.
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    pub pass: bool,
    pub converged: bool,
    pub worst_ratio: f64,
    /// The bound `worst_ratio` is compared with, when explicit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Secondary constants that are also tracked for stability.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub observations: usize,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    /// Wall time; kept out of the JSON so reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl LevelOutcome {
    /// Outcome from a scan compared with an explicit bound.
    pub fn bounded(scan: Scan, bound: f64) -> Self {
        LevelOutcome {
            cells: None,
            pass: scan.worst.is_finite() && scan.worst <= bound,
            converged: true,
            worst_ratio: scan.worst,
            bound: Some(bound),
            constants: BTreeMap::new(),
            witness: scan.witness,
            observations: scan.observations,
            details: Value::Null,
            seconds: 0.0,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn with_constant(mut self, name: &str, v: f64) -> Self {
        self.constants.insert(name.to_string(), v);
        self
    }

    /// Combine with a hard side check that must also hold.
    pub fn and(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }
}

/// Drift of the tracked constants between the two finest levels.
#[derive(Clone, Debug, Serialize)]
pub struct Stability {
    pub coarse_n: usize,
    pub fine_n: usize,
    pub drift: f64,
    pub tolerance: f64,
    /// The constant with the largest drift.
    pub constant: String,
}

/// Ratio of one refinement level in the trend table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrendPoint {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    pub worst_ratio: f64,
}

/// Everything known about one property after all levels ran.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    pub worst_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub trend: Vec<TrendPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<Stability>,
    pub levels: Vec<LevelOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_drift(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else if !m.is_finite() {
        if a == b {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - b).abs() / m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_keeps_first_maximum() {
        let mut s = Scan::new();
        s.observe(1.0, || Witness::field("a"));
        s.observe(3.0, || Witness::field("b"));
        s.observe(3.0, || Witness::field("c"));
        s.observe(f64::NAN, || Witness::field("d"));
        assert_eq!(s.worst, f64::INFINITY);
        assert_eq!(s.witness.unwrap().field_id, "d");
        assert_eq!(s.observations, 4);
    }

    #[test]
    fn drift_examples() {
        assert_eq!(relative_drift(0.0, 0.0), 0.0);
        assert!((relative_drift(1.0, 1.1) - 0.1 / 1.1).abs() < 1e-15);
        assert_eq!(relative_drift(f64::INFINITY, 1.0), f64::INFINITY);
    }
}
