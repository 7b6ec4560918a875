//! Numerical laboratory for Orlicz-Morrey and Orlicz-Campanato spaces.
//!
//! The crate provides a closed algebra of Young functions and growth
//! functions, grid-sampled fields on a window of ℝⁿ (n = 1, 2), Luxemburg
//! type ball norms and their suprema, the maximal, fractional and singular
//! integral operators with their commutators, and a catalog of named
//! properties that checks the corresponding inequalities on a bank of fields.

pub mod error;
pub mod field;
pub mod growth;
pub mod harness;
pub mod integral;
pub mod maximal;
pub mod norms;
pub mod parallel;
pub mod quad;
pub mod report;
pub mod tolerances;
pub mod young;

pub use error::{Error, Result};
pub use field::{Ball, BallFamily, BallPolicy, DyadicFamily, FieldSpec, SampledField, Window};
pub use growth::GrowthFunction;
pub use harness::{ExperimentConfig, Property, PropertyReport, Verdict};
pub use norms::NormResult;
pub use report::ConditionReport;
pub use young::{PiecewiseLinear, YoungFunction};
