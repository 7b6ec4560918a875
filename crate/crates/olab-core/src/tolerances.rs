//! Numerical tolerances and caps used across the library.
//!
//! Keeping them in one place makes the acceptance thresholds auditable.

/// Relative tolerance of the generic generalized-inverse bisection.
pub const INVERSE_REL_TOL: f64 = 1e-12;

/// Doubling cap for inverse brackets; beyond it the inverse is reported as infinite.
pub const INVERSE_BRACKET_CAP: f64 = 1.340_780_792_994_259_7e154; // 2^512

/// Relative tolerance of the Luxemburg bisection.
pub const LUXEMBURG_REL_TOL: f64 = 1e-10;

/// Relative tolerance of the adaptive Simpson rule.
pub const QUAD_REL_TOL: f64 = 1e-9;

/// A ratio above this value is treated as unbounded on a finite grid.
pub const CONDITION_CAP: f64 = 1e6;

/// Cap for almost-monotone and class constants of growth functions.
pub const CLASS_CAP: f64 = 1e4;

/// Relative slack absorbing floating rounding in grid comparisons that are exact in real arithmetic.
pub const ROUNDING_SLACK: f64 = 1e-12;

/// Absolute tolerance for the convergence of ball means toward their limit.
pub const SIGMA_ABS_TOL: f64 = 1e-6;

/// Allowed relative drift of a worst-case ratio between the two finest refinement levels.
pub const REFINEMENT_DRIFT: f64 = 0.05;

/// Number of nodes of the fixed log grid used to rectify non-convex Young profiles.
pub const RECTIFY_NODES: usize = 2048;

/// Binary exponent range of the rectification grid.
pub const RECTIFY_EXP2: (f64, f64) = (-32.0, 32.0);
