//! Shared fixtures for the benchmarks.

use olab_core::field::{ball_family, sample};
use olab_core::{BallFamily, BallPolicy, FieldSpec, SampledField, Window};

/// A one-dimensional window of half-width 4 with `cells` cells.
pub fn window_1d(cells: usize) -> Window {
    Window::new(1, 4.0, cells).expect("valid window")
}

/// A two-dimensional window of half-width 2 with `cells` cells per axis.
pub fn window_2d(cells: usize) -> Window {
    Window::new(2, 2.0, cells).expect("valid window")
}

/// A rough test function: a random dyadic step plus a mild singularity.
pub fn test_field(w: &Window) -> SampledField {
    let spec = FieldSpec::Affine {
        terms: vec![
            (1.0, FieldSpec::RandomStep { seed: 7, depth: w.log2_cells().min(5) }),
            (0.5, FieldSpec::PowerSingular { beta: 0.25 }),
        ],
        offset: 0.0,
    };
    sample(&spec, w).expect("sampled field")
}

/// A tapered multiplier for commutator benchmarks.
pub fn multiplier(w: &Window) -> SampledField {
    let spec = FieldSpec::Tapered { inner: Box::new(FieldSpec::LogAbs), width: w.half_width / 4.0 };
    sample(&spec, w).expect("sampled multiplier")
}

/// The full default ball family, or every `stride`-th center.
pub fn family(w: &Window, stride: usize) -> BallFamily {
    ball_family(w, BallPolicy::strided(stride)).expect("ball family")
}
