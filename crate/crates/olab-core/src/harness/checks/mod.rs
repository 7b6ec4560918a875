//! Implementations of the catalog entries, grouped by subject.

pub mod dyadic;
pub mod norms;
pub mod operators;
pub mod young;

use crate::field::{BallShape, SampledField};
use crate::growth::{inverse_power_law, GrowthFunction};
use crate::quad::simpson;
use crate::tolerances::QUAD_REL_TOL;
use crate::young::YoungFunction;

/// `num / den`, with `0` whenever the numerator vanishes.
pub fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `f_B` on a precomputed shape.
pub fn mean_on(f: &SampledField, shape: &BallShape) -> f64 {
    f.ball_sum(shape) / shape.total
}

/// `(⨍_B |f - m|^p)^{1/p}`, exterior cells included.
pub fn deviation(f: &SampledField, shape: &BallShape, m: f64, p: f64) -> f64 {
    let vals = f.values();
    let mut s = 0.0;
    for span in &shape.spans {
        for &v in &vals[span.start..=span.end] {
            s += (v - m).abs().powf(p);
        }
    }
    s += shape.outside() * (f.exterior() - m).abs().powf(p);
    (s / shape.total).powf(1.0 / p)
}

/// `∫_{r1}^{r2} Φ⁻¹(φ(t)) dt/t`.
pub fn inverse_between(phi: &YoungFunction, vp: &GrowthFunction, r1: f64, r2: f64) -> f64 {
    if let Some(pl) = inverse_power_law(phi, vp.power_law()) {
        return pl.between(r1, r2);
    }
    simpson(&|u: f64| phi.inverse(vp.at_log(u)), r1.ln(), r2.ln(), QUAD_REL_TOL)
}
