//! Modulars, Luxemburg ball norms, Orlicz-Morrey and Orlicz-Campanato norms,
//! the classical p-Campanato functional and the limit σ(f) of ball means.

use serde::Serialize;

use crate::error::Result;
use crate::field::{Ball, BallFamily, BallShape, SampledField, Window};
use crate::growth::GrowthFunction;
use crate::parallel;
use crate::tolerances::{LUXEMBURG_REL_TOL, SIGMA_ABS_TOL};
use crate::young::YoungFunction;

/// Value of a norm together with the place where a supremum was attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub attaining_ball: Option<Ball>,
    pub attaining_index: Option<usize>,
    pub bisection_iterations: usize,
    /// Description of the ball family for sup-type norms.
    pub family: Option<String>,
}

impl NormResult {
    fn single(value: f64, ball: Ball, iterations: usize) -> Self {
        NormResult { value, attaining_ball: Some(ball), attaining_index: None, bisection_iterations: iterations, family: None }
    }
}

/// Absolute values of a function on the lattice cells of one ball: the window
/// cells listed one by one and the remaining cells sharing a single value.
#[derive(Clone, Debug, PartialEq)]
pub struct BallSample {
    pub inside: Vec<f64>,
    pub outside_count: f64,
    pub outside_value: f64,
    pub total: f64,
}

impl BallSample {
    /// `|f|` on the ball.
    pub fn of(f: &SampledField, shape: &BallShape) -> Self {
        BallSample {
            inside: f.ball_values(shape).map(f64::abs).collect(),
            outside_count: shape.outside(),
            outside_value: f.exterior().abs(),
            total: shape.total,
        }
    }

    /// `|f - f_B|` on the ball.
    pub fn oscillation(f: &SampledField, shape: &BallShape) -> Self {
        let m = f.ball_sum(shape) / shape.total;
        BallSample {
            inside: f.ball_values(shape).map(|v| (v - m).abs()).collect(),
            outside_count: shape.outside(),
            outside_value: (f.exterior() - m).abs(),
            total: shape.total,
        }
    }

    /// Mean of `g(|f|)` over the ball.
    pub fn mean_of<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let mut s: f64 = self.inside.iter().map(|&v| g(v)).sum();
        if self.outside_count > 0.0 {
            s += self.outside_count * g(self.outside_value);
        }
        s / self.total
    }

    pub fn max(&self) -> f64 {
        let m = self.inside.iter().fold(0.0f64, |m, &v| m.max(v));
        if self.outside_count > 0.0 {
            m.max(self.outside_value)
        } else {
            m
        }
    }

    /// `⨍_B Φ(|f|/λ)`, infinite as soon as one term is.
    pub fn modular(&self, phi: &YoungFunction, lambda: f64) -> f64 {
        self.mean_of(|v| phi.eval(v / lambda))
    }

    /// `inf{λ > 0 : ⨍_B Φ(|f|/λ) ≤ u}` and the number of bisection steps.
    pub fn luxemburg(&self, phi: &YoungFunction, u: f64) -> (f64, usize) {
        if self.max() == 0.0 {
            return (0.0, 0);
        }
        if let Some((p, c)) = phi.homogeneous() {
            let mp = self.mean_of(|v| v.powf(p));
            return (c * (mp / u).powf(1.0 / p), 0);
        }
        self.luxemburg_by_bisection(phi, u)
    }

    /// Bisection route for every family; the returned λ is the upper end of
    /// the final bracket, so jumps of the modular resolve toward the infimum.
    pub fn luxemburg_by_bisection(&self, phi: &YoungFunction, u: f64) -> (f64, usize) {
        let max = self.max();
        if max == 0.0 {
            return (0.0, 0);
        }
        let ok = |lambda: f64| self.modular(phi, lambda) <= u;
        let inv = phi.inverse(u);
        let mut hi = if inv > 0.0 && inv.is_finite() { max / inv } else { max };
        let mut iterations = 0;
        while !ok(hi) {
            hi *= 2.0;
            iterations += 1;
            if iterations > 2200 {
                return (f64::INFINITY, iterations);
            }
        }
        let mut lo = hi / 2.0;
        while ok(lo) {
            hi = lo;
            lo /= 2.0;
            iterations += 1;
            if lo == 0.0 {
                return (0.0, iterations);
            }
        }
        while hi - lo > LUXEMBURG_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            iterations += 1;
        }
        (hi, iterations)
    }
}

/// `(1/φ(r)) ⨍_B Φ(|f|/λ)`.
pub fn modular(f: &SampledField, phi: &YoungFunction, vp: &GrowthFunction, b: &Ball, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(crate::error::invalid("λ must be positive"));
    }
    let shape = b.shape(f.window())?;
    Ok(BallSample::of(f, &shape).modular(phi, lambda) / vp.eval(b.radius)?)
}

/// `‖f‖_{Φ,φ,B}`.
pub fn ball_norm(f: &SampledField, phi: &YoungFunction, vp: &GrowthFunction, b: &Ball) -> Result<NormResult> {
    let shape = b.shape(f.window())?;
    let (v, it) = BallSample::of(f, &shape).luxemburg(phi, vp.eval(b.radius)?);
    Ok(NormResult::single(v, *b, it))
}

/// `‖f - f_B‖_{Φ,φ,B}`.
pub fn campanato_ball_norm(f: &SampledField, phi: &YoungFunction, vp: &GrowthFunction, b: &Ball) -> Result<NormResult> {
    let shape = b.shape(f.window())?;
    let (v, it) = BallSample::oscillation(f, &shape).luxemburg(phi, vp.eval(b.radius)?);
    Ok(NormResult::single(v, *b, it))
}

fn check_family(f: &SampledField, fam: &BallFamily) -> Result<()> {
    if fam.is_empty() {
        return Err(crate::error::invalid("ball family is empty"));
    }
    if fam.window != *f.window() {
        return Err(crate::error::invalid("ball family and field use different windows"));
    }
    Ok(())
}

/// Maximum over a family of per-ball values; the first maximal ball wins.
pub fn sup_over_family<F>(fam: &BallFamily, per_ball: F) -> Result<NormResult>
where
    F: Fn(&Ball, &BallShape) -> Result<(f64, usize)> + Sync + Send,
{
    let vals = parallel::try_map_indices(fam.len(), |i| per_ball(&fam.balls[i], &fam.shapes[i]))?;
    let mut best = 0usize;
    let mut iterations = 0;
    for (i, &(v, it)) in vals.iter().enumerate() {
        iterations += it;
        let v = if v.is_nan() { f64::INFINITY } else { v };
        let cur = vals[best].0;
        let cur = if cur.is_nan() { f64::INFINITY } else { cur };
        if v > cur {
            best = i;
        }
    }
    let value = vals[best].0;
    Ok(NormResult {
        value: if value.is_nan() { f64::INFINITY } else { value },
        attaining_ball: Some(fam.balls[best]),
        attaining_index: Some(best),
        bisection_iterations: iterations,
        family: Some(fam.describe()),
    })
}

/// `‖f‖_{L^{(Φ,φ)}}` as the maximum of ball norms over `fam`.
pub fn om_norm(f: &SampledField, phi: &YoungFunction, vp: &GrowthFunction, fam: &BallFamily) -> Result<NormResult> {
    check_family(f, fam)?;
    sup_over_family(fam, |b, shape| Ok(BallSample::of(f, shape).luxemburg(phi, vp.eval(b.radius)?)))
}

/// `‖f‖_{𝓛^{(Φ,φ)}}` as the maximum over `fam` of `‖f - f_B‖_{Φ,φ,B}`.
pub fn campanato_norm(f: &SampledField, phi: &YoungFunction, vp: &GrowthFunction, fam: &BallFamily) -> Result<NormResult> {
    check_family(f, fam)?;
    sup_over_family(fam, |b, shape| Ok(BallSample::oscillation(f, shape).luxemburg(phi, vp.eval(b.radius)?)))
}

/// `(1/ψ(r)) (⨍_B |f - f_B|^p)^{1/p}` on one ball.
pub fn campanato_p_ball(f: &SampledField, p: f64, psi: &GrowthFunction, b: &Ball) -> Result<f64> {
    let shape = b.shape(f.window())?;
    Ok(BallSample::oscillation(f, &shape).mean_of(|v| v.powf(p)).powf(1.0 / p) / psi.eval(b.radius)?)
}

/// `‖f‖_{𝓛_{p,ψ}}` as the maximum over `fam`.
pub fn campanato_p(f: &SampledField, p: f64, psi: &GrowthFunction, fam: &BallFamily) -> Result<NormResult> {
    check_family(f, fam)?;
    if !(p >= 1.0) {
        return Err(crate::error::invalid(format!("p must be at least 1, got {p}")));
    }
    sup_over_family(fam, |b, shape| {
        let osc = BallSample::oscillation(f, shape);
        let v = if p == 1.0 { osc.mean_of(|v| v) } else { osc.mean_of(|v| v.powf(p)).powf(1.0 / p) };
        Ok((v / psi.eval(b.radius)?, 0))
    })
}

/// Ball means `f_{B(0,r)}` along a radius ladder and their limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaResult {
    pub value: f64,
    pub converged: bool,
    /// `(r, f_{B(0,r)})` for every rung.
    pub means: Vec<(f64, f64)>,
    pub last_difference: f64,
    /// The last two balls cover the window, so the limit is the exterior value.
    pub analytic_tail: bool,
}

/// Radii `h·2^j` from one cell to eight window diameters.
pub fn default_sigma_ladder(w: &Window) -> Vec<f64> {
    let top = w.log2_cells() as i32 + crate::field::EXTRA_RUNGS;
    (0..=top).map(|j| w.h() * (j as f64).exp2()).collect()
}

/// `σ(f) = lim f_{B(0,r)}` estimated on an ascending ladder of radii.
///
/// Once a ball covers the window its mean is
/// `(Σ_window f + (|B| - |window|)·exterior)/|B|`, whose limit is the exterior
/// value; in that case the limit is returned exactly. Otherwise the last mean
/// is returned and convergence means the last two rungs agree to `1e-6`.
pub fn sigma_limit(f: &SampledField, ladder: &[f64]) -> Result<SigmaResult> {
    if ladder.len() < 2 || ladder.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(crate::error::invalid("σ ladder needs at least two ascending radii"));
    }
    let w = f.window();
    let mut means = Vec::with_capacity(ladder.len());
    let mut covers = Vec::with_capacity(ladder.len());
    for &r in ladder {
        let shape = Ball::at_origin(w, r).shape(w)?;
        means.push((r, f.ball_sum(&shape) / shape.total));
        covers.push(shape.inside == w.len());
    }
    let k = means.len();
    let last_difference = (means[k - 1].1 - means[k - 2].1).abs();
    let analytic_tail = covers[k - 1] && covers[k - 2];
    let (value, converged) = if analytic_tail {
        (f.exterior(), true)
    } else {
        (means[k - 1].1, last_difference < SIGMA_ABS_TOL)
    };
    Ok(SigmaResult { value, converged, means, last_difference, analytic_tail })
}
