//! Convolution-type operators on sampled fields: the generalized fractional
//! integral `I_ρ`, the Hilbert and Riesz transforms, their commutators with a
//! multiplier `b`, the standard-kernel check and the tail estimates outside
//! a ball.
//!
//! Every operator is a Toeplitz sum `Σ_j W(i - j) f_j` over window cells with
//! a weight table built once per kernel. Inputs must vanish outside the
//! window; outputs are sampled on the window only.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{Ball, SampledField, Window};
use crate::growth::{inverse_tail, nested_inverse_tail, GrowthFunction};
use crate::parallel;
use crate::quad::{gauss4, integrate_from_neg_infinity, GAUSS4};
use crate::report::ConditionReport;
use crate::tolerances::CONDITION_CAP;
use crate::young::YoungFunction;

/// The two built-in odd kernels homogeneous of degree `-n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum KernelKind {
    /// `K(x) = 1/(πx)` on ℝ.
    Hilbert,
    /// `K(x) = x_j / (2π |x|³)` on ℝ², `j ∈ {1, 2}`.
    Riesz { j: usize },
}

fn default_omega() -> GrowthFunction {
    GrowthFunction::power_pos(1.0)
}

/// A standard kernel together with its modulus of continuity `ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub kind: KernelKind,
    #[serde(default = "default_omega")]
    pub omega: GrowthFunction,
}

impl KernelSpec {
    pub fn hilbert() -> Self {
        KernelSpec { kind: KernelKind::Hilbert, omega: default_omega() }
    }

    pub fn riesz(j: usize) -> Result<Self> {
        if j != 1 && j != 2 {
            return Err(invalid(format!("Riesz index must be 1 or 2, got {j}")));
        }
        Ok(KernelSpec { kind: KernelKind::Riesz { j }, omega: default_omega() })
    }

    pub fn dimension(&self) -> u32 {
        match self.kind {
            KernelKind::Hilbert => 1,
            KernelKind::Riesz { .. } => 2,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            KernelKind::Hilbert => "Hilbert".into(),
            KernelKind::Riesz { j } => format!("Riesz_{j}"),
        }
    }

    /// `K(z)` for `z ≠ 0` (the second coordinate is ignored when n = 1).
    pub fn eval(&self, z: [f64; 2]) -> f64 {
        match self.kind {
            KernelKind::Hilbert => 1.0 / (PI * z[0]),
            KernelKind::Riesz { j } => {
                let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
                z[j - 1] / (2.0 * PI * r * r * r)
            }
        }
    }

    fn validate_for(&self, w: &Window) -> Result<()> {
        if self.dimension() != w.n {
            return Err(invalid(format!("{} acts in dimension {}, window has n = {}", self.label(), self.dimension(), w.n)));
        }
        Ok(())
    }
}

/// A field produced by an operator with a note on how the domain was truncated.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorOutput {
    pub field: SampledField,
    pub truncation_note: String,
}

const TRUNCATION: &str = "input vanishes outside the window; output sampled on window cells";

/// Toeplitz weights `W(d)` for offsets `d ∈ (-N, N)ⁿ`.
#[derive(Clone, Debug)]
pub struct Stencil {
    window: Window,
    span: usize,
    weights: Vec<f64>,
}

impl Stencil {
    fn build<F: Fn(i64, i64) -> f64 + Sync + Send>(w: &Window, weight: F) -> Stencil {
        let n = w.cells as i64;
        let span = 2 * w.cells - 1;
        let rows = if w.n == 1 { 1 } else { span };
        let weights = parallel::map_indices(span * rows, |k| {
            let dx = (k % span) as i64 - (n - 1);
            let dy = if w.n == 1 { 0 } else { (k / span) as i64 - (n - 1) };
            weight(dx, dy)
        });
        Stencil { window: *w, span, weights }
    }

    /// `W(dx, dy)`.
    pub fn weight(&self, dx: i64, dy: i64) -> f64 {
        let n = self.window.cells as i64;
        let row = if self.window.n == 1 { 0 } else { (dy + n - 1) as usize };
        self.weights[row * self.span + (dx + n - 1) as usize]
    }

    fn offset(&self, i: usize, j: usize) -> (i64, i64) {
        let (ix, iy) = self.window.split(i);
        let (jx, jy) = self.window.split(j);
        (ix as i64 - jx as i64, iy as i64 - jy as i64)
    }

    /// `Σ_j W(i - j) m(i, j) f_j` for every window cell `i`.
    fn apply_with<M: Fn(usize, usize) -> f64 + Sync + Send>(&self, f: &SampledField, m: M) -> Vec<f64> {
        let support: Vec<usize> = (0..f.values().len()).filter(|&j| f.values()[j] != 0.0).collect();
        parallel::map_indices(self.window.len(), |i| {
            let mut s = 0.0;
            for &j in &support {
                let (dx, dy) = self.offset(i, j);
                s += self.weight(dx, dy) * m(i, j) * f.values()[j];
            }
            s
        })
    }

    /// `Σ_j W(i - j) f_j`.
    pub fn convolve(&self, f: &SampledField) -> Result<SampledField> {
        self.check(f)?;
        Ok(SampledField::from_raw(self.window, self.apply_with(f, |_, _| 1.0)))
    }

    /// `Σ_j (b_i - b_j) W(i - j) f_j`.
    pub fn commutator(&self, b: &SampledField, f: &SampledField) -> Result<SampledField> {
        self.check(f)?;
        if b.window() != f.window() {
            return Err(invalid("b and f live on different windows"));
        }
        let bv = b.values();
        Ok(SampledField::from_raw(self.window, self.apply_with(f, |i, j| bv[i] - bv[j])))
    }

    fn check(&self, f: &SampledField) -> Result<()> {
        if *f.window() != self.window {
            return Err(invalid("field and stencil use different windows"));
        }
        f.require_zero_exterior()
    }
}

/// Tensor four-point Gauss rule over the square `[x0, x0+s] × [y0, y0+s]`.
fn gauss_square<F: Fn(f64, f64) -> f64>(f: &F, x0: f64, y0: f64, s: f64) -> f64 {
    let half = 0.5 * s;
    let (cx, cy) = (x0 + half, y0 + half);
    let mut acc = 0.0;
    for &(u, wu) in &GAUSS4 {
        for &(v, wv) in &GAUSS4 {
            acc += wu * wv * f(cx + half * u, cy + half * v);
        }
    }
    acc * half * half
}

/// Gauss rule on `sub × sub` subsquares of the cell at offset `(dx, dy)`.
fn cell_integral<F: Fn(f64, f64) -> f64>(f: &F, dx: i64, dy: i64, h: f64, sub: usize) -> f64 {
    let s = h / sub as f64;
    let x0 = (dx as f64 - 0.5) * h;
    let y0 = (dy as f64 - 0.5) * h;
    let mut acc = 0.0;
    for a in 0..sub {
        for b in 0..sub {
            acc += gauss_square(f, x0 + a as f64 * s, y0 + b as f64 * s, s);
        }
    }
    acc
}

/// Weights of the principal-value sum: zero on the self cell, four-point Gauss
/// per cell on the nearest neighbors, the midpoint rule elsewhere.
pub fn cz_stencil(kernel: &KernelSpec, w: &Window) -> Result<Stencil> {
    kernel.validate_for(w)?;
    let h = w.h();
    let k = kernel.clone();
    Ok(Stencil::build(w, move |dx, dy| {
        if dx == 0 && dy == 0 {
            return 0.0;
        }
        let near = dx.abs() <= 1 && dy.abs() <= 1;
        if w.n == 1 {
            if near {
                gauss4(&|t: f64| k.eval([t, 0.0]), (dx as f64 - 0.5) * h, (dx as f64 + 0.5) * h)
            } else {
                k.eval([dx as f64 * h, 0.0]) * h
            }
        } else if near {
            cell_integral(&|x, y| k.eval([x, y]), dx, dy, h, 1)
        } else {
            k.eval([dx as f64 * h, dy as f64 * h]) * h * h
        }
    }))
}

/// Weights of `I_ρ`: exact cell integrals of `ρ(t)/t` in one dimension,
/// Gauss rules in two (subdivided near the origin), and the radialized
/// analytic integral on the self cell.
pub fn frac_stencil(rho: &GrowthFunction, w: &Window) -> Result<Stencil> {
    let h = w.h();
    let self_weight = if w.n == 1 {
        2.0 * rho.rho_star(0.5 * h)?
    } else {
        2.0 * PI * rho.rho_star(h / PI.sqrt())?
    };
    let rho = rho.clone();
    Ok(Stencil::build(w, move |dx, dy| {
        if dx == 0 && dy == 0 {
            return self_weight;
        }
        if w.n == 1 {
            let d = dx.unsigned_abs() as f64;
            rho.integral_between((d - 0.5) * h, (d + 0.5) * h)
        } else {
            let kern = |x: f64, y: f64| {
                let r2 = x * x + y * y;
                rho.at(r2.sqrt()) / r2
            };
            let sub = if dx.abs() <= 2 && dy.abs() <= 2 { 4 } else { 1 };
            cell_integral(&kern, dx, dy, h, sub)
        }
    }))
}

/// Error unless `∫_0^1 ρ(t)/t dt` is finite.
fn require_int_rho(rho: &GrowthFunction) -> Result<()> {
    match rho.rho_star(1.0) {
        Ok(v) if v.is_finite() => Ok(()),
        _ => Err(Error::InvalidParameter(format!("{} violates the integrability condition at the origin", rho.label()))),
    }
}

/// `I_ρ f(x) = ∫ ρ(|x - y|)/|x - y|ⁿ f(y) dy`.
pub fn frac_integral(f: &SampledField, rho: &GrowthFunction) -> Result<OperatorOutput> {
    require_int_rho(rho)?;
    let st = frac_stencil(rho, f.window())?;
    Ok(OperatorOutput { field: st.convolve(f)?, truncation_note: TRUNCATION.into() })
}

/// `Tf(x) = p.v. ∫ K(x - y) f(y) dy`.
pub fn cz_apply(f: &SampledField, kernel: &KernelSpec) -> Result<OperatorOutput> {
    let st = cz_stencil(kernel, f.window())?;
    Ok(OperatorOutput { field: st.convolve(f)?, truncation_note: TRUNCATION.into() })
}

/// Operator whose commutator with a multiplication is taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CommutatorOp {
    #[serde(rename = "CZ")]
    Cz { kernel: KernelSpec },
    #[serde(rename = "FRACT")]
    Fract { rho: GrowthFunction },
}

impl CommutatorOp {
    pub fn stencil(&self, w: &Window) -> Result<Stencil> {
        match self {
            CommutatorOp::Cz { kernel } => cz_stencil(kernel, w),
            CommutatorOp::Fract { rho } => {
                require_int_rho(rho)?;
                frac_stencil(rho, w)
            }
        }
    }

    /// Kernel value at a nonzero displacement.
    pub fn kernel_at(&self, z: [f64; 2], n: u32) -> f64 {
        match self {
            CommutatorOp::Cz { kernel } => kernel.eval(z),
            CommutatorOp::Fract { rho } => {
                let r = (z[0] * z[0] + z[1] * z[1]).sqrt();
                rho.at(r) / r.powi(n as i32)
            }
        }
    }
}

/// `[b, T]f(x) = ∫ (b(x) - b(y)) K(x, y) f(y) dy` as one absolutely convergent sum.
pub fn commutator(op: &CommutatorOp, b: &SampledField, f: &SampledField) -> Result<OperatorOutput> {
    let st = op.stencil(f.window())?;
    Ok(OperatorOutput { field: st.commutator(b, f)?, truncation_note: TRUNCATION.into() })
}

/// Deterministic triples `(x, y, z)` with `0 < 2|y - z| ≤ |x - y|`.
pub fn sample_triples(n: u32, count: usize, seed: u64) -> Vec<[[f64; 2]; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut pt = || {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = if n == 2 { rng.gen_range(-1.0..1.0) } else { 0.0 };
            [x, y]
        };
        let x = pt();
        let y = pt();
        let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        if d < 1e-3 {
            continue;
        }
        let frac: f64 = rng.gen_range(1e-3..=0.5);
        let ang: f64 = rng.gen_range(0.0..2.0 * PI);
        let z = if n == 1 {
            [y[0] + if ang < PI { frac * d } else { -frac * d }, 0.0]
        } else {
            [y[0] + frac * d * ang.cos(), y[1] + frac * d * ang.sin()]
        };
        out.push([x, y, z]);
    }
    out
}

/// Size and smoothness constants of a kernel over sample triples, and the
/// Dini and log-Dini integrals of `ω`.
pub fn check_standard_kernel(kernel: &KernelSpec, triples: &[[[f64; 2]; 3]]) -> ConditionReport {
    let n = kernel.dimension();
    let grid = format!("{} sampled triples with 2|y-z| ≤ |x-y|", triples.len());
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let sub = |a: [f64; 2], b: [f64; 2]| [a[0] - b[0], a[1] - b[1]];
    let mut size = ConditionReport::new("size", grid.clone());
    let mut smooth = ConditionReport::new("smoothness", grid.clone());
    for t in triples {
        let [x, y, z] = *t;
        let dxy = dist(x, y);
        let scale = dxy.powi(n as i32);
        size.observe(kernel.eval(sub(x, y)).abs() * scale, &[x[0], x[1], y[0], y[1]]);
        let diff = (kernel.eval(sub(x, y)) - kernel.eval(sub(x, z))).abs() + (kernel.eval(sub(y, x)) - kernel.eval(sub(z, x))).abs();
        let om = kernel.omega.at(dist(y, z) / dxy);
        smooth.observe(diff * scale / om, &[x[0], x[1], y[0], y[1], z[0], z[1]]);
    }
    let om = &kernel.omega;
    let mut dini = ConditionReport::new("dini", "∫_0^1 ω(t)/t dt");
    dini.observe(integrate_from_neg_infinity(&|u: f64| om.at_log(u), 0.0).unwrap_or(f64::INFINITY), &[]);
    let mut log_dini = ConditionReport::new("log_dini", "∫_0^1 ω(t) log(1/t)/t dt");
    log_dini.observe(integrate_from_neg_infinity(&|u: f64| -u * om.at_log(u), 0.0).unwrap_or(f64::INFINITY), &[]);
    ConditionReport::combined(
        format!("standard_kernel:{}", kernel.label()),
        grid,
        vec![
            size.finish(CONDITION_CAP),
            smooth.finish(CONDITION_CAP),
            dini.finish(f64::MAX),
            log_dini.finish(f64::MAX),
        ],
    )
}

/// Which tail estimate is checked.
#[derive(Clone, Debug, PartialEq)]
pub enum TailOperator {
    /// `∫_{ℝⁿ∖2B} |K(x,y) f(y)| dy` for `x ∈ B`, with `B = B(z, r)`.
    Cz(KernelSpec),
    /// `∫_{ℝⁿ∖B(x,r)} ρ(|x-y|)/|x-y|ⁿ |f(y)| dy`, compared at `K₁ r`.
    Fract { rho: GrowthFunction, k1: f64 },
}

/// Norms entering the right-hand side of a tail estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailNorms {
    /// `‖f‖_{L^{(Φ,φ)}}`.
    pub f: f64,
    /// `‖b‖_{𝓛_{1,ψ}}` when the weighted form with `b - b_B` is checked.
    pub b: Option<f64>,
}

/// Left side, right side and ratio of one tail estimate on one ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Cell of `B` attaining the left side.
    pub at_cell: usize,
}

/// Tail estimate outside a ball. With `b = Some((b, ψ))` the integrand carries
/// `|b(y) - b_B|` and the right side is the nested ψ-weighted tail.
#[allow(clippy::too_many_arguments)]
pub fn tail_ratio(
    f: &SampledField,
    b: Option<(&SampledField, &GrowthFunction)>,
    ball: &Ball,
    op: &TailOperator,
    phi: &YoungFunction,
    vp: &GrowthFunction,
    norms: TailNorms,
) -> Result<TailRatio> {
    f.require_zero_exterior()?;
    let w = f.window();
    let n = w.n;
    let cm = w.cell_measure();
    let r = ball.radius;
    let shape = ball.shape(w)?;
    let bmean = match b {
        Some((bf, _)) => Some(bf.ball_sum(&shape) / shape.total),
        None => None,
    };
    let centers: Vec<[f64; 2]> = (0..w.len()).map(|i| w.center(i)).collect();
    let z = ball.center(w);
    let dist = |a: [f64; 2], c: [f64; 2]| ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt();
    let xs: Vec<usize> = match op {
        TailOperator::Cz(_) => shape.spans.iter().flat_map(|s| s.start..=s.end).collect(),
        TailOperator::Fract { .. } => {
            // The ball is centered at x itself; use the window cell nearest to z.
            let nearest = (0..w.len())
                .min_by(|&a, &c| dist(centers[a], z).total_cmp(&dist(centers[c], z)))
                .expect("window has cells");
            vec![nearest]
        }
    };
    let mut lhs = 0.0f64;
    let mut at_cell = xs[0];
    for &x in &xs {
        let cx = centers[x];
        let mut s = 0.0;
        for (j, &v) in f.values().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let y = centers[j];
            let outside = match op {
                TailOperator::Cz(_) => dist(y, z) >= 2.0 * r,
                TailOperator::Fract { .. } => dist(y, cx) >= r,
            };
            if !outside {
                continue;
            }
            let disp = [cx[0] - y[0], cx[1] - y[1]];
            let k = match op {
                TailOperator::Cz(kernel) => kernel.eval(disp).abs(),
                TailOperator::Fract { rho, .. } => {
                    let d = dist(cx, y);
                    rho.at(d) / d.powi(n as i32)
                }
            };
            let mult = match (b, bmean) {
                (Some((bf, _)), Some(m)) => (bf.values()[j] - m).abs(),
                _ => 1.0,
            };
            s += k * mult * v.abs() * cm;
        }
        if s > lhs {
            lhs = s;
            at_cell = x;
        }
    }
    let integral = match (op, b) {
        (TailOperator::Cz(_), None) => inverse_tail(phi, vp, None, 2.0 * r),
        (TailOperator::Cz(_), Some((_, psi))) => nested_inverse_tail(phi, vp, None, psi, r),
        (TailOperator::Fract { rho, k1 }, None) => inverse_tail(phi, vp, Some(rho), k1 * r),
        (TailOperator::Fract { rho, k1 }, Some((_, psi))) => nested_inverse_tail(phi, vp, Some(rho), psi, k1 * r),
    };
    let norm = match b {
        Some(_) => norms.f * norms.b.ok_or(Error::MissingAux("b norm"))?,
        None => norms.f,
    };
    let rhs = integral * norm;
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(TailRatio { lhs, rhs, ratio, at_cell })
}

/// [`tail_ratio`] wrapped as a condition report over one ball.
#[allow(clippy::too_many_arguments)]
pub fn tail_bound_check(
    f: &SampledField,
    b: Option<(&SampledField, &GrowthFunction)>,
    ball: &Ball,
    op: &TailOperator,
    phi: &YoungFunction,
    vp: &GrowthFunction,
    norms: TailNorms,
) -> Result<ConditionReport> {
    let t = tail_ratio(f, b, ball, op, phi, vp, norms)?;
    let mut rep = ConditionReport::new("tail", format!("ball radius {}", ball.radius));
    rep.observe(t.ratio, &[ball.radius, t.at_cell as f64, t.lhs, t.rhs]);
    Ok(rep.finish(CONDITION_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample, FieldSpec, Region};

    fn chi_interval(w: &Window) -> SampledField {
        sample(&FieldSpec::Indicator { region: Region::Cube { center: [0.0, 0.0], half_side: 1.0 } }, w).unwrap()
    }

    #[test]
    fn riesz_potential_of_interval() {
        let w = Window::new(1, 4.0, 256).unwrap();
        let f = chi_interval(&w);
        for alpha in [0.25, 0.5, 0.75] {
            let out = frac_integral(&f, &GrowthFunction::power_pos(alpha)).unwrap().field;
            for i in 0..w.cells {
                let x = w.coord(i);
                if x > 1.0 {
                    let want = ((x + 1.0).powf(alpha) - (x - 1.0).powf(alpha)) / alpha;
                    assert!((out.values()[i] - want).abs() < 1e-10, "α={alpha} x={x}: {} vs {want}", out.values()[i]);
                }
            }
        }
        let z = SampledField::zeros(w);
        assert!(frac_integral(&z, &GrowthFunction::power_pos(0.5)).unwrap().field.values().iter().all(|&v| v == 0.0));
        assert!(frac_integral(&f, &GrowthFunction::constant(1.0).unwrap()).is_err());
    }

    #[test]
    fn riesz_potential_self_cell() {
        // Inside a constant block the self cell carries 2ρ*(h/2) = 2(h/2)^α/α.
        let w = Window::new(1, 4.0, 64).unwrap();
        let st = frac_stencil(&GrowthFunction::power_pos(0.5), &w).unwrap();
        let h = w.h();
        assert!((st.weight(0, 0) - 2.0 * (0.5 * h).sqrt() / 0.5).abs() < 1e-15);
        // Summing all cells in (-1, 1) reproduces the exact antiderivative at x = 0.0625.
        let f = chi_interval(&w);
        let out = frac_integral(&f, &GrowthFunction::power_pos(0.5)).unwrap().field;
        let x: f64 = w.coord(32);
        let want = ((1.0 + x).sqrt() + (1.0 - x).sqrt()) / 0.5;
        assert!((out.values()[32] - want).abs() < 1e-12);
    }

    #[test]
    fn hilbert_examples() {
        let w = Window::new(1, 4.0, 256).unwrap();
        let f = chi_interval(&w);
        let t = cz_apply(&f, &KernelSpec::hilbert()).unwrap().field;
        let i = (0..w.cells).find(|&i| (w.coord(i) - 2.0).abs() < 0.5 * w.h() + 1e-12).unwrap();
        let x = w.coord(i);
        let want = ((x + 1.0) / (x - 1.0)).ln() / PI;
        assert!((t.values()[i] - want).abs() < 1e-4, "{} vs {want}", t.values()[i]);
        // Even field, symmetric window: the two cells next to the origin carry opposite values.
        let even = sample(&FieldSpec::Indicator { region: Region::Cube { center: [0.0, 0.0], half_side: 2.0 } }, &w).unwrap();
        let te = cz_apply(&even, &KernelSpec::hilbert()).unwrap().field;
        for i in 0..w.cells {
            assert!((te.values()[i] + te.values()[w.cells - 1 - i]).abs() < 1e-13);
        }
    }

    /// Power iteration on `TᵀT = -T²` for the antisymmetric principal-value stencils.
    fn l2_norm_estimate(st: &Stencil, w: &Window) -> f64 {
        let mut x = sample(&FieldSpec::RandomStep { seed: 11, depth: w.log2_cells() }, w).unwrap();
        let mut est = 0.0;
        for _ in 0..40 {
            let nx = x.values().iter().map(|v| v * v).sum::<f64>().sqrt();
            x = x.scale(1.0 / nx);
            let y = st.convolve(&x).unwrap();
            est = y.values().iter().map(|v| v * v).sum::<f64>().sqrt();
            x = st.convolve(&y).unwrap().scale(-1.0);
        }
        est
    }

    #[test]
    fn discrete_singular_integrals_are_l2_bounded() {
        let w = Window::new(1, 4.0, 256).unwrap();
        let h = l2_norm_estimate(&cz_stencil(&KernelSpec::hilbert(), &w).unwrap(), &w);
        assert!(h > 0.9 && h <= 1.05, "Hilbert: {h}");
        let w2 = Window::new(2, 2.0, 32).unwrap();
        let r = l2_norm_estimate(&cz_stencil(&KernelSpec::riesz(1).unwrap(), &w2).unwrap(), &w2);
        assert!(r > 0.5 && r <= 1.1, "Riesz_1: {r}");
    }

    #[test]
    fn riesz_of_radial_bump_vanishes_at_center() {
        let w = Window::new(2, 1.0, 32).unwrap();
        let c = w.center(w.index(16, 16));
        let bump = sample(&FieldSpec::Indicator { region: Region::Ball { center: c, radius: 0.4 } }, &w).unwrap();
        for j in [1, 2] {
            let t = cz_apply(&bump, &KernelSpec::riesz(j).unwrap()).unwrap().field;
            assert!(t.values()[w.index(16, 16)].abs() < 1e-13);
        }
        assert!(cz_apply(&bump, &KernelSpec::hilbert()).is_err());
    }

    #[test]
    fn commutator_examples() {
        let w = Window::new(1, 4.0, 256).unwrap();
        let f = chi_interval(&w);
        let b = sample(&FieldSpec::Coordinate { axis: 0 }, &w).unwrap();
        let op = CommutatorOp::Cz { kernel: KernelSpec::hilbert() };
        let c = commutator(&op, &b, &f).unwrap().field;
        for i in 0..w.cells {
            if w.coord(i).abs() > 1.0 {
                assert!((c.values()[i] - 2.0 / PI).abs() < 1e-3, "x={}: {}", w.coord(i), c.values()[i]);
            }
        }
        let k = SampledField::constant(w, 3.0);
        assert!(commutator(&op, &k, &f).unwrap().field.values().iter().all(|&v| v == 0.0));
        // Bilinearity.
        let g = sample(&FieldSpec::RandomStep { seed: 2, depth: 4 }, &w).unwrap();
        let b2 = sample(&FieldSpec::LogAbs, &w).unwrap();
        let fr = CommutatorOp::Fract { rho: GrowthFunction::power_pos(0.5) };
        let lhs = commutator(&fr, &b.zip(&b2, |x, y| 2.0 * x - y).unwrap(), &f.zip(&g, |x, y| x + 3.0 * y).unwrap()).unwrap().field;
        let parts = [(&b, &f, 2.0), (&b, &g, 6.0), (&b2, &f, -1.0), (&b2, &g, -3.0)];
        let mut rhs = vec![0.0; w.len()];
        for (bb, ff, c) in parts {
            let o = commutator(&fr, bb, ff).unwrap().field;
            for (r, v) in rhs.iter_mut().zip(o.values()) {
                *r += c * v;
            }
        }
        let scale = lhs.max_abs();
        for (a, e) in lhs.values().iter().zip(&rhs) {
            assert!((a - e).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn standard_kernel_examples() {
        let tr = sample_triples(1, 500, 3);
        assert!(tr.iter().all(|t| 2.0 * (t[1][0] - t[2][0]).abs() <= (t[0][0] - t[1][0]).abs() + 1e-15));
        let rep = check_standard_kernel(&KernelSpec::hilbert(), &tr);
        assert!(rep.holds, "{rep:?}");
        assert!((rep.parts[3].best_constant - 1.0).abs() < 1e-8);
        // |1/(x-y) - 1/(x-z)|·|x-y|² / |y-z| = |x-y|/|x-z| ≤ 2, twice, over π.
        assert!(rep.parts[1].best_constant <= 4.0 / PI + 1e-12);
        let flat = KernelSpec { kind: KernelKind::Hilbert, omega: GrowthFunction::constant(1.0).unwrap() };
        let rep = check_standard_kernel(&flat, &tr);
        assert!(!rep.parts[3].holds && !rep.holds);
        let a = check_standard_kernel(&KernelSpec::riesz(1).unwrap(), &sample_triples(2, 500, 5));
        let b = check_standard_kernel(&KernelSpec::riesz(1).unwrap(), &sample_triples(2, 2000, 5));
        assert!(a.holds && b.holds);
        assert!(b.parts[1].best_constant < 2.0 * a.parts[1].best_constant);
    }

    #[test]
    fn kernel_json() {
        let k: KernelSpec = serde_json::from_str(r#"{"kind":"Riesz","j":2}"#).unwrap();
        assert_eq!(k, KernelSpec::riesz(2).unwrap());
        let h: KernelSpec = serde_json::from_str(r#"{"kind":"Hilbert"}"#).unwrap();
        assert_eq!(h, KernelSpec::hilbert());
    }

    #[test]
    fn tail_far_from_support_is_zero() {
        let w = Window::new(1, 8.0, 128).unwrap();
        let f = sample(&FieldSpec::Indicator { region: Region::Ball { center: [0.0, 0.0], radius: 1.0 } }, &w).unwrap();
        let phi = YoungFunction::power(2.0).unwrap();
        let vp = GrowthFunction::power_neg(1.0);
        // B = B(6, 8) has 2B ⊃ support: left side vanishes.
        let ball = Ball::at_cell(&w, 111, 8.0);
        let t = tail_ratio(&f, None, &ball, &TailOperator::Cz(KernelSpec::hilbert()), &phi, &vp, TailNorms { f: 1.0, b: None }).unwrap();
        assert_eq!(t.lhs, 0.0);
        // b constant: the weighted left side vanishes too.
        let bc = SampledField::constant(w, 2.0);
        let psi = GrowthFunction::constant(1.0).unwrap();
        let small = Ball::at_cell(&w, 111, 0.5);
        let t = tail_ratio(
            &f,
            Some((&bc, &psi)),
            &small,
            &TailOperator::Fract { rho: GrowthFunction::power_pos(0.5), k1: 0.5 },
            &phi,
            &vp,
            TailNorms { f: 1.0, b: Some(1.0) },
        )
        .unwrap();
        assert_eq!(t.lhs, 0.0);
    }
}
