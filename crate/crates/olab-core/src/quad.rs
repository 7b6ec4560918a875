//! Adaptive Simpson quadrature, improper integrals in the logarithmic variable,
//! and a fixed Gauss-Legendre rule.

use crate::tolerances::QUAD_REL_TOL;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson integral of `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let m = 0.5 * (lo + hi);
    let (fa, fm, fb) = (f(lo), f(m), f(hi));
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    // A coarse 8-panel estimate sets the absolute scale so that oscillating
    // integrands with a tiny three-point estimate are still resolved.
    let coarse = composite(f, lo, hi, 8).abs().max(whole.abs());
    let eps = (rel_tol * coarse).max(f64::MIN_POSITIVE);
    sign * step(f, lo, hi, fa, fm, fb, whole, eps, MAX_DEPTH)
}

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / (2 * panels) as f64;
    let mut s = f(a) + f(b);
    for i in 1..2 * panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

/// Maximum extent of the logarithmic variable explored by the improper rules.
const LOG_SPAN: f64 = 1400.0;

/// `∫_{u0}^{∞} g(u) du` by doubling panels; `None` when the panels have not
/// settled before the logarithmic span is exhausted.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(g: &F, u0: f64) -> Option<f64> {
    improper(g, u0, 1.0)
}

/// `∫_{-∞}^{u0} g(u) du`, with the same convergence rule.
pub fn integrate_from_neg_infinity<F: Fn(f64) -> f64>(g: &F, u0: f64) -> Option<f64> {
    improper(g, u0, -1.0)
}

fn improper<F: Fn(f64) -> f64>(g: &F, u0: f64, dir: f64) -> Option<f64> {
    let mut total = 0.0;
    let mut start = 0.0;
    let mut width = 1.0;
    let mut settled = 0;
    while start < LOG_SPAN {
        let end = (start + width).min(LOG_SPAN);
        let (a, b) = if dir > 0.0 {
            (u0 + start, u0 + end)
        } else {
            (u0 - end, u0 - start)
        };
        let piece = simpson(g, a, b, QUAD_REL_TOL);
        if !piece.is_finite() {
            return None;
        }
        total += piece;
        if piece.abs() <= 1e-3 * QUAD_REL_TOL * total.abs() || (piece == 0.0 && total == 0.0) {
            settled += 1;
            if settled >= 2 {
                return Some(total);
            }
        } else {
            settled = 0;
        }
        start = end;
        width *= 2.0;
    }
    None
}

/// Four-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Four-point Gauss-Legendre integral of `f` over `[a, b]`.
pub fn gauss4<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GAUSS4.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}
