//! Maximal operators over a ball family: the Hardy-Littlewood operator `M`,
//! the generalized fractional maximal operator `M_ρ` and its weighted
//! variants, the sharp maximal operator `M♯`, and the dyadic operators
//! `M^d_Q`, `M♯d_Q` on the tree of a cube.

use crate::error::{invalid, Result};
use crate::field::{BallFamily, DyadicFamily, SampledField};
use crate::growth::GrowthFunction;
use crate::norms::BallSample;
use crate::parallel;

fn check(f: &SampledField, fam: &BallFamily) -> Result<()> {
    if fam.is_empty() {
        return Err(invalid("ball family is empty"));
    }
    if fam.window != *f.window() {
        return Err(invalid("ball family and field use different windows"));
    }
    Ok(())
}

/// For each window cell, the largest per-ball value among the balls of `fam`
/// whose lattice cells include it.
fn scatter_max(f: &SampledField, fam: &BallFamily, per_ball: &[f64]) -> SampledField {
    let mut out = vec![0.0f64; f.window().len()];
    for (shape, &v) in fam.shapes.iter().zip(per_ball) {
        for s in &shape.spans {
            for o in &mut out[s.start..=s.end] {
                if v > *o {
                    *o = v;
                }
            }
        }
    }
    SampledField::from_raw(*f.window(), out)
}

/// `sup_{B ∋ x} w(r) ⨍_B |f|` over the family.
pub fn weighted_maximal<W>(f: &SampledField, weight: W, fam: &BallFamily) -> Result<SampledField>
where
    W: Fn(f64) -> f64 + Sync + Send,
{
    check(f, fam)?;
    let a = f.abs();
    let vals = parallel::map_indices(fam.len(), |i| {
        let shape = &fam.shapes[i];
        weight(fam.balls[i].radius) * a.ball_sum(shape) / shape.total
    });
    Ok(scatter_max(f, fam, &vals))
}

/// `Mf(x) = sup_{B ∋ x} ⨍_B |f|`.
pub fn hl_maximal(f: &SampledField, fam: &BallFamily) -> Result<SampledField> {
    weighted_maximal(f, |_| 1.0, fam)
}

/// `M_ρ f(x) = sup_{B(a,r) ∋ x} ρ(r) ⨍_{B(a,r)} |f|`.
pub fn frac_maximal(f: &SampledField, rho: &GrowthFunction, fam: &BallFamily) -> Result<SampledField> {
    for b in &fam.balls {
        if !(rho.eval(b.radius)? > 0.0) {
            return Err(invalid("ρ must be positive on the radius ladder"));
        }
    }
    weighted_maximal(f, |r| rho.at(r), fam)
}

/// `M♯f(x) = sup_{B ∋ x} ⨍_B |f - f_B|`.
pub fn sharp_maximal(f: &SampledField, fam: &BallFamily) -> Result<SampledField> {
    check(f, fam)?;
    let vals = parallel::map_indices(fam.len(), |i| BallSample::oscillation(f, &fam.shapes[i]).mean_of(|v| v));
    Ok(scatter_max(f, fam, &vals))
}

fn check_tree(f: &SampledField, q: &DyadicFamily) -> Result<()> {
    if q.window != *f.window() {
        return Err(invalid("dyadic family and field use different windows"));
    }
    Ok(())
}

/// Cube means `f_R` for every level, cubes ordered row-major within a level.
/// Leaf sums are accumulated upward so each level costs one pass.
pub fn dyadic_means(f: &SampledField, q: &DyadicFamily) -> Result<Vec<Vec<f64>>> {
    check_tree(f, q)?;
    let n = q.window.n;
    let leaves = 1usize << q.depth;
    let dim_count = |m: usize| if n == 1 { m } else { m * m };
    let mut sums = vec![0.0; dim_count(leaves)];
    for idx in q.root_cells() {
        let c = q.cube_of(idx, q.depth).expect("root cell lies in Q");
        sums[c.k[1] * leaves + c.k[0]] += f.values()[idx];
    }
    let mut levels = vec![sums];
    for level in (0..q.depth).rev() {
        let m = 1usize << level;
        let below = levels.last().expect("at least the leaf level");
        let mut cur = vec![0.0; dim_count(m)];
        for ky in 0..if n == 1 { 1 } else { m } {
            for kx in 0..m {
                let mut s = below[2 * ky * (2 * m) + 2 * kx] + below[2 * ky * (2 * m) + 2 * kx + 1];
                if n == 2 {
                    s += below[(2 * ky + 1) * (2 * m) + 2 * kx] + below[(2 * ky + 1) * (2 * m) + 2 * kx + 1];
                }
                cur[ky * m + kx] = s;
            }
        }
        levels.push(cur);
    }
    levels.reverse();
    let mut means = Vec::with_capacity(levels.len());
    for (level, sums) in levels.into_iter().enumerate() {
        let cells = dim_count(q.cube_side(level as u32)) as f64;
        means.push(sums.into_iter().map(|s| s / cells).collect());
    }
    Ok(means)
}

/// Mean oscillations `⨍_R |f - f_R|` for every cube.
pub fn dyadic_oscillations(f: &SampledField, q: &DyadicFamily) -> Result<Vec<Vec<f64>>> {
    let means = dyadic_means(f, q)?;
    let mut out = Vec::with_capacity(means.len());
    for (level, m) in means.iter().enumerate() {
        let level = level as u32;
        let side = 1usize << level;
        let mut acc = vec![0.0; m.len()];
        for idx in q.root_cells() {
            let c = q.cube_of(idx, level).expect("root cell lies in Q");
            let k = c.k[1] * side + c.k[0];
            acc[k] += (f.values()[idx] - m[k]).abs();
        }
        let cells = if q.window.n == 1 { q.cube_side(level) } else { q.cube_side(level).pow(2) } as f64;
        out.push(acc.into_iter().map(|s| s / cells).collect());
    }
    Ok(out)
}

fn ancestor_max(f: &SampledField, q: &DyadicFamily, per_cube: &[Vec<f64>]) -> SampledField {
    let mut out = vec![0.0; f.window().len()];
    for idx in q.root_cells() {
        let mut best = 0.0f64;
        for (level, vals) in per_cube.iter().enumerate() {
            let c = q.cube_of(idx, level as u32).expect("root cell lies in Q");
            best = best.max(vals[c.k[1] * (1usize << level) + c.k[0]]);
        }
        out[idx] = best;
    }
    SampledField::from_raw(*f.window(), out)
}

/// `M^d_Q f(x) = sup_{x ∈ R ∈ 𝒬^d(Q)} ⨍_R |f|` on the cells of `Q`, zero elsewhere.
pub fn dyadic_maximal(f: &SampledField, q: &DyadicFamily) -> Result<SampledField> {
    let means = dyadic_means(&f.abs(), q)?;
    Ok(ancestor_max(f, q, &means))
}

/// `M♯d_Q f(x) = sup_{x ∈ R ∈ 𝒬^d(Q)} ⨍_R |f - f_R|` on the cells of `Q`, zero elsewhere.
pub fn dyadic_sharp(f: &SampledField, q: &DyadicFamily) -> Result<SampledField> {
    let osc = dyadic_oscillations(f, q)?;
    Ok(ancestor_max(f, q, &osc))
}
