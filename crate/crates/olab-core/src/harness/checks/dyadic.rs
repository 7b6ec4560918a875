//! Checks on the local dyadic maximal and sharp maximal functions.

use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{sample, DyadicFamily, FieldSpec};
use crate::maximal::{dyadic_maximal, dyadic_sharp};
use crate::young::YoungFunction;

use super::super::bank::Level;
use super::super::outcome::{LevelOutcome, Scan, Witness};
use super::ratio;

/// Number of RandomStep fields in the good-λ check.
pub const GOODLAMBDA_FIELDS: u64 = 100;
/// `γ = 2^{-k}` for `k = 0..GOODLAMBDA_GAMMAS`.
pub const GOODLAMBDA_GAMMAS: u32 = 4;
/// Number of λ values above `|f|_Q`, spaced by `1/16`.
pub const GOODLAMBDA_LAMBDAS: usize = 32;

/// The root cube must have a dyadic cell size so that all means, thresholds
/// and comparisons are exact in floating point.
fn exact_root(lv: &Level) -> Result<DyadicFamily> {
    let h = lv.w.h();
    if h.log2().fract() != 0.0 {
        return Err(Error::Validation(format!(
            "exact dyadic checks need a cell size that is a power of two, got h = {h}"
        )));
    }
    DyadicFamily::whole(&lv.w, lv.w.log2_cells())
}

/// `|{M^d_Q f > 2λ, M♯d_Q f ≤ γλ}| ≤ 2^n γ |{M^d_Q f > λ}|` in exact cell counts.
pub fn good_lambda(lv: &Level) -> Result<LevelOutcome> {
    let q = exact_root(lv)?;
    let w = lv.w;
    let cells = q.root_cells();
    let two_n = 1u64 << w.n;
    let depth = w.log2_cells();
    let mut scan = Scan::new();
    let mut violations = 0usize;
    for i in 0..GOODLAMBDA_FIELDS {
        let seed = lv.cfg.seed.wrapping_add(1000 + i);
        let spec = FieldSpec::RandomStep { seed, depth };
        let f = sample(&spec, &w)?;
        let md = dyadic_maximal(&f, &q)?;
        let ms = dyadic_sharp(&f, &q)?;
        let mean_abs = cells.iter().map(|&c| f.values()[c].abs()).sum::<f64>() / cells.len() as f64;
        for j in 0..GOODLAMBDA_LAMBDAS {
            let lambda = mean_abs + (j + 1) as f64 / 16.0;
            let rhs_count = cells.iter().filter(|&&c| md.values()[c] > lambda).count() as u64;
            for k in 0..GOODLAMBDA_GAMMAS {
                let gamma = (-(k as f64)).exp2();
                let lhs_count = cells
                    .iter()
                    .filter(|&&c| md.values()[c] > 2.0 * lambda && ms.values()[c] <= gamma * lambda)
                    .count() as u64;
                // lhs ≤ 2^n γ rhs, i.e. lhs · 2^k ≤ 2^n · rhs.
                let ok = (lhs_count << k) <= two_n * rhs_count;
                if !ok {
                    violations += 1;
                }
                let r = if lhs_count == 0 { 0.0 } else { (lhs_count << k) as f64 / (two_n * rhs_count) as f64 };
                scan.observe(r, || {
                    Witness::field(spec.label())
                        .with("lambda", lambda)
                        .with("gamma", gamma)
                        .with("lhs_cells", lhs_count as f64)
                        .with("rhs_cells", rhs_count as f64)
                });
            }
        }
    }
    Ok(LevelOutcome::bounded(scan, 1.0).and(violations == 0).with_details(json!({
        "fields": GOODLAMBDA_FIELDS,
        "gammas": (0..GOODLAMBDA_GAMMAS).map(|k| (-(k as f64)).exp2()).collect::<Vec<_>>(),
        "lambdas_per_field": GOODLAMBDA_LAMBDAS,
        "violations": violations,
        "tolerance": 0,
    })))
}

/// The constant `C_{n,Φ} + 2C_Φ` for `Φ(t) = t^p`, assembled from the
/// doubling constants `C_Φ = 2^p`, `C_{Φ'} = 2^{p-1}` and the choice
/// `2^{n+1} γ C_{Φ'} = 1/2`.
pub fn modular_constant(n: u32, p: f64) -> f64 {
    let c_phi = p.exp2();
    let c_dphi = (p - 1.0).exp2();
    let gamma = 1.0 / ((n + 2) as f64).exp2() / c_dphi;
    4.0 * c_dphi * gamma.powf(-p) + 2.0 * c_phi
}

/// `∫_Q Φ(M^d_Q(f - f_Q)) ≤ K ∫_Q Φ(M♯d_Q f)` over the bank for power functions.
pub fn dyadic_modular(lv: &Level) -> Result<LevelOutcome> {
    let w = lv.w;
    let q = DyadicFamily::whole(&w, w.log2_cells())?;
    let cells = q.root_cells();
    let mut exponents = vec![1.5, 2.0, 3.0];
    if let YoungFunction::Power { p } = lv.cfg.young.phi {
        if !exponents.contains(&p) {
            exponents.push(p);
        }
    }
    let mut scan = Scan::new();
    let mut violations = 0usize;
    let mut rows = Vec::new();
    for bf in &lv.bank {
        let f = &bf.field;
        let mean = cells.iter().map(|&c| f.values()[c]).sum::<f64>() / cells.len() as f64;
        let centered = f.map(|v| v - mean);
        let md = dyadic_maximal(&centered, &q)?;
        let ms = dyadic_sharp(f, &q)?;
        for &p in &exponents {
            let phi = YoungFunction::power(p)?;
            let k = modular_constant(w.n, p);
            let lhs: f64 = cells.iter().map(|&c| phi.eval(md.values()[c])).sum();
            let rhs: f64 = cells.iter().map(|&c| phi.eval(ms.values()[c])).sum();
            let r = ratio(lhs, rhs);
            if !(lhs <= k * rhs) {
                violations += 1;
            }
            rows.push(json!({ "field": bf.id, "p": p, "K": k, "ratio": r }));
            scan.observe(r / k, || Witness::field(bf.id.clone()).with("p", p).with("K", k).with("ratio", r));
        }
    }
    Ok(LevelOutcome::bounded(scan, 1.0)
        .and(violations == 0)
        .with_details(json!({ "normalised_by": "K", "violations": violations, "rows": rows })))
}
