//! Checks on ball norms, Morrey and Campanato norms and their comparisons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::Result;
use crate::field::{Ball, SampledField};
use crate::growth::GrowthFunction;
use crate::maximal::sharp_maximal;
use crate::norms::{campanato_norm, campanato_p, default_sigma_ladder, om_norm, sigma_limit, BallSample};
use crate::tolerances::ROUNDING_SLACK;
use crate::young::YoungFunction;

use super::super::bank::Level;
use super::super::outcome::{LevelOutcome, Scan, Witness};
use super::{deviation, inverse_between, mean_on, ratio};

/// Relative tolerance of the closed form `‖cχ_B‖_{Φ,φ,B} = c/Φ⁻¹(φ(r))`.
pub const CHI_CLOSED_FORM_TOL: f64 = 1e-8;

/// Random field pairs and balls per pair of the Hölder check.
pub const HOLDER_PAIRS: usize = 50;
pub const HOLDER_BALLS_PER_PAIR: usize = 16;

fn dedup<T: PartialEq>(v: Vec<T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in v {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// The family ball of radius `r` whose center is closest to the origin.
fn central_ball(lv: &Level, r: f64) -> Option<Ball> {
    let norm = |b: &Ball| {
        let c = b.center(&lv.w);
        c[0] * c[0] + c[1] * c[1]
    };
    lv.fam
        .balls
        .iter()
        .filter(|b| b.radius == r)
        .min_by(|a, b| norm(a).total_cmp(&norm(b)))
        .copied()
}

fn ladder(lv: &Level) -> Vec<f64> {
    let mut r: Vec<f64> = lv.fam.balls.iter().map(|b| b.radius).collect();
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

/// Closed form of the characteristic-function ball norm and the sandwich
/// `1/Φ⁻¹(φ(r)) ≤ ‖χ_B‖_{L^{(Φ,φ)}} ≤ C/Φ⁻¹(φ(r))`.
pub fn chi_norm(lv: &Level) -> Result<LevelOutcome> {
    let cfg = lv.cfg;
    let w = lv.w;
    let n = w.n as f64;
    let mut youngs = vec![cfg.young.phi.clone()];
    youngs.extend(cfg.young.psi.clone());
    youngs.extend([
        YoungFunction::power(2.0)?,
        YoungFunction::power_log(1.0, 1.0)?,
        YoungFunction::ExpMinusOne,
        YoungFunction::LinearCap,
    ]);
    let youngs = dedup(youngs);
    let growths = dedup(vec![cfg.growth.vp.clone(), GrowthFunction::power_neg(n), GrowthFunction::power_neg(n / 2.0)]);
    let radii: Vec<f64> = ladder(lv).into_iter().filter(|&r| r <= w.half_width / 2.0).collect();

    // Closed form on single balls.
    let mut closed = 0.0f64;
    let mut closed_witness = None;
    for phi in &youngs {
        for vp in &growths {
            for &r in &radii {
                let b = central_ball(lv, r).expect("radius from the family");
                let shape = b.shape(&w)?;
                for c in [1.0, 2.5] {
                    let mut vals = vec![0.0; w.len()];
                    for s in &shape.spans {
                        for v in &mut vals[s.start..=s.end] {
                            *v = c;
                        }
                    }
                    let f = SampledField::new(w, vals)?;
                    let (got, _) = BallSample::of(&f, &shape).luxemburg(phi, vp.eval(r)?);
                    let want = c / phi.inverse(vp.eval(r)?);
                    let err = (got - want).abs() / want;
                    if err > closed || closed_witness.is_none() {
                        closed = closed.max(err);
                        closed_witness =
                            Some(json!({ "young": phi.label(), "growth": vp.label(), "radius": r, "c": c, "relative_error": err }));
                    }
                }
            }
        }
    }

    // Sandwich over the configured (Φ, φ) and (Ψ, φ).
    let mut scan = Scan::new();
    let mut lower_ok = true;
    let mut rows = Vec::new();
    let mut sandwich_youngs = vec![cfg.young.phi.clone()];
    sandwich_youngs.extend(cfg.young.psi.clone());
    for phi in dedup(sandwich_youngs) {
        for &r in &radii {
            let b = central_ball(lv, r).expect("radius from the family");
            let shape = b.shape(&w)?;
            let mut vals = vec![0.0; w.len()];
            for s in &shape.spans {
                for v in &mut vals[s.start..=s.end] {
                    *v = 1.0;
                }
            }
            let f = SampledField::new(w, vals)?;
            let vp = &cfg.growth.vp;
            let norm = om_norm(&f, &phi, vp, &lv.fam)?;
            let c = norm.value * phi.inverse(vp.eval(r)?);
            lower_ok &= c >= 1.0 - CHI_CLOSED_FORM_TOL;
            rows.push(json!({ "young": phi.label(), "radius": r, "constant": c }));
            let label = format!("chi-ball-r{r}");
            let at = norm.attaining_ball;
            scan.observe(c, || {
                let wt = Witness::field(label).with_ball(&w, &b).with_note(format!("young {}", phi.label()));
                match at {
                    Some(a) => wt.with("attaining_radius", a.radius),
                    None => wt,
                }
            });
        }
    }
    let closed_ok = closed <= CHI_CLOSED_FORM_TOL;
    Ok(LevelOutcome::bounded(scan, cfg.tolerances.chi_cap)
        .and(closed_ok && lower_ok)
        .with_constant("closed_form_relative_error", closed)
        .with_details(json!({
            "closed_form": { "max_relative_error": closed, "tolerance": CHI_CLOSED_FORM_TOL, "worst": closed_witness },
            "sandwich_lower_bound_holds": lower_ok,
            "sandwich": rows,
        })))
}

/// Random fields for the Hölder check: cell values uniform in `[-2, 2]`.
fn random_field(lv: &Level, seed: u64) -> Result<SampledField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..lv.w.len()).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    SampledField::new(lv.w, vals)
}

/// `(1/φ(r)) ⨍_B |fg| ≤ 2 ‖f‖_{Φ,φ,B} ‖g‖_{Φ̃,φ,B}` on random pairs and balls.
pub fn holder_ball(lv: &Level) -> Result<LevelOutcome> {
    let cfg = lv.cfg;
    let w = lv.w;
    let mut youngs = vec![cfg.young.phi.clone()];
    for extra in [YoungFunction::power(3.0)?, YoungFunction::ExpMinusOne, YoungFunction::power(2.0)?] {
        if youngs.len() < 3 && !youngs.contains(&extra) {
            youngs.push(extra);
        }
    }
    let vp = &cfg.growth.vp;
    let mut scan = Scan::new();
    let mut violations = 0usize;
    let bound = 2.0 * (1.0 + ROUNDING_SLACK);
    let base = cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for pair in 0..HOLDER_PAIRS as u64 {
        let f = random_field(lv, base.wrapping_add(2 * pair))?;
        let g = random_field(lv, base.wrapping_add(2 * pair + 1))?;
        let fg = f.zip(&g, |a, b| a * b)?;
        let mut rng = ChaCha8Rng::seed_from_u64(base ^ (pair + 1));
        let balls: Vec<usize> = (0..HOLDER_BALLS_PER_PAIR).map(|_| rng.gen_range(0..lv.fam.len())).collect();
        for phi in &youngs {
            let conj = phi.complementary();
            for &bi in &balls {
                let b = lv.fam.balls[bi];
                let shape = &lv.fam.shapes[bi];
                let u = vp.eval(b.radius)?;
                let lhs = BallSample::of(&fg, shape).mean_of(|v| v) / u;
                let (nf, _) = BallSample::of(&f, shape).luxemburg(phi, u);
                let (ng, _) = BallSample::of(&g, shape).luxemburg(&conj, u);
                let r = ratio(lhs, nf * ng);
                if r > bound {
                    violations += 1;
                }
                scan.observe(r, || {
                    Witness::field(format!("random-pair-{pair}"))
                        .with_ball(&w, &b)
                        .with("pair", pair as f64)
                        .with_note(format!("young {}", phi.label()))
                });
            }
        }
    }
    let labels: Vec<String> = youngs.iter().map(|y| y.label()).collect();
    Ok(LevelOutcome::bounded(scan, bound).with_details(json!({
        "pairs": HOLDER_PAIRS,
        "balls_per_pair": HOLDER_BALLS_PER_PAIR,
        "young": labels,
        "violations": violations,
    })))
}

/// `⨍_B |f| ≤ 2 Φ⁻¹(φ(r)) ‖f‖_{Φ,φ,B}` over the bank and the family.
pub fn mean_bound(lv: &Level) -> Result<LevelOutcome> {
    let cfg = lv.cfg;
    let (phi, vp) = (&cfg.young.phi, &cfg.growth.vp);
    let mut scan = Scan::new();
    for bf in &lv.bank {
        let rows = crate::parallel::try_map_indices(lv.fam.len(), |i| -> Result<f64> {
            let b = lv.fam.balls[i];
            let sample = BallSample::of(&bf.field, &lv.fam.shapes[i]);
            let u = vp.eval(b.radius)?;
            let (norm, _) = sample.luxemburg(phi, u);
            Ok(ratio(sample.mean_of(|v| v), phi.inverse(u) * norm))
        })?;
        for (i, r) in rows.into_iter().enumerate() {
            scan.observe(r, || Witness::field(bf.id.clone()).with_ball(&lv.w, &lv.fam.balls[i]));
        }
    }
    Ok(LevelOutcome::bounded(scan, 2.0 * (1.0 + ROUNDING_SLACK)))
}

/// Per-field quantities shared by the sharp-function comparisons.
struct SharpRow {
    id: String,
    campanato: f64,
    sharp_norm: f64,
    morrey_centered: f64,
    sigma: f64,
    sigma_converged: bool,
    compact: bool,
    camp_ball: Option<Ball>,
}

fn sharp_rows(lv: &Level, need_morrey: bool) -> Result<Vec<SharpRow>> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let ladder = default_sigma_ladder(&lv.w);
    let mut rows = Vec::new();
    for bf in &lv.bank {
        let camp = campanato_norm(&bf.field, phi, vp, &lv.fam)?;
        let ms = sharp_maximal(&bf.field, &lv.fam)?;
        let sharp_norm = om_norm(&ms, phi, vp, &lv.fam)?.value;
        let sig = sigma_limit(&bf.field, &ladder)?;
        let morrey_centered = if need_morrey {
            let s = sig.value;
            om_norm(&bf.field.map(|v| v - s), phi, vp, &lv.fam)?.value
        } else {
            f64::NAN
        };
        rows.push(SharpRow {
            id: bf.id.clone(),
            campanato: camp.value,
            sharp_norm,
            morrey_centered,
            sigma: sig.value,
            sigma_converged: sig.converged,
            compact: bf.spec.compact_in_window(&lv.w),
            camp_ball: camp.attaining_ball,
        });
    }
    Ok(rows)
}

fn witness_for(lv: &Level, row: &SharpRow) -> Witness {
    let w = Witness::field(row.id.clone());
    match row.camp_ball {
        Some(b) => w.with_ball(&lv.w, &b),
        None => w,
    }
}

/// `‖f‖_{𝓛^{(Φ,φ)}} ≤ C ‖M♯f‖_{L^{(Φ,φ)}}` over the bank.
pub fn sharp_lower(lv: &Level) -> Result<LevelOutcome> {
    let rows = sharp_rows(lv, false)?;
    let mut scan = Scan::new();
    let mut table = Vec::new();
    for row in &rows {
        let r = ratio(row.campanato, row.sharp_norm);
        table.push(json!({ "field": row.id, "campanato": row.campanato, "sharp_morrey": row.sharp_norm, "ratio": r }));
        scan.observe(r, || witness_for(lv, row));
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap).with_details(json!({ "fields": table })))
}

/// `C⁻¹‖f‖_𝓛 ≤ ‖M♯f‖ ≤ C‖f‖_𝓛` over the bank.
pub fn sharp_equiv(lv: &Level) -> Result<LevelOutcome> {
    let rows = sharp_rows(lv, false)?;
    let mut scan = Scan::new();
    let mut up = 0.0f64;
    let mut down = 0.0f64;
    for row in &rows {
        let a = ratio(row.campanato, row.sharp_norm);
        let b = ratio(row.sharp_norm, row.campanato);
        up = up.max(b);
        down = down.max(a);
        scan.observe(a.max(b), || witness_for(lv, row));
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap)
        .with_constant("campanato_over_sharp", down)
        .with_constant("sharp_over_campanato", up))
}

/// `‖f‖_{L^{(Φ,φ)}} ≤ C ‖M♯f‖_{L^{(Φ,φ)}}` for the bank members with `σ(f) = 0`.
pub fn sharp_morrey(lv: &Level) -> Result<LevelOutcome> {
    let rows = sharp_rows(lv, true)?;
    let tol = lv.cfg.tolerances.sigma;
    let mut scan = Scan::new();
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    for row in &rows {
        if !(row.sigma_converged && row.sigma.abs() <= tol) {
            skipped.push(json!({ "field": row.id, "sigma": row.sigma, "converged": row.sigma_converged }));
            continue;
        }
        let r = ratio(row.morrey_centered, row.sharp_norm);
        used.push(json!({ "field": row.id, "morrey": row.morrey_centered, "sharp_morrey": row.sharp_norm, "ratio": r }));
        scan.observe(r, || witness_for(lv, row));
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap).with_details(json!({ "fields": used, "skipped": skipped })))
}

/// `c⁻¹‖f‖_𝓛 ≤ ‖f - σ(f)‖_{L^{(Φ,φ)}} ≤ c‖f‖_𝓛`, plus `σ(f) = 0` for
/// compactly supported members.
pub fn bridge(lv: &Level) -> Result<LevelOutcome> {
    let rows = sharp_rows(lv, true)?;
    let tol = lv.cfg.tolerances.sigma;
    let mut scan = Scan::new();
    let mut converged = true;
    let mut sigma_ok = true;
    let mut table = Vec::new();
    for row in &rows {
        converged &= row.sigma_converged;
        if row.compact {
            sigma_ok &= row.sigma.abs() <= tol;
        }
        let a = ratio(row.morrey_centered, row.campanato);
        let b = ratio(row.campanato, row.morrey_centered);
        table.push(json!({
            "field": row.id,
            "sigma": row.sigma,
            "sigma_converged": row.sigma_converged,
            "compact": row.compact,
            "morrey_centered": row.morrey_centered,
            "campanato": row.campanato,
        }));
        scan.observe(a.max(b), || witness_for(lv, row).with("sigma", row.sigma));
    }
    let mut out = LevelOutcome::bounded(scan, lv.cfg.tolerances.bridge_cap).and(sigma_ok);
    out.converged = converged;
    Ok(out.with_details(json!({ "sigma_zero_on_compact_members": sigma_ok, "fields": table })))
}

/// `campanato_p(b, 2, ψ) / campanato_p(b, 1, ψ)` inside `[1/band, band]` over the b-bank.
pub fn jn_equiv(lv: &Level) -> Result<LevelOutcome> {
    let psi = lv.psi()?;
    let mut scan = Scan::new();
    let mut table = Vec::new();
    for bf in &lv.b_bank {
        let c1 = campanato_p(&bf.field, 1.0, psi, &lv.fam)?;
        let c2 = campanato_p(&bf.field, 2.0, psi, &lv.fam)?;
        let r = ratio(c2.value, c1.value);
        let worst = if r == 0.0 { 0.0 } else { r.max(1.0 / r) };
        table.push(json!({ "b": bf.id, "p1": c1.value, "p2": c2.value, "ratio": r }));
        scan.observe(worst, || {
            let w = Witness::field(bf.id.clone());
            match c2.attaining_ball {
                Some(b) => w.with_ball(&lv.w, &b),
                None => w,
            }
        });
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.jn_band).with_details(json!({ "p": 2, "b_bank": table })))
}

/// Nested-ball mean differences: the factor-2 bound for concentric balls and
/// the integral chain bound with one constant.
pub fn chain(lv: &Level) -> Result<LevelOutcome> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let w = lv.w;
    let fam = &lv.fam;
    let radii = ladder(lv);
    let k = radii.len();
    let bound = 2.0 * (1.0 + ROUNDING_SLACK);
    let mut nested = Scan::new();
    let mut integral = Scan::new();
    // Family balls come in runs of `k` radii per center.
    let centers = fam.len() / k;
    let origin_run = (0..centers)
        .min_by(|&a, &b| {
            let ca = fam.balls[a * k].center(&w);
            let cb = fam.balls[b * k].center(&w);
            (ca[0].powi(2) + ca[1].powi(2)).total_cmp(&(cb[0].powi(2) + cb[1].powi(2)))
        })
        .expect("nonempty family");
    let c0 = fam.balls[origin_run * k].center(&w);
    for bf in &lv.bank {
        let f = &bf.field;
        let camp = campanato_norm(f, phi, vp, fam)?.value;
        let means: Vec<f64> = crate::parallel::map_indices(fam.len(), |i| mean_on(f, &fam.shapes[i]));
        for c in 0..centers {
            for j in 0..k {
                let b1 = c * k + j;
                let r = fam.balls[b1].radius;
                for l in j + 1..k {
                    let b2 = c * k + l;
                    let s = fam.balls[b2].radius;
                    let diff = (means[b1] - means[b2]).abs();
                    let mass = fam.shapes[b2].total / fam.shapes[b1].total;
                    let r_nested = ratio(diff, mass * phi.inverse(vp.at(s)) * camp);
                    nested.observe(r_nested, || {
                        Witness::field(bf.id.clone()).with_ball(&w, &fam.balls[b1]).with("outer_radius", s)
                    });
                    let r_int = ratio(diff, inverse_between(phi, vp, r, 2.0 * s) * camp);
                    integral.observe(r_int, || {
                        Witness::field(bf.id.clone()).with_ball(&w, &fam.balls[b1]).with("outer_radius", s)
                    });
                }
                // B(a, r) inside the smallest ball around the central center that contains it.
                let a = fam.balls[b1].center(&w);
                let d = ((a[0] - c0[0]).powi(2) + (a[1] - c0[1]).powi(2)).sqrt();
                if let Some(l) = (0..k).find(|&l| radii[l] >= d + r && (c != origin_run || l > j)) {
                    let b2 = origin_run * k + l;
                    let s = radii[l];
                    let diff = (means[b1] - means[b2]).abs();
                    let r_int = ratio(diff, inverse_between(phi, vp, r, 2.0 * s) * camp);
                    integral.observe(r_int, || {
                        Witness::field(bf.id.clone())
                            .with_ball(&w, &fam.balls[b1])
                            .with("outer_radius", s)
                            .with_note("outer ball at the central center")
                    });
                }
            }
        }
    }
    let nested_ok = nested.worst <= bound;
    Ok(LevelOutcome::bounded(integral, lv.cfg.tolerances.cap)
        .and(nested_ok)
        .with_details(json!({
            "nested_factor_two": { "worst_ratio": nested.worst, "bound": bound, "witness": nested.witness },
        })))
}

/// `(⨍_{B(x,s)} |b - b_{B(x,r)}|^p)^{1/p} ≤ C ∫_r^s ψ(t)/t dt ‖b‖_{𝓛_{1,ψ}}`
/// for `2r < s`, with the logarithmic variant tracked alongside.
pub fn osc_growth(lv: &Level) -> Result<LevelOutcome> {
    let psi = lv.psi()?;
    let w = lv.w;
    let fam = &lv.fam;
    let radii = ladder(lv);
    let k = radii.len();
    let centers = fam.len() / k;
    let mut integral = Scan::new();
    let mut log_form = Scan::new();
    for bf in &lv.b_bank {
        let b = &bf.field;
        let norm = campanato_p(b, 1.0, psi, fam)?.value;
        for p in [1.0, 2.0] {
            let rows = crate::parallel::map_indices(centers, |c| {
                let mut out = Vec::new();
                for j in 0..k {
                    let inner = &fam.shapes[c * k + j];
                    let m = mean_on(b, inner);
                    let r = radii[j];
                    for (l, &s) in radii.iter().enumerate().skip(j + 1) {
                        if !(2.0 * r < s) {
                            continue;
                        }
                        let lhs = deviation(b, &fam.shapes[c * k + l], m, p);
                        let a = ratio(lhs, psi.integral_between(r, s) * norm);
                        let g = ratio(lhs, (s / r).log2() * psi.at(s) * norm);
                        out.push((j, l, a, g));
                    }
                }
                out
            });
            for (c, list) in rows.into_iter().enumerate() {
                for (j, l, a, g) in list {
                    let wit = || {
                        Witness::field(bf.id.clone())
                            .with_ball(&w, &fam.balls[c * k + j])
                            .with("outer_radius", radii[l])
                            .with("p", p)
                    };
                    integral.observe(a, wit);
                    log_form.observe(g, wit);
                }
            }
        }
    }
    let log_worst = log_form.worst;
    Ok(LevelOutcome::bounded(integral, lv.cfg.tolerances.cap)
        .and(log_worst.is_finite() && log_worst <= lv.cfg.tolerances.cap)
        .with_constant("log_variant", log_worst)
        .with_details(json!({ "log_variant_witness": log_form.witness })))
}
