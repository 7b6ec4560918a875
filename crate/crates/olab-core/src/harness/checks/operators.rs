//! Checks on tails, maximal operators and commutators.

use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{Ball, SampledField};
use crate::growth::{check_pairing, GrowthFunction, PairingInputs, PairingKind};
use crate::integral::{tail_ratio, Stencil, TailNorms, TailOperator};
use crate::maximal::{frac_maximal, hl_maximal, sharp_maximal, weighted_maximal};
use crate::norms::{campanato_norm, campanato_p, default_sigma_ladder, om_norm, sigma_limit};
use crate::report::default_r_grid;
use crate::young::YoungFunction;

use super::super::bank::{BankField, Level};
use super::super::config::OperatorKind;
use super::super::empirical::{empirical_norm, NormSpec};
use super::super::outcome::{LevelOutcome, Scan, Witness};
use super::ratio;

/// Scale factor of the tail radius in the `I_ρ` tail estimates.
pub const FRACT_TAIL_K1: f64 = 0.5;

/// Exponent η of the pointwise commutator estimates.
pub const ETA: f64 = 2.0;

/// Bank members with a zero exterior, the admissible operator inputs.
fn operator_inputs<'l>(lv: &'l Level) -> Vec<&'l BankField> {
    lv.bank.iter().filter(|b| b.field.exterior() == 0.0).collect()
}

/// Balls of the tail checks: a coarse grid of centers and radii up to `L`.
fn tail_balls(lv: &Level) -> Vec<Ball> {
    let w = lv.w;
    let per_axis = if w.n == 1 { 8 } else { 4 };
    let stride = (w.cells / per_axis).max(1);
    let ys: Vec<usize> = if w.n == 1 { vec![0] } else { (stride / 2..w.cells).step_by(stride).collect() };
    let mut radii: Vec<f64> = lv.fam.balls.iter().map(|b| b.radius).filter(|&r| r <= w.half_width).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut out = Vec::new();
    for &iy in &ys {
        for ix in (stride / 2..w.cells).step_by(stride) {
            for &r in &radii {
                out.push(Ball::at_cell(&w, w.index(ix, iy), r));
            }
        }
    }
    out
}

fn tail_check(lv: &Level, op: TailOperator, weighted: bool) -> Result<LevelOutcome> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let balls = tail_balls(lv);
    let psi = if weighted { Some(lv.psi()?) } else { None };
    let mut scan = Scan::new();
    let one = [None];
    for bf in operator_inputs(lv) {
        let fnorm = om_norm(&bf.field, phi, vp, &lv.fam)?.value;
        if fnorm == 0.0 {
            continue;
        }
        let bs: Vec<Option<&BankField>> = if weighted { lv.b_bank.iter().map(Some).collect() } else { one.to_vec() };
        for b in bs {
            let (bpair, bnorm) = match (b, psi) {
                (Some(b), Some(psi)) => (Some((&b.field, psi)), Some(campanato_p(&b.field, 1.0, psi, &lv.fam)?.value)),
                _ => (None, None),
            };
            if bnorm == Some(0.0) {
                continue;
            }
            let rows = crate::parallel::try_map_indices(balls.len(), |i| {
                tail_ratio(&bf.field, bpair, &balls[i], &op, phi, vp, TailNorms { f: fnorm, b: bnorm })
            })?;
            for (i, t) in rows.into_iter().enumerate() {
                scan.observe(t.ratio, || {
                    let wt = Witness::field(bf.id.clone()).with_ball(&lv.w, &balls[i]).with_cell(&lv.w, t.at_cell);
                    match b {
                        Some(b) => wt.with_b(b.id.clone()),
                        None => wt,
                    }
                });
            }
        }
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap).with_details(json!({ "balls": balls.len() })))
}

/// Tail of the singular integral outside `2B`.
pub fn tail_cz(lv: &Level) -> Result<LevelOutcome> {
    tail_check(lv, TailOperator::Cz(lv.kernel()?), false)
}

/// Tail of `I_ρ` outside `B(x, r)`.
pub fn tail_ir(lv: &Level) -> Result<LevelOutcome> {
    tail_check(lv, TailOperator::Fract { rho: lv.rho()?.clone(), k1: FRACT_TAIL_K1 }, false)
}

/// Tail of `I_ρ` with the multiplier `|b - b_B|`.
pub fn tail_ir_psi(lv: &Level) -> Result<LevelOutcome> {
    tail_check(lv, TailOperator::Fract { rho: lv.rho()?.clone(), k1: FRACT_TAIL_K1 }, true)
}

fn psi_y<'l>(lv: &'l Level) -> Result<&'l YoungFunction> {
    lv.cfg.young.psi.as_ref().ok_or(Error::MissingAux("Psi"))
}

fn maximal_pairing(lv: &Level) -> Result<crate::report::ConditionReport> {
    let inp = PairingInputs {
        phi: Some(lv.cfg.young.phi.clone()),
        psi_y: Some(psi_y(lv)?.clone()),
        vp: Some(lv.cfg.growth.vp.clone()),
        rho: Some(lv.rho()?.clone()),
        ..Default::default()
    };
    check_pairing(PairingKind::Maximal, &inp, &default_r_grid())
}

/// `M_ρ f(x) ≤ C₁ ‖f‖ Ψ⁻¹(Φ(Mf(x)/‖f‖))` with `C₀ = 1`; the worst ratio is the minimal `C₁`.
pub fn mr_pointwise(lv: &Level) -> Result<LevelOutcome> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let psi_y = psi_y(lv)?;
    let rho = lv.rho()?;
    let pairing = maximal_pairing(lv)?;
    let mut scan = Scan::new();
    for bf in &lv.bank {
        let norm = om_norm(&bf.field, phi, vp, &lv.fam)?.value;
        if norm == 0.0 {
            continue;
        }
        let mr = frac_maximal(&bf.field, rho, &lv.fam)?;
        let m = hl_maximal(&bf.field, &lv.fam)?;
        for (i, (&a, &b)) in mr.values().iter().zip(m.values()).enumerate() {
            let r = ratio(a, norm * psi_y.inverse(phi.eval(b / norm)));
            scan.observe(r, || Witness::field(bf.id.clone()).with_cell(&lv.w, i));
        }
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap).and(pairing.holds).with_details(json!({
        "c0": 1.0,
        "maximal_pairing": pairing,
    })))
}

/// `empirical_norm(M_ρ)` from `L^{(Φ,φ)}` to `L^{(Ψ,φ)}`.
pub fn mr_bounded(lv: &Level) -> Result<LevelOutcome> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let psi_y = psi_y(lv)?;
    let rho = lv.rho()?;
    let pairing = maximal_pairing(lv)?;
    let rep = empirical_norm(
        |f| frac_maximal(f, rho, &lv.fam),
        &lv.bank,
        NormSpec::new(phi, vp),
        NormSpec::new(psi_y, vp),
        &lv.fam,
    )?;
    let mut scan = Scan::new();
    for r in &rep.per_field {
        scan.observe(r.ratio, || {
            let w = Witness::field(r.field_id.clone());
            match r.ball {
                Some(b) => w.with_ball(&lv.w, &b),
                None => w,
            }
        });
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap).and(pairing.holds).with_details(json!({
        "maximal_pairing": pairing,
        "per_field": rep.per_field,
    })))
}

/// `(M_{w^η}(|g|^η))^{1/η}` with weight `w`.
fn eta_maximal<W: Fn(f64) -> f64 + Sync + Send>(g: &SampledField, weight: W, lv: &Level) -> Result<SampledField> {
    let gp = g.map(|v| v.abs().powf(ETA));
    Ok(weighted_maximal(&gp, |r| weight(r).powf(ETA), &lv.fam)?.map(|v| v.powf(1.0 / ETA)))
}

fn comm_pointwise(lv: &Level, fract: bool) -> Result<LevelOutcome> {
    let psi = lv.psi()?;
    let (st, rho): (&Stencil, Option<&GrowthFunction>) = if fract { (lv.frac()?, Some(lv.rho()?)) } else { (lv.cz()?, None) };
    let mut scan = Scan::new();
    for bf in operator_inputs(lv) {
        let f = &bf.field;
        let opf = st.convolve(f)?;
        let first = eta_maximal(&opf, |r| psi.at(r), lv)?;
        let second = match rho {
            Some(rho) => eta_maximal(f, |r| rho.rho_star(r).unwrap_or(f64::INFINITY) * psi.at(r), lv)?,
            None => eta_maximal(f, |r| psi.at(r), lv)?,
        };
        for bb in &lv.b_bank {
            let bnorm = campanato_p(&bb.field, 1.0, psi, &lv.fam)?.value;
            let c = st.commutator(&bb.field, f)?;
            let ms = sharp_maximal(&c, &lv.fam)?;
            for i in 0..lv.w.len() {
                let r = ratio(ms.values()[i], bnorm * (first.values()[i] + second.values()[i]));
                scan.observe(r, || Witness::field(bf.id.clone()).with_b(bb.id.clone()).with_cell(&lv.w, i));
            }
        }
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap).with_details(json!({ "eta": ETA })))
}

/// Pointwise bound of `M♯([b, T]f)`.
pub fn comm_pw_cz(lv: &Level) -> Result<LevelOutcome> {
    comm_pointwise(lv, false)
}

/// Pointwise bound of `M♯([b, I_ρ]f)`.
pub fn comm_pw_ir(lv: &Level) -> Result<LevelOutcome> {
    comm_pointwise(lv, true)
}

fn configured_stencil<'l>(lv: &'l Level) -> Result<&'l Stencil> {
    match lv.cfg.operator {
        OperatorKind::Cz => lv.cz(),
        OperatorKind::Fract => lv.frac(),
    }
}

/// `σ([b, Op]f) = 0` for the compactly supported bank members.
pub fn mean_vanish(lv: &Level) -> Result<LevelOutcome> {
    let st = configured_stencil(lv)?;
    let ladder = default_sigma_ladder(&lv.w);
    let tol = lv.cfg.tolerances.sigma;
    let mut scan = Scan::new();
    let mut converged = true;
    let mut rows = Vec::new();
    for bf in lv.compact_members() {
        for bb in &lv.b_bank {
            let c = st.commutator(&bb.field, &bf.field)?;
            let s = sigma_limit(&c, &ladder)?;
            converged &= s.converged;
            let window_rungs: Vec<f64> = s.means.iter().map(|m| m.1).collect();
            rows.push(json!({ "field": bf.id, "b": bb.id, "sigma": s.value, "analytic_tail": s.analytic_tail, "means": window_rungs }));
            scan.observe(s.value.abs(), || Witness::field(bf.id.clone()).with_b(bb.id.clone()).with("sigma", s.value));
        }
    }
    let mut out = LevelOutcome::bounded(scan, tol);
    out.converged = converged;
    Ok(out.with_details(json!({ "operator": format!("{:?}", lv.cfg.operator), "rows": rows })))
}

/// The multiplier norm of a commutator bound.
enum BNorm<'a> {
    /// `‖b‖_{𝓛_{1,ψ}}`.
    P1(&'a GrowthFunction),
    /// `‖b‖_{𝓛^{(Φ₀,g)}}`.
    Campanato(&'a YoungFunction, &'a GrowthFunction),
}

fn comm_bound(lv: &Level, st: &Stencil, out: NormSpec, bnorm: BNorm) -> Result<LevelOutcome> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let mut scan = Scan::new();
    let mut rows = Vec::new();
    for bb in &lv.b_bank {
        let bn = match bnorm {
            BNorm::P1(psi) => campanato_p(&bb.field, 1.0, psi, &lv.fam)?.value,
            BNorm::Campanato(y, g) => campanato_norm(&bb.field, y, g, &lv.fam)?.value,
        };
        for bf in operator_inputs(lv) {
            let fnorm = om_norm(&bf.field, phi, vp, &lv.fam)?.value;
            if fnorm == 0.0 {
                continue;
            }
            let c = st.commutator(&bb.field, &bf.field)?;
            let on = om_norm(&c, out.young, out.growth, &lv.fam)?;
            let r = ratio(on.value, bn * fnorm);
            rows.push(json!({ "b": bb.id, "field": bf.id, "out_norm": on.value, "b_norm": bn, "f_norm": fnorm, "ratio": r }));
            scan.observe(r, || {
                let w = Witness::field(bf.id.clone()).with_b(bb.id.clone());
                match on.attaining_ball {
                    Some(b) => w.with_ball(&lv.w, &b),
                    None => w,
                }
            });
        }
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap).with_details(json!({ "rows": rows })))
}

/// `‖[b, T]f‖_{L^{(Ψ,φ)}} ≤ C ‖b‖_{𝓛_{1,ψ}} ‖f‖_{L^{(Φ,φ)}}`.
pub fn comm_bound_cz(lv: &Level) -> Result<LevelOutcome> {
    comm_bound(lv, lv.cz()?, NormSpec::new(psi_y(lv)?, &lv.cfg.growth.vp), BNorm::P1(lv.psi()?))
}

/// `‖[b, I_ρ]f‖_{L^{(Ψ,φ)}} ≤ C ‖b‖_{𝓛_{1,ψ}} ‖f‖_{L^{(Φ,φ)}}`.
pub fn comm_bound_ir(lv: &Level) -> Result<LevelOutcome> {
    comm_bound(lv, lv.frac()?, NormSpec::new(psi_y(lv)?, &lv.cfg.growth.vp), BNorm::P1(lv.psi()?))
}

fn phi0<'l>(lv: &'l Level) -> Result<&'l YoungFunction> {
    lv.cfg.young.phi0.as_ref().ok_or(Error::MissingAux("Phi0"))
}

/// `‖[b, T]f‖_{L^{(Ψ,θ)}} ≤ C ‖b‖_{𝓛^{(Φ₀,ψ)}} ‖f‖_{L^{(Φ,φ)}}`.
pub fn comm_bound_cz_dec(lv: &Level) -> Result<LevelOutcome> {
    let theta = lv.cfg.growth.theta.as_ref().ok_or(Error::MissingAux("theta"))?;
    comm_bound(lv, lv.cz()?, NormSpec::new(psi_y(lv)?, theta), BNorm::Campanato(phi0(lv)?, lv.psi()?))
}

/// `‖[b, I_ρ]f‖_{L^{(Ψ,φ)}} ≤ C ‖b‖_{𝓛^{(Φ₀,φ)}} ‖f‖_{L^{(Φ,φ)}}`.
pub fn comm_bound_ir_dec(lv: &Level) -> Result<LevelOutcome> {
    let vp = &lv.cfg.growth.vp;
    comm_bound(lv, lv.frac()?, NormSpec::new(psi_y(lv)?, vp), BNorm::Campanato(phi0(lv)?, vp))
}

/// Lower-bound pairing under which the necessity direction is stated.
fn necessity_pairing(lv: &Level) -> Result<crate::report::ConditionReport> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let psi_y = psi_y(lv)?;
    let psi = lv.psi()?;
    match lv.cfg.operator {
        OperatorKind::Cz => {
            let inp = PairingInputs {
                phi: Some(phi.clone()),
                psi_y: Some(psi_y.clone()),
                vp: Some(vp.clone()),
                psi: Some(psi.clone()),
                ..Default::default()
            };
            check_pairing(PairingKind::CzNec, &inp, &default_r_grid())
        }
        OperatorKind::Fract => {
            // Ψ⁻¹(φ(r)) ≤ C ρ(r) ψ(r) Φ⁻¹(φ(r)).
            let rho = lv.rho()?;
            let grid = default_r_grid();
            let mut rep = crate::report::ConditionReport::new("FRACT_NEC", crate::report::describe_grid(&grid));
            for &r in &grid {
                let u = vp.at(r);
                rep.observe(psi_y.inverse(u) / (rho.at(r) * psi.at(r) * phi.inverse(u)), &[r]);
            }
            Ok(rep.finish(crate::tolerances::CONDITION_CAP))
        }
    }
}

/// `‖b‖_{𝓛_{1,ψ}} / empirical_norm([b, Op])` over the b-bank.
pub fn necessity_ratio(lv: &Level) -> Result<LevelOutcome> {
    let (phi, vp) = (&lv.cfg.young.phi, &lv.cfg.growth.vp);
    let psi_y = psi_y(lv)?;
    let psi = lv.psi()?;
    let st = configured_stencil(lv)?;
    let pairing = necessity_pairing(lv)?;
    let inputs: Vec<BankField> = operator_inputs(lv).into_iter().cloned().collect();
    let mut scan = Scan::new();
    let mut rows = Vec::new();
    for bb in &lv.b_bank {
        let bn = campanato_p(&bb.field, 1.0, psi, &lv.fam)?.value;
        let rep = empirical_norm(
            |f| st.commutator(&bb.field, f),
            &inputs,
            NormSpec::new(phi, vp),
            NormSpec::new(psi_y, vp),
            &lv.fam,
        )?;
        let r = ratio(bn, rep.ratio);
        rows.push(json!({ "b": bb.id, "b_norm": bn, "empirical_norm": rep.ratio, "attained_by": rep.field_id, "ratio": r }));
        scan.observe(r, || Witness::field(rep.field_id.clone()).with_b(bb.id.clone()));
    }
    Ok(LevelOutcome::bounded(scan, lv.cfg.tolerances.cap)
        .and(pairing.holds)
        .with_details(json!({ "pairing": pairing, "rows": rows })))
}
