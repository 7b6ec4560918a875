//! Empirical operator norms over a field bank.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Ball, BallFamily, SampledField};
use crate::growth::GrowthFunction;
use crate::norms::om_norm;
use crate::young::YoungFunction;

use super::bank::BankField;

/// The Orlicz-Morrey norm `‖·‖_{L^{(Φ,φ)}}` on a ball family.
#[derive(Clone, Copy, Debug)]
pub struct NormSpec<'a> {
    pub young: &'a YoungFunction,
    pub growth: &'a GrowthFunction,
}

impl<'a> NormSpec<'a> {
    pub fn new(young: &'a YoungFunction, growth: &'a GrowthFunction) -> Self {
        NormSpec { young, growth }
    }

    pub fn eval(&self, f: &SampledField, fam: &BallFamily) -> Result<(f64, Option<Ball>)> {
        let r = om_norm(f, self.young, self.growth, fam)?;
        Ok((r.value, r.attaining_ball))
    }
}

/// One bank member's contribution to an empirical norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldRatio {
    pub field_id: String,
    pub in_norm: f64,
    pub out_norm: f64,
    pub ratio: f64,
    /// Ball attaining the output norm.
    pub ball: Option<Ball>,
}

/// `max_f ‖Op f‖_out / ‖f‖_in` over a bank with the maximizing field.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub field_id: String,
    pub per_field: Vec<FieldRatio>,
}

/// Lower estimate of the operator norm from `in` to `out` on the bank.
/// Fields with `‖f‖_in = 0` are skipped.
pub fn empirical_norm<F>(op: F, bank: &[BankField], input: NormSpec, output: NormSpec, fam: &BallFamily) -> Result<RatioReport>
where
    F: Fn(&SampledField) -> Result<SampledField>,
{
    if bank.is_empty() {
        return Err(Error::Validation("empirical norm needs a nonempty bank".into()));
    }
    let mut per_field = Vec::with_capacity(bank.len());
    for bf in bank {
        let (in_norm, _) = input.eval(&bf.field, fam)?;
        if in_norm == 0.0 {
            continue;
        }
        let g = op(&bf.field)?;
        let (out_norm, ball) = output.eval(&g, fam)?;
        let ratio = out_norm / in_norm;
        per_field.push(FieldRatio { field_id: bf.id.clone(), in_norm, out_norm, ratio, ball });
    }
    let best = per_field
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, r)| {
            let v = if r.ratio.is_nan() { f64::INFINITY } else { r.ratio };
            match acc {
                Some((_, m)) if m >= v => acc,
                _ => Some((i, v)),
            }
        })
        .ok_or_else(|| Error::Validation("every bank member has zero input norm".into()))?;
    Ok(RatioReport { ratio: best.1, field_id: per_field[best.0].field_id.clone(), per_field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ball_family, sample, BallPolicy, FieldSpec, Window};

    fn bank(w: &Window) -> Vec<BankField> {
        [FieldSpec::Oscillatory { k: 2.0 }, FieldSpec::PowerSingular { beta: 0.25 }]
            .into_iter()
            .enumerate()
            .map(|(i, spec)| BankField { id: format!("f{i:02}"), field: sample(&spec, w).unwrap(), spec })
            .collect()
    }

    #[test]
    fn identity_and_scalar_multiple() {
        let w = Window::new(1, 4.0, 64).unwrap();
        let fam = ball_family(&w, BallPolicy::full()).unwrap();
        let phi = YoungFunction::power(2.0).unwrap();
        let vp = GrowthFunction::power_neg(1.0);
        let spec = NormSpec::new(&phi, &vp);
        let b = bank(&w);
        let id = empirical_norm(|f| Ok(f.clone()), &b, spec, spec, &fam).unwrap();
        assert!((id.ratio - 1.0).abs() < 1e-14);
        let two = empirical_norm(|f| Ok(f.scale(2.0)), &b, spec, spec, &fam).unwrap();
        assert!((two.ratio - 2.0).abs() < 1e-14);
        assert!(empirical_norm(|f| Ok(f.clone()), &[], spec, spec, &fam).is_err());
    }
}
