//! Default field banks and the per-level evaluation context.

use std::sync::OnceLock;

use crate::error::Result;
use crate::field::{ball_family, sample, BallFamily, FieldSpec, Region, SampledField, Window};
use crate::growth::GrowthFunction;
use crate::integral::{cz_stencil, frac_stencil, KernelSpec, Stencil};

use super::config::ExperimentConfig;

/// Depth of the RandomStep members of the default bank.
pub const RANDOM_STEP_DEPTH: u32 = 4;

fn ball(radius: f64) -> FieldSpec {
    FieldSpec::Indicator { region: Region::Ball { center: [0.0, 0.0], radius } }
}

/// The twelve default test functions for half-width `l`.
pub fn default_bank(l: f64, seed: u64) -> Vec<FieldSpec> {
    let mut bank = vec![
        ball(l / 16.0),
        ball(l / 4.0),
        ball(l / 2.0),
        FieldSpec::PowerSingular { beta: 0.25 },
        FieldSpec::PowerSingular { beta: 0.5 },
        FieldSpec::Oscillatory { k: 2.0 },
        FieldSpec::Oscillatory { k: 8.0 },
    ];
    for k in 0..4 {
        bank.push(FieldSpec::RandomStep { seed: seed.wrapping_add(k), depth: RANDOM_STEP_DEPTH });
    }
    bank.push(FieldSpec::Affine {
        terms: vec![(1.0, FieldSpec::Oscillatory { k: 2.0 }), (0.5, ball(l / 4.0))],
        offset: 0.0,
    });
    bank
}

/// Multipliers for the commutators, each tapered to zero at the window edge:
/// a clamped coordinate, the logarithm and a power matched to `ψ`.
pub fn default_b_bank(l: f64, psi: Option<&GrowthFunction>) -> Vec<FieldSpec> {
    let beta = match psi {
        Some(GrowthFunction::PowerPos { alpha }) if *alpha > 0.0 && *alpha <= 1.0 => *alpha,
        _ => 0.5,
    };
    let taper = |inner: FieldSpec| FieldSpec::Tapered { inner: Box::new(inner), width: l / 4.0 };
    vec![
        taper(FieldSpec::ClampedCoordinate { axis: 0, bound: l / 2.0 }),
        taper(FieldSpec::LogAbs),
        taper(FieldSpec::AbsPower { beta }),
    ]
}

/// A sampled bank member with a stable identifier.
#[derive(Clone, Debug)]
pub struct BankField {
    pub id: String,
    pub spec: FieldSpec,
    pub field: SampledField,
}

fn sample_bank(prefix: &str, specs: &[FieldSpec], w: &Window) -> Result<Vec<BankField>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut spec = spec.clone();
            if let FieldSpec::RandomStep { depth, .. } = &mut spec {
                *depth = (*depth).min(w.log2_cells());
            }
            Ok(BankField { id: format!("{prefix}{i:02}:{}", spec.label()), field: sample(&spec, w)?, spec })
        })
        .collect()
}

/// Everything the properties share at one refinement level.
pub struct Level<'a> {
    pub cfg: &'a ExperimentConfig,
    pub w: Window,
    pub fam: BallFamily,
    pub bank: Vec<BankField>,
    pub b_bank: Vec<BankField>,
    cz: OnceLock<Stencil>,
    frac: OnceLock<Stencil>,
}

impl<'a> Level<'a> {
    pub fn new(cfg: &'a ExperimentConfig, w: Window) -> Result<Self> {
        let l = cfg.window.half_width;
        let bank_specs = cfg.bank.clone().unwrap_or_else(|| default_bank(l, cfg.seed));
        let b_specs = cfg.b_bank.clone().unwrap_or_else(|| default_b_bank(l, cfg.growth.psi.as_ref()));
        Ok(Level {
            cfg,
            w,
            fam: ball_family(&w, cfg.balls)?,
            bank: sample_bank("f", &bank_specs, &w)?,
            b_bank: sample_bank("b", &b_specs, &w)?,
            cz: OnceLock::new(),
            frac: OnceLock::new(),
        })
    }

    pub fn kernel(&self) -> Result<KernelSpec> {
        self.cfg.kernel()
    }

    /// Stencil of the singular integral, built on first use.
    pub fn cz(&self) -> Result<&Stencil> {
        if let Some(s) = self.cz.get() {
            return Ok(s);
        }
        let s = cz_stencil(&self.kernel()?, &self.w)?;
        Ok(self.cz.get_or_init(|| s))
    }

    /// Stencil of `I_ρ`, built on first use.
    pub fn frac(&self) -> Result<&Stencil> {
        if let Some(s) = self.frac.get() {
            return Ok(s);
        }
        let rho = self.rho()?;
        if !rho.rho_star(1.0).is_ok_and(|v| v.is_finite()) {
            return Err(crate::error::Error::Divergent("∫_0^1 ρ(t)/t dt".into()));
        }
        let s = frac_stencil(rho, &self.w)?;
        Ok(self.frac.get_or_init(|| s))
    }

    pub fn rho(&self) -> Result<&GrowthFunction> {
        self.cfg.growth.rho.as_ref().ok_or(crate::error::Error::MissingAux("rho"))
    }

    pub fn psi(&self) -> Result<&GrowthFunction> {
        self.cfg.growth.psi.as_ref().ok_or(crate::error::Error::MissingAux("psi"))
    }

    /// Bank members that vanish near the window edge and outside it.
    pub fn compact_members(&self) -> impl Iterator<Item = &BankField> {
        self.bank.iter().filter(|b| b.spec.compact_in_window(&self.w))
    }
}
