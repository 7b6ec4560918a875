//! Experiment configuration as read from JSON.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BallPolicy, FieldSpec, Window};
use crate::growth::GrowthFunction;
use crate::integral::KernelSpec;
use crate::young::YoungFunction;

use super::catalog::{Need, Property};

/// Dimension and half-width of the sampling window; the cell count comes
/// from the refinement levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub n: u32,
    #[serde(rename = "L")]
    pub half_width: f64,
}

/// Young functions `Φ`, `Ψ`, `Θ`, `Φ₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungSpecs {
    pub phi: YoungFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<YoungFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<YoungFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi0: Option<YoungFunction>,
}

/// Growth functions `φ`, `ψ`, `θ`, `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpecs {
    pub vp: GrowthFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<GrowthFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<GrowthFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<GrowthFunction>,
}

/// Operator used by the properties that are generic in the operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    #[default]
    #[serde(rename = "CZ")]
    Cz,
    #[serde(rename = "FRACT")]
    Fract,
}

/// Numerical thresholds of the verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Largest relative drift of a constant between the two finest levels.
    pub stability: f64,
    /// The same drift for properties whose constant involves a commutator.
    pub commutator_stability: f64,
    /// Largest constant accepted as "finite".
    pub cap: f64,
    /// Bound on the characteristic-function sandwich constant.
    pub chi_cap: f64,
    /// Bound on the two-sided Campanato/Morrey comparison constant.
    pub bridge_cap: f64,
    /// `campanato_p(·, p) / campanato_p(·, 1)` must lie in `[1/band, band]`.
    pub jn_band: f64,
    /// Absolute tolerance on `σ(f)` and on vanishing means.
    pub sigma: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            stability: crate::tolerances::REFINEMENT_DRIFT,
            commutator_stability: 0.10,
            cap: crate::tolerances::CONDITION_CAP,
            chi_cap: 8.0,
            bridge_cap: 16.0,
            jn_band: 8.0,
            sigma: crate::tolerances::SIGMA_ABS_TOL,
        }
    }
}

/// One experiment: functions, window, refinement levels, banks and the
/// properties to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub window: WindowSpec,
    /// Cell counts per axis, ascending powers of two.
    pub refinement: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Test functions `f`; the default bank when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bank: Option<Vec<FieldSpec>>,
    /// Multipliers `b` of the commutators; the default b-bank when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_bank: Option<Vec<FieldSpec>>,
    pub young: YoungSpecs,
    pub growth: GrowthSpecs,
    #[serde(default)]
    pub operator: OperatorKind,
    /// Singular kernel; Hilbert for n = 1 and Riesz_1 for n = 2 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub balls: BallPolicy,
    pub properties: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Replace the base seed; RandomStep members of an explicit bank are
    /// renumbered from it in order of appearance.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        let mut k = 0u64;
        if let Some(bank) = &mut self.bank {
            for spec in bank.iter_mut() {
                reseed(spec, seed, &mut k);
            }
        }
        self
    }

    /// The kernel of the Calderón-Zygmund properties.
    pub fn kernel(&self) -> Result<KernelSpec> {
        match &self.kernel {
            Some(k) => Ok(k.clone()),
            None if self.window.n == 1 => Ok(KernelSpec::hilbert()),
            None => KernelSpec::riesz(1),
        }
    }

    pub fn windows(&self) -> Result<Vec<Window>> {
        self.refinement
            .iter()
            .map(|&cells| Window::new(self.window.n, self.window.half_width, cells))
            .collect()
    }

    /// Parsed property names in the order given.
    pub fn property_list(&self) -> Result<Vec<Property>> {
        self.properties.iter().map(|s| Property::parse(s)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.properties.is_empty() {
            return bad("the property list is empty".into());
        }
        if self.refinement.is_empty() {
            return bad("at least one refinement level is required".into());
        }
        if self.refinement.windows(2).any(|p| p[1] <= p[0]) {
            return bad("refinement levels must be strictly ascending".into());
        }
        if let Some(&c) = self.refinement.iter().find(|c| !c.is_power_of_two()) {
            return bad(format!("refinement level {c} is not a power of two"));
        }
        self.windows().map_err(|e| Error::Validation(e.to_string()))?;
        if self.bank.as_ref().is_some_and(|b| b.is_empty()) {
            return bad("the field bank is empty".into());
        }
        if self.b_bank.as_ref().is_some_and(|b| b.is_empty()) {
            return bad("the b-bank is empty".into());
        }
        let props = self.property_list().map_err(|e| Error::Validation(e.to_string()))?;
        let kernel = self.kernel().map_err(|e| Error::Validation(format!("kernel: {e}")))?;
        if kernel.dimension() != self.window.n {
            return bad(format!("kernel {} does not act in dimension {}", kernel.label(), self.window.n));
        }
        for p in props {
            for need in p.needs() {
                let ok = match need {
                    Need::PsiY => self.young.psi.is_some(),
                    Need::ThetaY => self.young.theta.is_some(),
                    Need::Phi0 => self.young.phi0.is_some(),
                    Need::Psi => self.growth.psi.is_some(),
                    Need::ThetaG => self.growth.theta.is_some(),
                    Need::Rho => self.growth.rho.is_some(),
                };
                if !ok {
                    return bad(format!("{} needs `{}` in the config", p.name(), need.key()));
                }
            }
        }
        Ok(())
    }
}

fn reseed(spec: &mut FieldSpec, seed: u64, k: &mut u64) {
    match spec {
        FieldSpec::RandomStep { seed: s, .. } => {
            *s = seed.wrapping_add(*k);
            *k += 1;
        }
        FieldSpec::Affine { terms, .. } => {
            for (_, t) in terms.iter_mut() {
                reseed(t, seed, k);
            }
        }
        FieldSpec::Tapered { inner, .. } => reseed(inner, seed, k),
        _ => {}
    }
}
