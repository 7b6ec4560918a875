//! Growth functions `φ, ψ, ρ, θ, ω : (0, ∞) → (0, ∞)`, their class diagnostics
//! and the hypothesis inequalities that pair them with Young functions.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_from_neg_infinity, integrate_to_infinity, simpson};
use crate::report::{describe_grid, ConditionReport};
use crate::tolerances::{CLASS_CAP, CONDITION_CAP, QUAD_REL_TOL};
use crate::young::YoungFunction;

/// A positive function on `(0, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub enum GrowthFunction {
    /// `r^{-λ}`.
    PowerNeg { lambda: f64 },
    /// `r^{α}`.
    PowerPos { alpha: f64 },
    /// `r^a (1 + |log r|)^b`.
    PowerLogG { a: f64, b: f64 },
    /// `c`.
    Constant { c: f64 },
    /// Log-linear interpolation of samples on an ascending grid, constant beyond it.
    Tabulated { log_r: Vec<f64>, log_v: Vec<f64> },
    /// `c · g(r)`.
    Scaled { inner: Box<GrowthFunction>, c: f64 },
}

/// `coef · r^exp`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLaw {
    pub coef: f64,
    pub exp: f64,
}

impl PowerLaw {
    pub fn eval(&self, r: f64) -> f64 {
        self.coef * r.powf(self.exp)
    }

    pub fn mul(self, o: PowerLaw) -> PowerLaw {
        PowerLaw { coef: self.coef * o.coef, exp: self.exp + o.exp }
    }

    /// `∫_r^∞ coef t^exp dt / t`.
    pub fn tail(&self, r: f64) -> f64 {
        if self.coef == 0.0 {
            0.0
        } else if self.exp < 0.0 {
            self.coef * r.powf(self.exp) / -self.exp
        } else {
            f64::INFINITY
        }
    }

    /// `∫_0^r coef t^exp dt / t`.
    pub fn head(&self, r: f64) -> f64 {
        if self.coef == 0.0 {
            0.0
        } else if self.exp > 0.0 {
            self.coef * r.powf(self.exp) / self.exp
        } else {
            f64::INFINITY
        }
    }

    /// `∫_{r1}^{r2} coef t^exp dt / t`.
    pub fn between(&self, r1: f64, r2: f64) -> f64 {
        if self.exp == 0.0 {
            self.coef * (r2 / r1).ln()
        } else {
            self.coef * (r2.powf(self.exp) - r1.powf(self.exp)) / self.exp
        }
    }
}

/// Power law of `Φ⁻¹ ∘ g` when both factors are power laws.
pub fn inverse_power_law(phi: &YoungFunction, g: Option<PowerLaw>) -> Option<PowerLaw> {
    let (p, c) = phi.homogeneous()?;
    let g = g?;
    Some(PowerLaw { coef: g.coef.powf(1.0 / p) / c, exp: g.exp / p })
}

impl GrowthFunction {
    pub fn power_neg(lambda: f64) -> Self {
        GrowthFunction::PowerNeg { lambda }
    }

    pub fn power_pos(alpha: f64) -> Self {
        GrowthFunction::PowerPos { alpha }
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid("Constant growth function must be positive"));
        }
        Ok(GrowthFunction::Constant { c })
    }

    /// Tabulated function from `(r, value)` samples on an ascending grid.
    pub fn tabulated(r: &[f64], values: &[f64]) -> Result<Self> {
        if r.len() != values.len() || r.is_empty() {
            return Err(invalid("Tabulated growth function needs matching nonempty grids"));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || r[0] <= 0.0 {
            return Err(invalid("Tabulated grid must be positive and strictly ascending"));
        }
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(invalid("Tabulated values must be positive and finite"));
        }
        Ok(GrowthFunction::Tabulated {
            log_r: r.iter().map(|x| x.ln()).collect(),
            log_v: values.iter().map(|x| x.ln()).collect(),
        })
    }

    pub fn scaled(inner: GrowthFunction, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid("Scaled factor must be positive"));
        }
        Ok(GrowthFunction::Scaled { inner: Box::new(inner), c })
    }

    pub fn label(&self) -> String {
        match self {
            GrowthFunction::PowerNeg { lambda } => format!("PowerNeg({lambda})"),
            GrowthFunction::PowerPos { alpha } => format!("PowerPos({alpha})"),
            GrowthFunction::PowerLogG { a, b } => format!("PowerLogG({a},{b})"),
            GrowthFunction::Constant { c } => format!("Constant({c})"),
            GrowthFunction::Tabulated { log_r, .. } => format!("Tabulated({} nodes)", log_r.len()),
            GrowthFunction::Scaled { inner, c } => format!("Scaled({}, {c})", inner.label()),
        }
    }

    /// `g(r)`, rejecting `r ≤ 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(invalid(format!("growth functions live on (0, ∞); got r = {r}")));
        }
        Ok(self.at(r))
    }

    /// `g(r)` for `r > 0` without the domain check.
    pub fn at(&self, r: f64) -> f64 {
        match self {
            GrowthFunction::PowerNeg { lambda } => r.powf(-lambda),
            GrowthFunction::PowerPos { alpha } => r.powf(*alpha),
            GrowthFunction::Constant { c } => *c,
            _ => self.at_log(r.ln()),
        }
    }

    /// `g(e^u)`, evaluated in the logarithmic variable to avoid overflow.
    pub fn at_log(&self, u: f64) -> f64 {
        match self {
            GrowthFunction::PowerNeg { lambda } => (-lambda * u).exp(),
            GrowthFunction::PowerPos { alpha } => (alpha * u).exp(),
            GrowthFunction::PowerLogG { a, b } => (a * u + b * (1.0 + u.abs()).ln()).exp(),
            GrowthFunction::Constant { c } => *c,
            GrowthFunction::Tabulated { log_r, log_v } => {
                let n = log_r.len();
                if u <= log_r[0] {
                    return log_v[0].exp();
                }
                if u >= log_r[n - 1] {
                    return log_v[n - 1].exp();
                }
                let k = log_r.partition_point(|&x| x < u).max(1);
                let w = (u - log_r[k - 1]) / (log_r[k] - log_r[k - 1]);
                (log_v[k - 1] + w * (log_v[k] - log_v[k - 1])).exp()
            }
            GrowthFunction::Scaled { inner, c } => c * inner.at_log(u),
        }
    }

    pub fn power_law(&self) -> Option<PowerLaw> {
        match self {
            GrowthFunction::PowerNeg { lambda } => Some(PowerLaw { coef: 1.0, exp: -lambda }),
            GrowthFunction::PowerPos { alpha } => Some(PowerLaw { coef: 1.0, exp: *alpha }),
            GrowthFunction::PowerLogG { a, b } if *b == 0.0 => Some(PowerLaw { coef: 1.0, exp: *a }),
            GrowthFunction::Constant { c } => Some(PowerLaw { coef: *c, exp: 0.0 }),
            GrowthFunction::Scaled { inner, c } => inner.power_law().map(|p| PowerLaw { coef: p.coef * c, ..p }),
            _ => None,
        }
    }

    /// Whether `∫^∞ g(t) dt/t` converges, decided from the asymptotic form.
    pub fn tail_converges(&self) -> bool {
        match self {
            GrowthFunction::PowerLogG { a, b } => *a < 0.0 || (*a == 0.0 && *b < -1.0),
            GrowthFunction::Tabulated { .. } => false,
            GrowthFunction::Scaled { inner, .. } => inner.tail_converges(),
            _ => self.power_law().map(|p| p.exp < 0.0).unwrap_or(false),
        }
    }

    /// Whether `∫_0 g(t) dt/t` converges, decided from the asymptotic form.
    pub fn head_converges(&self) -> bool {
        match self {
            GrowthFunction::PowerLogG { a, b } => *a > 0.0 || (*a == 0.0 && *b < -1.0),
            GrowthFunction::Tabulated { .. } => false,
            GrowthFunction::Scaled { inner, .. } => inner.head_converges(),
            _ => self.power_law().map(|p| p.exp > 0.0).unwrap_or(false),
        }
    }

    /// `∫_{r1}^{r2} g(t) dt/t`.
    pub fn integral_between(&self, r1: f64, r2: f64) -> f64 {
        if let Some(p) = self.power_law() {
            return p.between(r1, r2);
        }
        simpson(&|u: f64| self.at_log(u), r1.ln(), r2.ln(), QUAD_REL_TOL)
    }

    /// `∫_r^∞ g(t) dt/t`, `None` when it diverges.
    pub fn decay_integral(&self, r: f64) -> Option<f64> {
        if !self.tail_converges() {
            return None;
        }
        if let Some(p) = self.power_law() {
            return Some(p.tail(r));
        }
        integrate_to_infinity(&|u: f64| self.at_log(u), r.ln())
    }

    /// `ρ*(r) = ∫_0^r ρ(t) dt/t`.
    pub fn rho_star(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(invalid("rho_star needs r > 0"));
        }
        if !self.head_converges() {
            return Err(Error::Divergent(format!("∫_0 ρ(t)/t dt diverges for {}", self.label())));
        }
        if let Some(p) = self.power_law() {
            return Ok(p.head(r));
        }
        integrate_from_neg_infinity(&|u: f64| self.at_log(u), r.ln())
            .ok_or_else(|| Error::Divergent(format!("ρ* quadrature did not settle for {}", self.label())))
    }

    /// `sup_{0 < t ≤ r} g(t)`.
    pub fn sup_below(&self, r: f64) -> f64 {
        if let Some(p) = self.power_law() {
            return if p.exp >= 0.0 { p.eval(r) } else { f64::INFINITY };
        }
        if let GrowthFunction::PowerLogG { a, b } = self {
            if *a < 0.0 || (*a == 0.0 && *b > 0.0) {
                return f64::INFINITY;
            }
        }
        // Eighth-octave scan over sixty octaves below r.
        (0..=480).map(|j| self.at(r * (-(j as f64) / 8.0).exp2())).fold(0.0, f64::max)
    }

    /// `sup_{r1 ≤ t ≤ r2} g(t)` on a 65-point geometric scan including the endpoints.
    pub fn sup_between(&self, r1: f64, r2: f64) -> f64 {
        let l = (r2 / r1).ln();
        (0..=64).map(|j| self.at(r1 * (l * j as f64 / 64.0).exp())).fold(0.0, f64::max)
    }

    fn to_json(&self) -> Value {
        let (family, params) = match self {
            GrowthFunction::PowerNeg { lambda } => ("PowerNeg", json!({ "lambda": lambda })),
            GrowthFunction::PowerPos { alpha } => ("PowerPos", json!({ "alpha": alpha })),
            GrowthFunction::PowerLogG { a, b } => ("PowerLogG", json!({ "a": a, "b": b })),
            GrowthFunction::Constant { c } => ("Constant", json!({ "c": c })),
            GrowthFunction::Tabulated { log_r, log_v } => {
                let r: Vec<f64> = log_r.iter().map(|x| x.exp()).collect();
                let v: Vec<f64> = log_v.iter().map(|x| x.exp()).collect();
                ("Tabulated", json!({ "r": r, "values": v }))
            }
            GrowthFunction::Scaled { inner, c } => ("Scaled", json!({ "inner": inner.to_json(), "c": c })),
        };
        json!({ "family": family, "params": params })
    }

    fn from_json(v: &Value) -> Result<GrowthFunction> {
        let family = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid("growth function JSON needs a string `family`"))?;
        let empty = json!({});
        let params = v.get("params").unwrap_or(&empty);
        let num = |k: &str| -> Result<f64> {
            params
                .get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| invalid(format!("{family} needs numeric parameter `{k}`")))
        };
        let vec = |k: &str| -> Result<Vec<f64>> {
            serde_json::from_value(params.get(k).cloned().unwrap_or(Value::Null))
                .map_err(|e| invalid(format!("{family} parameter `{k}`: {e}")))
        };
        match family {
            "PowerNeg" => Ok(Self::power_neg(num("lambda")?)),
            "PowerPos" => Ok(Self::power_pos(num("alpha")?)),
            "PowerLogG" => Ok(GrowthFunction::PowerLogG { a: num("a")?, b: num("b")? }),
            "Constant" => Self::constant(num("c")?),
            "Tabulated" => Self::tabulated(&vec("r")?, &vec("values")?),
            "Scaled" => {
                let inner = Self::from_json(params.get("inner").ok_or_else(|| invalid("Scaled needs `inner`"))?)?;
                Self::scaled(inner, num("c")?)
            }
            other => Err(invalid(format!("unknown growth family `{other}`"))),
        }
    }
}

impl Serialize for GrowthFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GrowthFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        GrowthFunction::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// `g(r)`; see [`GrowthFunction::eval`].
pub fn eval_growth(g: &GrowthFunction, r: f64) -> Result<f64> {
    g.eval(r)
}

/// Class flags of a growth function, each with its observed constant.
#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub in_gdec: ConditionReport,
    pub in_ginc: ConditionReport,
    pub doubling: ConditionReport,
    pub almost_increasing: ConditionReport,
    pub almost_decreasing: ConditionReport,
}

/// `max_{r < s} g(s)/g(r)` scaled by `weight`, over pairs of grid points.
fn monotone_scan<F: Fn(f64) -> f64>(name: &str, grid: &[f64], h: F, increasing: bool) -> ConditionReport {
    let mut rep = ConditionReport::new(name, describe_grid(grid));
    for (i, &r) in grid.iter().enumerate() {
        for &s in &grid[i + 1..] {
            let ratio = if increasing { h(r) / h(s) } else { h(s) / h(r) };
            rep.observe(ratio.max(1.0), &[r, s]);
        }
    }
    rep.finish(CLASS_CAP)
}

/// Pairwise ratio scan of `g` over an ascending grid in dimension `n`.
pub fn classify_growth(g: &GrowthFunction, r_grid: &[f64], n: u32) -> ClassReport {
    let nf = n as f64;
    let almost_increasing = monotone_scan("almost_increasing", r_grid, |r| g.at(r), true);
    let almost_decreasing = monotone_scan("almost_decreasing", r_grid, |r| g.at(r), false);
    let rn_inc = monotone_scan("phi_rn_almost_increasing", r_grid, |r| g.at(r) * r.powf(nf), true);
    let r_dec = monotone_scan("psi_over_r_almost_decreasing", r_grid, |r| g.at(r) / r, false);
    let mut doubling = ConditionReport::new("doubling", describe_grid(r_grid));
    for &r in r_grid {
        let (a, b) = (g.at(r), g.at(2.0 * r));
        doubling.observe((a / b).max(b / a), &[r]);
    }
    let doubling = doubling.finish(CLASS_CAP);
    let in_gdec = ConditionReport::combined("in_Gdec", describe_grid(r_grid), vec![almost_decreasing.clone(), rn_inc]);
    let in_ginc = ConditionReport::combined("in_Ginc", describe_grid(r_grid), vec![almost_increasing.clone(), r_dec]);
    ClassReport { in_gdec, in_ginc, doubling, almost_increasing, almost_decreasing }
}

/// `max_r (∫_r^∞ φ(t) dt/t) / φ(r)`; the tail beyond `r_max` is analytic for
/// power laws and quadrature in `log t` otherwise.
pub fn check_decay_integral(phi: &GrowthFunction, r_grid: &[f64], r_max: f64) -> ConditionReport {
    let mut rep = ConditionReport::new("int_vp", format!("{}; split at R_max = {r_max:e}", describe_grid(r_grid)));
    let tail = phi.decay_integral(r_max);
    for &r in r_grid {
        let value = match tail {
            None => f64::INFINITY,
            Some(t) if r < r_max => phi.integral_between(r, r_max) + t,
            Some(_) => phi.decay_integral(r).unwrap_or(f64::INFINITY),
        };
        rep.observe(value / phi.at(r), &[r]);
    }
    rep.finish(CONDITION_CAP)
}

/// The four admissibility conditions on `ρ` used by the fractional operators.
///
/// `k1 < k2` are the window constants of the local sup condition.
pub fn check_rho_admissible(
    rho: &GrowthFunction,
    n: u32,
    eps: f64,
    r_grid: &[f64],
    k1: f64,
    k2: f64,
) -> Result<ConditionReport> {
    if !(k1 > 0.0 && k1 < k2) {
        return Err(invalid("need 0 < K1 < K2"));
    }
    if !(eps > 0.0 && eps < n as f64) {
        return Err(invalid("need eps in (0, n)"));
    }
    let nf = n as f64;
    let grid = describe_grid(r_grid);

    let mut int_rho = ConditionReport::new("int_rho", "∫_0^1 ρ(t)/t dt");
    let head = rho.rho_star(1.0).unwrap_or(f64::INFINITY);
    int_rho.observe(head, &[1.0]);
    let int_rho = int_rho.finish(f64::MAX);

    let mut sup_rho = ConditionReport::new("sup_rho", format!("{grid}; K1 = {k1}, K2 = {k2}"));
    for &r in r_grid {
        let num = rho.sup_between(r, 2.0 * r);
        let den = rho.integral_between(k1 * r, k2 * r);
        sup_rho.observe(num / den, &[r]);
    }
    let sup_rho = sup_rho.finish(CONDITION_CAP);

    let h = |r: f64| rho.at(r) / r.powf(nf - eps);
    let rho_rn = monotone_scan("rho_rn_almost_decreasing", r_grid, h, false);

    let mut conti = ConditionReport::new("rho_conti", format!("{grid}; s = r·2^(j/8), 0 < |j| ≤ 8"));
    for &r in r_grid {
        let star = rho.rho_star(r).unwrap_or(f64::INFINITY);
        for j in (-8..=8).filter(|&j| j != 0) {
            let s = r * (j as f64 / 8.0).exp2();
            let lhs = (rho.at(r) / r.powf(nf) - rho.at(s) / s.powf(nf)).abs();
            let rhs = (r - s).abs() / r.powf(nf + 1.0) * star;
            conti.observe(lhs / rhs, &[r, s]);
        }
    }
    let conti = conti.finish(CONDITION_CAP);
    Ok(ConditionReport::combined("rho_admissible", grid, vec![int_rho, sup_rho, rho_rn, conti]))
}

/// `ρ*(r)`; see [`GrowthFunction::rho_star`].
pub fn rho_star(rho: &GrowthFunction, r: f64) -> Result<f64> {
    rho.rho_star(r)
}

/// The hypothesis inequalities that couple Young and growth functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PairingKind {
    Cz,
    CzNec,
    Fract,
    Maximal,
    Holder,
    Ipvp,
}

/// Functions referenced by a pairing check; which ones are needed depends on the kind.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PairingInputs {
    pub phi: Option<YoungFunction>,
    pub psi_y: Option<YoungFunction>,
    pub theta_y: Option<YoungFunction>,
    pub phi0: Option<YoungFunction>,
    pub vp: Option<GrowthFunction>,
    pub psi: Option<GrowthFunction>,
    pub theta_g: Option<GrowthFunction>,
    pub rho: Option<GrowthFunction>,
    pub t_grid: Option<Vec<f64>>,
}

fn need<'a, T>(x: &'a Option<T>, name: &'static str) -> Result<&'a T> {
    x.as_ref().ok_or(Error::MissingAux(name))
}

/// `∫_r^∞ w(t) Φ⁻¹(φ(t)) dt/t` (`w ≡ 1` when absent) with a power-law fast path.
pub fn inverse_tail(phi: &YoungFunction, vp: &GrowthFunction, w: Option<&GrowthFunction>, r: f64) -> f64 {
    let inv = inverse_power_law(phi, vp.power_law());
    let wl = match w {
        Some(g) => g.power_law(),
        None => Some(PowerLaw { coef: 1.0, exp: 0.0 }),
    };
    if let (Some(a), Some(b)) = (inv, wl) {
        return a.mul(b).tail(r);
    }
    let f = |u: f64| {
        let wt = w.map(|g| g.at_log(u)).unwrap_or(1.0);
        wt * phi.inverse(vp.at_log(u))
    };
    integrate_to_infinity(&f, r.ln()).unwrap_or(f64::INFINITY)
}

/// `∫_r^∞ ψ(t)/t (∫_t^∞ w(u) Φ⁻¹(φ(u)) du/u) dt`, the nested tail of the
/// commutator estimates.
pub fn nested_inverse_tail(
    phi: &YoungFunction,
    vp: &GrowthFunction,
    w: Option<&GrowthFunction>,
    psi: &GrowthFunction,
    r: f64,
) -> f64 {
    let inv = inverse_power_law(phi, vp.power_law());
    let wl = match w {
        Some(g) => g.power_law(),
        None => Some(PowerLaw { coef: 1.0, exp: 0.0 }),
    };
    if let (Some(a), Some(b), Some(c)) = (inv, wl, psi.power_law()) {
        let inner = a.mul(b);
        if inner.exp >= 0.0 {
            return f64::INFINITY;
        }
        let inner_tail = PowerLaw { coef: inner.coef / -inner.exp, exp: inner.exp };
        return inner_tail.mul(c).tail(r);
    }
    let f = |u: f64| psi.at_log(u) * inverse_tail(phi, vp, w, u.exp());
    integrate_to_infinity(&f, r.ln()).unwrap_or(f64::INFINITY)
}

/// `sup` over the grid of the defining ratio of the chosen pairing.
pub fn check_pairing(kind: PairingKind, inp: &PairingInputs, r_grid: &[f64]) -> Result<ConditionReport> {
    let grid = describe_grid(r_grid);
    let phi = need(&inp.phi, "phi")?;
    let vp = need(&inp.vp, "vp")?;
    let inv = |y: &YoungFunction, g: &GrowthFunction, r: f64| y.inverse(g.at(r));
    let rep = match kind {
        PairingKind::Cz | PairingKind::CzNec => {
            let psi_y = need(&inp.psi_y, "psi_y")?;
            let psi = need(&inp.psi, "psi")?;
            let name = if kind == PairingKind::Cz { "CZ" } else { "CZ_NEC" };
            let mut rep = ConditionReport::new(name, grid);
            for &r in r_grid {
                let lhs = psi.at(r) * inv(phi, vp, r);
                let rhs = inv(psi_y, vp, r);
                rep.observe(if kind == PairingKind::Cz { lhs / rhs } else { rhs / lhs }, &[r]);
            }
            rep.finish(CONDITION_CAP)
        }
        PairingKind::Fract => {
            let theta_y = need(&inp.theta_y, "theta_y")?;
            let psi_y = need(&inp.psi_y, "psi_y")?;
            let psi = need(&inp.psi, "psi")?;
            let rho = need(&inp.rho, "rho")?;
            let mut a = ConditionReport::new("FRACT_integral", grid.clone());
            let mut b = ConditionReport::new("FRACT_theta", grid.clone());
            for &r in r_grid {
                let head = rho.rho_star(r).unwrap_or(f64::INFINITY);
                let lhs = head * inv(phi, vp, r) + inverse_tail(phi, vp, Some(rho), r);
                a.observe(lhs / inv(theta_y, vp, r), &[r]);
                b.observe(psi.at(r) * inv(theta_y, vp, r) / inv(psi_y, vp, r), &[r]);
            }
            ConditionReport::combined("FRACT", grid, vec![a.finish(CONDITION_CAP), b.finish(CONDITION_CAP)])
        }
        PairingKind::Maximal => {
            let psi_y = need(&inp.psi_y, "psi_y")?;
            let rho = need(&inp.rho, "rho")?;
            let mut rep = ConditionReport::new("MAXIMAL", grid);
            for &r in r_grid {
                rep.observe(rho.sup_below(r) * inv(phi, vp, r) / inv(psi_y, vp, r), &[r]);
            }
            rep.finish(CONDITION_CAP)
        }
        PairingKind::Holder => {
            let phi0 = need(&inp.phi0, "phi0")?;
            let psi_y = need(&inp.psi_y, "psi_y")?;
            let psi = need(&inp.psi, "psi")?;
            let theta_g = need(&inp.theta_g, "theta_g")?;
            let ts = inp.t_grid.clone().unwrap_or_else(|| r_grid.to_vec());
            let mut rep = ConditionReport::new("HOLDER", format!("r: {grid}; t: {}", describe_grid(&ts)));
            for &r in r_grid {
                for &t in &ts {
                    let lhs = phi0.inverse(t * psi.at(r)) * phi.inverse(t * vp.at(r));
                    let rhs = psi_y.inverse(t * theta_g.at(r));
                    rep.observe(lhs / rhs, &[r, t]);
                }
            }
            rep.finish(CONDITION_CAP)
        }
        PairingKind::Ipvp => {
            let mut rep = ConditionReport::new("IPVP", grid);
            for &r in r_grid {
                rep.observe(inverse_tail(phi, vp, None, r) / inv(phi, vp, r), &[r]);
            }
            rep.finish(CONDITION_CAP)
        }
    };
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::default_r_grid;
    use crate::young::YoungFunction;

    fn pw(p: f64) -> YoungFunction {
        YoungFunction::power(p).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(GrowthFunction::power_neg(1.0).eval(4.0).unwrap(), 0.25);
        assert_eq!(GrowthFunction::constant(1.0).unwrap().eval(123.0).unwrap(), 1.0);
        assert!(GrowthFunction::power_neg(1.0).eval(0.0).is_err());
        assert!(GrowthFunction::power_neg(1.0).eval(-1.0).is_err());
    }

    #[test]
    fn tabulated_interpolation_of_sqrt() {
        // 64 log-spaced nodes over [2^-8, 2^8]; log-linear interpolation is
        // exact for a pure power, so the error is rounding only.
        let r: Vec<f64> = (0..64).map(|i| (-8.0 + 16.0 * i as f64 / 63.0).exp2()).collect();
        let v: Vec<f64> = r.iter().map(|x| x.sqrt()).collect();
        let g = GrowthFunction::tabulated(&r, &v).unwrap();
        assert!((g.eval(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-6);
        // Constant extension beyond the grid.
        assert!((g.eval(1e6).unwrap() - 16.0).abs() < 1e-9);
    }

    #[test]
    fn classify_examples() {
        let grid = default_r_grid();
        for lambda in [0.25, 0.5, 0.99] {
            let rep = classify_growth(&GrowthFunction::power_neg(lambda), &grid, 1);
            assert!(rep.in_gdec.holds);
            assert_eq!(rep.in_gdec.best_constant, 1.0);
        }
        for beta in [0.0, 0.5, 1.0] {
            let rep = classify_growth(&GrowthFunction::power_pos(beta), &grid, 1);
            assert!(rep.in_ginc.holds);
            assert_eq!(rep.in_ginc.best_constant, 1.0);
        }
        assert!(!classify_growth(&GrowthFunction::power_pos(2.0), &grid, 1).in_ginc.holds);
        let rep = classify_growth(&GrowthFunction::power_neg(1.0), &grid, 1);
        assert!((rep.doubling.best_constant - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decay_integral_examples() {
        let grid = default_r_grid();
        let rep = check_decay_integral(&GrowthFunction::power_neg(0.5), &grid, 1e3);
        assert!(rep.holds);
        assert!((rep.best_constant - 2.0).abs() < 1e-9);
        assert!(!check_decay_integral(&GrowthFunction::constant(1.0).unwrap(), &grid, 1e3).holds);
        let g = GrowthFunction::PowerLogG { a: -1.0, b: 1.0 };
        let rep = check_decay_integral(&g, &grid, 1e3);
        assert!(rep.holds);
        // Oracle for r ≥ 1 in u = log t: ∫_{u0}^∞ e^{-u}(1+u) du = e^{-u0}(2+u0),
        // so the ratio is (2+u0)/(1+u0), maximal (= 2) at u0 = 0.
        assert!((rep.best_constant - 2.0).abs() < 1e-8);
        let one = checked_ratio(&g, 1.0);
        assert!((one - 2.0).abs() < 1e-8, "{one}");
        let eight = checked_ratio(&g, 8.0);
        let u0 = 8f64.ln();
        assert!((eight - (2.0 + u0) / (1.0 + u0)).abs() < 1e-8);
    }

    fn checked_ratio(g: &GrowthFunction, r: f64) -> f64 {
        check_decay_integral(g, &[r], 1e3).best_constant
    }

    #[test]
    fn rho_admissible_power() {
        let grid = default_r_grid();
        for alpha in [0.25, 0.5, 0.75] {
            let rep = check_rho_admissible(&GrowthFunction::power_pos(alpha), 1, 0.1, &grid, 0.5, 2.0).unwrap();
            assert!(rep.holds, "{rep:?}");
            assert!((rep.parts[0].best_constant - 1.0 / alpha).abs() < 1e-12);
        }
        // α = n with ε: ρ(r)/r^{n-ε} = r^ε is increasing, so almost-decreasing fails.
        let rep = check_rho_admissible(&GrowthFunction::power_pos(1.0), 1, 0.5, &grid, 0.5, 2.0).unwrap();
        assert!(!rep.parts[2].holds);
        assert!(!rep.holds);
    }

    #[test]
    fn tabulated_spike_sup_rho() {
        // ρ = r^{1/2} with a spike of height 10 at r = 1 on the log grid.
        let r: Vec<f64> = (0..=160).map(|i| (-10.0 + i as f64 / 8.0).exp2()).collect();
        let v: Vec<f64> = r.iter().map(|&x| if x == 1.0 { 10.0 } else { x.sqrt() }).collect();
        let rho = GrowthFunction::tabulated(&r, &v).unwrap();
        let rep = check_rho_admissible(&rho, 1, 0.5, &[1.0], 0.5, 2.0).unwrap();
        let sup = &rep.parts[1];
        // Oracle: at r = 1 the sup over [1, 2] is the spike; the integral over
        // [1/2, 2] of the log-linear profile is computed by a fine midpoint sum.
        let mid: f64 = (0..200_000)
            .map(|i| {
                let u = (0.5f64).ln() + (4f64).ln() * (i as f64 + 0.5) / 200_000.0;
                rho.at_log(u) * (4f64).ln() / 200_000.0
            })
            .sum();
        let expect = 10.0 / mid;
        assert!(sup.best_constant >= expect * (1.0 - 1e-6));
        assert!((sup.best_constant - expect).abs() < 1e-6 * expect, "{} vs {expect}", sup.best_constant);
    }

    #[test]
    fn rho_star_examples() {
        let rho = GrowthFunction::power_pos(0.5);
        assert!((rho.rho_star(4.0).unwrap() - 4.0).abs() < 1e-12);
        assert!(rho.rho_star(1e-300).unwrap() < 1e-140);
        // PowerLogG(1,1) at r = 1: ∫_0^1 (1 - log t) dt = 2 (series of the
        // exponential integral gives the same closed value).
        let g = GrowthFunction::PowerLogG { a: 1.0, b: 1.0 };
        assert!((g.rho_star(1.0).unwrap() - 2.0).abs() < 1e-9);
        assert!(GrowthFunction::power_neg(0.5).rho_star(1.0).is_err());
    }

    #[test]
    fn pairing_cz_exponent_matching() {
        let (p, q, lambda) = (2.0, 4.0, 1.0);
        let beta = lambda * (1.0 / p - 1.0 / q);
        let inp = PairingInputs {
            phi: Some(pw(p)),
            psi_y: Some(pw(q)),
            vp: Some(GrowthFunction::power_neg(lambda)),
            psi: Some(GrowthFunction::power_pos(beta)),
            ..Default::default()
        };
        let rep = check_pairing(PairingKind::Cz, &inp, &default_r_grid()).unwrap();
        assert!(rep.holds);
        assert!((rep.best_constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairing_maximal_exponent_matching() {
        for (p, q, lambda) in [(2.0, 4.0, 1.0), (1.5, 3.0, 1.0)] {
            let alpha = lambda / p - lambda / q;
            let inp = PairingInputs {
                phi: Some(pw(p)),
                psi_y: Some(pw(q)),
                vp: Some(GrowthFunction::power_neg(lambda)),
                rho: Some(GrowthFunction::power_pos(alpha)),
                ..Default::default()
            };
            let rep = check_pairing(PairingKind::Maximal, &inp, &default_r_grid()).unwrap();
            assert!(rep.holds);
            assert!((rep.best_constant - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_fract_closed_forms() {
        let (p, alpha, lambda) = (2.0, 0.25, 1.0);
        let qt = 1.0 / (1.0 / p - alpha / lambda);
        let inp = PairingInputs {
            phi: Some(pw(p)),
            psi_y: Some(pw(qt)),
            theta_y: Some(pw(qt)),
            vp: Some(GrowthFunction::power_neg(lambda)),
            psi: Some(GrowthFunction::constant(1.0).unwrap()),
            rho: Some(GrowthFunction::power_pos(alpha)),
            ..Default::default()
        };
        let rep = check_pairing(PairingKind::Fract, &inp, &default_r_grid()).unwrap();
        assert!(rep.holds);
        // 1/α + 1/(λ/p − α) = 4 + 4.
        assert!((rep.parts[0].best_constant - 8.0).abs() < 1e-9);
        assert!((rep.parts[1].best_constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairing_missing_aux_is_error() {
        let inp = PairingInputs {
            phi: Some(pw(2.0)),
            vp: Some(GrowthFunction::power_neg(1.0)),
            ..Default::default()
        };
        assert!(matches!(check_pairing(PairingKind::Fract, &inp, &[1.0]), Err(Error::MissingAux(_))));
        assert!(matches!(check_pairing(PairingKind::Holder, &inp, &[1.0]), Err(Error::MissingAux(_))));
    }

    #[test]
    fn pairing_holder_grid() {
        // Φ₀ = t^2, Φ = t^2, Ψ = t: Φ₀⁻¹(tψ)Φ⁻¹(tφ) = t (ψφ)^{1/2} = Ψ⁻¹(tθ) with θ = (ψφ)^{1/2}.
        let inp = PairingInputs {
            phi: Some(pw(2.0)),
            phi0: Some(pw(2.0)),
            psi_y: Some(pw(1.0)),
            vp: Some(GrowthFunction::power_neg(1.0)),
            psi: Some(GrowthFunction::power_neg(0.5)),
            theta_g: Some(GrowthFunction::power_neg(0.75)),
            ..Default::default()
        };
        let rep = check_pairing(PairingKind::Holder, &inp, &default_r_grid()).unwrap();
        assert!(rep.grid.contains("41 points"));
        assert!((rep.best_constant - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ipvp_power_and_quadrature_agree() {
        // Quadrature route through a Young function without a power law.
        let phi = YoungFunction::piecewise(vec![(0.0, 0.0), (1.0, 1.0)], false).unwrap();
        let vp = GrowthFunction::power_neg(0.5);
        let quad = inverse_tail(&phi, &vp, None, 2.0);
        let exact = inverse_tail(&pw(1.0), &vp, None, 2.0);
        assert!((quad - exact).abs() < 1e-8 * exact, "{quad} vs {exact}");
    }

    #[test]
    fn json_round_trip() {
        let gs = [
            GrowthFunction::power_neg(1.0),
            GrowthFunction::power_pos(0.5),
            GrowthFunction::PowerLogG { a: -1.0, b: 1.0 },
            GrowthFunction::constant(2.0).unwrap(),
            GrowthFunction::scaled(GrowthFunction::power_neg(1.0), 3.0).unwrap(),
        ];
        for g in gs {
            let s = serde_json::to_string(&g).unwrap();
            let back: GrowthFunction = serde_json::from_str(&s).unwrap();
            assert_eq!(back, g);
        }
    }
}
