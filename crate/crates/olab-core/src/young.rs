//! Young functions on the extended half-line, their generalized inverses,
//! complementary functions and the Δ₂ / ∇₂ diagnostics.
//!
//! Values are `f64` with `f64::INFINITY` standing for `+∞`. Every function is
//! nondecreasing, convex on `[0, b(Φ))`, vanishes at zero and is left
//! continuous at `b(Φ)`; beyond `b(Φ)` it is infinite.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::report::{describe_grid, ConditionReport};
use crate::tolerances::{
    CONDITION_CAP, INVERSE_BRACKET_CAP, INVERSE_REL_TOL, RECTIFY_EXP2, RECTIFY_NODES,
    ROUNDING_SLACK,
};

/// Convex piecewise-linear function through `points`, starting at `(0, 0)`.
///
/// Beyond the last point the function either continues with the last slope
/// (`cap == false`) or jumps to `+∞` (`cap == true`).
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
    cap: bool,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>, cap: bool) -> Result<Self> {
        if points.is_empty() || points[0] != (0.0, 0.0) {
            return Err(invalid("piecewise-linear Young function must start at (0, 0)"));
        }
        for w in points.windows(2) {
            let ((t0, y0), (t1, y1)) = (w[0], w[1]);
            if !(t1 > t0) || !t1.is_finite() {
                return Err(invalid("breakpoints must be finite and strictly ascending"));
            }
            if !(y1 >= y0) || !y1.is_finite() {
                return Err(invalid("breakpoint values must be finite and nondecreasing"));
            }
        }
        let pl = PiecewiseLinear { points, cap };
        for i in 1..pl.segments() {
            let (s0, s1) = (pl.slope(i - 1), pl.slope(i));
            if s1 < s0 - ROUNDING_SLACK * s0.abs().max(1.0) {
                return Err(invalid("slopes must be nondecreasing (convexity)"));
            }
        }
        if cap {
            if pl.points.len() < 2 {
                return Err(invalid("capped function needs a positive breakpoint"));
            }
        } else if pl.points.len() < 2 || !(pl.slope(pl.segments() - 1) > 0.0) {
            return Err(invalid("uncapped function needs a positive final slope"));
        }
        Ok(pl)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn cap(&self) -> bool {
        self.cap
    }

    fn segments(&self) -> usize {
        self.points.len() - 1
    }

    fn slope(&self, i: usize) -> f64 {
        let ((t0, y0), (t1, y1)) = (self.points[i], self.points[i + 1]);
        (y1 - y0) / (t1 - t0)
    }

    fn last(&self) -> (f64, f64) {
        *self.points.last().expect("nonempty")
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        let (tl, yl) = self.last();
        if t > tl {
            return if self.cap {
                f64::INFINITY
            } else {
                yl + self.slope(self.segments() - 1) * (t - tl)
            };
        }
        let k = self.points.partition_point(|p| p.0 < t).max(1);
        let ((t0, y0), (t1, y1)) = (self.points[k - 1], self.points[k]);
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    /// `inf{t ≥ 0 : Φ(t) > u}` in closed form.
    pub fn inverse(&self, u: f64) -> f64 {
        if u == f64::INFINITY {
            return f64::INFINITY;
        }
        let u = u.max(0.0);
        let k = self.points.partition_point(|p| p.1 <= u);
        if k == self.points.len() {
            let (tl, yl) = self.last();
            return if self.cap {
                tl
            } else {
                tl + (u - yl) / self.slope(self.segments() - 1)
            };
        }
        let ((t0, y0), (t1, y1)) = (self.points[k - 1], self.points[k]);
        t0 + (u - y0) * (t1 - t0) / (y1 - y0)
    }

    pub fn a_phi(&self) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.1 == 0.0)
            .last()
            .map(|p| p.0)
            .unwrap_or(0.0)
    }

    pub fn b_phi(&self) -> f64 {
        if self.cap {
            self.last().0
        } else {
            f64::INFINITY
        }
    }

    /// Exact Legendre transform: the conjugate breaks at the slopes of `self`
    /// and its slopes are the breakpoints of `self`.
    pub fn legendre(&self) -> PiecewiseLinear {
        let mut out: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        for i in 0..self.segments() {
            let s = self.slope(i);
            let (t1, y1) = self.points[i + 1];
            if s > out.last().expect("nonempty").0 {
                out.push((s, s * t1 - y1));
            }
        }
        if self.cap {
            let (tl, _) = self.last();
            let (tau, v) = *out.last().expect("nonempty");
            out.push((tau + 1.0, v + tl));
            PiecewiseLinear { points: out, cap: false }
        } else {
            PiecewiseLinear { points: out, cap: true }
        }
    }

    /// Greatest convex minorant of samples `(t_i, f(t_i))` anchored at the origin.
    fn convex_minorant(samples: &[(f64, f64)]) -> Result<PiecewiseLinear> {
        let mut hull: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        for &p in samples {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        PiecewiseLinear::new(hull, false)
    }
}

fn rectify_grid() -> impl Iterator<Item = f64> {
    let (lo, hi) = RECTIFY_EXP2;
    let m = RECTIFY_NODES - 1;
    (0..RECTIFY_NODES).map(move |i| (lo + (hi - lo) * i as f64 / m as f64).exp2())
}

/// A Young function from the closed family algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum YoungFunction {
    /// `t^p`, `p ≥ 1`.
    Power { p: f64 },
    /// Convex minorant of `t^p (log(e+t))^q` on the fixed rectification grid.
    PowerLog { p: f64, q: f64, hull: Arc<PiecewiseLinear> },
    /// `e^t - 1`.
    ExpMinusOne,
    /// `t log t - t + 1` for `t ≥ 1`, zero below; the complementary function of `e^t - 1`.
    ExpConjugate,
    /// `t` on `[0, 1]`, `+∞` beyond.
    LinearCap,
    /// Convex piecewise-linear function given by breakpoints.
    PiecewiseLinearConvex(PiecewiseLinear),
    /// `t ↦ Φ_inner(c t)`.
    Scaled { inner: Box<YoungFunction>, c: f64 },
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid(format!("Power exponent must be ≥ 1, got {p}")));
        }
        Ok(YoungFunction::Power { p })
    }

    pub fn power_log(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() || !q.is_finite() {
            return Err(invalid("PowerLog needs p ≥ 1 and finite q"));
        }
        if p == 1.0 && q < 0.0 {
            return Err(invalid("PowerLog with p = 1 needs q ≥ 0 to stay superlinear"));
        }
        let samples: Vec<(f64, f64)> = rectify_grid()
            .map(|t| (t, t.powf(p) * (std::f64::consts::E + t).ln().powf(q)))
            .collect();
        let hull = PiecewiseLinear::convex_minorant(&samples)?;
        Ok(YoungFunction::PowerLog { p, q, hull: Arc::new(hull) })
    }

    pub fn piecewise(points: Vec<(f64, f64)>, cap: bool) -> Result<Self> {
        Ok(YoungFunction::PiecewiseLinearConvex(PiecewiseLinear::new(points, cap)?))
    }

    pub fn scaled(inner: YoungFunction, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid("Scaled factor must be positive and finite"));
        }
        Ok(match inner {
            YoungFunction::Scaled { inner, c: c0 } => YoungFunction::Scaled { inner, c: c0 * c },
            other => YoungFunction::Scaled { inner: Box::new(other), c },
        })
    }

    /// The identity `Φ(t) = t`.
    pub fn identity() -> Self {
        YoungFunction::Power { p: 1.0 }
    }

    /// `0` on `[0, 1]` and `+∞` beyond.
    pub fn zero_cap() -> Self {
        YoungFunction::PiecewiseLinearConvex(PiecewiseLinear {
            points: vec![(0.0, 0.0), (1.0, 0.0)],
            cap: true,
        })
    }

    fn linear_cap_plc() -> PiecewiseLinear {
        PiecewiseLinear { points: vec![(0.0, 0.0), (1.0, 1.0)], cap: true }
    }

    /// `Some((p, c))` when `Φ(t) = (c t)^p`.
    pub fn homogeneous(&self) -> Option<(f64, f64)> {
        match self {
            YoungFunction::Power { p } => Some((*p, 1.0)),
            YoungFunction::Scaled { inner, c } => inner.homogeneous().map(|(p, c0)| (p, c0 * c)),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            YoungFunction::Power { p } => format!("Power({p})"),
            YoungFunction::PowerLog { p, q, .. } => format!("PowerLog({p},{q})"),
            YoungFunction::ExpMinusOne => "ExpMinusOne".into(),
            YoungFunction::ExpConjugate => "ExpConjugate".into(),
            YoungFunction::LinearCap => "LinearCap".into(),
            YoungFunction::PiecewiseLinearConvex(pl) => {
                format!("PiecewiseLinearConvex({} pts{})", pl.points.len(), if pl.cap { ", capped" } else { "" })
            }
            YoungFunction::Scaled { inner, c } => format!("Scaled({}, {c})", inner.label()),
        }
    }

    /// `Φ(t)` on the extended half-line.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungFunction::Power { p } => {
                if *p == 1.0 {
                    t
                } else if *p == 2.0 {
                    t * t
                } else {
                    t.powf(*p)
                }
            }
            YoungFunction::PowerLog { hull, .. } => hull.eval(t),
            YoungFunction::ExpMinusOne => t.exp_m1(),
            YoungFunction::ExpConjugate => {
                if t == f64::INFINITY {
                    f64::INFINITY
                } else if t <= 1.0 {
                    0.0
                } else {
                    exp_conjugate_above_one(t - 1.0)
                }
            }
            YoungFunction::LinearCap => Self::linear_cap_plc().eval(t),
            YoungFunction::PiecewiseLinearConvex(pl) => pl.eval(t),
            YoungFunction::Scaled { inner, c } => inner.eval(c * t),
        }
    }

    /// The generalized inverse `inf{t ≥ 0 : Φ(t) > u}`.
    pub fn inverse(&self, u: f64) -> f64 {
        if u == f64::INFINITY {
            return f64::INFINITY;
        }
        let u = u.max(0.0);
        match self {
            YoungFunction::Power { p } => {
                if *p == 1.0 {
                    u
                } else if *p == 2.0 {
                    u.sqrt()
                } else {
                    u.powf(1.0 / p)
                }
            }
            YoungFunction::PowerLog { hull, .. } => hull.inverse(u),
            YoungFunction::ExpMinusOne => u.ln_1p(),
            YoungFunction::ExpConjugate => exp_conjugate_inverse(u),
            YoungFunction::LinearCap => u.min(1.0),
            YoungFunction::PiecewiseLinearConvex(pl) => pl.inverse(u),
            YoungFunction::Scaled { inner, c } => inner.inverse(u) / c,
        }
    }

    /// Generalized inverse by bracketing and bisection on `eval` alone.
    ///
    /// The bracket doubles from `t = 1`; past `2^512` the inverse is reported as `+∞`.
    pub fn inverse_by_bisection(&self, u: f64) -> f64 {
        if u == f64::INFINITY {
            return f64::INFINITY;
        }
        let u = u.max(0.0);
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.eval(hi) <= u {
            lo = hi;
            hi *= 2.0;
            if hi > INVERSE_BRACKET_CAP {
                return f64::INFINITY;
            }
        }
        for _ in 0..4096 {
            if hi - lo <= INVERSE_REL_TOL * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `a(Φ) = sup{t : Φ(t) = 0}`.
    pub fn a_phi(&self) -> f64 {
        match self {
            YoungFunction::ExpConjugate => 1.0,
            YoungFunction::PowerLog { hull, .. } => hull.a_phi(),
            YoungFunction::PiecewiseLinearConvex(pl) => pl.a_phi(),
            YoungFunction::Scaled { inner, c } => inner.a_phi() / c,
            _ => 0.0,
        }
    }

    /// `b(Φ) = inf{t : Φ(t) = ∞}`.
    pub fn b_phi(&self) -> f64 {
        match self {
            YoungFunction::LinearCap => 1.0,
            YoungFunction::PiecewiseLinearConvex(pl) => pl.b_phi(),
            YoungFunction::Scaled { inner, c } => inner.b_phi() / c,
            _ => f64::INFINITY,
        }
    }

    /// The complementary function `Φ̃(t) = sup{tu - Φ(u) : u ≥ 0}`.
    pub fn complementary(&self) -> YoungFunction {
        match self {
            YoungFunction::Power { p } => {
                if *p == 1.0 {
                    Self::zero_cap()
                } else {
                    // (p-1)(t/p)^{p'} = (c t)^{p'} with c = (p-1)^{1/p'} / p.
                    let q = p / (p - 1.0);
                    let c = (p - 1.0).powf(1.0 / q) / p;
                    YoungFunction::Scaled { inner: Box::new(YoungFunction::Power { p: q }), c }
                }
            }
            YoungFunction::PowerLog { hull, .. } => YoungFunction::PiecewiseLinearConvex(hull.legendre()),
            YoungFunction::ExpMinusOne => YoungFunction::ExpConjugate,
            YoungFunction::ExpConjugate => YoungFunction::ExpMinusOne,
            YoungFunction::LinearCap => YoungFunction::PiecewiseLinearConvex(Self::linear_cap_plc().legendre()),
            YoungFunction::PiecewiseLinearConvex(pl) => {
                let conj = pl.legendre();
                if conj.points == [(0.0, 0.0), (1.0, 1.0)] && !conj.cap {
                    YoungFunction::identity()
                } else {
                    YoungFunction::PiecewiseLinearConvex(conj)
                }
            }
            YoungFunction::Scaled { inner, c } => {
                Self::scaled(inner.complementary(), 1.0 / c).expect("positive factor")
            }
        }
    }

    /// A Young function equivalent to `t ↦ Φ(t^θ)`.
    ///
    /// Power families compose exactly; other families are replaced by the
    /// convex minorant of the composition on the rectification grid after a
    /// ∇₂ check.
    pub fn power_compose(&self, theta: f64) -> Result<YoungFunction> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(invalid(format!("theta must lie in (0, 1], got {theta}")));
        }
        if let Some((p, c)) = self.homogeneous() {
            if p * theta < 1.0 - ROUNDING_SLACK {
                return Err(invalid(format!("Power({p}) composed with θ={theta} has exponent below 1")));
            }
            let inner = YoungFunction::Power { p: (p * theta).max(1.0) };
            return if c == 1.0 { Ok(inner) } else { Self::scaled(inner, c.powf(1.0 / theta)) };
        }
        if theta == 1.0 {
            return Ok(self.clone());
        }
        let report = check_nabla2(self, &crate::report::default_r_grid(), &default_k_grid());
        if !report.holds {
            return Err(invalid(format!("{} fails the ∇₂ scan; composition is not admissible", self.label())));
        }
        let samples: Vec<(f64, f64)> = rectify_grid()
            .map(|t| (t, self.eval(t.powf(theta))))
            .take_while(|s| s.1.is_finite())
            .collect();
        let hull = PiecewiseLinear::convex_minorant(&samples)?;
        let cap = self.b_phi().is_finite();
        let hull = if cap { PiecewiseLinear::new(hull.points, true)? } else { hull };
        Ok(YoungFunction::PiecewiseLinearConvex(hull))
    }

    /// Largest ratio between the raw PowerLog profile and its rectification.
    pub fn rectification_constant(&self) -> f64 {
        match self {
            YoungFunction::PowerLog { p, q, hull } => rectify_grid()
                .map(|t| t.powf(*p) * (std::f64::consts::E + t).ln().powf(*q) / hull.eval(t))
                .fold(1.0, f64::max),
            _ => 1.0,
        }
    }

    fn to_json(&self) -> Value {
        let (family, params) = match self {
            YoungFunction::Power { p } => ("Power", json!({ "p": p })),
            YoungFunction::PowerLog { p, q, .. } => ("PowerLog", json!({ "p": p, "q": q })),
            YoungFunction::ExpMinusOne => ("ExpMinusOne", json!({})),
            YoungFunction::ExpConjugate => ("ExpConjugate", json!({})),
            YoungFunction::LinearCap => ("LinearCap", json!({})),
            YoungFunction::PiecewiseLinearConvex(pl) => {
                let pts: Vec<[f64; 2]> = pl.points.iter().map(|&(t, y)| [t, y]).collect();
                ("PiecewiseLinearConvex", json!({ "points": pts, "cap": pl.cap }))
            }
            YoungFunction::Scaled { inner, c } => ("Scaled", json!({ "inner": inner.to_json(), "c": c })),
        };
        json!({ "family": family, "params": params })
    }

    fn from_json(v: &Value) -> Result<YoungFunction> {
        let family = v
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid("Young function JSON needs a string `family`"))?;
        let empty = json!({});
        let params = v.get("params").unwrap_or(&empty);
        let num = |k: &str| -> Result<f64> {
            params
                .get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| invalid(format!("{family} needs numeric parameter `{k}`")))
        };
        match family {
            "Power" => Self::power(num("p")?),
            "PowerLog" => Self::power_log(num("p")?, num("q")?),
            "ExpMinusOne" => Ok(YoungFunction::ExpMinusOne),
            "ExpConjugate" => Ok(YoungFunction::ExpConjugate),
            "LinearCap" => Ok(YoungFunction::LinearCap),
            "PiecewiseLinearConvex" => {
                let pts: Vec<(f64, f64)> = serde_json::from_value::<Vec<[f64; 2]>>(
                    params.get("points").cloned().unwrap_or(Value::Null),
                )
                .map_err(|e| invalid(format!("PiecewiseLinearConvex points: {e}")))?
                .into_iter()
                .map(|[t, y]| (t, y))
                .collect();
                let cap = params.get("cap").and_then(Value::as_bool).unwrap_or(false);
                Self::piecewise(pts, cap)
            }
            "Scaled" => {
                let inner = Self::from_json(params.get("inner").ok_or_else(|| invalid("Scaled needs `inner`"))?)?;
                Self::scaled(inner, num("c")?)
            }
            other => Err(invalid(format!("unknown Young family `{other}`"))),
        }
    }
}

impl Serialize for YoungFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for YoungFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        YoungFunction::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// `(1+s) log(1+s) - s` for `s > 0`; the series `Σ_{k≥2} (-s)^k/(k(k-1))`
/// avoids the cancellation near `s = 0`.
fn exp_conjugate_above_one(s: f64) -> f64 {
    if s < 0.125 {
        let mut term = s * s;
        let mut sum = 0.0;
        for k in 2..40 {
            let kf = k as f64;
            sum += term / (kf * (kf - 1.0));
            term *= -s;
        }
        sum
    } else {
        (1.0 + s) * s.ln_1p() - s
    }
}

/// Inverse of `t ↦ t log t - t + 1` on `t > 1`, bisected in `s = t - 1` so
/// the bracket is relative to the distance from the flat part.
fn exp_conjugate_inverse(u: f64) -> f64 {
    if u == 0.0 {
        return 1.0;
    }
    let mut hi = 1.0;
    while exp_conjugate_above_one(hi) <= u {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if exp_conjugate_above_one(mid) <= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 + hi
}

/// `Φ(t)`; see [`YoungFunction::eval`].
pub fn eval_young(phi: &YoungFunction, t: f64) -> f64 {
    phi.eval(t)
}

/// `Φ⁻¹(u)`; see [`YoungFunction::inverse`].
pub fn inverse_young(phi: &YoungFunction, u: f64) -> f64 {
    phi.inverse(u)
}

/// `Φ̃`; see [`YoungFunction::complementary`].
pub fn complementary(phi: &YoungFunction) -> YoungFunction {
    phi.complementary()
}

/// See [`YoungFunction::power_compose`].
pub fn power_compose(phi: &YoungFunction, theta: f64) -> Result<YoungFunction> {
    phi.power_compose(theta)
}

/// Default multiplier grid `{1.1, 1.2, …, 16}` for the ∇₂ scan.
pub fn default_k_grid() -> Vec<f64> {
    (11..=160).map(|j| j as f64 / 10.0).collect()
}

/// Scan `Φ(2t)/Φ(t)` over `t_grid`, with `0/0` read as `1`.
pub fn check_delta2(phi: &YoungFunction, t_grid: &[f64]) -> ConditionReport {
    let mut rep = ConditionReport::new("delta2", describe_grid(t_grid));
    for &t in t_grid {
        let (num, den) = (phi.eval(2.0 * t), phi.eval(t));
        let ratio = if den == 0.0 {
            if num == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            num / den
        };
        rep.observe(ratio, &[t]);
    }
    rep.finish(CONDITION_CAP)
}

/// Find the smallest `k > 1` in `k_grid` with `Φ(t) ≤ Φ(kt)/(2k)` on all of `t_grid`.
pub fn check_nabla2(phi: &YoungFunction, t_grid: &[f64], k_grid: &[f64]) -> ConditionReport {
    let grid = format!("t: {}; k: {}", describe_grid(t_grid), describe_grid(k_grid));
    let mut ks: Vec<f64> = k_grid.iter().copied().filter(|&k| k > 1.0).collect();
    ks.sort_by(f64::total_cmp);
    let mut last_fail = Vec::new();
    for &k in &ks {
        let mut worst = 0.0;
        let mut worst_t = f64::NAN;
        for &t in t_grid {
            let lhs = phi.eval(t);
            let rhs = phi.eval(k * t) / (2.0 * k);
            let ratio = if lhs == 0.0 { 0.0 } else if rhs == f64::INFINITY { 0.0 } else { lhs / rhs };
            if worst_t.is_nan() || ratio > worst {
                worst = ratio;
                worst_t = t;
            }
        }
        if worst <= 1.0 + ROUNDING_SLACK {
            return ConditionReport {
                name: "nabla2".into(),
                holds: true,
                best_constant: k,
                witness: vec![k],
                grid,
                parts: Vec::new(),
            };
        }
        last_fail = vec![k, worst_t];
    }
    ConditionReport {
        name: "nabla2".into(),
        holds: false,
        best_constant: f64::INFINITY,
        witness: last_fail,
        grid,
        parts: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::default_r_grid;

    fn plc(points: &[(f64, f64)], cap: bool) -> YoungFunction {
        YoungFunction::piecewise(points.to_vec(), cap).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(YoungFunction::power(2.0).unwrap().eval(3.0), 9.0);
        assert_eq!(YoungFunction::LinearCap.eval(0.5), 0.5);
        assert_eq!(YoungFunction::LinearCap.eval(2.0), f64::INFINITY);
        assert_eq!(plc(&[(0.0, 0.0), (1.0, 0.0), (2.0, 3.0)], false).eval(1.5), 1.5);
        assert_eq!(YoungFunction::ExpMinusOne.eval(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn below_a_is_zero_above_b_is_infinite() {
        let z = YoungFunction::zero_cap();
        assert_eq!(z.a_phi(), 1.0);
        assert_eq!(z.b_phi(), 1.0);
        assert_eq!(z.eval(0.99), 0.0);
        assert_eq!(z.eval(1.0), 0.0);
        assert_eq!(z.eval(1.01), f64::INFINITY);
        let s = YoungFunction::scaled(YoungFunction::LinearCap, 2.0).unwrap();
        assert_eq!(s.b_phi(), 0.5);
        assert_eq!(s.eval(0.6), f64::INFINITY);
        assert_eq!(YoungFunction::ExpConjugate.a_phi(), 1.0);
    }

    #[test]
    fn inverse_examples() {
        let p2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(p2.inverse(4.0), 2.0);
        assert_eq!(p2.inverse(0.0), 0.0);
        assert_eq!(YoungFunction::zero_cap().inverse(7.0), 1.0);
        assert_eq!(YoungFunction::zero_cap().inverse(0.0), 1.0);
        for u in [0.0, 0.3, 1.0, 10.0] {
            assert!(p2.eval(p2.inverse(u)) <= u * (1.0 + 1e-15));
            assert!(u <= p2.inverse(p2.eval(u)) * (1.0 + 1e-15));
        }
        assert_eq!(p2.inverse(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn closed_form_inverses_match_bisection() {
        let fams = [
            YoungFunction::power(2.5).unwrap(),
            YoungFunction::power_log(2.0, 1.0).unwrap(),
            YoungFunction::ExpMinusOne,
            YoungFunction::LinearCap,
            plc(&[(0.0, 0.0), (1.0, 0.0), (2.0, 3.0)], false),
            YoungFunction::scaled(YoungFunction::power(3.0).unwrap(), 0.3).unwrap(),
        ];
        for phi in &fams {
            for u in [0.0, 1e-3, 0.2, 1.0, 1.5, 40.0, 1e5] {
                let a = phi.inverse(u);
                let b = phi.inverse_by_bisection(u);
                assert!((a - b).abs() <= 1e-11 * a.max(1.0), "{} at {u}: {a} vs {b}", phi.label());
            }
        }
    }

    #[test]
    fn jump_inverse_takes_the_infimum() {
        // Step-like convex function: zero up to 2, then slope 5.
        let phi = plc(&[(0.0, 0.0), (2.0, 0.0), (3.0, 5.0)], false);
        assert_eq!(phi.inverse(0.0), 2.0);
        assert_eq!(phi.inverse(5.0), 3.0);
        assert!((phi.inverse_by_bisection(0.0) - 2.0).abs() < 1e-11);
    }

    #[test]
    fn complementary_examples() {
        let half_sq = YoungFunction::scaled(YoungFunction::power(2.0).unwrap(), 1.0 / 2f64.sqrt()).unwrap();
        let c = half_sq.complementary();
        for t in [0.1, 1.0, 3.0, 17.0] {
            assert!((c.eval(t) - t * t / 2.0).abs() < 1e-12 * t * t);
        }
        let c = YoungFunction::identity().complementary();
        assert_eq!(c.eval(0.5), 0.0);
        assert_eq!(c.eval(1.0), 0.0);
        assert_eq!(c.eval(1.5), f64::INFINITY);
        assert_eq!(c.complementary(), YoungFunction::identity());
        // LinearCap's conjugate is (t-1)_+.
        let c = YoungFunction::LinearCap.complementary();
        assert_eq!(c.eval(0.5), 0.0);
        assert_eq!(c.eval(3.0), 2.0);
    }

    #[test]
    fn plc_conjugate_matches_dense_sup_scan() {
        let phi = plc(&[(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)], false);
        let conj = phi.complementary();
        // Independent oracle: sup over a dense u-grid on [0, 4]. The sup of
        // tu - Φ(u) is attained at a breakpoint, all of which lie on the grid.
        let us: Vec<f64> = (0..=40_000).map(|i| i as f64 * 1e-4).collect();
        let mut max_err: f64 = 0.0;
        for i in 0..=190 {
            let t = i as f64 * 0.01;
            let sup = us.iter().map(|&u| t * u - phi.eval(u)).fold(f64::NEG_INFINITY, f64::max);
            max_err = max_err.max((sup - conj.eval(t)).abs());
        }
        assert!(max_err < 1e-9, "max error {max_err}");
        // Frozen breakpoints of the conjugate.
        match conj {
            YoungFunction::PiecewiseLinearConvex(pl) => {
                assert_eq!(pl.points(), &[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]);
                assert!(pl.cap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_conjugate_is_conjugate_exponent() {
        let phi = YoungFunction::power(3.0).unwrap();
        let c = phi.complementary();
        assert_eq!(c.homogeneous().unwrap().0, 1.5);
        // Oracle: numeric sup of tu - u^3 by golden scan.
        for t in [0.5, 2.0, 7.0] {
            let us = (0..200_000).map(|i| i as f64 * 1e-5 * 5.0);
            let sup = us.map(|u| t * u - u.powi(3)).fold(f64::NEG_INFINITY, f64::max);
            assert!((sup - c.eval(t)).abs() < 1e-6 * sup.max(1.0));
        }
    }

    #[test]
    fn power_compose_examples() {
        let p = |x| YoungFunction::power(x).unwrap();
        assert_eq!(p(4.0).power_compose(0.5).unwrap(), p(2.0));
        assert_eq!(p(2.0).power_compose(1.0).unwrap(), p(2.0));
        assert_eq!(p(3.0).power_compose(0.5).unwrap(), p(1.5));
        assert!(p(1.5).power_compose(0.5).is_err());
        assert!(p(2.0).power_compose(0.0).is_err());
    }

    #[test]
    fn power_compose_nonpower_is_equivalent() {
        let phi = YoungFunction::power_log(4.0, 1.0).unwrap();
        let comp = phi.power_compose(0.5).unwrap();
        for t in [0.01f64, 0.5, 1.0, 10.0, 1e3] {
            let exact = t * t * (std::f64::consts::E + t.sqrt()).ln();
            let r = comp.eval(t) / exact;
            assert!((0.5..=1.001).contains(&r), "ratio {r} at {t}");
        }
    }

    #[test]
    fn delta2_examples() {
        let grid = default_r_grid();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let r = check_delta2(&YoungFunction::power(p).unwrap(), &grid);
            assert!(r.holds);
            assert!((r.best_constant - 2f64.powf(p)).abs() < 1e-12 * 2f64.powf(p));
        }
        let r = check_delta2(&YoungFunction::ExpMinusOne, &grid);
        assert!(!r.holds);
        // Independent oracle on a short grid: (e^{2t}-1)/(e^t-1) = e^t + 1.
        let r = check_delta2(&YoungFunction::ExpMinusOne, &[1.0, 2.0, 4.0]);
        assert!((r.best_constant - (4f64.exp() + 1.0)).abs() < 1e-9 * r.best_constant);
        assert!(!check_delta2(&YoungFunction::LinearCap, &grid).holds);
    }

    #[test]
    fn nabla2_examples() {
        let grid = default_r_grid();
        let ks = default_k_grid();
        let r = check_nabla2(&YoungFunction::power(2.0).unwrap(), &grid, &ks);
        assert!(r.holds);
        assert_eq!(r.best_constant, 2.0);
        let r4 = check_nabla2(&YoungFunction::power(2.0).unwrap(), &grid, &[4.0]);
        assert!(r4.holds);
        assert!(!check_nabla2(&YoungFunction::identity(), &grid, &ks).holds);
        let r = check_nabla2(&YoungFunction::power_log(2.0, 1.0).unwrap(), &grid, &ks);
        assert!(r.holds);
        assert!(r.best_constant > 1.0 && r.best_constant <= 16.0);
    }

    #[test]
    fn json_round_trip() {
        let fams = [
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::power_log(2.0, -0.5).unwrap(),
            YoungFunction::ExpMinusOne,
            YoungFunction::LinearCap,
            plc(&[(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)], true),
            YoungFunction::scaled(YoungFunction::power(2.0).unwrap(), 0.5).unwrap(),
        ];
        for phi in fams {
            let s = serde_json::to_string(&phi).unwrap();
            let back: YoungFunction = serde_json::from_str(&s).unwrap();
            assert_eq!(back, phi, "{s}");
        }
        let v: YoungFunction = serde_json::from_str(r#"{"family":"ExpMinusOne"}"#).unwrap();
        assert_eq!(v, YoungFunction::ExpMinusOne);
        assert!(serde_json::from_str::<YoungFunction>(r#"{"family":"Power","params":{"p":0.5}}"#).is_err());
    }

    #[test]
    fn rectified_power_log_is_close_to_profile() {
        let phi = YoungFunction::power_log(2.0, -1.0).unwrap();
        let c = phi.rectification_constant();
        assert!((1.0..1.5).contains(&c), "rectification constant {c}");
    }
}
