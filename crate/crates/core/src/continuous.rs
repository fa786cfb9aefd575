//! The Cesàro operator on `C[0,1]` and on continuous functions on `[0,∞)`
//! with a limit at infinity: `(Tf)(t) = t^{-1} ∫_0^t f(s) ds`, `(Tf)(0) = f(0)`.
//!
//! Powers use the moment form
//! `(Tⁿf)(t) = Γ(n)^{-1} ∫_0^∞ e^{-u} u^{n-1} f(t e^{-u}) du`,
//! evaluated with `y = ln t` as the coordinate so that the half-line orbit can
//! be followed to `ln t ≈ n + 8√n` without overflow.
//!
//! On the half-line the integrand oscillates once `t e^{-u}` is large. Above a
//! threshold `Y` the function is replaced by its limit; for `sin(t)/log(2+t)`
//! the discarded oscillatory part is bounded by `4 w_max / (Y log(2 + Y))`
//! through the second mean value theorem, where `w_max` is the peak of the
//! Gamma density.

use crate::error::{Error, Result};
use crate::numeric::poisson::{gamma_p, gamma_q, gamma_upper_cutoff, poisson_log_weight};
use crate::numeric::quad::{integrate_panels, Scale};
use crate::numeric::QuadratureConfig;
use crate::orbit::{check_schedule, NormHistory, NormSample};
use crate::range::{
    combine, dyadic_windows, probe_windows, ProbeConfig, Status, Verdict, EXACT_TOL,
};
use crate::scalar::JsonScalar;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Threshold above which oscillating half-line functions are replaced by
/// their limit inside moment integrals.
pub const FAR_FIELD: f64 = 1e4;

/// Number of steps `ε_j = 2^{-j}` in the ladder at 0.
pub const ZERO_LADDER: usize = 1000;
/// Steps per octave and octaves in the ladder `R_j = 2^{j/16}` at infinity.
pub const INF_STEPS_PER_OCTAVE: usize = 16;
pub const INF_OCTAVES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Interval,
    Halfline,
}

#[derive(Debug)]
enum Eval {
    Poly(Vec<Complex64>),
    SinLog,
    InvLog,
    Samples {
        ts: Vec<f64>,
        vs: Vec<Complex64>,
    },
    Shift {
        inner: FunctionHandle,
        by: Complex64,
    },
    Sum(FunctionHandle, FunctionHandle),
    Cesaro {
        inner: FunctionHandle,
        cfg: QuadratureConfig,
    },
    Power {
        inner: FunctionHandle,
        n: usize,
        cfg: QuadratureConfig,
    },
    /// `g(t) = -∫_t^1 f(s)/s ds`; `g(0)`, the improper value, is the handle's
    /// `value_at_0`.
    Primitive {
        inner: FunctionHandle,
        cfg: QuadratureConfig,
    },
}

/// A point-evaluable function on `[0,1]` or `[0,∞)` with its boundary data.
#[derive(Debug, Clone)]
pub struct FunctionHandle {
    eval: Arc<Eval>,
    space: Space,
    value_at_0: Complex64,
    limit_at_inf: Option<Complex64>,
}

/// JSON description `{"space":..., "kind":..., "coeffs"|"points": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub space: Space,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<JsonScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<(f64, JsonScalar)>>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl FunctionHandle {
    fn wrap(
        eval: Eval,
        space: Space,
        value_at_0: Complex64,
        limit_at_inf: Option<Complex64>,
    ) -> Self {
        FunctionHandle {
            eval: Arc::new(eval),
            space,
            value_at_0,
            limit_at_inf,
        }
    }

    /// `Σ_j coeffs[j] t^j` on `[0,1]`; on the half-line only constants qualify.
    pub fn poly(coeffs: Vec<Complex64>, space: Space) -> Result<Self> {
        if coeffs.is_empty() || !coeffs.iter().copied().all(finite) {
            return Err(Error::InvalidInput(
                "polynomial needs finite coefficients".into(),
            ));
        }
        let limit = match space {
            Space::Interval => None,
            Space::Halfline => {
                if coeffs[1..].iter().any(|c| *c != zero()) {
                    return Err(Error::InvalidInput(
                        "a nonconstant polynomial has no limit on the half-line".into(),
                    ));
                }
                Some(coeffs[0])
            }
        };
        let c0 = coeffs[0];
        Ok(Self::wrap(Eval::Poly(coeffs), space, c0, limit))
    }

    pub fn poly_real(coeffs: &[f64]) -> Result<Self> {
        Self::poly(
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            Space::Interval,
        )
    }

    pub fn constant(c: Complex64, space: Space) -> Result<Self> {
        Self::poly(vec![c], space)
    }

    /// `t^m` on `[0,1]`.
    pub fn monomial(m: usize) -> Self {
        let mut c = vec![zero(); m + 1];
        c[m] = Complex64::new(1.0, 0.0);
        Self::wrap(
            Eval::Poly(c),
            Space::Interval,
            if m == 0 { c1() } else { zero() },
            None,
        )
    }

    /// `sin(t) / log(2 + t)` on the half-line.
    pub fn sin_log() -> Self {
        Self::wrap(Eval::SinLog, Space::Halfline, zero(), Some(zero()))
    }

    /// `1 / log(e/t)` on `[0,1]`, continuous with value 0 at 0.
    pub fn inv_log() -> Self {
        Self::wrap(Eval::InvLog, Space::Interval, zero(), None)
    }

    /// Piecewise-linear interpolant. The first node must be 0; on `[0,1]` the
    /// last node must be 1, on the half-line the function is constant after
    /// the last node.
    pub fn samples(points: Vec<(f64, Complex64)>, space: Space) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(
                "need at least two sample points".into(),
            ));
        }
        if points[0].0 != 0.0 {
            return Err(Error::InvalidInput(
                "the first sample must be at t = 0".into(),
            ));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0))
            || !points.iter().all(|p| p.0.is_finite() && finite(p.1))
        {
            return Err(Error::InvalidInput(
                "sample nodes must be finite and strictly increasing".into(),
            ));
        }
        let last = *points.last().unwrap();
        if space == Space::Interval && last.0 != 1.0 {
            return Err(Error::InvalidInput(
                "interval samples must end at t = 1".into(),
            ));
        }
        let limit = (space == Space::Halfline).then_some(last.1);
        let (ts, vs): (Vec<f64>, Vec<Complex64>) = points.into_iter().unzip();
        let v0 = vs[0];
        Ok(Self::wrap(Eval::Samples { ts, vs }, space, v0, limit))
    }

    pub fn from_spec(spec: &FunctionSpec) -> Result<Self> {
        match spec.kind.as_str() {
            "poly" => {
                let c = spec
                    .coeffs
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("poly needs \"coeffs\"".into()))?;
                Self::poly(c.iter().map(|&s| s.into()).collect(), spec.space)
            }
            "samples" => {
                let p = spec
                    .points
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("samples need \"points\"".into()))?;
                Self::samples(p.iter().map(|&(t, v)| (t, v.into())).collect(), spec.space)
            }
            "sinlog" if spec.space == Space::Halfline => Ok(Self::sin_log()),
            "invlog" if spec.space == Space::Interval => Ok(Self::inv_log()),
            "sinlog" | "invlog" => Err(Error::InvalidInput(format!(
                "{} is not defined on the {:?} space",
                spec.kind, spec.space
            ))),
            other => Err(Error::InvalidInput(format!(
                "unknown function kind {other:?}"
            ))),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn value_at_0(&self) -> Complex64 {
        self.value_at_0
    }

    pub fn limit_at_inf(&self) -> Option<Complex64> {
        self.limit_at_inf
    }

    /// `f − f(0)`.
    pub fn centered(&self) -> FunctionHandle {
        self.shifted(-self.value_at_0)
    }

    pub fn shifted(&self, by: Complex64) -> FunctionHandle {
        Self::wrap(
            Eval::Shift {
                inner: self.clone(),
                by,
            },
            self.space,
            self.value_at_0 + by,
            self.limit_at_inf.map(|l| l + by),
        )
    }

    fn check_domain(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!(
                "t = {t} is outside the domain"
            )));
        }
        if self.space == Space::Interval && t > 1.0 {
            return Err(Error::InvalidInput(format!("t = {t} is outside [0, 1]")));
        }
        Ok(t)
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        let t = self.check_domain(t)?;
        if t == 0.0 {
            return Ok(self.value_at_0);
        }
        self.eval_unchecked(t)
    }

    pub fn eval_many(&self, ts: &[f64]) -> Result<Vec<Complex64>> {
        if let Eval::Cesaro { inner, cfg } = &*self.eval {
            return cesaro_many(inner, ts, cfg);
        }
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    fn eval_unchecked(&self, t: f64) -> Result<Complex64> {
        Ok(match &*self.eval {
            Eval::Poly(c) => c.iter().rev().fold(zero(), |acc, &a| acc * t + a),
            Eval::SinLog => Complex64::new(t.sin() / (2.0 + t).ln(), 0.0),
            Eval::InvLog => Complex64::new(1.0 / (1.0 - t.ln()), 0.0),
            Eval::Samples { ts, vs } => {
                let i = ts.partition_point(|&x| x <= t);
                if i >= ts.len() {
                    vs[vs.len() - 1]
                } else {
                    let (t0, t1) = (ts[i - 1], ts[i]);
                    let w = (t - t0) / (t1 - t0);
                    vs[i - 1] * (1.0 - w) + vs[i] * w
                }
            }
            Eval::Shift { inner, by } => inner.eval_unchecked(t)? + by,
            Eval::Sum(a, b) => a.eval_unchecked(t)? + b.eval_unchecked(t)?,
            Eval::Cesaro { inner, cfg } => integrate_on(inner, 0.0, t, cfg)? / t,
            Eval::Power { inner, n, cfg } => power_eval_log(inner, *n, t.ln(), cfg)?,
            Eval::Primitive { inner, cfg } => primitive_log(inner, t.ln(), cfg)?,
        })
    }

    /// `f(e^v)`, avoiding the underflow of `e^v` where it matters: the
    /// logarithmic catalog entry approaches its value at 0 only like `1/|v|`.
    pub fn eval_log(&self, v: f64) -> Result<Complex64> {
        if v.is_nan() || v > 700.0 {
            return Err(Error::InvalidInput(format!("ln t = {v} is out of range")));
        }
        if v == f64::NEG_INFINITY {
            return Ok(self.value_at_0);
        }
        if self.space == Space::Interval && v > 0.0 {
            return Err(Error::InvalidInput(format!("t = e^{v} is outside [0, 1]")));
        }
        match &*self.eval {
            Eval::InvLog => Ok(Complex64::new(1.0 / (1.0 - v), 0.0)),
            Eval::Shift { inner, by } => Ok(inner.eval_log(v)? + by),
            Eval::Sum(a, b) => Ok(a.eval_log(v)? + b.eval_log(v)?),
            Eval::Power { inner, n, cfg } => power_eval_log(inner, *n, v, cfg),
            Eval::Cesaro { inner, cfg } if v < -600.0 => power_eval_log(inner, 1, v, cfg),
            Eval::Primitive { inner, cfg } => primitive_log(inner, v, cfg),
            _ => self.eval(v.exp()),
        }
    }

    /// Points inside `(a, b)` where the function is not smooth or, for the
    /// oscillating catalog entry, the zeros of the sine. `None` when there
    /// are too many to be useful.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        match &*self.eval {
            Eval::SinLog => {
                let (k0, k1) = ((a / PI).floor() as i64 + 1, (b / PI).ceil() as i64 - 1);
                (k0..=k1)
                    .map(|k| k as f64 * PI)
                    .filter(|&x| x > a && x < b)
                    .collect()
            }
            Eval::Samples { ts, .. } => ts.iter().copied().filter(|&x| x > a && x < b).collect(),
            Eval::Shift { inner, .. } | Eval::Primitive { inner, .. } => inner.breakpoints(a, b),
            Eval::Sum(f, g) => {
                let mut v = f.breakpoints(a, b);
                v.extend(g.breakpoints(a, b));
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
            _ => Vec::new(),
        }
    }

    /// `(Y, L)` such that on `t > Y` the function is `L` plus, at most, an
    /// oscillation whose weighted integrals are negligible.
    fn far_field(&self) -> Option<(f64, Complex64)> {
        match &*self.eval {
            Eval::SinLog => Some((FAR_FIELD, zero())),
            Eval::Samples { ts, vs } if self.space == Space::Halfline => {
                Some((ts[ts.len() - 1], vs[vs.len() - 1]))
            }
            Eval::Poly(c) if self.space == Space::Halfline => Some((1.0, c[0])),
            Eval::Shift { inner, by } => inner.far_field().map(|(y, l)| (y, l + by)),
            _ => None,
        }
    }
}

fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn breaks_with(f: &FunctionHandle, a: f64, b: f64) -> Vec<f64> {
    let mut v = vec![a];
    v.extend(f.breakpoints(a, b));
    v.push(b);
    v
}

/// The panel budget grows with the number of seeded panels, so that long
/// oscillatory ranges are not starved.
fn scaled_budget(cfg: &QuadratureConfig, seeded: usize) -> QuadratureConfig {
    QuadratureConfig {
        max_panels: cfg.max_panels.max(4 * seeded),
        ..*cfg
    }
}

/// Ladder tolerances: the probe decides at the 1e-6 level, so 1e-10 relative
/// accuracy per step is ample.
fn ladder_config(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: cfg.rel_tol.max(1e-10),
        ..*cfg
    }
}

/// `∫_a^b f`.
fn integrate_on(f: &FunctionHandle, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let breaks = breaks_with(f, a, b);
    let cfg = &scaled_budget(cfg, breaks.len());
    let g = |t: f64| f.eval(t).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let r = integrate_panels(g, &breaks, cfg, Scale::Magnitude)?;
    if !finite(r.value) {
        return Err(Error::InvalidInput("integrand evaluation failed".into()));
    }
    Ok(r.value)
}

/// `∫_a^b f(e^v) dv`, breakpoints mapped from `f`.
fn integrate_log(f: &FunctionHandle, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let mut breaks = vec![a];
    let (sa, sb) = (a.exp(), b.exp());
    breaks.extend(f.breakpoints(sa, sb).into_iter().map(f64::ln));
    let mut v = a.ceil();
    while v < b {
        breaks.push(v);
        v += 1.0;
    }
    breaks.push(b);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let cfg = &scaled_budget(cfg, breaks.len());
    let g = |v: f64| f.eval_log(v).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let r = integrate_panels(g, &breaks, cfg, Scale::Magnitude)?;
    if !finite(r.value) {
        return Err(Error::InvalidInput("integrand evaluation failed".into()));
    }
    Ok(r.value)
}

/// `-∫_t^1 f(s)/s ds` at `t = e^{lt}` (for `t > 1` this is `∫_1^t f(s)/s ds`).
fn primitive_log(f: &FunctionHandle, lt: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if lt < 0.0 {
        Ok(-integrate_log(f, lt, 0.0, cfg)?)
    } else {
        integrate_log(f, 0.0, lt, cfg)
    }
}

fn cesaro_many(
    inner: &FunctionHandle,
    ts: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex64>> {
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));
    let mut out = vec![zero(); ts.len()];
    let mut acc = zero();
    let mut prev = 0.0;
    for i in order {
        let t = inner.check_domain(ts[i])?;
        if t > prev {
            acc += integrate_on(inner, prev, t, cfg)?;
            prev = t;
        }
        out[i] = if t == 0.0 { inner.value_at_0 } else { acc / t };
    }
    Ok(out)
}

/// `Tf`.
pub fn cesaro_apply_fn(f: &FunctionHandle, cfg: &QuadratureConfig) -> Result<FunctionHandle> {
    cfg.validate()?;
    Ok(FunctionHandle::wrap(
        Eval::Cesaro {
            inner: f.clone(),
            cfg: *cfg,
        },
        f.space,
        f.value_at_0,
        f.limit_at_inf,
    ))
}

/// `Tⁿf` as a handle evaluated through the moment form.
pub fn cesaro_power_fn(
    f: &FunctionHandle,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<FunctionHandle> {
    cfg.validate()?;
    Ok(FunctionHandle::wrap(
        Eval::Power {
            inner: f.clone(),
            n,
            cfg: *cfg,
        },
        f.space,
        f.value_at_0,
        f.limit_at_inf,
    ))
}

/// `(Tⁿf)(t)`.
pub fn power_eval_fn(
    f: &FunctionHandle,
    n: usize,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    let t = f.check_domain(t)?;
    if t == 0.0 {
        return Ok(f.value_at_0);
    }
    power_eval_log(f, n, t.ln(), cfg)
}

/// `(Tⁿf)(e^y)`.
pub fn power_eval_log(
    f: &FunctionHandle,
    n: usize,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if n == 0 {
        return f.eval_log(y);
    }
    let u_hi = gamma_upper_cutoff(n, 0.5 * cfg.tail_mass_tol);
    // beyond u_hi the argument t e^{-u} is tiny and f ≈ f(0)
    let beyond = f.value_at_0 * gamma_q(n, u_hi);
    let mut u_lo = 0.0;
    let mut far = zero();
    if let Some((big, limit)) = f.far_field() {
        let u_far = y - big.ln();
        if u_far >= u_hi {
            return Ok(limit * gamma_p(n, u_hi) + beyond);
        }
        if u_far > 0.0 {
            far = limit * gamma_p(n, u_far);
            u_lo = u_far;
        }
    }
    let mode = (n - 1) as f64;
    let width = (n as f64).sqrt();
    let mut breaks = vec![u_lo, u_hi];
    for j in -8i32..=14 {
        breaks.push(mode + j as f64 * width);
    }
    // the function's own breakpoints, as seen through s = e^{y - u}
    let (s_lo, s_hi) = ((y - u_hi).exp(), (y - u_lo).exp());
    breaks.extend(f.breakpoints(s_lo, s_hi).into_iter().map(|s| y - s.ln()));
    breaks.retain(|&u| u >= u_lo && u <= u_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let nm1 = n - 1;
    let g = |u: f64| {
        let w = poisson_log_weight(nm1, u).exp();
        if w == 0.0 {
            return zero();
        }
        let v = y - u;
        let v = if f.space == Space::Interval {
            v.min(0.0)
        } else {
            v
        };
        f.eval_log(v).unwrap_or(Complex64::new(f64::NAN, 0.0)) * w
    };
    let r = integrate_panels(g, &breaks, cfg, Scale::Magnitude)?;
    if !finite(r.value) {
        return Err(Error::InvalidInput("integrand evaluation failed".into()));
    }
    Ok(r.value + far + beyond)
}

/// Whether `f(0)` is subtracted before testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centering {
    Raw,
    Centered,
}

/// Values `∫_{2^{-j}}^1 f(t)/t dt` for `j = 1..=steps`.
fn zero_ladder(f: &FunctionHandle, steps: usize, cfg: &QuadratureConfig) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(steps);
    let mut acc = zero();
    let h = 2f64.ln();
    for j in 1..=steps {
        acc += integrate_log(f, -(j as f64) * h, -((j - 1) as f64) * h, cfg)?;
        out.push(acc);
    }
    Ok(out)
}

/// Values `∫_1^{R_j} f(t)/t dt` for `R_j = 2^{j/16}`.
fn inf_ladder(f: &FunctionHandle, cfg: &QuadratureConfig) -> Result<Vec<Complex64>> {
    let steps = INF_STEPS_PER_OCTAVE * INF_OCTAVES;
    let h = 2f64.ln() / INF_STEPS_PER_OCTAVE as f64;
    let mut out = Vec::with_capacity(steps);
    let mut acc = zero();
    for j in 1..=steps {
        acc += integrate_log(f, (j - 1) as f64 * h, j as f64 * h, cfg)?;
        out.push(acc);
    }
    Ok(out)
}

fn octave_windows(len: usize, width: usize, count: usize) -> Vec<(usize, usize)> {
    (0..count)
        .filter_map(|i| {
            let hi = len.checked_sub(i * width)?;
            Some((hi.checked_sub(width)?, hi))
        })
        .collect()
}

/// Membership of `f` in the range of `I − T`, through the improper integrals
/// of `f(t)/t` at 0 (and at infinity on the half-line).
pub fn range_membership_fn(
    f: &FunctionHandle,
    mode: Centering,
    cfg: &QuadratureConfig,
) -> Result<Verdict> {
    cfg.validate()?;
    let g = match mode {
        Centering::Raw => f.clone(),
        Centering::Centered => f.centered(),
    };
    let mut v = Verdict {
        status: Status::Inconclusive,
        diagnostics: Vec::new(),
    };
    let mut statuses = Vec::new();
    let at0 = g.value_at_0.norm();
    v.diagnostics.push(crate::range::Diagnostic {
        condition: "value_at_0_abs".into(),
        value: at0,
        threshold: EXACT_TOL,
    });
    statuses.push(if at0 <= EXACT_TOL {
        Status::Member
    } else {
        Status::NonMember
    });
    let probe = ProbeConfig::default();
    let cfg = &ladder_config(cfg);
    let ladder0 = zero_ladder(&g, ZERO_LADDER, cfg)?;
    let near0 = probe_windows(&ladder0, &dyadic_windows(ladder0.len(), 3), &probe);
    v.absorb("zero", &near0);
    statuses.push(near0.status);
    if g.space == Space::Halfline {
        let lim = g.limit_at_inf.unwrap_or(zero()).norm();
        v.diagnostics.push(crate::range::Diagnostic {
            condition: "limit_abs".into(),
            value: lim,
            threshold: EXACT_TOL,
        });
        statuses.push(if lim <= EXACT_TOL {
            Status::Member
        } else {
            Status::NonMember
        });
        let ladder = inf_ladder(&g, cfg)?;
        let windows = octave_windows(ladder.len(), INF_STEPS_PER_OCTAVE, 3);
        let near_inf = probe_windows(&ladder, &windows, &probe);
        v.absorb("infinity", &near_inf);
        statuses.push(near_inf.status);
    }
    v.status = combine(&statuses);
    Ok(v)
}

/// `h = f + g` with `g(t) = −∫_t^1 f(s)/s ds`, so that `(I − T)h = f`.
///
/// `h(0)` (and `lim h` on the half-line) are the ladder values of the
/// improper integrals; they are meaningful when `f` is a member.
pub fn construct_preimage_fn(f: &FunctionHandle, cfg: &QuadratureConfig) -> Result<FunctionHandle> {
    cfg.validate()?;
    let lcfg = ladder_config(cfg);
    let ladder0 = zero_ladder(f, ZERO_LADDER, &lcfg)?;
    let g0 = -ladder0[ladder0.len() - 1];
    let g_limit = match f.space {
        Space::Interval => None,
        Space::Halfline => Some(inf_ladder(f, &lcfg)?.last().copied().unwrap_or(zero())),
    };
    let g = FunctionHandle::wrap(
        Eval::Primitive {
            inner: f.clone(),
            cfg: *cfg,
        },
        f.space,
        g0,
        g_limit,
    );
    let limit = match (f.limit_at_inf, g_limit) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    Ok(FunctionHandle::wrap(
        Eval::Sum(f.clone(), g),
        f.space,
        f.value_at_0 + g0,
        limit,
    ))
}

/// Grid sizes and refinement depth for continuum sup norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub size: usize,
    pub refine_levels: usize,
    /// Left end of the half-line grid, as `t`.
    pub t_min: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            size: 128,
            refine_levels: 3,
            t_min: 1e-3,
        }
    }
}

/// Grid coordinates (`t` on the interval, `ln t` on the half-line).
fn grid(f: &FunctionHandle, n: usize, size: usize, t_min: f64) -> Vec<f64> {
    let size = size.max(2);
    let (a, b) = match f.space {
        Space::Interval => (0.0, 1.0),
        Space::Halfline => {
            let nf = n as f64;
            (t_min.ln(), nf + 8.0 * nf.sqrt() + 10.0)
        }
    };
    (0..size)
        .map(|i| a + (b - a) * i as f64 / (size - 1) as f64)
        .collect()
}

fn eval_at(f: &FunctionHandle, n: usize, coord: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    match f.space {
        Space::Interval if coord == 0.0 => Ok(f.value_at_0),
        Space::Interval => power_eval_log(f, n, coord.min(1.0).ln(), cfg),
        Space::Halfline => power_eval_log(f, n, coord, cfg),
    }
}

/// `sup_t |(Tⁿf)(t) − f(0)|` over a refined grid, with the limit term on the
/// half-line.
pub fn orbit_sup_fn(
    f: &FunctionHandle,
    n: usize,
    opts: &GridOptions,
    cfg: &QuadratureConfig,
) -> Result<(f64, bool)> {
    let pts = grid(f, n, opts.size, opts.t_min);
    let f0 = f.value_at_0;
    let vals: Vec<Result<f64>> = pts
        .par_iter()
        .map(|&c| eval_at(f, n, c, cfg).map(|v| (v - f0).norm()))
        .collect();
    let mut best = (0usize, 0.0f64);
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        if v > best.1 {
            best = (i, v);
        }
    }
    // the interval grid covers the whole domain; only the half-line is cut off
    let boundary = f.space == Space::Halfline
        && best.1 > 0.0
        && crate::seq::in_last_five_percent(best.0, pts.len());
    let mut value = best.1;
    let mut center = pts[best.0];
    let mut h = pts[1] - pts[0];
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    for _ in 0..opts.refine_levels {
        h *= 0.5;
        for c in [center - h, center + h] {
            if c < lo || c > hi {
                continue;
            }
            let v = (eval_at(f, n, c, cfg)? - f0).norm();
            if v > value {
                value = v;
                center = c;
            }
        }
    }
    if let Some(l) = f.limit_at_inf {
        value = value.max((l - f0).norm());
    }
    Ok((value, boundary))
}

/// `‖Tⁿf − f(0)‖_∞` along a schedule.
pub fn orbit_norms_fn(
    f: &FunctionHandle,
    schedule: &[usize],
    opts: &GridOptions,
    cfg: &QuadratureConfig,
) -> Result<NormHistory> {
    cfg.validate()?;
    check_schedule(schedule)?;
    let mut samples = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let (value, boundary_saturated) = orbit_sup_fn(f, n, opts, cfg)?;
        samples.push(NormSample {
            n,
            value,
            boundary_saturated,
        });
    }
    Ok(NormHistory {
        samples,
        truncation: opts.size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn domain_and_construction_errors() {
        assert!(FunctionHandle::monomial(2).eval(1.5).is_err());
        assert!(FunctionHandle::monomial(2).eval(-0.1).is_err());
        assert!(FunctionHandle::poly(vec![c(0.0), c(1.0)], Space::Halfline).is_err());
        assert!(
            FunctionHandle::samples(vec![(0.0, c(1.0)), (0.5, c(0.0))], Space::Interval).is_err()
        );
        assert!(
            FunctionHandle::samples(vec![(0.1, c(1.0)), (1.0, c(0.0))], Space::Interval).is_err()
        );
        let spec = FunctionSpec {
            space: Space::Interval,
            kind: "sinlog".into(),
            coeffs: None,
            points: None,
        };
        assert!(FunctionHandle::from_spec(&spec).is_err());
    }

    #[test]
    fn samples_interpolate_and_hold_the_limit() {
        let f = FunctionHandle::samples(
            vec![(0.0, c(0.0)), (1.0, c(2.0)), (3.0, c(1.0))],
            Space::Halfline,
        )
        .unwrap();
        assert_eq!(f.eval(0.5).unwrap(), c(1.0));
        assert_eq!(f.eval(2.0).unwrap(), c(1.5));
        assert_eq!(f.eval(100.0).unwrap(), c(1.0));
        assert_eq!(f.limit_at_inf(), Some(c(1.0)));
    }

    #[test]
    fn cesaro_examples() {
        let cfg = QuadratureConfig::default();
        let k = FunctionHandle::constant(c(3.0), Space::Interval).unwrap();
        let tk = cesaro_apply_fn(&k, &cfg).unwrap();
        assert!((tk.eval(0.4).unwrap() - 3.0).norm() < 1e-14);
        let t = FunctionHandle::monomial(1);
        let tt = cesaro_apply_fn(&t, &cfg).unwrap();
        for &x in &[0.0, 0.2, 0.9, 1.0] {
            assert!((tt.eval(x).unwrap() - x / 2.0).norm() < 1e-15);
        }
        let t3 = cesaro_apply_fn(&FunctionHandle::monomial(3), &cfg).unwrap();
        let xs = [0.9f64, 0.1, 0.5, 0.0];
        let many = t3.eval_many(&xs).unwrap();
        for (x, v) in xs.iter().zip(many) {
            assert!((v - x.powi(3) / 4.0).norm() < 1e-15);
        }
    }

    #[test]
    fn power_examples() {
        let cfg = QuadratureConfig::default();
        for m in 0..=3 {
            let f = FunctionHandle::monomial(m);
            for n in [1, 2, 7] {
                for &t in &[0.3f64, 1.0] {
                    let want = t.powi(m as i32) / ((m + 1) as f64).powi(n as i32);
                    let got = power_eval_fn(&f, n, t, &cfg).unwrap();
                    assert!((got - want).norm() < 1e-12, "m={m} n={n} t={t}");
                }
            }
        }
        let one = FunctionHandle::constant(c(1.0), Space::Halfline).unwrap();
        assert!((power_eval_fn(&one, 5, 1e6, &cfg).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn power_at_zero_is_exact() {
        let cfg = QuadratureConfig::default();
        let f = FunctionHandle::poly_real(&[0.75, 1.0, -2.0]).unwrap();
        assert_eq!(power_eval_fn(&f, 9, 0.0, &cfg).unwrap(), c(0.75));
    }

    #[test]
    fn single_power_matches_running_average() {
        let cfg = QuadratureConfig::default();
        let f = FunctionHandle::samples(
            vec![(0.0, c(1.0)), (0.3, c(-1.0)), (0.7, c(2.0)), (1.0, c(0.5))],
            Space::Interval,
        )
        .unwrap();
        let tf = cesaro_apply_fn(&f, &cfg).unwrap();
        for &t in &[0.05, 0.31, 0.5, 0.99] {
            let a = power_eval_fn(&f, 1, t, &cfg).unwrap();
            let b = tf.eval(t).unwrap();
            assert!((a - b).norm() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn membership_examples() {
        let cfg = QuadratureConfig::default();
        let v = range_membership_fn(&FunctionHandle::monomial(1), Centering::Raw, &cfg).unwrap();
        assert_eq!(v.status, Status::Member);
        let v = range_membership_fn(&FunctionHandle::inv_log(), Centering::Raw, &cfg).unwrap();
        assert_eq!(v.status, Status::NonMember, "{v:?}");
        let k = FunctionHandle::constant(c(2.0), Space::Interval).unwrap();
        assert_eq!(
            range_membership_fn(&k, Centering::Raw, &cfg)
                .unwrap()
                .status,
            Status::NonMember
        );
        assert_eq!(
            range_membership_fn(&k, Centering::Centered, &cfg)
                .unwrap()
                .status,
            Status::Member
        );
    }

    #[test]
    fn preimage_of_the_identity_function() {
        let cfg = QuadratureConfig::default();
        let h = construct_preimage_fn(&FunctionHandle::monomial(1), &cfg).unwrap();
        for &t in &[0.0, 0.25, 0.5, 1.0] {
            assert!(
                (h.eval(t).unwrap() - (2.0 * t - 1.0)).norm() < 1e-12,
                "t={t}"
            );
        }
        let th = cesaro_apply_fn(&h, &cfg).unwrap();
        for &t in &[0.1, 0.6] {
            assert!((th.eval(t).unwrap() - (t - 1.0)).norm() < 1e-12);
        }
        let z = construct_preimage_fn(
            &FunctionHandle::constant(c(0.0), Space::Interval).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!(z.eval(0.4).unwrap(), c(0.0));
    }

    #[test]
    fn interval_orbit_of_identity_function() {
        let cfg = QuadratureConfig::default();
        let h = orbit_norms_fn(
            &FunctionHandle::monomial(1),
            &[1, 2, 4, 8, 20],
            &GridOptions::default(),
            &cfg,
        )
        .unwrap();
        for s in &h.samples {
            assert!((s.value - 0.5f64.powi(s.n as i32)).abs() < 1e-12, "{s:?}");
        }
        let one = FunctionHandle::constant(c(1.0), Space::Interval).unwrap();
        let h = orbit_norms_fn(&one, &[1, 4], &GridOptions::default(), &cfg).unwrap();
        assert!(h.values().iter().all(|&v| v < 1e-12));
    }

    #[test]
    fn halfline_limit_gap_bounds_orbit() {
        let cfg = QuadratureConfig::default();
        let f =
            FunctionHandle::samples(vec![(0.0, c(0.0)), (2.0, c(1.0))], Space::Halfline).unwrap();
        let opts = GridOptions {
            size: 32,
            ..Default::default()
        };
        let h = orbit_norms_fn(&f, &[1, 8, 64], &opts, &cfg).unwrap();
        assert!(h.values().iter().all(|&v| v >= 1.0 - 1e-12));
    }
}
