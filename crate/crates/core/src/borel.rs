//! Borel transforms `f(t) = e^{-t} Σ a_k t^k / k!`, their integrals, Abel
//! means, and the integrability probe for orbit rates.
//!
//! When `a_k = O(1/k)` and `∫_0^∞ |f| < ∞`, the series `Σ a_k` converges and
//! equals `∫_0^∞ f`. Coefficient sequences are a stored prefix followed by a
//! closed-form tail so that the mass discarded by every truncation can be
//! bounded.

use crate::error::{Error, Result};
use crate::numeric::dd::DoubleDoubleComplex;
use crate::numeric::poisson::{gamma_q, poisson_log_weight};
use crate::numeric::quad::{integrate_panels, Scale};
use crate::numeric::QuadratureConfig;
use crate::range::{Diagnostic, Status, Verdict, EXACT_TOL};
use crate::seq::ConvergentSeq;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Truncation target for pointwise transforms and Abel means.
pub const SERIES_TOL: f64 = 1e-15;

/// Closed-form coefficients `a_k` for `k` past the stored prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum TailRule {
    Zero,
    /// `c / (k+1)^p`.
    ReciprocalPower {
        c: f64,
        p: f64,
    },
    /// `c (-1)^k / (k+1)^p`.
    AlternatingReciprocal {
        c: f64,
        p: f64,
    },
    /// `c / ((k+1) ln(k+2))`.
    ReciprocalLog {
        c: f64,
    },
}

impl TailRule {
    pub fn coeff(&self, k: usize) -> f64 {
        let kp = k as f64 + 1.0;
        match *self {
            TailRule::Zero => 0.0,
            TailRule::ReciprocalPower { c, p } => c / kp.powf(p),
            TailRule::AlternatingReciprocal { c, p } => {
                let s = if k % 2 == 0 { c } else { -c };
                s / kp.powf(p)
            }
            TailRule::ReciprocalLog { c } => c / (kp * (kp + 1.0).ln()),
        }
    }

    /// `sup_{k >= from} |a_k|`, if finite.
    fn sup_from(&self, from: usize) -> Option<f64> {
        let kp = from as f64 + 1.0;
        match *self {
            TailRule::Zero => Some(0.0),
            TailRule::ReciprocalPower { c, p } | TailRule::AlternatingReciprocal { c, p } => {
                if p < 0.0 {
                    None
                } else {
                    Some(c.abs() / kp.powf(p))
                }
            }
            TailRule::ReciprocalLog { c } => Some(c.abs() / (kp * (kp + 1.0).ln())),
        }
    }

    /// `sup_{k >= from} (k+1)|a_k|`, if finite.
    fn weighted_sup_from(&self, from: usize) -> Option<f64> {
        let kp = from as f64 + 1.0;
        match *self {
            TailRule::Zero => Some(0.0),
            TailRule::ReciprocalPower { c, p } | TailRule::AlternatingReciprocal { c, p } => {
                (p >= 1.0).then(|| c.abs() * kp.powf(1.0 - p))
            }
            TailRule::ReciprocalLog { c } => Some(c.abs() / (kp + 1.0).ln()),
        }
    }

    /// Bound on `∫_T^∞ |e^{-t} Σ_k rule(k) t^k / k!| dt`, if the transform of
    /// the rule is integrable and a bound is known.
    fn transform_tail_bound(&self, t: f64) -> Option<f64> {
        match *self {
            TailRule::Zero => Some(0.0),
            // e^{-t} Σ (-1)^k t^k / (k! (k+1)^p) is e^{-t} times an average of
            // e^{-t e^{-u}}, so it is bounded by |c| e^{-t}
            TailRule::AlternatingReciprocal { c, p } if p >= 0.0 => Some(c.abs() * (-t).exp()),
            // E[(K+1)^{-2}] <= 2 / t² for K ~ Poisson(t), then Jensen for p < 2
            TailRule::ReciprocalPower { c, p } if p >= 2.0 => Some(2.0 * c.abs() / t),
            TailRule::ReciprocalPower { c, p } if p > 1.0 => {
                Some(c.abs() * 2f64.powf(p / 2.0) * t.powf(1.0 - p) / (p - 1.0))
            }
            _ => None,
        }
    }
}

/// `a_0..a_{K-1}` stored, then `a_k = tail(k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffSeq {
    pub coeffs: Vec<Complex64>,
    pub tail: TailRule,
}

/// Outcome of the `a_k = O(1/k)` check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub ok: bool,
    /// `sup_k (k+1)|a_k|` when finite.
    pub bound: Option<f64>,
}

impl CoeffSeq {
    pub fn new(coeffs: Vec<Complex64>, tail: TailRule) -> Result<Self> {
        if coeffs
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(CoeffSeq { coeffs, tail })
    }

    pub fn rule(tail: TailRule) -> Self {
        CoeffSeq {
            coeffs: Vec::new(),
            tail,
        }
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        match self.coeffs.get(k) {
            Some(&a) => a,
            None => Complex64::new(self.tail.coeff(k), 0.0),
        }
    }

    pub fn sup_abs(&self) -> Result<f64> {
        let stored = self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let tail = self
            .tail
            .sup_from(self.coeffs.len())
            .ok_or_else(|| Error::UnboundedCoefficients(format!("{:?}", self.tail)))?;
        Ok(stored.max(tail))
    }

    pub fn hypothesis(&self) -> Hypothesis {
        let stored = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| (k as f64 + 1.0) * a.norm())
            .fold(0.0, f64::max);
        match self.tail.weighted_sup_from(self.coeffs.len()) {
            Some(t) => Hypothesis {
                ok: true,
                bound: Some(stored.max(t)),
            },
            None => Hypothesis {
                ok: false,
                bound: None,
            },
        }
    }

    /// Bound on `∫_T^∞ |f|`, if one is available.
    pub fn transform_tail_bound(&self, t: f64) -> Option<f64> {
        let rule = self.tail.transform_tail_bound(t)?;
        // stored corrections integrate to Σ |a_k − rule(k)| Q(k+1, T)
        let stored: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| (a - self.tail.coeff(k)).norm() * gamma_q(k + 1, t))
            .sum();
        Some(rule + stored)
    }
}

pub const CATALOG: [&str; 5] = [
    "unit0",
    "alternating",
    "alt-harmonic",
    "inv-square",
    "log-slow",
];

/// Named coefficient sequences.
pub fn catalog(name: &str) -> Option<CoeffSeq> {
    let one = Complex64::new(1.0, 0.0);
    Some(match name {
        "unit0" => CoeffSeq {
            coeffs: vec![one],
            tail: TailRule::Zero,
        },
        "alternating" => CoeffSeq::rule(TailRule::AlternatingReciprocal { c: 1.0, p: 0.0 }),
        "alt-harmonic" => CoeffSeq::rule(TailRule::AlternatingReciprocal { c: 1.0, p: 1.0 }),
        "inv-square" => CoeffSeq::rule(TailRule::ReciprocalPower { c: 1.0, p: 2.0 }),
        "log-slow" => CoeffSeq::rule(TailRule::ReciprocalLog { c: 1.0 }),
        _ => return None,
    })
}

/// `f(t)`, summing Poisson weights outwards from the mode so that neither
/// `e^{-t}` nor `t^k/k!` is formed on its own.
pub fn borel_eval(a: &CoeffSeq, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "t must be finite and nonnegative, got {t}"
        )));
    }
    let sup = a.sup_abs()?;
    if sup == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if t == 0.0 {
        return Ok(a.coeff(0));
    }
    let mode = t.floor() as usize;
    let w_mode = poisson_log_weight(mode, t).exp();
    let mut acc = DoubleDoubleComplex::default();
    acc += a.coeff(mode) * w_mode;
    let mut w = w_mode;
    let mut k = mode;
    loop {
        w *= t / (k + 1) as f64;
        k += 1;
        acc += a.coeff(k) * w;
        let r = t / (k + 2) as f64;
        if w * sup * r / (1.0 - r) < SERIES_TOL || w == 0.0 {
            break;
        }
    }
    let mut w = w_mode;
    let mut k = mode;
    while k > 0 {
        w *= k as f64 / t;
        k -= 1;
        acc += a.coeff(k) * w;
        let r = k as f64 / t;
        if w * sup * r / (1.0 - r) < SERIES_TOL || w == 0.0 {
            break;
        }
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorelIntegral {
    pub value: Complex64,
    pub abs_value: f64,
    /// Integration was carried out on `[0, horizon]`.
    pub horizon: f64,
    /// Certified bound on `∫_horizon^∞ |f|`.
    pub tail_bound: f64,
    pub hypothesis: Hypothesis,
}

/// Largest horizon tried before giving up on certifying the tail.
pub const MAX_HORIZON: f64 = 6.7e7;

fn geometric_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut b = vec![lo];
    let mut x = if lo > 0.0 { lo * 1.5 } else { 0.25 };
    while x < hi {
        b.push(x);
        x *= 1.5;
    }
    b.push(hi);
    b
}

/// `∫_0^∞ f` and `∫_0^∞ |f|`, integrating to a horizon where the remaining
/// mass is certified below `cfg.abs_tol`.
pub fn borel_integral(a: &CoeffSeq, cfg: &QuadratureConfig) -> Result<BorelIntegral> {
    cfg.validate()?;
    a.sup_abs()?;
    let mut horizon = 4.0f64.max(a.coeffs.len() as f64);
    let mut bound = a.transform_tail_bound(horizon).ok_or_else(|| {
        Error::InvalidInput(format!(
            "no tail bound for {:?}: its Borel transform is not known to be integrable",
            a.tail
        ))
    })?;
    while bound >= cfg.abs_tol {
        horizon *= 2.0;
        if horizon > MAX_HORIZON {
            return Err(Error::HorizonExceeded {
                horizon: MAX_HORIZON,
                bound,
                target: cfg.abs_tol,
            });
        }
        bound = a.transform_tail_bound(horizon).unwrap_or(f64::INFINITY);
    }
    let breaks = geometric_breaks(0.0, horizon);
    let f = |t: f64| borel_eval(a, t).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let signed = integrate_panels(f, &breaks, cfg, Scale::Magnitude)?;
    let abs = integrate_panels(
        |t| Complex64::new(f(t).norm(), 0.0),
        &breaks,
        cfg,
        Scale::Value,
    )?;
    if !signed.value.re.is_finite() || !abs.value.re.is_finite() {
        return Err(Error::InvalidInput("transform evaluation failed".into()));
    }
    Ok(BorelIntegral {
        value: signed.value,
        abs_value: abs.value.re,
        horizon,
        tail_bound: bound,
        hypothesis: a.hypothesis(),
    })
}

/// `Σ_k a_k / r^{k+1}` for `r > 1`, truncated once
/// `sup|a| r^{-(k+1)} / (r - 1) < 1e-15`.
pub fn abel_mean(a: &CoeffSeq, r: f64) -> Result<Complex64> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("r must exceed 1, got {r}")));
    }
    let sup = a.sup_abs()?;
    let mut acc = DoubleDoubleComplex::default();
    let mut w = 1.0 / r;
    let mut k = 0;
    loop {
        acc += a.coeff(k) * w;
        if sup * w / (r - 1.0) < SERIES_TOL || (a.tail == TailRule::Zero && k + 1 >= a.coeffs.len())
        {
            break;
        }
        w /= r;
        k += 1;
    }
    Ok(acc.value())
}

/// The transform's coefficients for `x`: `a_k = (x_{k+1} − x_0)/(k+1)`, with
/// the tail continued from `x_k = lim x`.
pub fn probe_coefficients(x: &ConvergentSeq) -> CoeffSeq {
    let p = x.prefix();
    let x0 = p[0];
    let coeffs = p[1..]
        .iter()
        .enumerate()
        .map(|(k, v)| (v - x0) / (k + 1) as f64)
        .collect();
    let gap = x.limit() - x0;
    // the tail rule is real; a complex gap only arises for complex data
    CoeffSeq {
        coeffs,
        tail: TailRule::ReciprocalPower { c: gap.re, p: 1.0 },
    }
}

/// Stabilization threshold for the horizon-doubling probe.
pub const STABILIZATION: f64 = 0.01;

/// Tests finiteness of `∫_0^∞ |f|` for the coefficients of `x`, by doubling the
/// horizon from 4 up to the prefix length.
pub fn adell_lekuona_probe(x: &ConvergentSeq, cfg: &QuadratureConfig) -> Result<Verdict> {
    cfg.validate()?;
    let a = probe_coefficients(x);
    if x.limit().im != x.first().im {
        return Err(Error::InvalidInput(
            "the probe needs a real limit gap".into(),
        ));
    }
    let mut diagnostics = vec![Diagnostic {
        condition: "x0_minus_limit_abs".into(),
        value: (x.first() - x.limit()).norm(),
        threshold: EXACT_TOL,
    }];
    let limit = (x.len() as f64).max(8.0);
    let mut horizons = vec![0.0];
    let mut h = 4.0;
    while h <= limit {
        horizons.push(h);
        h *= 2.0;
    }
    let f = |t: f64| Complex64::new(borel_eval(&a, t).map(|z| z.norm()).unwrap_or(f64::NAN), 0.0);
    let mut cumulative = vec![0.0];
    for w in horizons.windows(2) {
        let r = integrate_panels(f, &geometric_breaks(w[0], w[1]), cfg, Scale::Value)?;
        cumulative.push(cumulative.last().unwrap() + r.value.re);
    }
    let m = cumulative.len();
    let last = cumulative[m - 1];
    diagnostics.push(Diagnostic {
        condition: "abs_integral".into(),
        value: last,
        threshold: f64::INFINITY,
    });
    let change = if m >= 3 {
        last - cumulative[m - 2]
    } else {
        last
    };
    let rel = if last > 0.0 { change / last } else { 0.0 };
    diagnostics.push(Diagnostic {
        condition: "last_doubling_change".into(),
        value: rel,
        threshold: STABILIZATION,
    });
    let mut status = Status::Inconclusive;
    if last == 0.0 || (m >= 3 && rel < STABILIZATION) {
        status = Status::Member;
    } else if m >= 5 {
        let inc: Vec<f64> = cumulative[m - 4..]
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        let growing = inc.iter().all(|&d| d > 0.0);
        let ratio = (inc[1] / inc[0]).min(inc[2] / inc[1]);
        diagnostics.push(Diagnostic {
            condition: "growth_ratio".into(),
            value: if growing { ratio } else { f64::NEG_INFINITY },
            threshold: 0.9,
        });
        if growing && ratio >= 0.9 {
            status = Status::NonMember;
        }
    }
    diagnostics.push(Diagnostic {
        condition: "horizon".into(),
        value: *horizons.last().unwrap(),
        threshold: limit,
    });
    Ok(Verdict {
        status,
        diagnostics,
    })
}
