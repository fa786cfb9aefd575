//! Membership in `Ran(I − T)` and `Ran(I − T)²`, and explicit preimages.
//!
//! `x ∈ Ran(I − T)` exactly when `x_0 = lim x = 0` and `Σ_{k≥1} x_k / k`
//! converges. For the second power one needs in addition that this sum is 0
//! and that `lim_n Σ_{k≤n} log(n/k) x_k / k` exists.
//!
//! Convergence of a series cannot be decided from finitely many terms. The
//! probes here look at the tail of the sequence of partial values over a few
//! windows and report the measured quantities alongside the decision.

use crate::error::{Error, Result};
use crate::numeric::DoubleDoubleComplex;
use crate::seq::{ConvergentSeq, COMPENSATED_THRESHOLD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance for the exact scalar conditions (`x_0 = 0`, `lim x = 0`).
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Member,
    NonMember,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Member => "member",
            Status::NonMember => "non_member",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub condition: String,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub diagnostics: Vec<Diagnostic>,
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        self.status == Status::Member
    }

    pub fn diagnostic(&self, condition: &str) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| d.condition == condition)
    }

    fn push(&mut self, condition: impl Into<String>, value: f64, threshold: f64) {
        self.diagnostics.push(Diagnostic {
            condition: condition.into(),
            value,
            threshold,
        });
    }

    /// Prefixes every diagnostic name with `scope.` and appends them.
    pub fn absorb(&mut self, scope: &str, other: &Verdict) {
        for d in &other.diagnostics {
            self.push(format!("{scope}.{}", d.condition), d.value, d.threshold);
        }
    }
}

/// Combines statuses: any non-member wins, then any inconclusive.
pub fn combine(statuses: &[Status]) -> Status {
    if statuses.contains(&Status::NonMember) {
        Status::NonMember
    } else if statuses.contains(&Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Member
    }
}

/// Thresholds of the convergence probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Convergence is declared when the oscillation over the last window is
    /// below `conv_rel * (1 + max |value|)`.
    pub conv_rel: f64,
    /// Divergence is declared when `|value|` increases over each of the last
    /// three windows and no increment is smaller than `1 - div_tol` times the
    /// one before.
    pub div_tol: f64,
    pub min_terms: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            conv_rel: 1e-6,
            div_tol: 0.1,
            min_terms: 64,
        }
    }
}

/// Dyadic windows `(len/2, len]`, `(len/4, len/2]`, ... as index ranges into a
/// sequence of length `len`, most recent first.
pub fn dyadic_windows(len: usize, count: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(count);
    let mut hi = len;
    for _ in 0..count {
        let lo = hi / 2;
        if lo == hi {
            break;
        }
        out.push((lo, hi));
        hi = lo;
    }
    out
}

/// Convergence probe for a sequence of partial values `v_1, v_2, ...` given
/// explicit windows (half-open index ranges, most recent first, contiguous).
pub fn probe_windows(
    values: &[Complex64],
    windows: &[(usize, usize)],
    cfg: &ProbeConfig,
) -> Verdict {
    let mut v = Verdict {
        status: Status::Inconclusive,
        diagnostics: Vec::new(),
    };
    let max_mag = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol_conv = cfg.conv_rel * (1.0 + max_mag);
    let last = windows[0];
    let (mut re_lo, mut re_hi, mut im_lo, mut im_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for z in &values[last.0..last.1] {
        re_lo = re_lo.min(z.re);
        re_hi = re_hi.max(z.re);
        im_lo = im_lo.min(z.im);
        im_hi = im_hi.max(z.im);
    }
    let oscillation = (re_hi - re_lo).hypot(im_hi - im_lo);
    v.push("oscillation", oscillation, tol_conv);
    if oscillation < tol_conv {
        v.status = Status::Member;
        return v;
    }
    if windows.len() >= 3 {
        // |value| at the end of each window, oldest first
        let mut ends: Vec<f64> = windows[..3]
            .iter()
            .rev()
            .map(|w| values[w.1 - 1].norm())
            .collect();
        ends.insert(0, values[windows[2].0.saturating_sub(1)].norm());
        let inc: Vec<f64> = ends.windows(2).map(|w| w[1] - w[0]).collect();
        let growing = inc.iter().all(|&d| d > 0.0);
        let worst_ratio = inc[1] / inc[0];
        let worst_ratio = worst_ratio.min(inc[2] / inc[1]);
        let ratio = if growing {
            worst_ratio
        } else {
            f64::NEG_INFINITY
        };
        v.push("growth_ratio", ratio, 1.0 - cfg.div_tol);
        if growing && worst_ratio >= 1.0 - cfg.div_tol {
            v.status = Status::NonMember;
        }
    }
    v
}

/// Probe on `v_1..v_M` with dyadic windows in the index.
pub fn probe_sequence(values: &[Complex64], cfg: &ProbeConfig) -> Result<Verdict> {
    if values.len() < cfg.min_terms {
        return Err(Error::InsufficientSamples {
            needed: cfg.min_terms,
            found: values.len(),
        });
    }
    Ok(probe_windows(values, &dyadic_windows(values.len(), 3), cfg))
}

/// Running sums of `terms`, double-double accumulated for long inputs.
pub fn partial_sums(terms: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(terms.len());
    if terms.len() > COMPENSATED_THRESHOLD {
        let mut acc = DoubleDoubleComplex::default();
        for t in terms {
            acc += *t;
            out.push(acc.value());
        }
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            acc += t;
            out.push(acc);
        }
    }
    out
}

/// Heuristic convergence test for `Σ terms`.
pub fn series_probe(terms: &[Complex64]) -> Result<Verdict> {
    series_probe_with(terms, &ProbeConfig::default())
}

pub fn series_probe_with(terms: &[Complex64], cfg: &ProbeConfig) -> Result<Verdict> {
    if terms.len() < cfg.min_terms {
        return Err(Error::InsufficientSamples {
            needed: cfg.min_terms,
            found: terms.len(),
        });
    }
    probe_sequence(&partial_sums(terms), cfg)
}

/// `x_k / k` for `k = 1..N-1`.
fn weighted_terms(x: &ConvergentSeq) -> Vec<Complex64> {
    x.prefix()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v / k as f64)
        .collect()
}

fn exact_conditions(x: &ConvergentSeq, v: &mut Verdict) -> bool {
    let x0 = x.first().norm();
    let lim = x.limit().norm();
    v.push("x0_abs", x0, EXACT_TOL);
    v.push("limit_abs", lim, EXACT_TOL);
    x0 <= EXACT_TOL && lim <= EXACT_TOL
}

/// Membership of `x` in `Ran(I − T)` (`order = 1`) or `Ran(I − T)²` (`order = 2`).
pub fn range_membership(x: &ConvergentSeq, order: u8) -> Result<Verdict> {
    range_membership_with(x, order, &ProbeConfig::default())
}

pub fn range_membership_with(x: &ConvergentSeq, order: u8, cfg: &ProbeConfig) -> Result<Verdict> {
    if order != 1 && order != 2 {
        return Err(Error::InvalidInput(format!(
            "order must be 1 or 2, got {order}"
        )));
    }
    let mut v = Verdict {
        status: Status::Inconclusive,
        diagnostics: Vec::new(),
    };
    let exact_ok = exact_conditions(x, &mut v);
    let terms = weighted_terms(x);
    if terms.len() < cfg.min_terms {
        v.push("terms", terms.len() as f64, cfg.min_terms as f64);
        v.status = if exact_ok {
            Status::Inconclusive
        } else {
            Status::NonMember
        };
        return Ok(v);
    }
    let sums = partial_sums(&terms);
    let series = probe_sequence(&sums, cfg)?;
    v.absorb("series", &series);
    let mut statuses = vec![
        if exact_ok {
            Status::Member
        } else {
            Status::NonMember
        },
        series.status,
    ];
    if order == 2 {
        let last = sums[sums.len() - 1].norm();
        let tol = series
            .diagnostic("oscillation")
            .map_or(0.0, |d| d.threshold);
        let osc = series.diagnostic("oscillation").map_or(0.0, |d| d.value);
        v.push("series_sum_abs", last, tol + osc);
        if series.status == Status::Member {
            statuses.push(if last <= tol + osc {
                Status::Member
            } else {
                Status::NonMember
            });
        }
        // U_n = log n · S_n − Σ_{k≤n} log k · x_k / k
        let mut acc = Complex64::new(0.0, 0.0);
        let weighted: Vec<Complex64> = terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let k = (i + 1) as f64;
                acc += t * k.ln();
                sums[i] * k.ln() - acc
            })
            .collect();
        let log_probe = probe_sequence(&weighted, cfg)?;
        v.absorb("log_weighted", &log_probe);
        statuses.push(log_probe.status);
    }
    v.status = combine(&statuses);
    Ok(v)
}

/// A preimage under `I − T` with what is known about its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preimage {
    pub seq: ConvergentSeq,
    /// Oscillation of the partial sums over the last window when the series
    /// probe found them convergent; the limit is a partial sum and this is
    /// its stated uncertainty.
    pub limit_uncertainty: Option<f64>,
    pub warning: Option<String>,
}

/// `y` with `y_0 = y0` and `y_k = y0 + (1 + 1/k) x_k + Σ_{j=1}^{k-1} x_j / j`.
///
/// The formula is applied whether or not `x` is in the range; a failed or
/// inconclusive membership test is reported in `warning`.
pub fn construct_preimage(x: &ConvergentSeq, y0: Complex64) -> Result<Preimage> {
    let n = x.len();
    let p = x.prefix();
    let mut y = Vec::with_capacity(n);
    y.push(y0);
    let compensated = n > COMPENSATED_THRESHOLD;
    let mut dd = DoubleDoubleComplex::default();
    let mut plain = Complex64::new(0.0, 0.0);
    for (k, &xk) in p.iter().enumerate().skip(1) {
        let before = if compensated { dd.value() } else { plain };
        let kf = k as f64;
        y.push(y0 + xk * (1.0 + 1.0 / kf) + before);
        if compensated {
            dd += xk / kf;
        } else {
            plain += xk / kf;
        }
    }
    let total = if compensated { dd.value() } else { plain };
    let membership = range_membership(x, 1)?;
    let limit_uncertainty = match membership.status {
        Status::Member => membership.diagnostic("series.oscillation").map(|d| d.value),
        _ => None,
    };
    let warning = match membership.status {
        Status::Member => None,
        s => Some(format!(
            "membership in Ran(I - T) is {s}; the limit {} is a bare partial sum",
            "y0 + sum x_j/j"
        )),
    };
    Ok(Preimage {
        seq: ConvergentSeq::new(y, y0 + total)?,
        limit_uncertainty,
        warning,
    })
}
