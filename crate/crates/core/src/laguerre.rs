//! The Laguerre polynomials `L_n^{(1)}` and the weighted integrals
//! `∫_0^∞ e^{-αt} L_n^{(1)}(t) dt` and `∫_0^∞ e^{-αt} |L_n^{(1)}(t)| dt`.
//!
//! Values come from the three-term recurrence in the degree. The explicit
//! alternating sum `Σ_k C(n+1, k+1) (-1)^k t^k / k!` cancels badly once `n`
//! passes about 25 and is only used by the tests, in exact arithmetic.
//!
//! All roots of `L_n^{(1)}` lie in `(0, 4(n+1))`. The absolute integral is
//! split there: on the bounded part the roots are bracketed and every
//! sign-constant piece is integrated separately; beyond `t* = 4(n+1)` the
//! polynomial has sign `(-1)^n` and the tail has the closed form
//!
//! ```text
//! ∫_T^∞ e^{-αt} p(t) dt = e^{-αT} Σ_{m=0}^{n} p^{(m)}(T) / α^{m+1},
//! ```
//!
//! with `p = (-1)^n L_n^{(1)}` and `p^{(m)} = (-1)^{n+m} L_{n-m}^{(1+m)}`. Past
//! the last root every derivative of `p` is positive, so the sum has no
//! cancellation. The incomplete-Gamma expansion of the same tail is available
//! as [`abs_integral_gamma_tail`]; it alternates and is guarded by a
//! cancellation alarm.

use crate::error::{Error, Result};
use crate::numeric::dd::DoubleDouble;
use crate::numeric::poisson::{gamma_q, ln_factorial};
use crate::numeric::quad::{integrate_panels, Scale};
use crate::numeric::QuadratureConfig;
use crate::report::{fmt_f64, Csv};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const RESCALE: f64 = 1e150;

/// Degree-`n` Laguerre polynomial of order 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaguerrePoly {
    pub n: usize,
}

impl LaguerrePoly {
    pub fn eval(&self, t: f64) -> f64 {
        laguerre_eval(self.n, t)
    }

    /// Sign of the polynomial beyond its largest root.
    pub fn tail_sign(&self) -> f64 {
        if self.n % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn roots(&self) -> Vec<f64> {
        laguerre_roots(self.n)
    }
}

/// `L_n^{(a)}(t) = mantissa · e^{log_scale}`, from
/// `(k+1) L_{k+1} = (2k + 1 + a - t) L_k - (k + a) L_{k-1}` with periodic
/// rescaling so large degrees do not overflow.
pub(crate) fn laguerre_scaled(n: usize, a: f64, t: f64) -> (f64, f64) {
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = 1.0 + a - t;
    let mut log_scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - t) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (cur, log_scale)
}

/// `L_n^{(1)}(t)`.
pub fn laguerre_eval(n: usize, t: f64) -> f64 {
    let (m, s) = laguerre_scaled(n, 1.0, t);
    m * s.exp()
}

/// `e^{-αt} L_n^{(1)}(t)` without forming the two factors separately.
pub(crate) fn weighted_laguerre(n: usize, alpha: f64, t: f64) -> f64 {
    let (m, s) = laguerre_scaled(n, 1.0, t);
    m * (s - alpha * t).exp()
}

fn check_alpha(alpha: f64, upper: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, {upper}), got {alpha}"
        )));
    }
    Ok(())
}

/// `∫_0^∞ e^{-αt} (-1)^n L_n^{(1)}(t) dt = ((1-α)/α)^{n+1} + (-1)^n`.
pub fn signed_integral(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 1.0)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(((1.0 - alpha) / alpha).powi(n as i32 + 1) + sign)
}

/// Upper end of the interval known to contain every root.
pub fn root_bound(n: usize) -> f64 {
    4.0 * (n as f64 + 1.0)
}

/// All `n` roots in increasing order.
///
/// A uniform sign scan of `[0, 4(n+1)]` on `8(n+1)` points is refined by
/// doubling the density until `n` sign changes are seen (the smallest roots
/// are of order `1/n` apart), then each bracket is bisected to full precision.
pub fn laguerre_roots(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let hi = root_bound(n);
    let sign = |t: f64| laguerre_scaled(n, 1.0, t).0.signum();
    let mut points = 8 * (n + 1);
    let brackets = loop {
        let step = hi / points as f64;
        let mut found = Vec::with_capacity(n);
        let mut a = 0.0;
        let mut sa = sign(a);
        for i in 1..=points {
            let b = if i == points { hi } else { i as f64 * step };
            let sb = sign(b);
            if sb == 0.0 {
                // landed on a root; nudge so the bracket stays proper
                found.push((b, b));
                a = b;
                sa = -sa;
                continue;
            }
            if sb != sa {
                found.push((a, b));
            }
            a = b;
            sa = sb;
        }
        if found.len() >= n || points > (1 << 26) {
            break found;
        }
        points *= 2;
    };
    brackets
        .into_iter()
        .map(|(mut a, mut b)| {
            if a == b {
                return a;
            }
            let sa = sign(a);
            loop {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break 0.5 * (a + b);
                }
                let sm = sign(mid);
                if sm == 0.0 {
                    break mid;
                }
                if sm == sa {
                    a = mid;
                } else {
                    b = mid;
                }
            }
        })
        .collect()
}

/// `∫_T^∞ e^{-αt} |L_n^{(1)}(t)| dt` for `T >= 4(n+1)` by the derivative
/// series (all terms positive).
pub fn abs_tail(n: usize, alpha: f64, t_star: f64) -> Result<f64> {
    check_alpha(alpha, 1.0)?;
    if t_star < root_bound(n) {
        return Err(Error::InvalidInput(format!(
            "tail start {t_star} lies below the root bound {}",
            root_bound(n)
        )));
    }
    let mut acc = DoubleDouble::ZERO;
    for m in 0..=n {
        let (mant, scale) = laguerre_scaled(n - m, 1.0 + m as f64, t_star);
        let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
        let log_mag = scale - alpha * t_star - (m as f64 + 1.0) * alpha.ln();
        acc += sign * mant * log_mag.exp();
    }
    Ok(acc.value())
}

/// The same tail as [`abs_tail`] through the incomplete-Gamma expansion
/// `Σ_k C(n+1, k+1) (-1)^{n+k} Q(k+1, αT) / α^{k+1}`, accumulated in
/// double-double. The terms alternate; if the rounding error carried in by the
/// terms exceeds `rel_tol` relative to the sum a cancellation alarm is raised.
pub fn abs_integral_gamma_tail(n: usize, alpha: f64, t_star: f64, rel_tol: f64) -> Result<f64> {
    check_alpha(alpha, 1.0)?;
    let x = alpha * t_star;
    let mut acc = DoubleDouble::ZERO;
    let mut mass = 0.0;
    for k in 0..=n {
        let ln_binom = ln_factorial(n + 1) - ln_factorial(k + 1) - ln_factorial(n - k);
        let q = gamma_q(k + 1, x);
        if q == 0.0 {
            continue;
        }
        let term = (ln_binom + q.ln() - (k as f64 + 1.0) * alpha.ln()).exp();
        let sign = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * term;
        mass += term;
    }
    let value = acc.value();
    // each term carries a few ulps from the binomial and Q evaluations
    let estimate = 8.0 * f64::EPSILON * mass;
    if estimate > rel_tol * value.abs() {
        return Err(Error::CancellationAlarm {
            estimate: estimate / value.abs(),
            tolerance: rel_tol,
        });
    }
    Ok(value)
}

/// `∫_0^∞ e^{-αt} |L_n^{(1)}(t)| dt`.
pub fn abs_integral(n: usize, alpha: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_alpha(alpha, 1.0)?;
    cfg.validate()?;
    if n == 0 {
        return Ok(1.0 / alpha);
    }
    let t_star = root_bound(n);
    let mut breaks = vec![0.0];
    breaks.extend(laguerre_roots(n));
    breaks.push(t_star);
    let mut acc = DoubleDouble::ZERO;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let f = |t: f64| Complex64::new(weighted_laguerre(n, alpha, t), 0.0);
        // a few interior breaks keep GK15 well inside its resolution
        let pieces = (((w[1] - w[0]) / 4.0).ceil() as usize).clamp(1, 64);
        let inner = crate::numeric::quad::uniform_breaks(w[0], w[1], pieces);
        let r = integrate_panels(f, &inner, cfg, Scale::Value)?;
        acc += r.value.re.abs();
    }
    acc += abs_tail(n, alpha, t_star)?;
    Ok(acc.value())
}

/// `abs_integral(n, α) / ((1-α)/α)^{n+1}`, which tends to 1 for `α < 1/2`.
pub fn asymptotic_ratio(n: usize, alpha: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_alpha(alpha, 0.5)?;
    let a = abs_integral(n, alpha, cfg)?;
    let log_scale = (n as f64 + 1.0) * ((1.0 - alpha) / alpha).ln();
    Ok((a.ln() - log_scale).exp())
}

/// One line of the Laguerre integral table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreRow {
    pub n: usize,
    pub alpha: f64,
    pub abs_integral: f64,
    pub signed_closed_form: f64,
    pub ratio: f64,
}

pub fn laguerre_table(
    ns: &[usize],
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<LaguerreRow>> {
    check_alpha(alpha, 0.5)?;
    ns.iter()
        .map(|&n| {
            let abs = abs_integral(n, alpha, cfg)?;
            Ok(LaguerreRow {
                n,
                alpha,
                abs_integral: abs,
                signed_closed_form: signed_integral(n, alpha)?,
                ratio: asymptotic_ratio(n, alpha, cfg)?,
            })
        })
        .collect()
}

pub fn write_table_csv(rows: &[LaguerreRow], csv: &mut Csv) {
    csv.header(&["n", "alpha", "abs_integral", "signed_closed_form", "ratio"]);
    for r in rows {
        csv.row(&[
            r.n.to_string(),
            fmt_f64(r.alpha),
            fmt_f64(r.abs_integral),
            fmt_f64(r.signed_closed_form),
            fmt_f64(r.ratio),
        ]);
    }
}
