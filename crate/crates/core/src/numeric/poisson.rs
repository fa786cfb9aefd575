//! Poisson weights and integer-shape incomplete Gamma functions.
//!
//! For integer shape `n` the regularized incomplete Gamma functions are Poisson
//! tail probabilities: `Q(n, x) = P[Poi(x) <= n - 1]` and `P(n, x) =
//! P[Poi(x) >= n]`. Everything is evaluated in log space around the relevant
//! boundary so that neither `e^{-x}` nor `x^k / k!` has to be formed directly.

use std::f64::consts::PI;
use std::sync::OnceLock;

const TABLE_LEN: usize = 256;

fn log_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        let mut acc = super::dd::DoubleDouble::ZERO;
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            acc += (k as f64).ln();
            *slot = acc.value();
        }
        t
    })
}

/// Stirling correction `ln m! - [(m + 1/2) ln m - m + ln(2 pi)/2]`, valid for m >= 256.
fn stirling_correction(m: f64) -> f64 {
    let inv = 1.0 / m;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

pub fn ln_factorial(m: usize) -> f64 {
    if m < TABLE_LEN {
        return log_factorial_table()[m];
    }
    let mf = m as f64;
    (mf + 0.5) * mf.ln() - mf + 0.5 * (2.0 * PI).ln() + stirling_correction(mf)
}

/// `ln( e^{-x} x^m / m! )`, the log of the Poisson(x) mass at `m`.
///
/// For large `m` the dominant terms are combined as `(m - x) + m ln(x/m)` so
/// that nothing of size `x` is cancelled.
pub fn poisson_log_weight(m: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if m < TABLE_LEN {
        return -x + m as f64 * x.ln() - log_factorial_table()[m];
    }
    let mf = m as f64;
    (mf - x) + mf * ((x - mf) / mf).ln_1p() - 0.5 * (2.0 * PI * mf).ln() - stirling_correction(mf)
}

pub fn poisson_weight(m: usize, x: f64) -> f64 {
    poisson_log_weight(m, x).exp()
}

/// Sum of Poisson(x) masses from `start` walking downwards (`step = -1`) or
/// upwards (`step = +1`) until the terms are negligible. Terms decay at least
/// geometrically on the side away from the mode, which is the only way this is
/// called.
fn walk_mass(start: usize, x: f64, upwards: bool) -> f64 {
    let mut w = poisson_weight(start, x);
    let mut total = w;
    let mut k = start;
    loop {
        if upwards {
            w *= x / (k + 1) as f64;
            k += 1;
        } else {
            if k == 0 {
                break;
            }
            w *= k as f64 / x;
            k -= 1;
        }
        total += w;
        if w <= total * 1e-18 || w == 0.0 {
            break;
        }
    }
    total
}

/// Returns `(Q(n, x), P(n, x))` for integer shape `n >= 1` and `x >= 0`, i.e.
/// `(P[Poi(x) <= n-1], P[Poi(x) >= n])`. The smaller of the two is summed
/// directly; the other one is its complement.
pub fn gamma_tails(n: usize, x: f64) -> (f64, f64) {
    assert!(n >= 1, "integer Gamma shape must be positive");
    if x <= 0.0 {
        return (1.0, 0.0);
    }
    if (n as f64) <= x {
        let lower = walk_mass(n - 1, x, false).min(1.0);
        (lower, 1.0 - lower)
    } else {
        let upper = walk_mass(n, x, true).min(1.0);
        (1.0 - upper, upper)
    }
}

/// Regularized upper incomplete Gamma `Q(n, x) = Γ(n, x) / Γ(n)` for integer `n`.
pub fn gamma_q(n: usize, x: f64) -> f64 {
    gamma_tails(n, x).0
}

/// Regularized lower incomplete Gamma `P(n, x)` for integer `n`.
pub fn gamma_p(n: usize, x: f64) -> f64 {
    gamma_tails(n, x).1
}

/// Smallest (to bisection accuracy) `x >= n` with `Q(n, x) < tol`.
pub fn gamma_upper_cutoff(n: usize, tol: f64) -> f64 {
    let nf = n as f64;
    let mut lo = (nf - 1.0).max(0.0);
    let mut hi = nf + 10.0 * nf.sqrt() + 40.0;
    while gamma_q(n, hi) >= tol {
        hi = 2.0 * hi + 10.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gamma_q(n, mid) < tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest `x <= n - 1` with `P(n, x) < tol`, or 0 when there is none.
pub fn gamma_lower_cutoff(n: usize, tol: f64) -> f64 {
    if n <= 1 || gamma_p(n, 0.0) >= tol {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = (n - 1) as f64;
    if gamma_p(n, hi) < tol {
        return hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gamma_p(n, mid) < tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
