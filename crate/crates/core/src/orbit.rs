//! Orbits `n ↦ Tⁿx`: their distance to `Px`, two integral representations of
//! individual entries, and log-log rate fitting.
//!
//! Direct iteration is the reference path: each step is an `O(N)` running
//! mean and exact for the stored prefix. The integral paths exist to
//! cross-check it:
//!
//! * the moment form `π_k(Tⁿx) = Γ(n)^{-1} ∫_0^∞ e^{-t} t^{n-1} G_x^{(k)}(e^{-t}) dt`,
//! * the shifted operator `T_α = (1-α)^{-1}(T - αI)` whose entries are a
//!   Laguerre-weighted integral of the same Bernstein polynomial.

use crate::error::{Error, Result};
use crate::laguerre::{abs_integral, abs_tail, laguerre_roots, root_bound, weighted_laguerre};
use crate::numeric::poisson::{gamma_lower_cutoff, gamma_upper_cutoff, poisson_log_weight};
use crate::numeric::quad::{integrate_panels, uniform_breaks, Scale};
use crate::numeric::QuadratureConfig;
use crate::report::{fmt_f64, Csv};
use crate::seq::{cesaro_apply_with, project_p, sup_distance, ConvergentSeq, Summation};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub n: usize,
    pub value: f64,
    pub boundary_saturated: bool,
}

/// Sampled orbit distances `‖Tⁿx − Px‖_∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormHistory {
    pub samples: Vec<NormSample>,
    pub truncation: usize,
}

impl NormHistory {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn write_csv(&self, csv: &mut Csv) {
        csv.header(&["n", "value", "sqrt_n_scaled", "boundary_flag"]);
        for s in &self.samples {
            csv.row(&[
                s.n.to_string(),
                fmt_f64(s.value),
                fmt_f64((s.n as f64).sqrt() * s.value),
                s.boundary_saturated.to_string(),
            ]);
        }
    }
}

/// `{1, 2, 4, ..., n_max}`; `n_max` is appended when it is not a power of two.
pub fn dyadic_schedule(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 1;
    while n <= n_max {
        out.push(n);
        n *= 2;
    }
    if n_max > 0 && out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// `[n_max / 8, n_max]`.
pub fn default_window(n_max: usize) -> (usize, usize) {
    ((n_max / 8).max(1), n_max)
}

pub(crate) fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "schedule must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn orbit_norms(x: &ConvergentSeq, schedule: &[usize]) -> Result<NormHistory> {
    orbit_norms_with(x, schedule, Summation::Auto)
}

/// Iterates `T` once per step, recording `sup_distance(Tⁿx, Px)` at each
/// scheduled `n`.
pub fn orbit_norms_with(
    x: &ConvergentSeq,
    schedule: &[usize],
    summation: Summation,
) -> Result<NormHistory> {
    check_schedule(schedule)?;
    let px = project_p(x);
    let mut current = x.clone();
    let mut done = 0;
    let mut samples = Vec::with_capacity(schedule.len());
    for &n in schedule {
        while done < n {
            current = cesaro_apply_with(&current, summation);
            done += 1;
        }
        let d = sup_distance(&current, &px)?;
        samples.push(NormSample {
            n,
            value: d.value,
            boundary_saturated: d.boundary_saturated,
        });
    }
    Ok(NormHistory {
        samples,
        truncation: x.len(),
    })
}

/// `G_x^{(k)}(s) = Σ_j C(k, j) x_j s^j (1-s)^{k-j}` by repeated convex
/// averaging; `O(k²)` but free of binomial coefficients.
pub fn bernstein(x: &[Complex64], k: usize, s: f64) -> Complex64 {
    let mut b: Vec<Complex64> = x[..=k].to_vec();
    let r = 1.0 - s;
    for level in (1..=k).rev() {
        for j in 0..level {
            b[j] = b[j] * r + b[j + 1] * s;
        }
    }
    b[0]
}

fn check_index(x: &ConvergentSeq, k: usize) -> Result<()> {
    if k >= x.len() {
        return Err(Error::OutOfRange {
            index: k,
            len: x.len(),
        });
    }
    Ok(())
}

/// `π_k(Tⁿx)` from the Gamma-weighted moment integral. `n = 0` returns `x_k`.
///
/// The integral over `t ∈ [0, ∞)` is truncated to the interval outside of
/// which the Gamma(n) density has mass below `cfg.tail_mass_tol`.
pub fn moment_entry(
    x: &ConvergentSeq,
    k: usize,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_index(x, k)?;
    cfg.validate()?;
    if n == 0 || k == 0 {
        return Ok(x.prefix()[k]);
    }
    let tol = 0.5 * cfg.tail_mass_tol;
    let lo = gamma_lower_cutoff(n, tol);
    let hi = gamma_upper_cutoff(n, tol);
    let mode = (n - 1) as f64;
    let width = (n as f64).sqrt();
    let mut breaks = vec![lo];
    for j in -6i32..=12 {
        let b = mode + j as f64 * width;
        if b > lo && b < hi {
            breaks.push(b);
        }
    }
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let prefix = x.prefix();
    let f = |t: f64| {
        let w = poisson_log_weight(n - 1, t).exp();
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        bernstein(prefix, k, (-t).exp()) * w
    };
    Ok(integrate_panels(f, &breaks, cfg, Scale::Magnitude)?.value)
}

fn check_alpha(alpha: f64, upper: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, {upper}), got {alpha}"
        )));
    }
    Ok(())
}

/// `π_k(T_αⁿ x)` from the Laguerre representation
/// `((-α)/(1-α))ⁿ (x_k − ∫_0^∞ e^{-αt} L_{n-1}^{(1)}(t) G_x^{(k)}(e^{-αt}) dt)`.
///
/// The integral is cut at the first `T >= 4n` where the positive tail bound
/// `cⁿ sup|x| ∫_T^∞ e^{-αt}|L_{n-1}^{(1)}|` falls below `cfg.tail_mass_tol`.
pub fn talpha_entry(
    x: &ConvergentSeq,
    k: usize,
    n: usize,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_index(x, k)?;
    check_alpha(alpha, 1.0)?;
    cfg.validate()?;
    if n == 0 {
        return Ok(x.prefix()[k]);
    }
    let m = n - 1;
    let prefix = x.prefix();
    let sup = prefix[..=k].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let log_c = (alpha / (1.0 - alpha)).ln();
    let t_star = root_bound(m);
    let mut t_end = t_star.max(4.0 * n as f64);
    if sup > 0.0 {
        while (n as f64 * log_c).exp() * sup * abs_tail(m, alpha, t_end)? >= cfg.tail_mass_tol {
            t_end *= 1.5;
        }
    }
    let mut breaks = vec![0.0];
    breaks.extend(laguerre_roots(m));
    breaks.extend(uniform_breaks(
        t_star,
        t_end,
        (((t_end - t_star) / 8.0).ceil() as usize).max(1),
    ));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let f = |t: f64| {
        let w = weighted_laguerre(m, alpha, t);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        bernstein(prefix, k, (-alpha * t).exp()) * w
    };
    let integral = integrate_panels(f, &breaks, cfg, Scale::Magnitude)?.value;
    let factor = (-alpha / (1.0 - alpha)).powi(n as i32);
    Ok((prefix[k] - integral) * factor)
}

/// `(α/(1-α))ⁿ (1 + ∫_0^∞ e^{-αt} |L_{n-1}^{(1)}(t)| dt)`, an upper bound for
/// `‖T_αⁿ‖` on `c`.
pub fn talpha_norm_bound(alpha: f64, n: usize, cfg: &QuadratureConfig) -> Result<f64> {
    check_alpha(alpha, 0.5)?;
    if n == 0 {
        return Ok(1.0);
    }
    let a = abs_integral(n - 1, alpha, cfg)?;
    let c = alpha / (1.0 - alpha);
    Ok(c.powi(n as i32) + (n as f64 * c.ln() + a.ln()).exp())
}

/// Least-squares line through `(ln n, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (usize, usize),
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub used: usize,
    /// Samples in the window with a zero value, left out of the fit.
    pub excluded_nonpositive: usize,
}

pub fn fit_rate(history: &NormHistory, window: (usize, usize)) -> Result<RateFit> {
    let (lo, hi) = window;
    if lo >= hi {
        return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
    }
    let in_window: Vec<&NormSample> = history
        .samples
        .iter()
        .filter(|s| s.n >= lo && s.n <= hi && s.n > 0)
        .collect();
    let points: Vec<(f64, f64)> = in_window
        .iter()
        .filter(|s| s.value > 0.0)
        .map(|s| ((s.n as f64).ln(), s.value.ln()))
        .collect();
    let excluded = in_window.len() - points.len();
    if points.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            found: points.len(),
        });
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        window,
        residual: (rss / m).sqrt(),
        used: points.len(),
        excluded_nonpositive: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::cesaro_power;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn history(ns: &[usize], f: impl Fn(f64) -> f64) -> NormHistory {
        NormHistory {
            samples: ns
                .iter()
                .map(|&n| NormSample {
                    n,
                    value: f(n as f64),
                    boundary_saturated: false,
                })
                .collect(),
            truncation: 1,
        }
    }

    #[test]
    fn schedules() {
        assert_eq!(dyadic_schedule(16), vec![1, 2, 4, 8, 16]);
        assert_eq!(dyadic_schedule(20), vec![1, 2, 4, 8, 16, 20]);
        assert_eq!(default_window(1024), (128, 1024));
    }

    #[test]
    fn fixed_point_orbit_is_zero() {
        let h = orbit_norms(&ConvergentSeq::ones(50).unwrap(), &[1, 2, 4, 100]).unwrap();
        assert!(h.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn limit_gap_bounds_orbit_below() {
        let x = ConvergentSeq::from_fn(64, c(2.0), |k| c(if k == 0 { 0.5 } else { 2.0 })).unwrap();
        let h = orbit_norms(&x, &dyadic_schedule(256)).unwrap();
        assert!(h.values().iter().all(|&v| v >= 1.5));
        assert!(orbit_norms(&x, &[2, 2]).is_err());
    }

    #[test]
    fn moment_trivial_cases() {
        let cfg = QuadratureConfig::default();
        let x = ConvergentSeq::from_real(&[0.7, -1.0, 3.0, 2.0], 0.0).unwrap();
        for n in [1, 3, 10] {
            assert_eq!(moment_entry(&x, 0, n, &cfg).unwrap(), c(0.7));
        }
        let ones = ConvergentSeq::ones(10).unwrap();
        for (k, n) in [(3, 1), (9, 7), (5, 30)] {
            assert!((moment_entry(&ones, k, n, &cfg).unwrap() - 1.0).norm() < 1e-11);
        }
        assert!(moment_entry(&x, 4, 2, &cfg).is_err());
    }

    #[test]
    fn moment_matches_iteration_on_a_small_case() {
        let cfg = QuadratureConfig::default();
        let x = ConvergentSeq::from_real(&[1.0, -2.0, 0.5, 3.0, 0.0, 1.5], 0.0).unwrap();
        for n in 1..=6 {
            let direct = cesaro_power(&x, n);
            for k in 0..6 {
                let m = moment_entry(&x, k, n, &cfg).unwrap();
                assert!((m - direct.prefix()[k]).norm() < 1e-10, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn talpha_first_power_is_the_direct_formula() {
        let cfg = QuadratureConfig::default();
        let x = ConvergentSeq::from_real(&[1.0, -2.0, 0.5, 3.0, 0.0, 1.5], 0.0).unwrap();
        let tx = cesaro_power(&x, 1);
        for alpha in [0.1, 0.25, 0.4] {
            for k in 0..6 {
                let want = (tx.prefix()[k] - x.prefix()[k] * alpha) / (1.0 - alpha);
                let got = talpha_entry(&x, k, 1, alpha, &cfg).unwrap();
                assert!((got - want).norm() < 1e-9, "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn talpha_fixes_constants() {
        let cfg = QuadratureConfig::default();
        let ones = ConvergentSeq::ones(8).unwrap();
        for n in [1, 4, 9] {
            let v = talpha_entry(&ones, 7, n, 0.25, &cfg).unwrap();
            assert!((v - 1.0).norm() < 1e-9, "n={n}: {v}");
        }
    }

    #[test]
    fn talpha_bound_low_powers() {
        let cfg = QuadratureConfig::default();
        let a = 0.25;
        let b1 = talpha_norm_bound(a, 1, &cfg).unwrap();
        assert!((b1 - (1.0 + a) / (1.0 - a)).abs() < 1e-14);
        assert!(talpha_norm_bound(0.5, 1, &cfg).is_err());
    }

    #[test]
    fn rate_fit_examples() {
        let ns = [64, 128, 256, 512, 1024];
        let f = fit_rate(&history(&ns, |n| 3.0 / n.sqrt()), (64, 1024)).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-9 && f.residual < 1e-12);
        assert!((f.intercept - 3.0f64.ln()).abs() < 1e-9);
        let f = fit_rate(&history(&ns, |_| 2.0), (64, 1024)).unwrap();
        assert!(f.slope.abs() < 1e-12);
        let f = fit_rate(&history(&ns, |n| 1.0 / n), (64, 1024)).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-9);
    }

    #[test]
    fn rate_fit_errors() {
        let ns = [64, 128, 256];
        let h = history(&ns, |n| if n > 100.0 { 0.0 } else { 1.0 });
        assert_eq!(
            fit_rate(&h, (64, 256)),
            Err(Error::InsufficientSamples {
                needed: 3,
                found: 1
            })
        );
        let mut h = history(&[64, 128, 256, 512], |n| 1.0 / n);
        h.samples[1].value = 0.0;
        let f = fit_rate(&h, (64, 512)).unwrap();
        assert_eq!((f.used, f.excluded_nonpositive), (3, 1));
        assert!(fit_rate(&h, (512, 64)).is_err());
    }
}
