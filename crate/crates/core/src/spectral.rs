//! Spectrum geometry of the Cesàro operator on `c`, the resolvent lower bound
//! along the unit circle, and finite-section values of `‖Tⁿ(I − T)‖`.
//!
//! The spectrum is the closed disc `|z − 1/2| <= 1/2`. It touches the unit
//! circle only at 1, tangentially, which is what makes `‖Tⁿ(I − T)‖` decay
//! like `n^{-1/2}` and no faster.
//!
//! The operator norm on `c` is the largest absolute row sum. Row `k` of
//! `Cⁿ(I − C)` only involves columns `0..=k`, so it is the same in every
//! section of size `N > k`; the maximum over `k < N` is therefore a lower
//! bound for the norm that can only grow with `N`.

use crate::error::{Error, Result};
use crate::report::{fmt_f64, Csv};
use crate::seq::{in_last_five_percent, NormEstimate};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumVerdict {
    pub location: Location,
    pub distance_to_boundary: f64,
}

pub fn spectrum_classify(z: Complex64) -> SpectrumVerdict {
    let d = (z - 0.5).norm() - 0.5;
    if d.abs() <= BOUNDARY_TOL {
        SpectrumVerdict {
            location: Location::Boundary,
            distance_to_boundary: 0.0,
        }
    } else {
        SpectrumVerdict {
            location: if d < 0.0 {
                Location::Interior
            } else {
                Location::Exterior
            },
            distance_to_boundary: d.abs(),
        }
    }
}

/// The spectral point `(1 + e^{2iθ})/2` used for the resolvent bound at `e^{iθ}`.
pub fn nearest_spectral_point(theta: f64) -> Complex64 {
    (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * theta)) * 0.5
}

/// `1 / (1 − cos θ)`, a lower bound for `‖(e^{iθ} − T)^{-1}‖`, evaluated as
/// `1 / (2 sin²(θ/2))` to avoid cancellation at small `θ`.
pub fn resolvent_lower_bound(theta: f64) -> Result<f64> {
    if theta == 0.0 || !theta.is_finite() || theta.abs() > PI {
        return Err(Error::InvalidInput(format!(
            "theta must lie in [-pi, pi] without 0, got {theta}"
        )));
    }
    let s = (0.5 * theta).sin();
    Ok(1.0 / (2.0 * s * s))
}

/// `Σ_j |(Cⁿ(I − C))_{kj}|`, by applying the transpose of `C` to `e_k` `n`
/// times and then the transpose of `I − C` once; each application is a
/// suffix sum over `0..=k`.
pub fn kt_row_abs_sum(k: usize, n: usize) -> f64 {
    let mut v = vec![0.0; k + 1];
    v[k] = 1.0;
    let mut w = vec![0.0; k + 1];
    let transpose = |src: &[f64], dst: &mut [f64]| {
        let mut acc = 0.0;
        for i in (0..src.len()).rev() {
            acc += src[i] / (i + 1) as f64;
            dst[i] = acc;
        }
    };
    for _ in 0..n {
        transpose(&v, &mut w);
        std::mem::swap(&mut v, &mut w);
    }
    transpose(&v, &mut w);
    v.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum()
}

/// Row selection for the finite-section sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Evaluate every row instead of a strided subset.
    pub full_sweep: bool,
    pub stride: usize,
    /// Half-width of the full neighbourhood evaluated around the strided argmax.
    pub refine: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            full_sweep: false,
            stride: 4,
            refine: 8,
        }
    }
}

fn rows_max(rows: &[usize], n: usize) -> (usize, f64) {
    let values: Vec<f64> = rows.par_iter().map(|&k| kt_row_abs_sum(k, n)).collect();
    // serial reduction in row order keeps the result independent of threads
    let mut best = (rows[0], values[0]);
    for (&k, &v) in rows.iter().zip(&values) {
        if v > best.1 || (v == best.1 && k < best.0) {
            best = (k, v);
        }
    }
    best
}

/// Largest absolute row sum of `Cⁿ(I − C)` over rows `k < N_size`.
pub fn finite_section_kt_norm(n: usize, size: usize) -> Result<NormEstimate> {
    finite_section_kt_norm_with(n, size, &SweepOptions::default())
}

pub fn finite_section_kt_norm_with(
    n: usize,
    size: usize,
    opts: &SweepOptions,
) -> Result<NormEstimate> {
    if size < 2 {
        return Err(Error::InvalidInput(format!(
            "section size must be at least 2, got {size}"
        )));
    }
    if !opts.full_sweep && opts.stride == 0 {
        return Err(Error::InvalidInput("stride must be positive".into()));
    }
    let (argmax, value) = if opts.full_sweep || opts.stride == 1 {
        let rows: Vec<usize> = (0..size).collect();
        rows_max(&rows, n)
    } else {
        let mut rows: Vec<usize> = (0..size).step_by(opts.stride).collect();
        if rows.last() != Some(&(size - 1)) {
            rows.push(size - 1);
        }
        let coarse = rows_max(&rows, n);
        let lo = coarse.0.saturating_sub(opts.refine);
        let hi = (coarse.0 + opts.refine).min(size - 1);
        let local: Vec<usize> = (lo..=hi).collect();
        let fine = rows_max(&local, n);
        if fine.1 > coarse.1 || (fine.1 == coarse.1 && fine.0 < coarse.0) {
            fine
        } else {
            coarse
        }
    };
    Ok(NormEstimate {
        value,
        argmax_index: argmax,
        boundary_saturated: in_last_five_percent(argmax, size),
        attained_at_limit: false,
        truncation: size,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KtRow {
    pub n: usize,
    pub size: usize,
    pub value: f64,
    pub sqrt_scaled: f64,
    pub argmax_row: usize,
    pub boundary_flag: bool,
    /// `(log n)^{1/2} / n^{1/2}` for comparison; absent at `n = 0`.
    pub log_rate: Option<f64>,
}

pub fn kt_decay_table(ns: &[usize], size: usize, opts: &SweepOptions) -> Result<Vec<KtRow>> {
    ns.iter()
        .map(|&n| {
            let e = finite_section_kt_norm_with(n, size, opts)?;
            let nf = n as f64;
            Ok(KtRow {
                n,
                size,
                value: e.value,
                sqrt_scaled: nf.sqrt() * e.value,
                argmax_row: e.argmax_index,
                boundary_flag: e.boundary_saturated,
                log_rate: (n > 0).then(|| (nf.ln() / nf).sqrt()),
            })
        })
        .collect()
}

pub fn write_kt_csv(rows: &[KtRow], csv: &mut Csv) {
    csv.header(&[
        "n",
        "N",
        "value",
        "sqrt_scaled",
        "argmax_row",
        "boundary_flag",
        "log_rate",
    ]);
    for r in rows {
        csv.row(&[
            r.n.to_string(),
            r.size.to_string(),
            fmt_f64(r.value),
            fmt_f64(r.sqrt_scaled),
            r.argmax_row.to_string(),
            r.boundary_flag.to_string(),
            r.log_rate.map(fmt_f64).unwrap_or_default(),
        ]);
    }
}
