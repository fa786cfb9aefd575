//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite panels.
//!
//! Integrands are complex valued; real integrands simply return a zero
//! imaginary part. The panel with the largest error estimate is bisected until
//! the summed estimate meets the target or the panel budget is exhausted.

use super::dd::DoubleDoubleComplex;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and budgets for every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Probability mass that may be discarded when truncating a Gamma or
    /// Poisson weighted integral to a finite interval.
    pub tail_mass_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_panels: 20_000,
            tail_mass_tol: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(self.rel_tol) || !in_unit(self.abs_tol) || !in_unit(self.tail_mass_tol) {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances must lie in (0, 1): {self:?}"
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::InvalidInput("max_panels must be at least 1".into()));
        }
        Ok(())
    }
}

/// What the relative tolerance is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// `|∫ f|`, the usual choice.
    Value,
    /// `∫ |f|`; for integrands whose signed integral is much smaller than the
    /// mass, e.g. oscillating kernels whose result is later rescaled.
    Magnitude,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Kronrod estimate of `∫ |f|`.
    pub magnitude: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    magnitude: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut magnitude = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        magnitude += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel {
        a,
        b,
        value,
        magnitude: magnitude * half.abs(),
        error,
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from one panel per
/// consecutive pair of breakpoints.
pub fn integrate_panels<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
    scale: Scale,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            magnitude: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(&f, w[0], w[1]));
        }
    }
    let budget = cfg.max_panels.max(heap.len());
    let target_for = |value: Complex64, magnitude: f64| {
        let reference = match scale {
            Scale::Value => value.norm(),
            Scale::Magnitude => magnitude,
        };
        cfg.abs_tol.max(cfg.rel_tol * reference)
    };
    let (mut value, mut magnitude, mut error) = totals(&heap);
    loop {
        if error <= target_for(value, magnitude) {
            // running totals drift; confirm against an exact recomputation
            (value, magnitude, error) = totals(&heap);
            if error <= target_for(value, magnitude) {
                return Ok(QuadResult {
                    value,
                    magnitude,
                    error,
                    panels: heap.len(),
                });
            }
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => unreachable!("heap holds at least one panel"),
        };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = mid <= worst.a || mid >= worst.b;
        if heap.len() >= budget || too_narrow {
            let (value, magnitude, error) = totals(&heap);
            return Err(Error::QuadratureFailure {
                panels: heap.len(),
                error,
                target: target_for(value, magnitude),
            });
        }
        heap.pop();
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (Complex64, f64, f64) {
    let (mut value, mut magnitude, mut error) = (DoubleDoubleComplex::default(), 0.0, 0.0);
    for p in heap.iter() {
        value += p.value;
        magnitude += p.magnitude;
        error += p.error;
    }
    (value.value(), magnitude, error)
}

pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    integrate_panels(f, &[a, b], cfg, Scale::Value)
}

pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    integrate(|t| Complex64::new(f(t), 0.0), a, b, cfg).map(|r| r.value.re)
}

/// Evenly spaced breakpoints; a convenience for seeding `integrate_panels`.
pub fn uniform_breaks(a: f64, b: f64, pieces: usize) -> Vec<f64> {
    let pieces = pieces.max(1);
    (0..=pieces)
        .map(|i| {
            if i == pieces {
                b
            } else {
                a + (b - a) * i as f64 / pieces as f64
            }
        })
        .collect()
}
