//! The space `c` of convergent sequences, the Cesàro operator on it, the
//! limit projection `P`, coordinate functionals, and the dual operator `S`
//! acting on finitely supported functionals.
//!
//! A sequence is stored as a finite prefix `x_0..x_{N-1}` together with its
//! limit. The Cesàro matrix is lower triangular, so the first `N` entries of
//! `Tx` depend only on the first `N` entries of `x`: every prefix computed
//! here is exact for *any* continuation of the input. The limit is carried
//! separately and is fixed by `T`.
//!
//! Functionals are restricted to `a_inf * π_∞ + Σ_k a_k π_k` with finitely
//! many nonzero `a_k`; the dual operator preserves finite support, so dual
//! orbits are computed without truncation.

use crate::error::{Error, Result};
use crate::numeric::DoubleDoubleComplex;
use crate::scalar::{is_finite, JsonScalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Prefix length above which [`Summation::Auto`] switches to double-double
/// running sums.
pub const COMPENSATED_THRESHOLD: usize = 1_000_000;

/// Accumulation strategy for running sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Summation {
    Naive,
    Compensated,
    #[default]
    Auto,
}

impl Summation {
    fn compensated_for(self, len: usize) -> bool {
        match self {
            Summation::Naive => false,
            Summation::Compensated => true,
            Summation::Auto => len > COMPENSATED_THRESHOLD,
        }
    }
}

/// A convergent sequence: its first `N` entries and its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqJson", into = "SeqJson")]
pub struct ConvergentSeq {
    prefix: Vec<Complex64>,
    limit: Complex64,
}

#[derive(Serialize, Deserialize)]
struct SeqJson {
    prefix: Vec<JsonScalar>,
    limit: JsonScalar,
}

impl TryFrom<SeqJson> for ConvergentSeq {
    type Error = Error;
    fn try_from(j: SeqJson) -> Result<Self> {
        ConvergentSeq::new(
            j.prefix.into_iter().map(Into::into).collect(),
            j.limit.into(),
        )
    }
}

impl From<ConvergentSeq> for SeqJson {
    fn from(x: ConvergentSeq) -> Self {
        SeqJson {
            prefix: x.prefix.into_iter().map(Into::into).collect(),
            limit: x.limit.into(),
        }
    }
}

impl ConvergentSeq {
    pub fn new(prefix: Vec<Complex64>, limit: Complex64) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidInput(
                "sequence prefix must be nonempty".into(),
            ));
        }
        if !prefix.iter().copied().all(is_finite) || !is_finite(limit) {
            return Err(Error::InvalidInput(
                "sequence entries must be finite".into(),
            ));
        }
        Ok(ConvergentSeq { prefix, limit })
    }

    pub fn from_real(prefix: &[f64], limit: f64) -> Result<Self> {
        Self::new(
            prefix.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Complex64::new(limit, 0.0),
        )
    }

    /// The sequence `k -> f(k)` on `0..len` with the given limit.
    pub fn from_fn(len: usize, limit: Complex64, f: impl Fn(usize) -> Complex64) -> Result<Self> {
        Self::new((0..len).map(f).collect(), limit)
    }

    pub fn constant(value: Complex64, len: usize) -> Result<Self> {
        Self::new(vec![value; len], value)
    }

    /// `e_∞ = (1, 1, 1, ...)`.
    pub fn ones(len: usize) -> Result<Self> {
        Self::constant(Complex64::new(1.0, 0.0), len)
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::constant(Complex64::new(0.0, 0.0), len)
    }

    /// The unit sequence `e_k` (limit 0).
    pub fn unit(k: usize, len: usize) -> Result<Self> {
        if k >= len {
            return Err(Error::OutOfRange { index: k, len });
        }
        let mut prefix = vec![Complex64::new(0.0, 0.0); len];
        prefix[k] = Complex64::new(1.0, 0.0);
        Self::new(prefix, Complex64::new(0.0, 0.0))
    }

    pub fn prefix(&self) -> &[Complex64] {
        &self.prefix
    }

    pub fn limit(&self) -> Complex64 {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> Complex64 {
        self.prefix[0]
    }

    /// Same prefix with more entries appended (the limit is kept).
    pub fn extended(&self, tail: &[Complex64]) -> Result<Self> {
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(tail);
        Self::new(prefix, self.limit)
    }

    pub fn truncated(&self, len: usize) -> Result<Self> {
        Self::new(self.prefix[..len.min(self.len())].to_vec(), self.limit)
    }

    pub fn sub(&self, other: &ConvergentSeq) -> Result<ConvergentSeq> {
        check_lengths(self.len(), other.len())?;
        Ok(ConvergentSeq {
            prefix: self
                .prefix
                .iter()
                .zip(&other.prefix)
                .map(|(a, b)| a - b)
                .collect(),
            limit: self.limit - other.limit,
        })
    }

    pub fn scale(&self, c: Complex64) -> ConvergentSeq {
        ConvergentSeq {
            prefix: self.prefix.iter().map(|v| v * c).collect(),
            limit: self.limit * c,
        }
    }

    /// `sup_distance(self, 0)`.
    pub fn sup_norm(&self) -> NormEstimate {
        let n = self.len();
        let (argmax, pmax) = argmax_abs(self.prefix.iter().copied());
        finish_estimate(pmax, argmax, self.limit.norm(), n)
    }
}

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}

/// A coordinate functional `π_k` or the limit functional `π_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Index(usize),
    Limit,
}

/// A supremum-norm value over a truncated index set, with where it was
/// attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Index of the largest prefix term.
    pub argmax_index: usize,
    /// The argmax lies in the last 5% of the prefix, so a longer prefix may
    /// well give a larger value.
    pub boundary_saturated: bool,
    /// The limit term strictly exceeded every prefix term.
    pub attained_at_limit: bool,
    pub truncation: usize,
}

pub(crate) fn in_last_five_percent(index: usize, len: usize) -> bool {
    let window = (len / 20).max(1);
    index + window >= len
}

fn argmax_abs(values: impl Iterator<Item = Complex64>) -> (usize, f64) {
    let mut best = (0usize, 0.0f64);
    for (k, v) in values.enumerate() {
        let m = v.norm();
        if m > best.1 {
            best = (k, m);
        }
    }
    best
}

fn finish_estimate(prefix_max: f64, argmax: usize, limit_term: f64, n: usize) -> NormEstimate {
    let attained_at_limit = limit_term > prefix_max;
    NormEstimate {
        value: prefix_max.max(limit_term),
        argmax_index: argmax,
        boundary_saturated: !attained_at_limit
            && prefix_max > 0.0
            && in_last_five_percent(argmax, n),
        attained_at_limit,
        truncation: n,
    }
}

/// `Tx`, entry `k` being the mean of `x_0..x_k`.
pub fn cesaro_apply(x: &ConvergentSeq) -> ConvergentSeq {
    cesaro_apply_with(x, Summation::Auto)
}

pub fn cesaro_apply_with(x: &ConvergentSeq, summation: Summation) -> ConvergentSeq {
    let mut out = Vec::with_capacity(x.len());
    if summation.compensated_for(x.len()) {
        let mut acc = DoubleDoubleComplex::default();
        for (k, v) in x.prefix.iter().enumerate() {
            acc += *v;
            out.push(acc.div_f64((k + 1) as f64));
        }
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in x.prefix.iter().enumerate() {
            acc += v;
            out.push(acc / (k + 1) as f64);
        }
    }
    ConvergentSeq {
        prefix: out,
        limit: x.limit,
    }
}

/// `T^n x` by repeated application.
pub fn cesaro_power(x: &ConvergentSeq, n: usize) -> ConvergentSeq {
    (0..n).fold(x.clone(), |acc, _| cesaro_apply(&acc))
}

/// `(I - T)x`.
pub fn identity_minus_cesaro(x: &ConvergentSeq) -> ConvergentSeq {
    let tx = cesaro_apply(x);
    ConvergentSeq {
        prefix: x
            .prefix
            .iter()
            .zip(&tx.prefix)
            .map(|(a, b)| a - b)
            .collect(),
        limit: x.limit - tx.limit,
    }
}

/// `Px = x_0 e_∞`.
pub fn project_p(x: &ConvergentSeq) -> ConvergentSeq {
    ConvergentSeq {
        prefix: vec![x.first(); x.len()],
        limit: x.first(),
    }
}

pub fn functional_eval(x: &ConvergentSeq, at: Coordinate) -> Result<Complex64> {
    match at {
        Coordinate::Limit => Ok(x.limit),
        Coordinate::Index(k) => x.prefix.get(k).copied().ok_or(Error::OutOfRange {
            index: k,
            len: x.len(),
        }),
    }
}

/// Truncated `‖x - y‖_∞`: the prefix maximum combined with the distance of the
/// limits, which bounds the tail supremum from below.
pub fn sup_distance(x: &ConvergentSeq, y: &ConvergentSeq) -> Result<NormEstimate> {
    check_lengths(x.len(), y.len())?;
    let (argmax, pmax) = argmax_abs(x.prefix.iter().zip(&y.prefix).map(|(a, b)| a - b));
    Ok(finish_estimate(
        pmax,
        argmax,
        (x.limit - y.limit).norm(),
        x.len(),
    ))
}

/// A finitely supported element of `c*`: `a_inf π_∞ + Σ_k coeffs[k] π_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DualJson", into = "DualJson")]
pub struct DualFunctional {
    pub a_inf: Complex64,
    pub coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct DualJson {
    a_inf: JsonScalar,
    coeffs: Vec<JsonScalar>,
}

impl TryFrom<DualJson> for DualFunctional {
    type Error = Error;
    fn try_from(j: DualJson) -> Result<Self> {
        DualFunctional::new(
            j.a_inf.into(),
            j.coeffs.into_iter().map(Into::into).collect(),
        )
    }
}

impl From<DualFunctional> for DualJson {
    fn from(d: DualFunctional) -> Self {
        DualJson {
            a_inf: d.a_inf.into(),
            coeffs: d.coeffs.into_iter().map(Into::into).collect(),
        }
    }
}

impl DualFunctional {
    pub fn new(a_inf: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !is_finite(a_inf) || !coeffs.iter().copied().all(is_finite) {
            return Err(Error::InvalidInput(
                "functional weights must be finite".into(),
            ));
        }
        Ok(DualFunctional { a_inf, coeffs })
    }

    /// `π_k`.
    pub fn coordinate(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        DualFunctional {
            a_inf: Complex64::new(0.0, 0.0),
            coeffs,
        }
    }

    /// `π_∞`.
    pub fn limit() -> Self {
        DualFunctional {
            a_inf: Complex64::new(1.0, 0.0),
            coeffs: Vec::new(),
        }
    }

    /// `|a_inf| + Σ |a_k|`, which equals the norm in `c*`.
    pub fn representation_norm(&self) -> f64 {
        self.a_inf.norm() + self.coeffs.iter().map(|a| a.norm()).sum::<f64>()
    }

    /// `ℓ¹` distance of the representations.
    pub fn distance(&self, other: &DualFunctional) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeff_part: f64 = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or(zero);
                let b = other.coeffs.get(k).copied().unwrap_or(zero);
                (a - b).norm()
            })
            .sum();
        (self.a_inf - other.a_inf).norm() + coeff_part
    }

    /// `φ(x)`; the coefficient support must fit inside the prefix.
    pub fn act(&self, x: &ConvergentSeq) -> Result<Complex64> {
        let support = self
            .coeffs
            .iter()
            .rposition(|a| *a != Complex64::new(0.0, 0.0))
            .map_or(0, |k| k + 1);
        if support > x.len() {
            return Err(Error::OutOfRange {
                index: support - 1,
                len: x.len(),
            });
        }
        let coords: Complex64 = self.coeffs[..support]
            .iter()
            .zip(&x.prefix)
            .map(|(a, v)| a * v)
            .sum();
        Ok(self.a_inf * x.limit + coords)
    }
}

/// `Sφ = φ ∘ T`: coefficients `b_j = Σ_{k >= j} a_k / (k + 1)`, the limit weight
/// is unchanged.
pub fn dual_apply(phi: &DualFunctional) -> DualFunctional {
    let n = phi.coeffs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n > COMPENSATED_THRESHOLD {
        let mut acc = DoubleDoubleComplex::default();
        for k in (0..n).rev() {
            acc += phi.coeffs[k] / (k + 1) as f64;
            out[k] = acc.value();
        }
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            acc += phi.coeffs[k] / (k + 1) as f64;
            out[k] = acc;
        }
    }
    DualFunctional {
        a_inf: phi.a_inf,
        coeffs: out,
    }
}

pub fn dual_power(phi: &DualFunctional, n: usize) -> DualFunctional {
    (0..n).fold(phi.clone(), |acc, _| dual_apply(&acc))
}

/// `Qφ = ξ_0(φ) π_0 + ξ_∞(φ) π_∞` with `ξ_0(φ) = Σ_k a_k` and `ξ_∞(φ) =
/// φ(e_∞) - ξ_0(φ) = a_inf`.
pub fn dual_project_q(phi: &DualFunctional) -> DualFunctional {
    let xi0: Complex64 = phi.coeffs.iter().sum();
    DualFunctional {
        a_inf: phi.a_inf,
        coeffs: vec![xi0],
    }
}
