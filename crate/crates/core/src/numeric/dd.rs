//! Double-double accumulation.
//!
//! A value is carried as an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
//! Only the operations the laboratory needs are provided: adding doubles,
//! adding double-doubles, and scaling by a double.

use num_complex::Complex64;
use std::ops::{Add, AddAssign};

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = fast_two_sum(s, e + self.lo);
        DoubleDouble { hi, lo }
    }

    pub fn add_dd(self, other: DoubleDouble) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = fast_two_sum(s, e + t);
        let (hi, lo) = fast_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Self {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = fast_two_sum(p, e + self.lo * x);
        DoubleDouble { hi, lo }
    }

    /// `(hi + lo) / d` rounded to a double, with one residual correction so
    /// that exact multiples of `d` divide exactly.
    pub fn div_f64(self, d: f64) -> f64 {
        let q = self.hi / d;
        let (p, e) = two_prod(q, d);
        let r = ((self.hi - p) - e) + self.lo;
        q + r / d
    }
}

impl Add<f64> for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, rhs: f64) -> DoubleDouble {
        self.add_f64(rhs)
    }
}

impl AddAssign<f64> for DoubleDouble {
    fn add_assign(&mut self, rhs: f64) {
        *self = self.add_f64(rhs);
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, rhs: DoubleDouble) -> DoubleDouble {
        self.add_dd(rhs)
    }
}

/// Complex accumulator with independent double-double real and imaginary parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDoubleComplex {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl DoubleDoubleComplex {
    pub fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn div_f64(self, d: f64) -> Complex64 {
        Complex64::new(self.re.div_f64(d), self.im.div_f64(d))
    }
}

impl AddAssign<Complex64> for DoubleDoubleComplex {
    fn add_assign(&mut self, rhs: Complex64) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

/// Compensated sum of a slice of doubles.
pub fn sum_dd(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(DoubleDouble::ZERO, |acc, v| acc + v)
        .value()
}

/// Compensated sum together with the classical a-priori rounding bound
/// `n * eps * sum |v|` for the terms themselves (the accumulation error of the
/// double-double sum is negligible next to it).
pub fn sum_with_error(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut acc = DoubleDouble::ZERO;
    let mut magnitude = 0.0;
    let mut count = 0usize;
    for v in values {
        acc += v;
        magnitude += v.abs();
        count += 1;
    }
    let terms = (count.max(1) as f64) * f64::EPSILON;
    (acc.value(), terms * magnitude)
}
