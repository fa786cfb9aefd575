//! Shared helpers for the integration tests: seeded inputs and independent
//! oracles that do not go through the library's numerics.
#![allow(dead_code)]

use cesaro_lab::seq::{cesaro_power, identity_minus_cesaro, ConvergentSeq};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub fn random_complex(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Random prefix of length `n` with a random limit.
pub fn random_seq(r: &mut impl Rng, n: usize) -> ConvergentSeq {
    let prefix = (0..n).map(|_| random_complex(r)).collect();
    ConvergentSeq::new(prefix, random_complex(r)).unwrap()
}

pub fn random_real_seq(r: &mut impl Rng, n: usize) -> ConvergentSeq {
    let prefix = (0..n).map(|_| c(r.gen_range(-1.0..1.0))).collect();
    ConvergentSeq::new(prefix, c(r.gen_range(-1.0..1.0))).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `y` random on `0..len` and equal to `y_0` afterwards, with the last free
/// entry chosen so that `Σ_{j<len} y_j = len · y_0`. Then `(I − T)y` vanishes
/// from index `len` on and lies in `Ran(I − T)` with a finitely supported
/// weighted series.
pub fn balanced_first_order(r: &mut impl Rng, len: usize, n: usize) -> ConvergentSeq {
    assert!(len >= 2 && n > len);
    let y0 = r.gen_range(-1.0..1.0);
    let mut y: Vec<f64> = (0..len).map(|_| r.gen_range(-1.0..1.0)).collect();
    y[0] = y0;
    let rest: f64 = y[..len - 1].iter().sum();
    y[len - 1] = len as f64 * y0 - rest;
    y.resize(n, y0);
    ConvergentSeq::from_real(&y, y0).unwrap()
}

/// `y` random on `0..len`, constant `lim` afterwards, with two entries fixed
/// so that both `(I − T)y` and `(I − T)²y` vanish from index `len` on.
pub fn balanced_second_order(r: &mut impl Rng, len: usize, n: usize) -> ConvergentSeq {
    assert!(len >= 4 && n > len);
    let lim = r.gen_range(-1.0..1.0);
    let mut y: Vec<f64> = (0..len).map(|_| r.gen_range(-1.0..1.0)).collect();
    // both conditions are affine in (y[len-2], y[len-1]); solve from three evaluations
    let conditions = |y: &[f64]| -> (f64, f64) {
        let d: f64 = y.iter().map(|v| lim - v).sum();
        let mut acc = 0.0;
        let mut z_sum = 0.0;
        for (k, v) in y.iter().enumerate() {
            acc += v;
            z_sum += v - acc / (k + 1) as f64;
        }
        (d, z_sum)
    };
    let (a, b) = (len - 2, len - 1);
    y[a] = 0.0;
    y[b] = 0.0;
    let base = conditions(&y);
    y[a] = 1.0;
    let ea = conditions(&y);
    y[a] = 0.0;
    y[b] = 1.0;
    let eb = conditions(&y);
    let (m11, m21) = (ea.0 - base.0, ea.1 - base.1);
    let (m12, m22) = (eb.0 - base.0, eb.1 - base.1);
    let det = m11 * m22 - m12 * m21;
    y[a] = (-base.0 * m22 + base.1 * m12) / det;
    y[b] = (-m11 * base.1 + m21 * base.0) / det;
    y.resize(n, lim);
    ConvergentSeq::from_real(&y, lim).unwrap()
}

pub fn twice_minus(y: &ConvergentSeq) -> ConvergentSeq {
    identity_minus_cesaro(&identity_minus_cesaro(y))
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

/// `T^n x` in exact rational arithmetic on a real prefix.
pub fn rational_power(x: &[f64], n: usize) -> Vec<BigRational> {
    let mut cur: Vec<BigRational> = x.iter().map(|&v| rat(v)).collect();
    for _ in 0..n {
        let mut acc = BigRational::zero();
        cur = cur
            .iter()
            .enumerate()
            .map(|(k, v)| {
                acc += v;
                &acc / BigRational::from_integer(BigInt::from(k + 1))
            })
            .collect();
    }
    cur
}

/// `max_k |(T^n x)_k − x_0|` together with `|lim − x_0|`, exactly.
pub fn rational_orbit_distance(x: &[f64], limit: f64, n: usize) -> f64 {
    let p = rational_power(x, n);
    let x0 = rat(x[0]);
    let prefix = p
        .iter()
        .map(|v| (v - &x0).abs())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    let lim = (rat(limit) - x0).abs();
    let best = if lim > prefix { lim } else { prefix };
    best.to_f64().unwrap()
}

/// `(1−α)^{−n} Σ_j C(n,j) (−α)^{n−j} π_k(T^j x)` using direct iteration.
pub fn binomial_talpha(x: &ConvergentSeq, k: usize, n: usize, alpha: f64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    for j in 0..=n {
        if j > 0 {
            binom *= (n - j + 1) as f64 / j as f64;
        }
        let tj = cesaro_power(x, j).prefix()[k];
        total += tj * binom * (-alpha).powi((n - j) as i32);
    }
    total / (1.0 - alpha).powi(n as i32)
}

/// `L_n^{(1)}(t) = Σ_k C(n+1, k+1) (−1)^k t^k / k!` exactly, for rational `t`.
pub fn rational_laguerre(n: usize, t: &BigRational) -> BigRational {
    let mut total = BigRational::zero();
    let mut binom = BigInt::from(n + 1); // C(n+1, 1)
    let mut power = BigRational::one();
    let mut fact = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
            power = &power * t;
            fact *= BigInt::from(k);
        }
        let term = BigRational::from_integer(binom.clone()) * &power
            / BigRational::from_integer(fact.clone());
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `((1−α)/α)^{n+1} + (−1)^n` via the exact binomial moments
/// `∫ e^{−αt} t^k dt = k!/α^{k+1}` for rational `α`.
pub fn rational_signed_integral(n: usize, alpha: &BigRational) -> BigRational {
    let mut total = BigRational::zero();
    let mut binom = BigInt::from(n + 1);
    let mut inv_alpha = BigRational::one() / alpha;
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
            inv_alpha = inv_alpha / alpha;
        }
        let term = BigRational::from_integer(binom.clone()) * &inv_alpha;
        if (n + k) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=m {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre with Neumaier summation.
pub fn composite_gl(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    rule: &[(f64, f64)],
) -> f64 {
    let h = (b - a) / panels as f64;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(x, w) in rule {
            let v = 0.5 * h * w * f(lo + 0.5 * h * (x + 1.0));
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
        }
    }
    sum + comp
}

/// `L_n^{(1)}` by its recurrence, written independently of the library.
pub fn laguerre_ref(n: usize, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 - t);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 2.0 - t) * b - (kf + 1.0) * a) / (kf + 1.0);
        a = b;
        b = next;
    }
    b
}
