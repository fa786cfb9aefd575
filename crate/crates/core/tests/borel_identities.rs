mod common;

use cesaro_lab::borel::{
    abel_mean, adell_lekuona_probe, borel_integral, catalog, CoeffSeq, TailRule,
};
use cesaro_lab::range::Status;
use cesaro_lab::{ConvergentSeq, QuadratureConfig};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{LN_2, PI};

fn known_sums() -> Vec<(&'static str, f64, QuadratureConfig)> {
    let tight = QuadratureConfig::default();
    // the 1/k² tail bound decays like 2/T, so a tight target needs an enormous horizon
    let loose = QuadratureConfig {
        abs_tol: 1e-7,
        rel_tol: 1e-10,
        ..tight
    };
    vec![
        ("unit0", 1.0, tight),
        ("alt-harmonic", LN_2, tight),
        ("inv-square", PI * PI / 6.0, loose),
    ]
}

#[test]
fn integral_equals_the_series_sum() {
    for (name, sum, cfg) in known_sums() {
        let a = catalog(name).unwrap();
        assert!(a.hypothesis().ok, "{name}");
        let b = borel_integral(&a, &cfg).unwrap();
        assert!(
            (b.value.re - sum).abs() <= 1e-6,
            "{name}: {} vs {sum}",
            b.value.re
        );
        assert!(b.value.im == 0.0);
        assert!(b.tail_bound < cfg.abs_tol);
    }
}

#[test]
fn finitely_supported_coefficients_integrate_to_their_sum() {
    let mut r = common::rng(31);
    let cfg = QuadratureConfig::default();
    for _ in 0..5 {
        let len = r.gen_range(1..40);
        let coeffs: Vec<Complex64> = (0..len).map(|_| common::random_complex(&mut r)).collect();
        let sum: Complex64 = coeffs.iter().sum();
        let a = CoeffSeq::new(coeffs, TailRule::Zero).unwrap();
        let b = borel_integral(&a, &cfg).unwrap();
        assert!((b.value - sum).norm() <= 1e-10, "{} vs {sum}", b.value);
    }
}

#[test]
fn stored_prefix_with_an_alternating_tail() {
    // a_0 = 3, then (-1)^k/(k+1): the sum is ln 2 + 2
    let a = CoeffSeq::new(
        vec![Complex64::new(3.0, 0.0)],
        TailRule::AlternatingReciprocal { c: 1.0, p: 1.0 },
    )
    .unwrap();
    let b = borel_integral(&a, &QuadratureConfig::default()).unwrap();
    assert!((b.value.re - (LN_2 + 2.0)).abs() <= 1e-9);
}

#[test]
fn abel_means_approach_the_sum() {
    for (name, sum, _) in known_sums() {
        let a = catalog(name).unwrap();
        let errs: Vec<f64> = (0..11)
            .map(|j| {
                let m = (1u32 << j) as f64;
                (abel_mean(&a, 1.0 + 1.0 / m).unwrap().re - sum).abs()
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "{name}: {errs:?}");
        }
    }
}

#[test]
fn abel_means_are_dominated_by_the_absolute_integral() {
    for (name, _, cfg) in known_sums() {
        let a = catalog(name).unwrap();
        let bound = borel_integral(&a, &cfg).unwrap().abs_value;
        for r in [1.001, 1.01, 1.1, 1.5, 2.0, 5.0] {
            assert!(
                abel_mean(&a, r).unwrap().norm() <= bound + 1e-9,
                "{name} r={r}"
            );
        }
    }
}

#[test]
fn hypothesis_check() {
    assert!(!catalog("alternating").unwrap().hypothesis().ok);
    let harmonic = CoeffSeq::rule(TailRule::ReciprocalPower { c: 1.0, p: 1.0 });
    let h = harmonic.hypothesis();
    assert!(h.ok);
    assert_eq!(h.bound, Some(1.0));
}

#[test]
fn alternating_signs_integrate_to_one_half() {
    let a = catalog("alternating").unwrap();
    let b = borel_integral(&a, &QuadratureConfig::default()).unwrap();
    assert!(!b.hypothesis.ok);
    assert!((b.value.re - 0.5).abs() <= 1e-12);
}

#[test]
fn probe_on_finite_and_slow_sequences() {
    let cfg = QuadratureConfig::default();
    // x_0 = lim and finitely many other entries off the limit; the horizon grows with the prefix
    let mut p = vec![0.0, 1.0, -2.0, 1.0];
    p.resize(256, 0.0);
    let x = ConvergentSeq::from_real(&p, 0.0).unwrap();
    let v = adell_lekuona_probe(&x, &cfg).unwrap();
    assert_eq!(v.status, Status::Member, "{v:?}");
    // a limit gap makes |f| ~ |gap|/t, which is not integrable
    let y = ConvergentSeq::from_fn(1 << 12, Complex64::new(1.0, 0.0), |k| {
        Complex64::new(if k == 0 { 0.0 } else { 1.0 }, 0.0)
    })
    .unwrap();
    let v = adell_lekuona_probe(&y, &cfg).unwrap();
    assert_eq!(v.status, Status::NonMember, "{v:?}");
    assert!(v.diagnostic("x0_minus_limit_abs").unwrap().value == 1.0);
}
