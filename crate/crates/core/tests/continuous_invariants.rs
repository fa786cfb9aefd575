use cesaro_lab::continuous::{
    cesaro_apply_fn, construct_preimage_fn, orbit_norms_fn, power_eval_fn, range_membership_fn,
    Centering, FunctionHandle, GridOptions, Space,
};
use cesaro_lab::orbit::{dyadic_schedule, fit_rate};
use cesaro_lab::range::Status;
use cesaro_lab::QuadratureConfig;
use num_complex::Complex64;

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn grid(points: usize) -> Vec<f64> {
    (0..=points).map(|i| i as f64 / points as f64).collect()
}

/// Polynomials vanishing at 0, the ones with a preimage.
fn polynomial_catalog() -> Vec<FunctionHandle> {
    vec![
        FunctionHandle::monomial(1),
        FunctionHandle::poly_real(&[0.0, -1.0, 1.0]).unwrap(),
        FunctionHandle::poly_real(&[0.0, 2.0, 0.0, -3.0, 0.5]).unwrap(),
        FunctionHandle::poly(
            vec![
                c(0.0),
                Complex64::new(0.0, 1.0),
                c(0.0),
                c(0.0),
                c(0.0),
                c(4.0),
            ],
            Space::Interval,
        )
        .unwrap(),
    ]
}

#[test]
fn monomials_are_eigenfunctions() {
    let cfg = QuadratureConfig::default();
    for m in 0..=5 {
        let f = FunctionHandle::monomial(m);
        for n in 0..=20 {
            let lam = ((m + 1) as f64).powi(-(n as i32));
            for t in grid(32) {
                let got = power_eval_fn(&f, n, t, &cfg).unwrap();
                let want = t.powi(m as i32) * lam;
                assert!(
                    (got - want).norm() <= 1e-8,
                    "m={m} n={n} t={t}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn value_at_zero_is_preserved_exactly() {
    let cfg = QuadratureConfig::default();
    let fs = vec![
        FunctionHandle::poly_real(&[0.75, 1.0, -2.0]).unwrap(),
        FunctionHandle::sin_log().shifted(c(0.3)),
        FunctionHandle::inv_log(),
        FunctionHandle::samples(
            vec![(0.0, c(-1.0)), (0.5, c(2.0)), (1.0, c(0.0))],
            Space::Interval,
        )
        .unwrap(),
    ];
    for f in &fs {
        for n in [0, 1, 5, 40] {
            assert_eq!(power_eval_fn(f, n, 0.0, &cfg).unwrap(), f.value_at_0());
            assert_eq!(cesaro_power_at_zero(f, n, &cfg), f.value_at_0());
        }
    }
}

fn cesaro_power_at_zero(f: &FunctionHandle, n: usize, cfg: &QuadratureConfig) -> Complex64 {
    cesaro_lab::continuous::cesaro_power_fn(f, n, cfg)
        .unwrap()
        .eval(0.0)
        .unwrap()
}

#[test]
fn preimages_of_polynomials_round_trip() {
    let cfg = QuadratureConfig::default();
    for f in polynomial_catalog() {
        let h = construct_preimage_fn(&f, &cfg).unwrap();
        let th = cesaro_apply_fn(&h, &cfg).unwrap();
        for t in grid(40) {
            let back = h.eval(t).unwrap() - th.eval(t).unwrap();
            let want = f.eval(t).unwrap();
            assert!((back - want).norm() <= 1e-8, "t={t}: {back} vs {want}");
        }
    }
}

#[test]
fn members_of_the_interval_catalog_decay_at_least_like_the_square_root() {
    let cfg = QuadratureConfig::default();
    let mut catalog = polynomial_catalog();
    catalog.push(FunctionHandle::poly_real(&[1.0, 0.0, 2.0]).unwrap());
    catalog.push(
        FunctionHandle::samples(
            vec![(0.0, c(0.0)), (0.4, c(1.0)), (1.0, c(-0.5))],
            Space::Interval,
        )
        .unwrap(),
    );
    let opts = GridOptions {
        size: 64,
        ..Default::default()
    };
    for f in catalog {
        let v = range_membership_fn(&f, Centering::Centered, &cfg).unwrap();
        assert_eq!(v.status, Status::Member, "{v:?}");
        let h = orbit_norms_fn(&f.centered(), &dyadic_schedule(1024), &opts, &cfg).unwrap();
        let fit = fit_rate(&h, (64, 1024)).unwrap();
        assert!(fit.slope <= -0.45, "slope {}", fit.slope);
    }
}

#[test]
fn logarithmic_example_is_not_in_the_range_and_decays_slowly() {
    let cfg = QuadratureConfig::default();
    let f = FunctionHandle::inv_log();
    assert_eq!(
        range_membership_fn(&f, Centering::Raw, &cfg)
            .unwrap()
            .status,
        Status::NonMember
    );
    let h = orbit_norms_fn(
        &f,
        &dyadic_schedule(1024),
        &GridOptions {
            size: 64,
            ..Default::default()
        },
        &cfg,
    )
    .unwrap();
    let v = h.values();
    assert!(v.windows(2).all(|w| w[1] < w[0]));
    let fit = fit_rate(&h, (64, 1024)).unwrap();
    assert!(
        fit.slope > -1.05 && fit.slope < -0.95,
        "slope {}",
        fit.slope
    );
}

#[test]
fn oscillating_halfline_example_decays_like_the_square_root() {
    let cfg = QuadratureConfig::default();
    let f = FunctionHandle::sin_log();
    let v = range_membership_fn(&f, Centering::Centered, &cfg).unwrap();
    assert_eq!(v.status, Status::Member, "{v:?}");
    let h = orbit_norms_fn(&f, &dyadic_schedule(1024), &GridOptions::default(), &cfg).unwrap();
    let vals = h.values();
    assert!(vals[vals.len() - 1] < vals[0]);
    let fit = fit_rate(&h, (64, 1024)).unwrap();
    println!("sin/log half-line slope over [64, 1024]: {}", fit.slope);
    assert!(fit.slope <= -0.45, "slope {}", fit.slope);
}
