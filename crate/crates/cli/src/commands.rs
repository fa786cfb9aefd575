//! One function per subcommand.

use crate::input::{load_coeffs, load_dual, load_fn, load_seq, parse_complex, read_history};
use crate::output::{write_csv, write_json, Params};
use crate::{CoeffSource, Failure, FnSource, SeqSource};
use cesaro_lab::borel::{abel_mean, adell_lekuona_probe};
use cesaro_lab::continuous::{
    construct_preimage_fn, orbit_norms_fn, range_membership_fn, Centering, GridOptions,
};
use cesaro_lab::laguerre::{self, abs_integral, laguerre_table, signed_integral, write_table_csv};
use cesaro_lab::orbit::{
    default_window, dyadic_schedule, fit_rate, orbit_norms, talpha_norm_bound, NormHistory,
};
use cesaro_lab::range::{construct_preimage, range_membership};
use cesaro_lab::report::fmt_f64;
use cesaro_lab::seq::{dual_power, dual_project_q};
use cesaro_lab::spectral::{
    kt_decay_table, nearest_spectral_point, resolvent_lower_bound, spectrum_classify, write_kt_csv,
    SweepOptions,
};
use cesaro_lab::{DualFunctional, QuadratureConfig};
use serde::Serialize;
use std::path::{Path, PathBuf};

pub struct Context {
    pub seed: u64,
    pub out: Option<PathBuf>,
}

type Outcome = Result<(), Failure>;

fn seq_params(ctx: &Context, command: &str, name: &str, len: usize) -> Params {
    let mut p = Params::new(command, ctx.seed);
    p.set("input", name).set("N", len);
    p
}

fn window(nmax: usize, lo: Option<usize>, hi: Option<usize>) -> (usize, usize) {
    let (dlo, dhi) = default_window(nmax);
    (lo.unwrap_or(dlo), hi.unwrap_or(dhi))
}

pub fn orbit(ctx: &Context, src: &SeqSource, nmax: usize) -> Outcome {
    let (x, name) = load_seq(src, ctx.seed)?;
    let h = orbit_norms(&x, &dyadic_schedule(nmax))?;
    let mut p = seq_params(ctx, "orbit", &name, x.len());
    p.set("nmax", nmax)
        .set("schedule", "dyadic")
        .set("method", "iterate");
    let mut csv = p.csv();
    h.write_csv(&mut csv);
    write_csv(&ctx.out, &csv)
}

#[derive(Serialize)]
struct RateReport {
    slope: f64,
    intercept: f64,
    window: [usize; 2],
    residual: f64,
    used: usize,
    excluded_nonpositive: usize,
    boundary_saturated_samples: usize,
}

fn rate_report(h: &NormHistory, win: (usize, usize)) -> Result<RateReport, Failure> {
    let f = fit_rate(h, win)?;
    Ok(RateReport {
        slope: f.slope,
        intercept: f.intercept,
        window: [f.window.0, f.window.1],
        residual: f.residual,
        used: f.used,
        excluded_nonpositive: f.excluded_nonpositive,
        boundary_saturated_samples: h
            .samples
            .iter()
            .filter(|s| s.n >= win.0 && s.n <= win.1 && s.boundary_saturated)
            .count(),
    })
}

pub fn rate(
    ctx: &Context,
    history: Option<&Path>,
    src: &SeqSource,
    nmax: usize,
    lo: Option<usize>,
    hi: Option<usize>,
) -> Outcome {
    let (h, mut p, top) = match history {
        Some(path) => {
            let h = read_history(path)?;
            let top = h.samples.last().map(|s| s.n).unwrap_or(nmax);
            let mut p = Params::new("rate", ctx.seed);
            p.set("history", path.display());
            (h, p, top)
        }
        None => {
            let (x, name) = load_seq(src, ctx.seed)?;
            let h = orbit_norms(&x, &dyadic_schedule(nmax))?;
            let mut p = seq_params(ctx, "rate", &name, x.len());
            p.set("nmax", nmax);
            (h, p, nmax)
        }
    };
    let win = window(top, lo, hi);
    p.set("window", format!("{},{}", win.0, win.1));
    write_json(&ctx.out, &p, &rate_report(&h, win)?)
}

pub fn range_check(ctx: &Context, src: &SeqSource, order: u8) -> Outcome {
    let (x, name) = load_seq(src, ctx.seed)?;
    let v = range_membership(&x, order)?;
    let mut p = seq_params(ctx, "range-check", &name, x.len());
    p.set("order", order);
    write_json(&ctx.out, &p, &v)
}

pub fn preimage(ctx: &Context, src: &SeqSource, y0: &str) -> Outcome {
    let (x, name) = load_seq(src, ctx.seed)?;
    let y0c = parse_complex(y0)?;
    let pre = construct_preimage(&x, y0c)?;
    if let Some(w) = &pre.warning {
        eprintln!("warning: {w}");
    }
    let mut p = seq_params(ctx, "preimage", &name, x.len());
    p.set("y0", y0);
    write_json(&ctx.out, &p, &pre)
}

pub fn laguerre_eval(ctx: &Context, n: usize, t: f64) -> Outcome {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Failure::Input(format!(
            "t must be finite and nonnegative, got {t}"
        )));
    }
    let mut p = Params::new("laguerre eval", ctx.seed);
    p.set("n", n).set("t", fmt_f64(t));
    let mut csv = p.csv();
    csv.header(&["n", "t", "value"]).row(&[
        n.to_string(),
        fmt_f64(t),
        fmt_f64(laguerre::laguerre_eval(n, t)),
    ]);
    write_csv(&ctx.out, &csv)
}

pub fn laguerre_signed(ctx: &Context, n: usize, alpha: f64) -> Outcome {
    let v = signed_integral(n, alpha)?;
    let mut p = Params::new("laguerre signed", ctx.seed);
    p.set("n", n).set("alpha", fmt_f64(alpha));
    let mut csv = p.csv();
    csv.header(&["n", "alpha", "signed_closed_form"]).row(&[
        n.to_string(),
        fmt_f64(alpha),
        fmt_f64(v),
    ]);
    write_csv(&ctx.out, &csv)
}

pub fn laguerre_abs(ctx: &Context, n: usize, alpha: f64) -> Outcome {
    let cfg = QuadratureConfig::default();
    let v = abs_integral(n, alpha, &cfg)?;
    let mut p = Params::new("laguerre abs", ctx.seed);
    p.set("n", n)
        .set("alpha", fmt_f64(alpha))
        .set("rel_tol", fmt_f64(cfg.rel_tol));
    let mut csv = p.csv();
    csv.header(&["n", "alpha", "abs_integral"])
        .row(&[n.to_string(), fmt_f64(alpha), fmt_f64(v)]);
    write_csv(&ctx.out, &csv)
}

pub fn laguerre_ratio(ctx: &Context, alpha: f64, nmax: usize) -> Outcome {
    let cfg = QuadratureConfig::default();
    let ns: Vec<usize> = (0..=nmax).collect();
    let rows = laguerre_table(&ns, alpha, &cfg)?;
    let mut p = Params::new("laguerre ratio", ctx.seed);
    p.set("alpha", fmt_f64(alpha))
        .set("nmax", nmax)
        .set("rel_tol", fmt_f64(cfg.rel_tol));
    let mut csv = p.csv();
    write_table_csv(&rows, &mut csv);
    write_csv(&ctx.out, &csv)
}

pub fn talpha(ctx: &Context, alpha: f64, nmax: usize) -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut p = Params::new("talpha", ctx.seed);
    p.set("alpha", fmt_f64(alpha))
        .set("nmax", nmax)
        .set("rel_tol", fmt_f64(cfg.rel_tol));
    let mut csv = p.csv();
    csv.header(&["n", "alpha", "bound"]);
    for n in 0..=nmax {
        let b = talpha_norm_bound(alpha, n, &cfg)?;
        csv.row(&[n.to_string(), fmt_f64(alpha), fmt_f64(b)]);
    }
    write_csv(&ctx.out, &csv)
}

pub fn opnorm(ctx: &Context, size: usize, nmax: usize, opts: SweepOptions) -> Outcome {
    let rows = kt_decay_table(&dyadic_schedule(nmax), size, &opts)?;
    let mut p = Params::new("opnorm", ctx.seed);
    p.set("N", size)
        .set("nmax", nmax)
        .set("full_sweep", opts.full_sweep)
        .set("stride", opts.stride)
        .set("refine", opts.refine);
    let mut csv = p.csv();
    write_kt_csv(&rows, &mut csv);
    write_csv(&ctx.out, &csv)
}

pub fn spectrum(ctx: &Context, z: &str) -> Outcome {
    let zc = parse_complex(z)?;
    let mut p = Params::new("spectrum", ctx.seed);
    p.set("z", z);
    write_json(&ctx.out, &p, &spectrum_classify(zc))
}

#[derive(Serialize)]
struct ResolventReport {
    theta: f64,
    lower_bound: f64,
    nearest_spectral_point: [f64; 2],
}

pub fn resolvent(ctx: &Context, theta: f64) -> Outcome {
    let b = resolvent_lower_bound(theta)?;
    let z = nearest_spectral_point(theta);
    let mut p = Params::new("resolvent", ctx.seed);
    p.set("theta", fmt_f64(theta));
    let r = ResolventReport {
        theta,
        lower_bound: b,
        nearest_spectral_point: [z.re, z.im],
    };
    write_json(&ctx.out, &p, &r)
}

pub fn borel_integral(ctx: &Context, src: &CoeffSource, abs_tol: f64, rel_tol: f64) -> Outcome {
    let (a, name) = load_coeffs(src)?;
    let cfg = QuadratureConfig {
        abs_tol,
        rel_tol,
        ..QuadratureConfig::default()
    };
    let r = cesaro_lab::borel::borel_integral(&a, &cfg)?;
    let mut p = Params::new("borel integral", ctx.seed);
    p.set("coefficients", name)
        .set("abs_tol", fmt_f64(abs_tol))
        .set("rel_tol", fmt_f64(rel_tol));
    write_json(&ctx.out, &p, &r)
}

pub fn borel_abel(ctx: &Context, src: &CoeffSource, r: f64) -> Outcome {
    let (a, name) = load_coeffs(src)?;
    let v = abel_mean(&a, r)?;
    let mut p = Params::new("borel abel", ctx.seed);
    p.set("coefficients", name).set("r", fmt_f64(r));
    write_json(
        &ctx.out,
        &p,
        &serde_json::json!({ "r": r, "value": [v.re, v.im] }),
    )
}

pub fn borel_probe(ctx: &Context, src: &SeqSource) -> Outcome {
    let (x, name) = load_seq(src, ctx.seed)?;
    let v = adell_lekuona_probe(&x, &QuadratureConfig::default())?;
    let p = seq_params(ctx, "borel al-probe", &name, x.len());
    write_json(&ctx.out, &p, &v)
}

fn fn_params(ctx: &Context, command: &str, src: &FnSource, name: &str) -> Params {
    let mut p = Params::new(command, ctx.seed);
    p.set("function", name).set("centered", src.centered);
    p
}

fn grid_options(grid: usize) -> Result<GridOptions, Failure> {
    if grid < 2 {
        return Err(Failure::Input("--grid must be at least 2".into()));
    }
    Ok(GridOptions {
        size: grid,
        ..GridOptions::default()
    })
}

fn grid_params(p: &mut Params, opts: &GridOptions) {
    p.set("grid", opts.size)
        .set("refine_levels", opts.refine_levels)
        .set("t_min", fmt_f64(opts.t_min));
}

pub fn continuous_orbit(ctx: &Context, src: &FnSource, nmax: usize, grid: usize) -> Outcome {
    let (f, name) = load_fn(src)?;
    let opts = grid_options(grid)?;
    let h = orbit_norms_fn(
        &f,
        &dyadic_schedule(nmax),
        &opts,
        &QuadratureConfig::default(),
    )?;
    let mut p = fn_params(ctx, "continuous orbit", src, &name);
    p.set("nmax", nmax);
    grid_params(&mut p, &opts);
    let mut csv = p.csv();
    h.write_csv(&mut csv);
    write_csv(&ctx.out, &csv)
}

pub fn continuous_rate(
    ctx: &Context,
    src: &FnSource,
    nmax: usize,
    grid: usize,
    lo: Option<usize>,
    hi: Option<usize>,
) -> Outcome {
    let (f, name) = load_fn(src)?;
    let opts = grid_options(grid)?;
    let h = orbit_norms_fn(
        &f,
        &dyadic_schedule(nmax),
        &opts,
        &QuadratureConfig::default(),
    )?;
    let win = window(nmax, lo, hi);
    let mut p = fn_params(ctx, "continuous rate", src, &name);
    p.set("nmax", nmax)
        .set("window", format!("{},{}", win.0, win.1));
    grid_params(&mut p, &opts);
    write_json(&ctx.out, &p, &rate_report(&h, win)?)
}

pub fn continuous_range(ctx: &Context, src: &FnSource) -> Outcome {
    let (f, name) = load_fn(src)?;
    // centering was already applied on load
    let v = range_membership_fn(&f, Centering::Raw, &QuadratureConfig::default())?;
    write_json(
        &ctx.out,
        &fn_params(ctx, "continuous range", src, &name),
        &v,
    )
}

pub fn continuous_preimage(ctx: &Context, src: &FnSource, points: usize) -> Outcome {
    let (f, name) = load_fn(src)?;
    if points < 1 {
        return Err(Failure::Input("--points must be positive".into()));
    }
    let h = construct_preimage_fn(&f, &QuadratureConfig::default())?;
    let mut p = fn_params(ctx, "continuous preimage", src, &name);
    p.set("points", points);
    let ts: Vec<f64> = match f.space() {
        cesaro_lab::continuous::Space::Interval => {
            (0..=points).map(|i| i as f64 / points as f64).collect()
        }
        // log-spaced on [0, 1e3] after t = 0
        cesaro_lab::continuous::Space::Halfline => std::iter::once(0.0)
            .chain(
                (0..points).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (points.max(2) - 1) as f64)),
            )
            .collect(),
    };
    let mut csv = p.csv();
    csv.header(&["t", "re", "im"]);
    for t in ts {
        let v = h.eval(t)?;
        csv.row(&[fmt_f64(t), fmt_f64(v.re), fmt_f64(v.im)]);
    }
    if let Some(l) = h.limit_at_inf() {
        csv.row(&["inf".to_string(), fmt_f64(l.re), fmt_f64(l.im)]);
    }
    write_csv(&ctx.out, &csv)
}

pub fn dual_orbit(
    ctx: &Context,
    input: Option<&Path>,
    coordinate: Option<usize>,
    nmax: usize,
) -> Outcome {
    let mut p = Params::new("dual orbit", ctx.seed);
    let phi = match (input, coordinate) {
        (Some(path), _) => {
            p.set("input", path.display());
            load_dual(path)?
        }
        (None, Some(k)) => {
            p.set("input", format!("pi_{k}"));
            DualFunctional::coordinate(k)
        }
        (None, None) => return Err(Failure::Input("pass --input or --coordinate".into())),
    };
    p.set("nmax", nmax);
    let q = dual_project_q(&phi);
    let mut csv = p.csv();
    csv.header(&["n", "distance_to_q", "representation_norm"]);
    let mut cur = phi;
    for n in 0..=nmax {
        if n > 0 {
            cur = dual_power(&cur, 1);
        }
        csv.row(&[
            n.to_string(),
            fmt_f64(cur.distance(&q)),
            fmt_f64(cur.representation_norm()),
        ]);
    }
    write_csv(&ctx.out, &csv)
}
