//! Reading sequences, functions, coefficient lists and histories.

use crate::{CoeffSource, Failure, FnExample, FnSource, SeqExample, SeqSource};
use cesaro_lab::borel::{catalog, CoeffSeq, CATALOG};
use cesaro_lab::continuous::{FunctionHandle, FunctionSpec};
use cesaro_lab::orbit::{NormHistory, NormSample};
use cesaro_lab::seq::identity_minus_cesaro;
use cesaro_lab::{ConvergentSeq, DualFunctional};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use std::path::Path;

const DEFAULT_EXAMPLE_LEN: usize = 4096;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::Input(format!("expected `re` or `re,im`, got {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn example(e: SeqExample, len: usize, seed: u64) -> Result<ConvergentSeq, Failure> {
    let zero = Complex64::new(0.0, 0.0);
    let real = |v: f64| Complex64::new(v, 0.0);
    let random_y = || {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let prefix: Vec<Complex64> = (0..len).map(|_| real(r.gen_range(-1.0..1.0))).collect();
        let limit = real(r.gen_range(-1.0..1.0));
        ConvergentSeq::new(prefix, limit)
    };
    Ok(match e {
        SeqExample::Slow => ConvergentSeq::from_fn(len, zero, |k| {
            if k == 0 {
                zero
            } else {
                real(1.0 / ((k + 2) as f64).ln())
            }
        })?,
        SeqExample::Step => {
            ConvergentSeq::from_fn(len, real(1.0), |k| real(if k == 0 { 0.0 } else { 1.0 }))?
        }
        SeqExample::RandomRange => identity_minus_cesaro(&random_y()?),
        SeqExample::RandomRange2 => identity_minus_cesaro(&identity_minus_cesaro(&random_y()?)),
        SeqExample::Telescoping => ConvergentSeq::from_fn(len, zero, |k| {
            if k == 0 {
                zero
            } else {
                real(1.0 / (k as f64 * (k + 1) as f64))
            }
        })?,
    })
}

/// The sequence together with a description for the output header.
pub fn load_seq(src: &SeqSource, seed: u64) -> Result<(ConvergentSeq, String), Failure> {
    let (seq, name) = match (&src.input, src.example) {
        (Some(p), _) => (read_json::<ConvergentSeq>(p)?, p.display().to_string()),
        (None, Some(e)) => {
            let len = src.size.unwrap_or(DEFAULT_EXAMPLE_LEN);
            let name = format!("{e:?}").to_lowercase();
            (example(e, len, seed)?, format!("example:{name}"))
        }
        (None, None) => return Err(Failure::Input("pass --input or --example".into())),
    };
    let seq = match src.size {
        Some(0) => return Err(Failure::Input("--N must be positive".into())),
        Some(n) if n < seq.len() => seq.truncated(n)?,
        Some(n) if n > seq.len() => seq.extended(&vec![seq.limit(); n - seq.len()])?,
        _ => seq,
    };
    Ok((seq, name))
}

pub fn load_coeffs(src: &CoeffSource) -> Result<(CoeffSeq, String), Failure> {
    match (&src.name, &src.input) {
        (Some(n), _) => catalog(n).map(|c| (c, n.clone())).ok_or_else(|| {
            Failure::Input(format!(
                "unknown catalog entry {n:?}; known: {}",
                CATALOG.join(", ")
            ))
        }),
        (None, Some(p)) => {
            let c: CoeffSeq = read_json(p)?;
            Ok((CoeffSeq::new(c.coeffs, c.tail)?, p.display().to_string()))
        }
        (None, None) => Err(Failure::Input("pass --name or --input".into())),
    }
}

pub fn load_fn(src: &FnSource) -> Result<(FunctionHandle, String), Failure> {
    let (f, name) = match (&src.input, src.function) {
        (Some(p), _) => {
            let spec: FunctionSpec = read_json(p)?;
            (FunctionHandle::from_spec(&spec)?, p.display().to_string())
        }
        (None, Some(FnExample::Identity)) => (FunctionHandle::monomial(1), "identity".to_string()),
        (None, Some(FnExample::Invlog)) => (FunctionHandle::inv_log(), "invlog".to_string()),
        (None, Some(FnExample::Sinlog)) => (FunctionHandle::sin_log(), "sinlog".to_string()),
        (None, None) => return Err(Failure::Input("pass --input or --function".into())),
    };
    Ok((if src.centered { f.centered() } else { f }, name))
}

pub fn load_dual(path: &Path) -> Result<DualFunctional, Failure> {
    let d: DualFunctional = read_json(path)?;
    Ok(DualFunctional::new(d.a_inf, d.coeffs)?)
}

#[derive(serde::Deserialize)]
struct HistoryRow {
    n: usize,
    value: f64,
    boundary_flag: bool,
}

/// A history CSV as written by `orbit`: `#` lines are skipped.
pub fn read_history(path: &Path) -> Result<NormHistory, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut samples = Vec::new();
    for row in reader.deserialize::<HistoryRow>() {
        let row = row.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        samples.push(NormSample {
            n: row.n,
            value: row.value,
            boundary_saturated: row.boundary_flag,
        });
    }
    Ok(NormHistory {
        samples,
        truncation: 0,
    })
}
