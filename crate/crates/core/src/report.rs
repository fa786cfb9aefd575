//! Plain-text report formatting shared by the table writers.
//!
//! CSV files start with `# key=value` comment lines carrying the resolved
//! parameters, followed by a header row. Floats use the shortest decimal that
//! round-trips, so identical inputs give byte-identical files.

use std::fmt::Write;

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || x.is_nan() || x.is_infinite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.out, "# {key}={value}");
        self
    }

    pub fn header(&mut self, columns: &[&str]) -> &mut Self {
        self.out.push_str(&columns.join(","));
        self.out.push('\n');
        self
    }

    pub fn row(&mut self, cells: &[String]) -> &mut Self {
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
        self
    }

    pub fn finish(&self) -> String {
        self.out.clone()
    }
}
