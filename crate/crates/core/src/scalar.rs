//! JSON representation of complex scalars: a bare number for real values, a
//! two-element `[re, im]` array otherwise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Complex64> for JsonScalar {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            JsonScalar::Real(z.re)
        } else {
            JsonScalar::Pair([z.re, z.im])
        }
    }
}

impl From<JsonScalar> for Complex64 {
    fn from(s: JsonScalar) -> Self {
        match s {
            JsonScalar::Real(r) => Complex64::new(r, 0.0),
            JsonScalar::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
