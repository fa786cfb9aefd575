//! Numerical building blocks shared by the operator modules.

pub mod dd;
pub mod poisson;
pub mod quad;

pub use dd::{DoubleDouble, DoubleDoubleComplex};
pub use quad::{QuadResult, QuadratureConfig};
