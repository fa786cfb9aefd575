//! Numerical experiments with the Cesàro averaging operator on the space of
//! convergent sequences and on spaces of continuous functions.
//!
//! The crate is organised by subject:
//!
//! * [`seq`]: convergent sequences, the operator `T`, the limit projection
//!   `P`, and the dual operator `S` on finitely supported functionals.
//! * [`orbit`]: orbit norms `‖Tⁿx − Px‖`, the moment-integral and shifted
//!   operator representations of `Tⁿx`, and log-log rate fitting.
//! * [`range`]: membership tests for `Ran(I − T)` and `Ran(I − T)²`, and
//!   explicit preimages.
//! * [`laguerre`]: the Laguerre polynomials `L_n^{(1)}` and their weighted
//!   integrals.
//! * [`spectral`]: spectrum geometry, resolvent bounds, and finite-section
//!   norms of `Tⁿ(I − T)`.
//! * [`borel`]: Borel transforms, Abel means and the integrability probe.
//! * [`continuous`]: the operator on `C[0,1]` and on `C[0,∞)` with a limit.
//!
//! ```
//! use cesaro_lab::seq::{cesaro_apply, ConvergentSeq};
//!
//! let x = ConvergentSeq::from_real(&[1.0, 0.0, 0.0, 0.0], 0.0).unwrap();
//! let tx = cesaro_apply(&x);
//! assert_eq!(tx.prefix()[3].re, 0.25);
//! ```

pub mod borel;
pub mod continuous;
pub mod error;
pub mod laguerre;
pub mod numeric;
pub mod orbit;
pub mod range;
pub mod report;
pub mod scalar;
pub mod seq;
pub mod spectral;

pub use error::{Error, Result};
pub use numeric::QuadratureConfig;
pub use seq::{ConvergentSeq, Coordinate, DualFunctional, NormEstimate, Summation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/orbits.md")]
    mod orbits {}
    #[doc = include_str!("../../../book/src/ranges.md")]
    mod ranges {}
    #[doc = include_str!("../../../book/src/laguerre.md")]
    mod laguerre {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/borel.md")]
    mod borel {}
    #[doc = include_str!("../../../book/src/continuous.md")]
    mod continuous {}
    #[doc = include_str!("../../../book/src/truncation.md")]
    mod truncation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
