//! Numerical laboratory for the Hermite-expanded BGK model with a perfectly
//! matched layer (PML).
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: the six-moment BGK system (flux matrices, relaxation source,
//!   macroscopic conversions, hyperbolicity diagnostics).
//! - [`grid`]: uniform 2D grids, fourth-order first derivatives and ghost-point
//!   boundary handling, snapshot dumps.
//! - [`pml`]: damping profile and the right-hand sides of the plain and the
//!   PML-augmented system (layer along +x only).
//! - [`time`]: classical RK4 and the CFL bound, with a blow-up detector.
//! - [`stability`]: the 18x18 frequency-domain symbol, energy-decay margins,
//!   characteristic polynomial factors and Frank's continued fraction test.
//! - [`anova`]: Gauss-Legendre tensor cubature, ANOVA terms, variances and
//!   total sensitivity indices.
//! - [`scenarios`]: Gaussian pulse and isentropic vortex set-ups, reference
//!   runs, error functionals and parameter studies.

// `!(x > 0.0)` guards reject NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anova;
pub mod error;
pub mod grid;
pub mod model;
pub mod pml;
pub mod scenarios;
pub mod stability;
pub mod time;

pub use error::{Error, Result};
