//! Frequency-domain stability analysis of the layered system.

pub mod charpoly;
pub mod frank;
pub mod poly;
pub mod scan;
pub mod symbol;

/// Iteration cap of the Schur eigenvalue solves.
pub(crate) const SCHUR_MAX_ITERATIONS: usize = 10_000;

pub use charpoly::{factored_char_poly, mu4_nu4};
pub use frank::{
    c1_closed_form, c2_closed_form, c2_small_sigma, c2_small_sigma_denominator, frank_cf, mu4_expansion, CfExpansion,
};
pub use poly::{ComplexPolynomial, RealPolynomial, RootCounts};
pub use scan::{instability_boundary, instability_region_scan, InstabilityScan};
pub use symbol::{assemble_symbol, energy_decay_margin, petrovskii_bound, KGrid, SymbolMatrix, SYMBOL_DIM};
