//! ANOVA decomposition of a black-box functional on a parameter box using
//! tensor Gauss-Legendre cubature.

pub mod cubature;
pub mod decomp;
pub mod eval;

pub use cubature::{gauss_legendre_unit, CubatureRule};
pub use decomp::{anova_terms, tsi_table_csv, AnovaDecomposition, DecompositionExport, Subset, Term, TruncatedValue};
pub use eval::{evaluate_on_grid, EvalCache, EvalReport, EvaluationTable, ParameterBox};
