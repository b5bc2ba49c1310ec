//! Stock test cases, paired runs against an extended reference domain, the
//! error functionals and parameter studies.

pub mod config;
pub mod functionals;
pub mod init;
pub mod run;
pub mod study;

pub use config::{DampingStrength, ScenarioCase, ScenarioConfig, VortexParams};
pub use functionals::{domain_error_series, err_a1_series, functional, probe_csv, v_probe_series, FunctionalKind};
pub use init::{init_gaussian, init_vortex, initial_state, vortex_state};
pub use run::{run_pair, run_single, RunKind, RunPair, Snapshot, Trajectory};
pub use study::{apply_parameter, StudyResult, StudySpec, STUDY_PARAMETERS};
