//! The checked-in fuzz seeds stay in sync with the parsers they exercise.

use std::fs;
use std::path::PathBuf;

use bgkpml::anova::{CubatureRule, EvalCache};
use bgkpml::grid::read_snapshot;
use bgkpml::scenarios::{ScenarioConfig, StudySpec};

fn seed(target: &str, name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "../../fuzz/corpus", target, name].iter().collect();
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn scenario_seeds_parse() {
    for name in ["pulse", "vortex", "walls"] {
        ScenarioConfig::from_toml_str(&seed("scenario_config", name)).unwrap();
    }
}

#[test]
fn study_seeds_parse() {
    for name in ["pulse_2d", "vortex_4d"] {
        StudySpec::from_toml_str(&seed("study_spec", name)).unwrap();
    }
}

#[test]
fn snapshot_seeds() {
    let (meta, field) = read_snapshot(seed("snapshot", "full_9x9").as_bytes()).unwrap();
    assert_eq!(meta.grid.dim(), (9, 9));
    assert_eq!(field[(8, 8)], 1.64);
    assert!(read_snapshot(seed("snapshot", "truncated").as_bytes()).is_err());
}

#[test]
fn cache_seed_parses() {
    let rule = CubatureRule::gauss_legendre(3, 2).unwrap();
    let cache = EvalCache::read(seed("eval_cache", "partial").as_bytes(), &rule).unwrap();
    assert_eq!(cache.get(&[2, 2]), Some(7e-4));
}
