use std::io::Cursor;

use bgkpml::anova::{CubatureRule, EvalCache};
use bgkpml::grid::{read_snapshot, write_snapshot, Grid, SnapshotMeta};
use bgkpml::scenarios::{ScenarioConfig, StudySpec};
use ndarray::Array2;
use proptest::prelude::*;

proptest! {
    #[test]
    fn snapshot_round_trip(
        nx in 9usize..14,
        ny in 9usize..14,
        t in 0.0f64..10.0,
        seed in prop::collection::vec(-1e3f64..1e3, 64),
    ) {
        let grid = Grid::vertex(-1.0, 0.25, 2.0, 1.5, nx, ny).unwrap();
        let field = Array2::from_shape_fn((nx, ny), |(i, j)| seed[(i * 8 + j) % 64]);
        let meta = SnapshotMeta { field: "a1".into(), time: t, grid };
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &meta, &field, "case = \"gaussian-pulse\"\nnx = 20").unwrap();
        let (back_meta, back) = read_snapshot(Cursor::new(buf)).unwrap();
        prop_assert_eq!(back_meta, meta);
        prop_assert_eq!(back, field);
    }

    #[test]
    fn eval_cache_round_trip(entries in prop::collection::btree_map(prop::collection::vec(0usize..4, 3), -1e6f64..1e6, 0..40)) {
        let rule = CubatureRule::gauss_legendre(4, 3).unwrap();
        let cache = EvalCache::new();
        for (k, v) in &entries {
            cache.insert(k.clone(), *v);
        }
        let mut buf = Vec::new();
        cache.write(&mut buf, &rule).unwrap();
        let back = EvalCache::read(Cursor::new(buf), &rule).unwrap();
        prop_assert_eq!(back.len(), entries.len());
        for (k, v) in &entries {
            prop_assert_eq!(back.get(k), Some(*v));
        }
    }

    #[test]
    fn parsers_reject_garbage_without_panicking(text in "\\PC{0,200}") {
        let _ = ScenarioConfig::from_toml_str(&text);
        let _ = StudySpec::from_toml_str(&text);
        let _ = read_snapshot(Cursor::new(text.as_bytes()));
        let _ = EvalCache::read(Cursor::new(text.as_bytes()), &CubatureRule::gauss_legendre(2, 2).unwrap());
    }

    #[test]
    fn scenario_overlays_round_trip(nx in 12usize..40, tau in 1e-3f64..1.0, beta in 0.0f64..6.0) {
        let text = format!("[grid]\nnx = {nx}\n[model]\ntau = {tau:e}\n[pml]\nbeta = {beta:e}\n");
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!((cfg.grid.nx, cfg.model.tau, cfg.pml.beta), (nx, tau, beta));
        prop_assert_eq!(ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }
}
