use bgkpml::anova::{anova_terms, evaluate_on_grid, CubatureRule, EvalCache, ParameterBox};
use proptest::prelude::*;

fn decompose(values: &[f64; 3], weights: [f64; 3], n: usize) -> bgkpml::anova::AnovaDecomposition {
    let rule = CubatureRule::gauss_legendre(n, 3).unwrap();
    let bx = ParameterBox::unit(3);
    let f = |x: &[f64]| Ok(weights[0] * (values[0] * x[0]).sin() + weights[1] * x[1] * x[1] + weights[2] * x[0] * x[2]);
    let table = evaluate_on_grid(f, &bx, &rule, &EvalCache::new()).unwrap().table;
    anova_terms(&table, 3).unwrap()
}

proptest! {
    #[test]
    fn terms_partition_the_variance(
        v in prop::array::uniform3(0.5f64..4.0),
        w in prop::array::uniform3(0.2f64..2.0),
        n in 2usize..6,
    ) {
        let d = decompose(&v, w, n);
        let s: f64 = d.sensitivities().unwrap().values().sum();
        prop_assert!((s - 1.0).abs() <= 1e-10);
        for t in d.tsi().unwrap() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t));
        }
        for a in 1u32..8 {
            prop_assert!(d.term_mean(a).abs() <= 1e-10);
            for b in (a + 1)..8 {
                prop_assert!(d.inner_product(a, b).abs() <= 1e-10);
            }
        }
        // x1 enters additively
        prop_assert!(d.variance(0b011).abs() <= 1e-12 && d.variance(0b110).abs() <= 1e-12);
    }

    #[test]
    fn decomposition_is_invariant_under_cache_reuse(
        v in prop::array::uniform3(0.5f64..4.0),
        w in prop::array::uniform3(0.2f64..2.0),
    ) {
        let rule = CubatureRule::gauss_legendre(3, 3).unwrap();
        let bx = ParameterBox::unit(3);
        let f = |x: &[f64]| Ok(w[0] * (v[0] * x[0]).sin() + w[1] * x[1] + w[2] * x[2] * x[0]);
        let cache = EvalCache::new();
        let first = evaluate_on_grid(f, &bx, &rule, &cache).unwrap();
        let second = evaluate_on_grid(|_| panic!("cache miss"), &bx, &rule, &cache).unwrap();
        prop_assert_eq!(second.evaluated, 0);
        prop_assert_eq!(first.table, second.table);
    }
}
