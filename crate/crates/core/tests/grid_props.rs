use bgkpml::grid::{ddx, ddy, integrate, EdgeRule, Grid, Parity};
use proptest::prelude::*;

fn rule() -> impl Strategy<Value = EdgeRule> {
    prop_oneof![Just(EdgeRule::OneSided), Just(EdgeRule::Mirror(Parity::Even)), Just(EdgeRule::Mirror(Parity::Odd)),]
}

proptest! {
    #[test]
    fn constants_have_zero_interior_derivative(
        c in -5.0f64..5.0,
        nx in 9usize..20,
        ny in 9usize..20,
        l in rule(),
        r in rule(),
    ) {
        let g = Grid::vertex(0.0, 0.0, 1.0, 1.0, nx, ny).unwrap();
        let f = g.from_fn(|_, _| c);
        let d = ddx(&f, &g, l, r).unwrap();
        // odd mirrors see a jump at the edge; interior stencils never reach it
        for i in 2..nx - 2 {
            for j in 0..ny {
                prop_assert!(d[(i, j)].abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn one_sided_stencils_are_exact_on_cubics(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        c in -2.0f64..2.0,
        n in 9usize..25,
    ) {
        let g = Grid::vertex(-1.0, 0.5, 2.0, 1.5, n, n).unwrap();
        let f = g.from_fn(|x, y| a * x * x * x + b * x + c * y * y);
        let dx = ddx(&f, &g, EdgeRule::OneSided, EdgeRule::OneSided).unwrap();
        let dy = ddy(&f, &g, EdgeRule::OneSided, EdgeRule::OneSided).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (g.x(i), g.y(j));
                prop_assert!((dx[(i, j)] - (3.0 * a * x * x + b)).abs() <= 1e-9);
                prop_assert!((dy[(i, j)] - 2.0 * c * y).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn periodic_derivative_sums_to_zero(seed in prop::collection::vec(-1.0f64..1.0, 81)) {
        let g = Grid::periodic(1.0, 1.0, 9, 9).unwrap();
        let f = ndarray::Array2::from_shape_vec((9, 9), seed).unwrap();
        let d = ddx(&f, &g, EdgeRule::Periodic, EdgeRule::Periodic).unwrap();
        prop_assert!(d.sum().abs() <= 1e-12);
    }

    #[test]
    fn trapezoid_integrates_bilinear_fields(a in -3.0f64..3.0, b in -3.0f64..3.0, nx in 9usize..30, ny in 9usize..30) {
        let g = Grid::vertex(0.0, 0.0, 2.0, 1.0, nx, ny).unwrap();
        let f = g.from_fn(|x, y| a + b * x * y);
        // exact integral over [0, 2] x [0, 1]
        prop_assert!((integrate(&f, &g) - (2.0 * a + b)).abs() <= 1e-12);
    }
}
