//! Damping profile and right-hand sides of the plain and PML-augmented
//! systems. The layer is attached along `+x1` only (`σ2 = 0`).
//!
//! States are `Array3<f64>` with the component axis first: six coefficient
//! fields for the plain system, followed by six auxiliary fields `ω` for the
//! layered system.

use log::warn;
use nalgebra::Matrix6;
use ndarray::{s, Array2, Array3, ArrayView2, ArrayView3, Axis as NdAxis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ddx, ddy, rules_for, Axis, BoundarySpec, Component, Grid};
use crate::model::{flux_matrices, source, source_linear, CoefficientVector, ModelConstants, NCOEF};

/// Layer parameters. The tilde (`*t`) fields belong to a layer along `x2`
/// and only enter the frequency-domain analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PmlParams {
    pub alpha0: f64,
    pub lambda0: f64,
    pub alpha1: f64,
    pub lambda1: f64,
    pub alpha0t: f64,
    pub lambda0t: f64,
    pub alpha1t: f64,
    pub lambda1t: f64,
}

impl Default for PmlParams {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            lambda0: 0.0,
            alpha1: 0.0,
            lambda1: 0.0,
            alpha0t: 1.0,
            lambda0t: 0.0,
            alpha1t: 0.0,
            lambda1t: 0.0,
        }
    }
}

impl PmlParams {
    pub fn is_finite(&self) -> bool {
        [self.alpha0, self.lambda0, self.alpha1, self.lambda1, self.alpha0t, self.lambda0t, self.alpha1t, self.lambda1t]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Messages for parameters outside the region where the layer is known to
    /// be stable. Parameter studies sweep through this region on purpose, so
    /// these are warnings rather than errors. `min_sigma` is the smallest
    /// damping value in the layer (zero for the usual profiles).
    pub fn stability_warnings(&self, min_sigma: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.lambda0 != 0.0 || self.lambda1 != 0.0 {
            out.push(format!(
                "lambda0 = {}, lambda1 = {}: the stable preset requires both to vanish",
                self.lambda0, self.lambda1
            ));
        }
        if self.alpha0 <= -min_sigma {
            out.push(format!("alpha0 = {} does not exceed -sigma1 = {}", self.alpha0, -min_sigma));
        }
        out
    }

    /// Logs [`Self::stability_warnings`].
    pub fn warn_if_unstable(&self, min_sigma: f64) {
        for w in self.stability_warnings(min_sigma) {
            warn!("{w}");
        }
    }
}

/// `σ(x) = C ((x - x0) / L)^β` on the layer, zero before it, saturated at
/// `C` beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingProfile {
    pub c: f64,
    pub x0: f64,
    pub l: f64,
    pub beta: f64,
}

impl DampingProfile {
    pub fn new(c: f64, x0: f64, l: f64, beta: f64) -> Result<Self> {
        let p = Self { c, x0, l, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("damping strength must be positive, got {}", self.c)));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::invalid(format!("layer thickness must be positive, got {}", self.l)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("profile exponent must be non-negative, got {}", self.beta)));
        }
        if !self.x0.is_finite() {
            return Err(Error::invalid("layer start must be finite"));
        }
        Ok(())
    }

    /// Damping value at abscissa `x`.
    pub fn value(&self, x: f64) -> f64 {
        if x <= self.x0 {
            0.0
        } else {
            let r = ((x - self.x0) / self.l).min(1.0);
            self.c * r.powf(self.beta)
        }
    }

    /// Damping sampled at the grid columns.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.nx).map(|i| self.value(grid.x(i))).collect()
    }
}

pub fn damping_value(x: f64, profile: &DampingProfile) -> f64 {
    profile.value(x)
}

/// Whether the quadratic relaxation terms are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceTerm {
    #[default]
    Full,
    LinearOnly,
}

/// A layer ready for evaluation: parameters plus damping sampled per column.
#[derive(Debug, Clone)]
pub struct Layer {
    pub params: PmlParams,
    pub sigma: Vec<f64>,
}

impl Layer {
    pub fn new(params: PmlParams, profile: &DampingProfile, grid: &Grid) -> Self {
        Self { params, sigma: profile.sample(grid) }
    }
}

/// Nonzero entries `(row, col, value)` of a 6x6 matrix.
fn nonzeros(m: &Matrix6<f64>) -> Vec<(usize, usize, f64)> {
    let mut v = Vec::new();
    for r in 0..NCOEF {
        for c in 0..NCOEF {
            if m[(r, c)] != 0.0 {
                v.push((r, c, m[(r, c)]));
            }
        }
    }
    v
}

/// Spatial operator of the BGK system on a fixed grid and boundary.
#[derive(Debug, Clone)]
pub struct BgkOperator {
    pub consts: ModelConstants,
    pub grid: Grid,
    pub boundary: BoundarySpec,
    pub source: SourceTerm,
    a1: Vec<(usize, usize, f64)>,
    a2: Vec<(usize, usize, f64)>,
}

impl BgkOperator {
    pub fn new(consts: ModelConstants, grid: Grid, boundary: BoundarySpec, source: SourceTerm) -> Result<Self> {
        consts.validate()?;
        boundary.validate()?;
        let (m1, m2) = flux_matrices(&consts)?;
        Ok(Self { consts, grid, boundary, source, a1: nonzeros(&m1), a2: nonzeros(&m2) })
    }

    fn check(&self, state: &ArrayView3<f64>, ncomp: usize) -> Result<()> {
        let (c, nx, ny) = state.dim();
        if c != ncomp {
            return Err(Error::invalid(format!("expected {ncomp} components, got {c}")));
        }
        if (nx, ny) != self.grid.dim() {
            return Err(Error::DimensionMismatch { expected: self.grid.dim(), got: (nx, ny) });
        }
        Ok(())
    }

    fn deriv(&self, f: ArrayView2<f64>, axis: Axis, comp: Component) -> Result<Array2<f64>> {
        let (lo, hi) = rules_for(&self.boundary, axis, comp);
        let f = f.to_owned();
        match axis {
            Axis::X => ddx(&f, &self.grid, lo, hi),
            Axis::Y => ddy(&f, &self.grid, lo, hi),
        }
    }

    fn add_source(&self, a: &ArrayView3<f64>, out: &mut Array3<f64>) -> Result<()> {
        let (nx, ny) = self.grid.dim();
        for i in 0..nx {
            for j in 0..ny {
                let v = CoefficientVector(std::array::from_fn(|c| a[(c, i, j)]));
                let src = match self.source {
                    SourceTerm::LinearOnly => source_linear(&v, &self.consts),
                    SourceTerm::Full => source(&v, &self.consts).map_err(|e| match e {
                        Error::SingularState { a1, .. } => Error::SingularState { a1, i, j },
                        e => e,
                    })?,
                };
                for c in 3..NCOEF {
                    out[(c, i, j)] += src[c];
                }
            }
        }
        Ok(())
    }

    /// Shared kernel. Returns the coefficient tendency and, with a layer,
    /// the auxiliary tendency.
    fn kernel(
        &self,
        a: ArrayView3<f64>,
        layer: Option<(&Layer, ArrayView3<f64>)>,
    ) -> Result<(Array3<f64>, Option<Array3<f64>>)> {
        let (nx, ny) = self.grid.dim();
        let mut dxa = Vec::with_capacity(NCOEF);
        let mut dya = Vec::with_capacity(NCOEF);
        for m in 0..NCOEF {
            dxa.push(self.deriv(a.index_axis(NdAxis(0), m), Axis::X, Component::Coef(m))?);
            dya.push(self.deriv(a.index_axis(NdAxis(0), m), Axis::Y, Component::Coef(m))?);
        }

        // x-flux argument: d/dx a, plus the layer coupling where present
        let gx: Vec<Array2<f64>> = match &layer {
            None => dxa.clone(),
            Some((l, omega)) => {
                let lambda0 = l.params.lambda0;
                (0..NCOEF)
                    .map(|m| {
                        let mut g = dxa[m].clone();
                        for i in 0..nx {
                            let sig = l.sigma[i];
                            for j in 0..ny {
                                g[(i, j)] += sig * (lambda0 * a[(m, i, j)] + omega[(m, i, j)]);
                            }
                        }
                        g
                    })
                    .collect()
            }
        };

        let mut da = Array3::zeros((NCOEF, nx, ny));
        for &(r, c, v) in &self.a1 {
            da.index_axis_mut(NdAxis(0), r).scaled_add(-v, &gx[c]);
        }
        for &(r, c, v) in &self.a2 {
            da.index_axis_mut(NdAxis(0), r).scaled_add(-v, &dya[c]);
        }
        self.add_source(&a, &mut da)?;

        let dw = match layer {
            None => None,
            Some((l, omega)) => {
                let p = l.params;
                let mut dw = Array3::zeros((NCOEF, nx, ny));
                for m in 0..NCOEF {
                    let dyw = if p.alpha1 != 0.0 {
                        Some(self.deriv(omega.index_axis(NdAxis(0), m), Axis::Y, Component::Aux(m))?)
                    } else {
                        None
                    };
                    let mut out = dw.index_axis_mut(NdAxis(0), m);
                    for i in 0..nx {
                        let damp = p.alpha0 + l.sigma[i];
                        for j in 0..ny {
                            let mut t = -damp * omega[(m, i, j)] - dxa[m][(i, j)] - p.lambda0 * damp * a[(m, i, j)]
                                + p.lambda1 * dya[m][(i, j)];
                            if let Some(d) = &dyw {
                                t -= p.alpha1 * d[(i, j)];
                            }
                            out[(i, j)] = t;
                        }
                    }
                }
                Some(dw)
            }
        };
        Ok((da, dw))
    }

    /// Tendency of the plain system for a six-component state.
    pub fn rhs_plain(&self, a: &Array3<f64>) -> Result<Array3<f64>> {
        self.check(&a.view(), NCOEF)?;
        Ok(self.kernel(a.view(), None)?.0)
    }

    /// Tendency of the layered system for a twelve-component state
    /// (coefficients then auxiliary fields).
    pub fn rhs_pml(&self, state: &Array3<f64>, layer: &Layer) -> Result<Array3<f64>> {
        self.check(&state.view(), 2 * NCOEF)?;
        if layer.sigma.len() != self.grid.nx {
            return Err(Error::invalid("damping samples do not match the grid"));
        }
        let a = state.slice(s![0..NCOEF, .., ..]);
        let w = state.slice(s![NCOEF.., .., ..]);
        let (da, dw) = self.kernel(a, Some((layer, w)))?;
        let dw = dw.expect("layer kernel returns auxiliary tendency");
        let mut out = Array3::zeros(state.dim());
        out.slice_mut(s![0..NCOEF, .., ..]).assign(&da);
        out.slice_mut(s![NCOEF.., .., ..]).assign(&dw);
        Ok(out)
    }
}

/// One-shot form of [`BgkOperator::rhs_plain`].
pub fn rhs_plain(
    a: &Array3<f64>,
    consts: &ModelConstants,
    grid: &Grid,
    boundary: &BoundarySpec,
) -> Result<Array3<f64>> {
    BgkOperator::new(*consts, *grid, *boundary, SourceTerm::Full)?.rhs_plain(a)
}

/// One-shot form of [`BgkOperator::rhs_pml`].
pub fn rhs_pml(
    state: &Array3<f64>,
    params: &PmlParams,
    profile: &DampingProfile,
    consts: &ModelConstants,
    grid: &Grid,
    boundary: &BoundarySpec,
) -> Result<Array3<f64>> {
    let op = BgkOperator::new(*consts, *grid, *boundary, SourceTerm::Full)?;
    op.rhs_pml(state, &Layer::new(*params, profile, grid))
}

/// Stacks coefficient fields with zero auxiliary fields.
pub fn with_zero_aux(a: &Array3<f64>) -> Array3<f64> {
    let (c, nx, ny) = a.dim();
    let mut out = Array3::zeros((2 * c, nx, ny));
    out.slice_mut(s![0..c, .., ..]).assign(a);
    out
}

/// Rest state on `grid`.
pub fn rest_state(grid: &Grid) -> Array3<f64> {
    let mut a = Array3::zeros((NCOEF, grid.nx, grid.ny));
    a.index_axis_mut(NdAxis(0), 0).fill(1.0);
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::cfl_dt;
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        Grid::vertex(0.0, 0.0, 1.0, 1.0, 20, 20).unwrap()
    }

    #[test]
    fn profile_values() {
        let g = grid();
        let dt = cfl_dt(&g, &ModelConstants::default(), 1.0).unwrap();
        let p = DampingProfile::new(1.0 / dt, 0.6, 0.4, 4.0).unwrap();
        assert_eq!(damping_value(0.6, &p), 0.0);
        assert_eq!(damping_value(0.1, &p), 0.0);
        assert_abs_diff_eq!(damping_value(1.0, &p), 1.0 / dt, epsilon = 1e-9);
        assert_abs_diff_eq!(damping_value(0.8, &p), 1.0 / dt / 16.0, epsilon = 1e-9);
        assert_eq!(damping_value(5.0, &p), p.c);
        assert!(DampingProfile::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(DampingProfile::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(DampingProfile::new(1.0, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn rest_state_is_equilibrium() {
        let g = grid();
        let a = rest_state(&g);
        let d = rhs_plain(&a, &ModelConstants::default(), &g, &BoundarySpec::walls()).unwrap();
        assert!(d.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_momentum_drives_density() {
        let g = Grid::vertex(0.0, 0.0, 1.0, 1.0, 12, 12).unwrap();
        let consts = ModelConstants::new(2.0, 0.01).unwrap();
        let mut a = rest_state(&g);
        a.index_axis_mut(NdAxis(0), 1).assign(&g.from_fn(|x, _| x));
        let op = BgkOperator::new(consts, g, BoundarySpec::walls(), SourceTerm::Full).unwrap();
        let d = op.rhs_plain(&a).unwrap();
        for i in 2..g.nx - 2 {
            for j in 0..g.ny {
                assert_abs_diff_eq!(d[(0, i, j)], -consts.rt.sqrt(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn plane_wave_matches_symbol_action() {
        let n = 64;
        let g = Grid::periodic(1.0, 1.0, n, n).unwrap();
        let consts = ModelConstants::default();
        let op = BgkOperator::new(consts, g, BoundarySpec::periodic(), SourceTerm::LinearOnly).unwrap();
        let (k1, k2) = (2.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI);
        let v = [0.3, -0.2, 0.5, 0.0, 0.0, 0.0];
        let mut a = Array3::zeros((NCOEF, n, n));
        for (c, vc) in v.iter().enumerate() {
            a.index_axis_mut(NdAxis(0), c).assign(&g.from_fn(|x, y| vc * (k1 * x + k2 * y).sin()));
        }
        let d = op.rhs_plain(&a).unwrap();
        let (m1, m2) = flux_matrices(&consts).unwrap();
        let sym = -(m1 * k1 + m2 * k2);
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let phase = (k1 * g.x(i) + k2 * g.y(j)).cos();
                for r in 0..NCOEF {
                    let want: f64 = (0..NCOEF).map(|c| sym[(r, c)] * v[c]).sum::<f64>() * phase;
                    err = err.max((d[(r, i, j)] - want).abs());
                }
            }
        }
        assert!(err < 2e-3, "{err}");
    }

    fn random_state(g: &Grid, seed: u64, support_max_x: f64) -> Array3<f64> {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(seed);
        let mut st = Array3::zeros((2 * NCOEF, g.nx, g.ny));
        for c in 0..2 * NCOEF {
            for i in 0..g.nx {
                for j in 0..g.ny {
                    let base = if c == 0 { 1.0 } else { 0.0 };
                    let pert = if g.x(i) < support_max_x && c < NCOEF { rng.random_range(-0.1..0.1) } else { 0.0 };
                    st[(c, i, j)] = base + pert;
                }
            }
        }
        st
    }

    #[test]
    fn coefficient_tendency_matches_plain_outside_layer() {
        let g = Grid::vertex(0.0, 0.0, 1.0, 1.0, 24, 16).unwrap();
        let consts = ModelConstants::default();
        let op = BgkOperator::new(consts, g, BoundarySpec::walls(), SourceTerm::Full).unwrap();
        let params = PmlParams { lambda0: 0.7, alpha1: 0.3, lambda1: -0.4, ..PmlParams::default() };
        let profile = DampingProfile::new(50.0, 0.6, 0.4, 2.0).unwrap();
        let layer = Layer::new(params, &profile, &g);
        let st = random_state(&g, 7, 0.5);
        let plain = op.rhs_plain(&st.slice(s![0..NCOEF, .., ..]).to_owned()).unwrap();
        let full = op.rhs_pml(&st, &layer).unwrap();
        for c in 0..NCOEF {
            for i in 0..g.nx {
                if layer.sigma[i] == 0.0 {
                    for j in 0..g.ny {
                        assert_eq!(full[(c, i, j)], plain[(c, i, j)]);
                    }
                }
            }
        }
    }

    #[test]
    fn reduced_aux_equation() {
        let g = Grid::vertex(0.0, 0.0, 1.0, 1.0, 16, 16).unwrap();
        let consts = ModelConstants::default();
        let op = BgkOperator::new(consts, g, BoundarySpec::walls(), SourceTerm::Full).unwrap();
        let profile = DampingProfile::new(20.0, 0.5, 0.5, 4.0).unwrap();
        let layer = Layer::new(PmlParams::default(), &profile, &g);
        let mut st = random_state(&g, 3, 2.0);
        for c in NCOEF..2 * NCOEF {
            st.index_axis_mut(NdAxis(0), c).assign(&g.from_fn(|x, y| (x + 2.0 * y).sin() * 0.1));
        }
        let d = op.rhs_pml(&st, &layer).unwrap();
        for m in 0..NCOEF {
            let (lo, hi) = rules_for(&op.boundary, Axis::X, Component::Coef(m));
            let dx = ddx(&st.index_axis(NdAxis(0), m).to_owned(), &g, lo, hi).unwrap();
            for i in 0..g.nx {
                for j in 0..g.ny {
                    let want = -(1.0 + layer.sigma[i]) * st[(NCOEF + m, i, j)] - dx[(i, j)];
                    assert_abs_diff_eq!(d[(NCOEF + m, i, j)], want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn aux_stays_zero_for_x_uniform_state_without_damping() {
        let g = Grid::vertex(0.0, 0.0, 1.0, 1.0, 12, 12).unwrap();
        let op = BgkOperator::new(ModelConstants::default(), g, BoundarySpec::walls(), SourceTerm::Full).unwrap();
        let mut st = with_zero_aux(&rest_state(&g));
        st.index_axis_mut(NdAxis(0), 0).assign(&g.from_fn(|_, y| 1.0 + 0.1 * y * y));
        let layer = Layer { params: PmlParams::default(), sigma: vec![0.0; g.nx] };
        let d = op.rhs_pml(&st, &layer).unwrap();
        assert!(d.slice(s![NCOEF.., .., ..]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn singular_state_reports_location() {
        let g = grid();
        let mut a = rest_state(&g);
        a[(0, 4, 5)] = 0.0;
        match rhs_plain(&a, &ModelConstants::default(), &g, &BoundarySpec::walls()) {
            Err(Error::SingularState { i, j, .. }) => assert_eq!((i, j), (4, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn warnings_outside_stable_preset() {
        assert!(PmlParams::default().stability_warnings(0.0).is_empty());
        let p = PmlParams { lambda0: 1.0, alpha0: -1.0, ..PmlParams::default() };
        assert_eq!(p.stability_warnings(0.0).len(), 2);
    }
}
