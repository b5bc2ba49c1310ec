//! The six-moment Hermite expansion of the BGK equation.
//!
//! The state is the coefficient vector `a = (a1, .., a6)` of the expansion of
//! the distribution function in second-order Hermite polynomials. It obeys the
//! symmetric hyperbolic system
//!
//! ```text
//! da/dt + A1 da/dx1 + A2 da/dx2 = S(a)
//! ```
//!
//! with a relaxation source acting on the stress moments `a4..a6` only.

use nalgebra::{Matrix6, SymmetricEigen};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Number of Hermite coefficients in two space dimensions.
pub const NCOEF: usize = 6;

/// Gas constant times temperature (`RT`) and the relaxation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    #[serde(rename = "RT")]
    pub rt: f64,
    pub tau: f64,
}

impl Default for ModelConstants {
    fn default() -> Self {
        Self { rt: 1.0, tau: 0.01 }
    }
}

impl ModelConstants {
    pub fn new(rt: f64, tau: f64) -> Result<Self> {
        let c = Self { rt, tau };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rt > 0.0 && self.rt.is_finite()) {
            return Err(Error::invalid(format!("RT must be positive, got {}", self.rt)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(format!("tau must be positive, got {}", self.tau)));
        }
        Ok(())
    }

    /// Largest characteristic speed, `sqrt(3 RT)`.
    pub fn max_speed(&self) -> f64 {
        (3.0 * self.rt).sqrt()
    }
}

/// Hermite coefficients at one point; `a[0]` is the density.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoefficientVector(pub [f64; NCOEF]);

impl CoefficientVector {
    pub const REST: CoefficientVector = CoefficientVector([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    pub fn density(&self) -> f64 {
        self.0[0]
    }
}

impl std::ops::Index<usize> for CoefficientVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Density, velocity, stress components and scalar pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroscopicState {
    pub rho: f64,
    pub u1: f64,
    pub u2: f64,
    pub sigma11: f64,
    pub sigma22: f64,
    pub sigma12: f64,
    pub p: f64,
}

/// The flux matrices `(A1, A2)`.
pub fn flux_matrices(consts: &ModelConstants) -> Result<(Matrix6<f64>, Matrix6<f64>)> {
    if !(consts.rt > 0.0) {
        return Err(Error::invalid(format!("RT must be positive, got {}", consts.rt)));
    }
    let c = consts.rt.sqrt();
    let mut a1 = Matrix6::zeros();
    let mut a2 = Matrix6::zeros();
    let sym = |m: &mut Matrix6<f64>, i: usize, j: usize, v: f64| {
        m[(i, j)] = v * c;
        m[(j, i)] = v * c;
    };
    sym(&mut a1, 0, 1, 1.0);
    sym(&mut a1, 1, 4, SQRT_2);
    sym(&mut a1, 2, 3, 1.0);
    sym(&mut a2, 0, 2, 1.0);
    sym(&mut a2, 1, 3, 1.0);
    sym(&mut a2, 2, 5, SQRT_2);
    Ok((a1, a2))
}

/// Linear part `S_L(a)` of the relaxation source.
pub fn source_linear(a: &CoefficientVector, consts: &ModelConstants) -> CoefficientVector {
    let k = -1.0 / consts.tau;
    CoefficientVector([0.0, 0.0, 0.0, k * a[3], k * a[4], k * a[5]])
}

/// Nonlinear part `S_NL(a)` of the relaxation source.
pub fn source_nonlinear(a: &CoefficientVector, consts: &ModelConstants) -> Result<CoefficientVector> {
    let a1 = a[0];
    if a1 == 0.0 || !a1.is_finite() {
        return Err(Error::SingularState { a1, i: 0, j: 0 });
    }
    let k = 1.0 / consts.tau;
    Ok(CoefficientVector([
        0.0,
        0.0,
        0.0,
        k * a[1] * a[2] / a1,
        k * a[1] * a[1] / (SQRT_2 * a1),
        k * a[2] * a[2] / (SQRT_2 * a1),
    ]))
}

/// Full relaxation source `S(a) = S_L(a) + S_NL(a)`.
pub fn source(a: &CoefficientVector, consts: &ModelConstants) -> Result<CoefficientVector> {
    let a1 = a[0];
    if a1 == 0.0 || !a1.is_finite() {
        return Err(Error::SingularState { a1, i: 0, j: 0 });
    }
    let k = -1.0 / consts.tau;
    Ok(CoefficientVector([
        0.0,
        0.0,
        0.0,
        k * (a[3] - a[1] * a[2] / a1),
        k * (a[4] - a[1] * a[1] / (SQRT_2 * a1)),
        k * (a[5] - a[2] * a[2] / (SQRT_2 * a1)),
    ]))
}

/// Principal part `P1(n) = -(n1 A1 + n2 A2)`.
pub fn principal_symbol(n: [f64; 2], consts: &ModelConstants) -> Result<Matrix6<f64>> {
    let (a1, a2) = flux_matrices(consts)?;
    Ok(-(a1 * n[0] + a2 * n[1]))
}

/// Eigenvalues of `P1(n)` in ascending order.
///
/// `P1(n)` is real symmetric, so these are computed with a symmetric
/// eigensolver; the closed form is `{0, 0, ±sqrt(RT)|n|, ±sqrt(3RT)|n|}`.
pub fn principal_symbol_eigenvalues(n: [f64; 2], consts: &ModelConstants) -> Result<[f64; 6]> {
    let p1 = principal_symbol(n, consts)?;
    let eig = SymmetricEigen::new(p1);
    let mut out = [0.0; 6];
    out.copy_from_slice(eig.eigenvalues.as_slice());
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

pub fn coeffs_to_macroscopic(a: &CoefficientVector, consts: &ModelConstants) -> Result<MacroscopicState> {
    let rho = a[0];
    if !(rho > 0.0) {
        return Err(Error::SingularState { a1: rho, i: 0, j: 0 });
    }
    let rt = consts.rt;
    let srt = rt.sqrt();
    Ok(MacroscopicState {
        rho,
        u1: a[1] * srt / rho,
        u2: a[2] * srt / rho,
        sigma11: -rt * (SQRT_2 * a[4] - a[1] * a[1] / rho),
        sigma22: -rt * (SQRT_2 * a[5] - a[2] * a[2] / rho),
        sigma12: -rt * (a[3] - a[1] * a[2] / rho),
        p: rt * rho,
    })
}

pub fn macroscopic_to_coeffs(m: &MacroscopicState, consts: &ModelConstants) -> Result<CoefficientVector> {
    if !(m.rho > 0.0) {
        return Err(Error::invalid(format!("density must be positive, got {}", m.rho)));
    }
    let rt = consts.rt;
    let srt = rt.sqrt();
    let rho = m.rho;
    Ok(CoefficientVector([
        rho,
        m.u1 * rho / srt,
        m.u2 * rho / srt,
        (m.u1 * m.u2 * rho - m.sigma12) / rt,
        0.5 * SQRT_2 * (m.u1 * m.u1 * rho - m.sigma11) / rt,
        0.5 * SQRT_2 * (m.u2 * m.u2 * rho - m.sigma22) / rt,
    ]))
}

/// Stress moments `(a4, a5, a6)` of a weakly compressible flow, from density
/// and velocity fields.
///
/// `d1` and `d2` differentiate a momentum field in `x1` and `x2`; the
/// first argument says which momentum component is passed (1 or 2), so the
/// provider can apply the matching boundary parity.
pub fn ns_limit_closure<D1, D2>(
    rho: &Array2<f64>,
    u1: &Array2<f64>,
    u2: &Array2<f64>,
    consts: &ModelConstants,
    d1: D1,
    d2: D2,
) -> Result<[Array2<f64>; 3]>
where
    D1: Fn(usize, &Array2<f64>) -> Result<Array2<f64>>,
    D2: Fn(usize, &Array2<f64>) -> Result<Array2<f64>>,
{
    if rho.dim() != u1.dim() || rho.dim() != u2.dim() {
        let got = if rho.dim() != u1.dim() { u1.dim() } else { u2.dim() };
        return Err(Error::DimensionMismatch { expected: rho.dim(), got });
    }
    let m1 = rho * u1;
    let m2 = rho * u2;
    let d1m1 = d1(1, &m1)?;
    let d1m2 = d1(2, &m2)?;
    let d2m1 = d2(1, &m1)?;
    let d2m2 = d2(2, &m2)?;
    let tau = consts.tau;
    let rt = consts.rt;

    let mut a4 = Array2::zeros(rho.dim());
    let mut a5 = Array2::zeros(rho.dim());
    let mut a6 = Array2::zeros(rho.dim());
    ndarray::Zip::indexed(&mut a4).for_each(|(i, j), v| {
        *v = -tau * (d1m2[(i, j)] + d2m1[(i, j)]) + u1[(i, j)] * u2[(i, j)] * rho[(i, j)] / rt;
    });
    ndarray::Zip::indexed(&mut a5).for_each(|(i, j), v| {
        *v = -tau * SQRT_2 * d1m1[(i, j)] + u1[(i, j)].powi(2) * rho[(i, j)] / (SQRT_2 * rt);
    });
    ndarray::Zip::indexed(&mut a6).for_each(|(i, j), v| {
        *v = -tau * SQRT_2 * d2m2[(i, j)] + u2[(i, j)].powi(2) * rho[(i, j)] / (SQRT_2 * rt);
    });
    Ok([a4, a5, a6])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit() -> ModelConstants {
        ModelConstants { rt: 1.0, tau: 1.0 }
    }

    #[test]
    fn flux_matrix_entries() {
        let (a1, a2) = flux_matrices(&unit()).unwrap();
        assert_eq!(a1[(0, 1)], 1.0);
        assert_eq!(a1[(1, 4)], SQRT_2);
        assert_eq!(a2[(2, 5)], SQRT_2);
        assert_eq!(a1, a1.transpose());
        assert_eq!(a2, a2.transpose());
        assert_eq!(a1.iter().filter(|v| **v != 0.0).count(), 6);
        assert_eq!(a2.iter().filter(|v| **v != 0.0).count(), 6);
    }

    #[test]
    fn flux_matrices_scale_with_sqrt_rt() {
        let (a1, a2) = flux_matrices(&unit()).unwrap();
        let (b1, b2) = flux_matrices(&ModelConstants { rt: 4.0, tau: 1.0 }).unwrap();
        assert_eq!(b1, a1 * 2.0);
        assert_eq!(b2, a2 * 2.0);
    }

    #[test]
    fn flux_matrices_reject_nonpositive_rt() {
        assert!(flux_matrices(&ModelConstants { rt: 0.0, tau: 1.0 }).is_err());
        assert!(flux_matrices(&ModelConstants { rt: -1.0, tau: 1.0 }).is_err());
    }

    #[test]
    fn source_examples() {
        let s = source(&CoefficientVector::REST, &unit()).unwrap();
        assert_eq!(s.0, [0.0; 6]);

        let s = source(&CoefficientVector([1.0; 6]), &unit()).unwrap();
        let e = -(1.0 - 1.0 / SQRT_2);
        assert_abs_diff_eq!(s.0[3], 0.0);
        assert_abs_diff_eq!(s.0[4], e, epsilon = 1e-15);
        assert_abs_diff_eq!(s.0[5], e, epsilon = 1e-15);
        assert_eq!(&s.0[..3], &[0.0; 3]);
    }

    #[test]
    fn source_split_sums_to_source() {
        let a = CoefficientVector([1.3, 0.2, -0.4, 0.7, 0.1, -0.3]);
        let c = ModelConstants { rt: 1.0, tau: 0.05 };
        let s = source(&a, &c).unwrap();
        let l = source_linear(&a, &c);
        let n = source_nonlinear(&a, &c).unwrap();
        for k in 0..6 {
            assert_abs_diff_eq!(s[k], l[k] + n[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn source_rejects_zero_density() {
        let a = CoefficientVector([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(source(&a, &unit()), Err(Error::SingularState { .. })));
    }

    #[test]
    fn eigenvalue_examples() {
        let s3 = 3f64.sqrt();
        let ev = principal_symbol_eigenvalues([1.0, 0.0], &unit()).unwrap();
        let want = [-s3, -1.0, 0.0, 0.0, 1.0, s3];
        for (a, b) in ev.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let ev = principal_symbol_eigenvalues([0.0, 0.0], &unit()).unwrap();
        assert_eq!(ev, [0.0; 6]);
        let ev = principal_symbol_eigenvalues([3.0, 4.0], &unit()).unwrap();
        let want = [-5.0 * s3, -5.0, 0.0, 0.0, 5.0, 5.0 * s3];
        for (a, b) in ev.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-11);
        }
    }

    #[test]
    fn macroscopic_examples() {
        let m = coeffs_to_macroscopic(&CoefficientVector::REST, &unit()).unwrap();
        assert_eq!((m.rho, m.u1, m.u2, m.sigma11, m.sigma22, m.sigma12), (1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(m.p, 1.0);

        let m = coeffs_to_macroscopic(&CoefficientVector([2.0, 2.0, 0.0, 0.0, SQRT_2, 0.0]), &unit()).unwrap();
        assert_eq!(m.rho, 2.0);
        assert_eq!(m.u1, 1.0);
        assert_abs_diff_eq!(m.sigma11, 0.0, epsilon = 1e-15);

        let a = macroscopic_to_coeffs(
            &MacroscopicState { rho: 1.0, u1: 1.0, u2: 0.0, sigma11: 0.0, sigma22: 0.0, sigma12: 0.0, p: 1.0 },
            &unit(),
        )
        .unwrap();
        assert_abs_diff_eq!(a[4], SQRT_2 / 2.0, epsilon = 1e-15);
        assert_eq!(&a.0[..4], &[1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn conversions_reject_nonpositive_density() {
        assert!(coeffs_to_macroscopic(&CoefficientVector([0.0; 6]), &unit()).is_err());
        let m = MacroscopicState { rho: -1.0, u1: 0.0, u2: 0.0, sigma11: 0.0, sigma22: 0.0, sigma12: 0.0, p: 0.0 };
        assert!(macroscopic_to_coeffs(&m, &unit()).is_err());
    }

    #[test]
    fn closure_uniform_flow_has_no_gradient_terms() {
        let rho = Array2::from_elem((4, 4), 1.2);
        let u1 = Array2::from_elem((4, 4), 0.3);
        let u2 = Array2::from_elem((4, 4), -0.2);
        let zero = |_: usize, f: &Array2<f64>| Ok(Array2::zeros(f.dim()));
        let c = ModelConstants { rt: 1.0, tau: 0.1 };
        let [a4, a5, a6] = ns_limit_closure(&rho, &u1, &u2, &c, zero, zero).unwrap();
        assert_abs_diff_eq!(a4[(1, 1)], 0.3 * -0.2 * 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(a5[(1, 1)], 0.09 * 1.2 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(a6[(2, 3)], 0.04 * 1.2 / SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn closure_linear_momentum_gradient() {
        // rho*u1 = x1 on a unit-spaced line, u2 = 0: the a5 gradient term is -tau*sqrt(2).
        let n = 5;
        let rho = Array2::from_elem((n, n), 1.0);
        let u1 = Array2::from_shape_fn((n, n), |(i, _)| i as f64);
        let u2 = Array2::zeros((n, n));
        // exact derivative of the linear field rho*u1; rho*u2 vanishes
        let d1 = |c: usize, f: &Array2<f64>| Ok(Array2::from_elem(f.dim(), if c == 1 { 1.0 } else { 0.0 }));
        let d2 = |_: usize, f: &Array2<f64>| Ok(Array2::zeros(f.dim()));
        let tau = 0.25;
        let c = ModelConstants { rt: 1.0, tau };
        let [_, a5, _] = ns_limit_closure(&rho, &u1, &u2, &c, d1, d2).unwrap();
        for i in 0..n {
            let inviscid = (i as f64).powi(2) / SQRT_2;
            assert_abs_diff_eq!(a5[(i, 2)] - inviscid, -tau * SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn closure_reduces_to_inviscid_when_tau_vanishes() {
        let rho = Array2::from_shape_fn((3, 3), |(i, j)| 1.0 + 0.1 * (i + j) as f64);
        let u1 = Array2::from_shape_fn((3, 3), |(i, _)| 0.1 * i as f64);
        let u2 = Array2::from_shape_fn((3, 3), |(_, j)| -0.2 * j as f64);
        let ones = |_: usize, f: &Array2<f64>| Ok(Array2::from_elem(f.dim(), 7.0));
        let c = ModelConstants { rt: 2.0, tau: 0.0 };
        let [a4, a5, a6] = ns_limit_closure(&rho, &u1, &u2, &c, ones, ones).unwrap();
        for ((i, j), _) in rho.indexed_iter() {
            let (r, x, y) = (rho[(i, j)], u1[(i, j)], u2[(i, j)]);
            assert_eq!(a4[(i, j)], x * y * r / 2.0);
            assert_eq!(a5[(i, j)], x * x * r / (SQRT_2 * 2.0));
            assert_eq!(a6[(i, j)], y * y * r / (SQRT_2 * 2.0));
        }
    }
}
