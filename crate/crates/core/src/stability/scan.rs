//! Lattice scans of the stability indicators.

use ndarray::Array2;

use super::frank::c2_small_sigma_denominator;
use super::symbol::KGrid;
use crate::error::{Error, Result};
use crate::pml::PmlParams;

#[derive(Debug, Clone)]
pub struct InstabilityScan {
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    /// `f(k1, k2)` indexed `[i1, i2]`.
    pub denominator: Array2<f64>,
    /// Boundary curve `k2(k1)` of the region `f < 0`, where defined.
    pub boundary: Vec<(f64, Option<f64>)>,
}

impl InstabilityScan {
    /// Number of lattice points with `f < 0`.
    pub fn unstable_points(&self) -> usize {
        self.denominator.iter().filter(|v| **v < 0.0).count()
    }

    /// Rows `k1,k2,f,sign` as CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k1,k2,f,sign\n");
        for (i, a) in self.k1.iter().enumerate() {
            for (j, b) in self.k2.iter().enumerate() {
                let f = self.denominator[(i, j)];
                s.push_str(&format!("{a},{b},{f:e},{}\n", f.signum() as i32));
            }
        }
        s
    }
}

/// `k2` on the curve `f(k1, k2) = 0`, if the coupling term is nonzero.
pub fn instability_boundary(k1: f64, params: &PmlParams, sigma1: f64) -> Option<f64> {
    let PmlParams { alpha0: a0, lambda0: l0, alpha1: a1, lambda1: l1, .. } = *params;
    let den = (2.0 * a1 * l0 + l1) * k1 * sigma1;
    if den == 0.0 {
        return None;
    }
    Some((a0.powi(3) + (4.0 * a0 * a0 + k1 * k1) * sigma1) / den)
}

/// Evaluates the small-`σ1` denominator of the second continued-fraction
/// coefficient on a lattice. Negative values mark potential instability.
pub fn instability_region_scan(params: &PmlParams, sigma1: f64, grid: &KGrid) -> Result<InstabilityScan> {
    if params.alpha0 == 0.0 {
        return Err(Error::invalid("alpha0 must be nonzero for the instability scan"));
    }
    let k = grid.values();
    let denominator =
        Array2::from_shape_fn((k.len(), k.len()), |(i, j)| c2_small_sigma_denominator(k[i], k[j], params, sigma1));
    let boundary = k.iter().map(|&a| (a, instability_boundary(a, params, sigma1))).collect();
    Ok(InstabilityScan { k1: k.clone(), k2: k, denominator, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_instability_without_lambdas() {
        let p = PmlParams::default();
        let s = instability_region_scan(&p, 0.5, &KGrid::default()).unwrap();
        assert_eq!(s.unstable_points(), 0);
        assert!(s.boundary.iter().all(|(_, b)| b.is_none()));
    }

    #[test]
    fn sign_changes_across_boundary() {
        let p = PmlParams { lambda1: 1.0, ..PmlParams::default() };
        let sigma = 0.5;
        for k1 in [-3.0, -0.5, 0.7, 2.0, 6.0] {
            let k2 = instability_boundary(k1, &p, sigma).unwrap();
            assert!(c2_small_sigma_denominator(k1, k2, &p, sigma).abs() < 1e-10 * (1.0 + k2.abs() * k1.abs()));
            let below = c2_small_sigma_denominator(k1, k2 - 0.1 * k1.signum(), &p, sigma);
            let above = c2_small_sigma_denominator(k1, k2 + 0.1 * k1.signum(), &p, sigma);
            assert!(below > 0.0 && above < 0.0, "{k1}: {below} {above}");
        }
        let s = instability_region_scan(&p, sigma, &KGrid::default()).unwrap();
        assert!(s.unstable_points() > 0);
    }

    #[test]
    fn point_symmetric() {
        let p = PmlParams { lambda0: 0.4, alpha1: 1.5, lambda1: -0.3, ..PmlParams::default() };
        let s = instability_region_scan(&p, 0.8, &KGrid::default()).unwrap();
        let n = s.k1.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(s.denominator[(i, j)], s.denominator[(n - 1 - i, n - 1 - j)]);
            }
        }
    }
}
