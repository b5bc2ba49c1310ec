//! The 18x18 symbol of the layered system and spectral diagnostics.

use nalgebra::{DMatrix, Matrix6};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poly::{eigenvalues, ComplexPolynomial};
use crate::error::{Error, Result};
use crate::model::{flux_matrices, ModelConstants, NCOEF};
use crate::pml::PmlParams;

/// Size of the symbol: coefficients, `ω` and `θ` blocks.
pub const SYMBOL_DIM: usize = 3 * NCOEF;

/// Wave-number lattice `[min, max]^2` with `n` points per direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Default for KGrid {
    fn default() -> Self {
        Self { min: -10.0, max: 10.0, n: 41 }
    }
}

impl KGrid {
    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.min + self.max)],
            n => (0..n).map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64).collect(),
        }
    }

    /// All `(k1, k2)` pairs, `k1` outermost.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let v = self.values();
        v.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).collect()
    }
}

/// Symbol matrix with the data it was built from.
#[derive(Debug, Clone)]
pub struct SymbolMatrix {
    pub matrix: DMatrix<Complex64>,
    pub k1: f64,
    pub k2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub params: PmlParams,
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn put_block(m: &mut DMatrix<Complex64>, bi: usize, bj: usize, block: &Matrix6<Complex64>) {
    for r in 0..NCOEF {
        for c in 0..NCOEF {
            m[(bi * NCOEF + r, bj * NCOEF + c)] = block[(r, c)];
        }
    }
}

/// Assembles the symbol of the two-direction layered system at wave numbers
/// `(k1, k2)` and damping values `(sigma1, sigma2)`.
pub fn assemble_symbol(
    k1: f64,
    k2: f64,
    params: &PmlParams,
    sigma1: f64,
    sigma2: f64,
    consts: &ModelConstants,
) -> Result<SymbolMatrix> {
    let (a1, a2) = flux_matrices(consts)?;
    let a1: Matrix6<Complex64> = a1.map(|v| cplx(v, 0.0));
    let a2: Matrix6<Complex64> = a2.map(|v| cplx(v, 0.0));
    let id = Matrix6::<Complex64>::identity();
    let p = params;

    let coef_coef = a1 * cplx(sigma1 * p.lambda0, k1) + a2 * cplx(sigma2 * p.lambda0t, k2);
    let coef_omega = a1 * cplx(sigma1, 0.0);
    let coef_theta = a2 * cplx(sigma2, 0.0);
    let omega_coef = id * cplx(p.lambda0 * (p.alpha0 + sigma1), k1 - p.lambda1 * k2);
    let omega_omega = id * cplx(p.alpha0 + sigma1, p.alpha1 * k2);
    let theta_coef = id * cplx(p.lambda0t * (p.alpha0t + sigma2), k2 - p.lambda1t * k1);
    let theta_theta = id * cplx(p.alpha0t + sigma2, p.alpha1t * k1);

    let mut m = DMatrix::<Complex64>::zeros(SYMBOL_DIM, SYMBOL_DIM);
    put_block(&mut m, 0, 0, &coef_coef);
    put_block(&mut m, 0, 1, &coef_omega);
    put_block(&mut m, 0, 2, &coef_theta);
    put_block(&mut m, 1, 0, &omega_coef);
    put_block(&mut m, 1, 1, &omega_omega);
    put_block(&mut m, 2, 0, &theta_coef);
    put_block(&mut m, 2, 2, &theta_theta);
    m.neg_mut();
    Ok(SymbolMatrix { matrix: m, k1, k2, sigma1, sigma2, params: *params })
}

impl SymbolMatrix {
    /// Eigenvalues (unordered).
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        eigenvalues(self.matrix.clone()).ok_or_else(|| Error::invalid("symbol eigenvalue solve failed"))
    }

    /// Largest real part of the eigenvalues (Petrovskii quantity).
    pub fn max_real_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re)))
    }

    /// Largest eigenvalue of the Hermitian part `(P + P*) / 2`.
    pub fn hermitian_part_max(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * cplx(0.5, 0.0);
        h.symmetric_eigenvalues().iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    /// `det(zI - P)` via an LU factorisation.
    pub fn char_det(&self, z: Complex64) -> Complex64 {
        let n = self.matrix.nrows();
        let m = DMatrix::<Complex64>::identity(n, n) * z - &self.matrix;
        m.lu().determinant()
    }

    /// Characteristic polynomial `det(zI - P)`, recovered from determinant
    /// samples on the circle `|z| = rho` by a discrete Fourier transform.
    /// The samples are exact interpolation data, so no root finding or
    /// symbolic expansion is involved.
    pub fn characteristic_polynomial(&self, rho: f64) -> ComplexPolynomial {
        let n = self.matrix.nrows();
        let m = n + 1;
        let samples: Vec<Complex64> = (0..m)
            .map(|s| {
                let z = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * s as f64 / m as f64);
                self.char_det(z)
            })
            .collect();
        let coeffs = (0..m)
            .map(|j| {
                let mut acc = Complex64::default();
                for (s, v) in samples.iter().enumerate() {
                    let ang = -2.0 * std::f64::consts::PI * ((j * s) % m) as f64 / m as f64;
                    acc += v * Complex64::from_polar(1.0, ang);
                }
                acc / (m as f64 * rho.powi(j as i32))
            })
            .collect();
        ComplexPolynomial::new(coeffs)
    }

    /// A radius comparable to the spectral radius, used for sampling and for
    /// scaled coefficient comparisons.
    pub fn natural_radius(&self) -> f64 {
        let n = self.matrix.nrows() as f64;
        (self.matrix.norm() / n.sqrt()).max(1.0)
    }
}

/// Worst Hermitian-part eigenvalue over a wave-number lattice. Non-positive
/// values certify energy decay of the frozen-coefficient problem.
pub fn energy_decay_margin(
    params: &PmlParams,
    sigma1: f64,
    sigma2: f64,
    consts: &ModelConstants,
    grid: &KGrid,
) -> Result<f64> {
    let vals = grid
        .points()
        .par_iter()
        .map(|&(k1, k2)| assemble_symbol(k1, k2, params, sigma1, sigma2, consts).map(|s| s.hermitian_part_max()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Largest real part of the symbol eigenvalues over a wave-number lattice.
pub fn petrovskii_bound(
    params: &PmlParams,
    sigma1: f64,
    sigma2: f64,
    consts: &ModelConstants,
    grid: &KGrid,
) -> Result<f64> {
    let vals = grid
        .points()
        .par_iter()
        .map(|&(k1, k2)| assemble_symbol(k1, k2, params, sigma1, sigma2, consts)?.max_real_eigenvalue())
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
