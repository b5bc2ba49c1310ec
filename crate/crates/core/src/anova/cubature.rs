//! Gauss-Legendre rules on the unit interval and their tensor products.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[0, 1]`, nodes ascending, weights
/// summing to one.
pub fn gauss_legendre_unit(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::invalid("a quadrature rule needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1] and store the symmetric pair
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[n - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The tensor rule `(G_n)^p` on the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureRule {
    pub n: usize,
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CubatureRule {
    pub fn gauss_legendre(n: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("cubature dimension must be positive"));
        }
        let (nodes, weights) = gauss_legendre_unit(n)?;
        Ok(Self { n, dim, nodes, weights })
    }

    /// Number of tensor nodes `n^p`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of flat node `k` (last coordinate fastest).
    pub fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            idx[d] = k % self.n;
            k /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Unit-cube point of a multi-index.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&i| self.nodes[i]).collect()
    }

    /// Product weight of a multi-index.
    pub fn weight(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.weights[i]).product()
    }

    /// `"(G_n)^p"`-style label.
    pub fn label(&self) -> String {
        format!("(G{})^{}", self.n, self.dim)
    }
}
