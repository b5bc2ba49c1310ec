//! Dense polynomials with coefficients in ascending order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

use super::SCHUR_MAX_ITERATIONS;
use crate::error::{Error, Result};

/// Deflation tolerances tried in turn by [`eigenvalues`]. Machine epsilon
/// stalls on clustered spectra such as the repeated `±(α0 + σ1)` blocks.
const SCHUR_TOLERANCES: [f64; 4] = [1e-14, 1e-13, 1e-12, 1e-11];

/// Eigenvalues of a complex matrix, or `None` if no Schur iteration in
/// the tolerance ladder converges.
pub(crate) fn eigenvalues(m: DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    SCHUR_TOLERANCES.iter().find_map(|&eps| {
        let e = m.clone().try_schur(eps, SCHUR_MAX_ITERATIONS)?.eigenvalues()?;
        Some(e.iter().copied().collect())
    })
}

/// Real polynomial `sum_k c[k] x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Drops leading coefficients with magnitude at most `tol`.
    pub fn trimmed(mut self, tol: f64) -> Self {
        while self.coeffs.last().is_some_and(|c| c.abs() <= tol) {
            self.coeffs.pop();
        }
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Complex polynomial `sum_k c[k] z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `z + c`.
    pub fn linear(c: Complex64) -> Self {
        Self::new(vec![c, Complex64::new(1.0, 0.0)])
    }

    /// `prod (z - r)` over the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::from_real(&[1.0]), |p, r| p * Self::linear(-r))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn trimmed(mut self, tol: f64) -> Self {
        while self.coeffs.last().is_some_and(|c| c.norm() <= tol) {
            self.coeffs.pop();
        }
        self
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::default(), |acc, c| acc * z + c)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::from_real(&[1.0]), |p, _| p * self.clone())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Result<Self> {
        let lead = self.leading();
        if lead.norm() == 0.0 {
            return Err(Error::invalid("zero polynomial has no monic form"));
        }
        Ok(self.scale(Complex64::new(1.0, 0.0) / lead))
    }

    /// Roots as eigenvalues of the companion matrix.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return Err(Error::invalid("roots need a polynomial of degree at least one")),
        };
        let p = self.monic()?;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -p.coeff(i);
        }
        eigenvalues(m).ok_or_else(|| Error::invalid("companion eigenvalue solve failed"))
    }

    /// Largest coefficient discrepancy in the scaled variable `z = rho w`,
    /// relative to the largest scaled coefficient of `reference`.
    pub fn scaled_distance(&self, reference: &Self, rho: f64) -> f64 {
        let n = self.coeffs.len().max(reference.coeffs.len());
        let mut diff: f64 = 0.0;
        let mut norm: f64 = 0.0;
        let mut r = 1.0;
        for k in 0..n {
            diff = diff.max((self.coeff(k) - reference.coeff(k)).norm() * r);
            norm = norm.max(reference.coeff(k).norm() * r);
            r *= rho;
        }
        diff / norm
    }
}

impl Add for ComplexPolynomial {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for ComplexPolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ComplexPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for ComplexPolynomial {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Complex64::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

impl Mul<Complex64> for ComplexPolynomial {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<f64> for ComplexPolynomial {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Root counts by half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RootCounts {
    pub left: usize,
    pub right: usize,
    pub on_axis: usize,
}

impl RootCounts {
    /// Classifies roots by the sign of their real part; `|Re| <= tol` counts
    /// as on the axis.
    pub fn classify(roots: &[Complex64], tol: f64) -> Self {
        let mut c = Self::default();
        for r in roots {
            if r.re.abs() <= tol {
                c.on_axis += 1;
            } else if r.re < 0.0 {
                c.left += 1;
            } else {
                c.right += 1;
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arithmetic_and_eval() {
        let p = ComplexPolynomial::from_real(&[1.0, 2.0]);
        let q = ComplexPolynomial::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let pq = p.clone() * q.clone();
        assert_eq!(pq.coeffs(), &[c(0.0, 1.0), c(1.0, 2.0), c(2.0, 0.0)]);
        let z = c(0.3, -1.2);
        assert!((pq.eval(z) - p.eval(z) * q.eval(z)).norm() < 1e-14);
        assert_eq!((p.clone() - p).degree(), None);
        assert_eq!(ComplexPolynomial::z().pow(3).degree(), Some(3));
    }

    #[test]
    fn companion_roots() {
        let roots = [c(-1.0, 1.0), c(-1.0, -1.0), c(2.0, 0.5)];
        let p = ComplexPolynomial::from_roots(&roots);
        let mut found = p.roots().unwrap();
        for r in roots {
            let k = found.iter().enumerate().min_by(|a, b| (a.1 - r).norm().total_cmp(&(b.1 - r).norm())).unwrap().0;
            assert!((found[k] - r).norm() < 1e-10);
            found.remove(k);
        }
        let counts = RootCounts::classify(&p.roots().unwrap(), 1e-9);
        assert_eq!(counts, RootCounts { left: 2, right: 1, on_axis: 0 });
    }

    #[test]
    fn real_trim_and_degree() {
        let p = RealPolynomial::new(vec![1.0, 0.0, 1e-14]).trimmed(1e-12);
        assert_eq!(p.degree(), Some(0));
        assert!(RealPolynomial::new(vec![0.0]).is_zero());
        assert_eq!(RealPolynomial::new(vec![1.0, 2.0, 3.0]).eval(2.0), 17.0);
    }
}
