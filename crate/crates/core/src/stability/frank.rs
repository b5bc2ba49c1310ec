//! Continued-fraction root counting for complex polynomials.
//!
//! Writing `q(iD) = i^n (Q0(D) + i Q1(D))` for a monic `q` of degree `n`,
//! the Euclidean algorithm on `(Q0, Q1)` yields
//! `Q1 / Q0 = 1 / (c1 D + d1 + 1 / (c2 D + d2 + ...))`. Each negative `c_j`
//! accounts for one root in the open left half-plane, each positive one for
//! a root in the right half-plane. Steps that lose more than one degree
//! leave the expansion undefined.

use num_complex::Complex64;
use serde::Serialize;

use super::charpoly::mu4_nu4;
use super::poly::{ComplexPolynomial, RealPolynomial};
use crate::error::{Error, Result};
use crate::pml::PmlParams;

/// Relative drop tolerance for coefficients during division.
pub const DROP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CfExpansion {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub degree: usize,
    /// Index of the step at which the expansion broke down, if any.
    pub undefined_at: Option<usize>,
}

impl CfExpansion {
    pub fn is_defined(&self) -> bool {
        self.undefined_at.is_none()
    }

    /// Number of completed steps `n_r`.
    pub fn steps(&self) -> usize {
        self.c.len()
    }

    pub fn negative(&self) -> usize {
        self.c.iter().filter(|c| **c < 0.0).count()
    }

    pub fn positive(&self) -> usize {
        self.c.iter().filter(|c| **c > 0.0).count()
    }

    /// Roots not accounted for by the expansion (on or near the imaginary
    /// axis, or paired symmetrically about it).
    pub fn unresolved(&self) -> usize {
        self.degree - self.steps()
    }
}

/// Splits `q(iD) = i^n (Q0(D) + i Q1(D))` for monic `q`.
pub fn split_imaginary_axis(q: &ComplexPolynomial) -> Result<(RealPolynomial, RealPolynomial)> {
    let n = q.degree().ok_or_else(|| Error::invalid("zero polynomial"))?;
    let q = q.monic()?;
    let mut q0 = Vec::with_capacity(n + 1);
    let mut q1 = Vec::with_capacity(n + 1);
    for k in 0..=n {
        // i^(k - n) by exact residue
        let w = match (k as i64 - n as i64).rem_euclid(4) {
            0 => q.coeff(k),
            1 => q.coeff(k) * Complex64::new(0.0, 1.0),
            2 => -q.coeff(k),
            _ => q.coeff(k) * Complex64::new(0.0, -1.0),
        };
        q0.push(w.re);
        q1.push(w.im);
    }
    Ok((RealPolynomial::new(q0), RealPolynomial::new(q1)))
}

/// Continued-fraction expansion of `Q1 / Q0` for the polynomial `q`.
pub fn frank_cf(q: &ComplexPolynomial) -> Result<CfExpansion> {
    let n = match q.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::invalid("continued fraction needs degree at least one")),
    };
    let (q0, q1) = split_imaginary_axis(q)?;
    let tol = DROP_TOL * q0.max_abs().max(q1.max_abs());
    let mut a = q0.trimmed(tol).coeffs().to_vec();
    let mut b = q1.trimmed(tol).coeffs().to_vec();
    let mut out = CfExpansion { c: Vec::new(), d: Vec::new(), degree: n, undefined_at: None };

    while !b.is_empty() {
        if a.len() != b.len() + 1 {
            out.undefined_at = Some(out.c.len());
            break;
        }
        let lb = *b.last().expect("nonempty");
        let c = a.last().expect("nonempty") / lb;
        // r = a - c D b, then remove the D^(deg b) term with d
        let mut r = a.clone();
        for (k, bk) in b.iter().enumerate() {
            r[k + 1] -= c * bk;
        }
        r.pop();
        let d = r[b.len() - 1] / lb;
        for (k, bk) in b.iter().enumerate() {
            r[k] -= d * bk;
        }
        r.pop();
        out.c.push(c);
        out.d.push(d);
        let next: Vec<f64> = r.into_iter().map(|v| -v).collect();
        a = std::mem::replace(&mut b, RealPolynomial::new(next).trimmed(tol).coeffs().to_vec());
    }
    Ok(out)
}

fn check_pole(params: &PmlParams, sigma1: f64) -> Result<()> {
    if params.alpha0 + sigma1 == 0.0 {
        return Err(Error::invalid("alpha0 = -sigma1: continued-fraction coefficient is undefined"));
    }
    Ok(())
}

/// First continued-fraction coefficient of `μ4`: `-1 / (2 (α0 + σ1))`.
pub fn c1_closed_form(params: &PmlParams, sigma1: f64) -> Result<f64> {
    check_pole(params, sigma1)?;
    Ok(-1.0 / (2.0 * (params.alpha0 + sigma1)))
}

/// Second continued-fraction coefficient of `μ4` in closed form.
pub fn c2_closed_form(k1: f64, k2: f64, params: &PmlParams, sigma1: f64) -> Result<f64> {
    check_pole(params, sigma1)?;
    let PmlParams { alpha0: a0, lambda0: l0, alpha1: a1, lambda1: l1, .. } = *params;
    let s = sigma1;
    let m = 2.0 * a1 * l0 + l1;
    let den = a0.powi(4) + a0 * (k1 * k1 + 4.0 * a0 * a0 - k1 * k2 * m) * s
        - (a0 * a0 * (l0 * l0 - 6.0) + k1 * k1 * (l0 * l0 - 1.0) + k1 * k2 * m) * s * s
        - 2.0 * a0 * (l0 * l0 - 2.0) * s.powi(3)
        - (l0 * l0 - 1.0) * s.powi(4);
    if den == 0.0 {
        return Err(Error::invalid("second continued-fraction coefficient is undefined"));
    }
    Ok(-2.0 * (a0 + s).powi(3) / den)
}

/// First-order-in-`σ1` denominator `f(k1, k2)` of the second coefficient.
pub fn c2_small_sigma_denominator(k1: f64, k2: f64, params: &PmlParams, sigma1: f64) -> f64 {
    let PmlParams { alpha0: a0, lambda0: l0, alpha1: a1, lambda1: l1, .. } = *params;
    a0.powi(4) + a0 * (k1 * k1 + 4.0 * a0 * a0 - k1 * k2 * (2.0 * a1 * l0 + l1)) * sigma1
}

/// Second coefficient with the denominator truncated to first order in `σ1`.
pub fn c2_small_sigma(k1: f64, k2: f64, params: &PmlParams, sigma1: f64) -> Result<f64> {
    check_pole(params, sigma1)?;
    let den = c2_small_sigma_denominator(k1, k2, params, sigma1);
    if den == 0.0 {
        return Err(Error::invalid("truncated denominator vanishes"));
    }
    Ok(-2.0 * (params.alpha0 + sigma1).powi(3) / den)
}

/// Continued fraction of the `μ4` factor.
pub fn mu4_expansion(k1: f64, k2: f64, params: &PmlParams, sigma1: f64) -> Result<CfExpansion> {
    frank_cf(&mu4_nu4(k1, k2, params, sigma1).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::poly::RootCounts;
    use approx::assert_relative_eq;

    #[test]
    fn textbook_quadratics() {
        let left = frank_cf(&ComplexPolynomial::from_real(&[2.0, 2.0, 1.0])).unwrap();
        assert!(left.is_defined());
        assert_relative_eq!(left.c[0], -0.5, epsilon = 1e-14);
        assert_relative_eq!(left.c[1], -1.0, epsilon = 1e-14);
        assert_eq!(left.negative(), 2);
        let right = frank_cf(&ComplexPolynomial::from_real(&[2.0, -2.0, 1.0])).unwrap();
        assert_eq!(right.c, vec![0.5, 1.0]);
        assert_eq!(right.positive(), 2);
    }

    #[test]
    fn axis_roots_are_unresolved() {
        // z^2 + 1 has both roots on the imaginary axis
        let e = frank_cf(&ComplexPolynomial::from_real(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(e.unresolved(), 2);
        let roots = ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]).roots().unwrap();
        assert_eq!(RootCounts::classify(&roots, 1e-9).on_axis, 2);
    }

    #[test]
    fn mu_first_and_second_coefficients() {
        let p = PmlParams { alpha0: 0.9, lambda0: 0.3, alpha1: -0.4, lambda1: 0.7, ..PmlParams::default() };
        let (k1, k2, s) = (1.2, -0.8, 0.6);
        let e = mu4_expansion(k1, k2, &p, s).unwrap();
        assert_relative_eq!(e.c[0], c1_closed_form(&p, s).unwrap(), max_relative = 1e-10);
        assert_relative_eq!(e.c[1], c2_closed_form(k1, k2, &p, s).unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn small_sigma_denominator_positive_without_lambdas() {
        let p = PmlParams { alpha0: 0.5, ..PmlParams::default() };
        for k1 in [-10.0, -1.0, 0.0, 3.0] {
            for k2 in [-7.0, 0.0, 2.0] {
                assert!(c2_small_sigma_denominator(k1, k2, &p, 0.01) > 0.0);
                assert!(c2_small_sigma(k1, k2, &p, 0.01).unwrap() < 0.0);
            }
        }
        let f0 = c2_small_sigma_denominator(0.0, 3.0, &p, 0.2);
        assert_relative_eq!(f0, 0.5f64.powi(3) * (0.5 + 4.0 * 0.2), max_relative = 1e-14);
    }

    #[test]
    fn pole_is_an_error() {
        let p = PmlParams { alpha0: -0.5, ..PmlParams::default() };
        assert!(c1_closed_form(&p, 0.5).is_err());
        assert!(c2_closed_form(1.0, 1.0, &p, 0.5).is_err());
    }
}
