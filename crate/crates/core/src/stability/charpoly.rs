//! Closed-form factors of the characteristic polynomial for `σ2 = 0`.

use num_complex::Complex64;

use super::poly::ComplexPolynomial;
use crate::pml::PmlParams;

fn c(re: f64, im: f64) -> ComplexPolynomial {
    ComplexPolynomial::constant(Complex64::new(re, im))
}

/// The two quartic factors `(μ4, ν4)` of the characteristic polynomial.
pub fn mu4_nu4(k1: f64, k2: f64, params: &PmlParams, sigma1: f64) -> (ComplexPolynomial, ComplexPolynomial) {
    let PmlParams { alpha0, lambda0, alpha1, lambda1, .. } = *params;
    let z = ComplexPolynomial::z();
    let z2 = z.clone() * z.clone();
    let s = sigma1;
    let m = alpha1 * lambda0 + lambda1;
    let b = ComplexPolynomial::linear(Complex64::new(alpha0, k2 * alpha1));
    let b2 = b.clone() * b.clone();

    let mu = (z2.clone() + c(k1 * k1 + k2 * k2, 0.0)) * b2.clone()
        + b.clone() * (c(k2 * k2 + k1 * k2 * m, 0.0) + z.clone() * (z.clone() - c(0.0, k1 * lambda0))) * (2.0 * s)
        + (z2.clone() * (1.0 - lambda0 * lambda0) - z.clone() * c(0.0, 2.0 * k2 * lambda0 * m)
            + c(k2 * k2 * (1.0 + m * m), 0.0))
            * (s * s);

    let nu = (z2.clone() + c(3.0 * (k1 * k1 + k2 * k2), 0.0)) * b2
        + b * (z.clone() * (z.clone() - c(0.0, 3.0 * k1 * lambda0)) + c(3.0 * k2 * (k2 + k1 * m), 0.0)) * (2.0 * s)
        + (z2 * (1.0 - 3.0 * lambda0 * lambda0) - z * c(0.0, 6.0 * k2 * lambda0 * m)
            + c(3.0 * k2 * k2 * (1.0 + m * m), 0.0))
            * (s * s);
    (mu, nu)
}

/// `z^2 (z + α̃0 + i k1 α̃1)^6 (z + α0 + σ1 + i k2 α1)^2 μ4 ν4`.
pub fn factored_char_poly(k1: f64, k2: f64, params: &PmlParams, sigma1: f64) -> ComplexPolynomial {
    let p = params;
    let z = ComplexPolynomial::z();
    let theta = ComplexPolynomial::linear(Complex64::new(p.alpha0t, k1 * p.alpha1t)).pow(6);
    let omega = ComplexPolynomial::linear(Complex64::new(p.alpha0 + sigma1, k2 * p.alpha1)).pow(2);
    let (mu, nu) = mu4_nu4(k1, k2, params, sigma1);
    z.pow(2) * theta * omega * mu * nu
}
