//! Initial coefficient fields of the stock cases.

use ndarray::{Array2, Array3, Axis as NdAxis};

use super::config::{ScenarioCase, ScenarioConfig};
use crate::error::{Error, Result};
use crate::grid::{ddx, ddy, rules_for, Axis, Component, Grid};
use crate::model::{macroscopic_to_coeffs, ns_limit_closure, MacroscopicState, NCOEF};

/// Radially decaying density bump centred in the physical domain, at rest.
pub fn init_gaussian(cfg: &ScenarioConfig, grid: &Grid) -> Result<Array3<f64>> {
    let c = &cfg.scenario;
    if !(c.amplitude >= 0.0) {
        return Err(Error::invalid(format!("pulse amplitude must be non-negative, got {}", c.amplitude)));
    }
    let g = &cfg.grid;
    let xc = g.origin[0] + 0.5 * g.lx;
    let yc = g.origin[1] + 0.5 * g.ly;
    let rho = grid.from_fn(|x, y| 1.0 + 2.0 * c.amplitude * (-c.eps * (x - xc).hypot(y - yc)).exp());
    let mut a = Array3::zeros((NCOEF, grid.nx, grid.ny));
    a.index_axis_mut(NdAxis(0), 0).assign(&rho);
    Ok(a)
}

/// Velocity `(u, v)` and density of the vortex at `(x, y)` and `t = 0`.
pub fn vortex_state(cfg: &ScenarioConfig, x: f64, y: f64) -> (f64, f64, f64) {
    let v = &cfg.scenario.vortex;
    let r2 = (x * x + y * y) / (v.b * v.b);
    // u_r sin θ = (Umax/b) y e^{(1-r²/b²)/2}, and likewise with x for cos θ
    let swirl = v.u_max / v.b * (0.5 * (1.0 - r2)).exp();
    let rho = (1.0 - 0.5 * (v.gamma - 1.0) * v.u_max * v.u_max * (1.0 - r2).exp()).powf(1.0 / (v.gamma - 1.0));
    (v.u0 - swirl * y, v.v0 + swirl * x, rho)
}

/// Advecting isentropic vortex centred at the origin. Stress moments come
/// from the near-equilibrium closure with derivatives taken on `grid`.
pub fn init_vortex(cfg: &ScenarioConfig, grid: &Grid) -> Result<Array3<f64>> {
    let v = &cfg.scenario.vortex;
    if !(v.b > 0.0) || !(v.gamma > 1.0) {
        return Err(Error::invalid("vortex needs b > 0 and an exponent above 1"));
    }
    let consts = cfg.consts();
    let (nx, ny) = grid.dim();
    let mut rho = Array2::zeros((nx, ny));
    let mut u1 = Array2::zeros((nx, ny));
    let mut u2 = Array2::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            let (u, w, r) = vortex_state(cfg, grid.x(i), grid.y(j));
            if !(r > 0.0) {
                return Err(Error::invalid("vortex density is non-positive"));
            }
            rho[(i, j)] = r;
            u1[(i, j)] = u;
            u2[(i, j)] = w;
        }
    }
    let bc = cfg.boundary;
    let d1 = |k: usize, f: &Array2<f64>| {
        let (l, r) = rules_for(&bc, Axis::X, Component::Coef(k));
        ddx(f, grid, l, r)
    };
    let d2 = |k: usize, f: &Array2<f64>| {
        let (b, t) = rules_for(&bc, Axis::Y, Component::Coef(k));
        ddy(f, grid, b, t)
    };
    let stress = ns_limit_closure(&rho, &u1, &u2, &consts, d1, d2)?;
    let mut a = Array3::zeros((NCOEF, nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            let m = MacroscopicState {
                rho: rho[(i, j)],
                u1: u1[(i, j)],
                u2: u2[(i, j)],
                sigma11: 0.0,
                sigma22: 0.0,
                sigma12: 0.0,
                p: consts.rt * rho[(i, j)],
            };
            let c = macroscopic_to_coeffs(&m, &consts)?;
            for k in 0..3 {
                a[(k, i, j)] = c[k];
            }
            for k in 0..3 {
                a[(3 + k, i, j)] = stress[k][(i, j)];
            }
        }
    }
    Ok(a)
}

/// Initial coefficients of the configured case on `grid`.
pub fn initial_state(cfg: &ScenarioConfig, grid: &Grid) -> Result<Array3<f64>> {
    match cfg.scenario.case {
        ScenarioCase::GaussianPulse => init_gaussian(cfg, grid),
        ScenarioCase::IsentropicVortex => init_vortex(cfg, grid),
    }
}
