//! Classical RK4 time stepping and the CFL bound.

use log::{debug, info};
use ndarray::{Array, Dimension, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::ModelConstants;

/// Stable explicit step `safety * hx / (2 sqrt(3 RT))`.
pub fn cfl_dt(grid: &Grid, consts: &ModelConstants, safety: f64) -> Result<f64> {
    if !(consts.rt > 0.0) {
        return Err(Error::invalid(format!("RT must be positive, got {}", consts.rt)));
    }
    if !(safety > 0.0 && safety.is_finite()) {
        return Err(Error::invalid(format!("CFL safety must be positive, got {safety}")));
    }
    Ok(safety * grid.hx / (2.0 * (3.0 * consts.rt).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub t0: f64,
    pub t_final: f64,
    pub dt: f64,
}

impl TimeSpec {
    pub fn new(t0: f64, t_final: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        if !(t_final >= t0 && t0.is_finite() && t_final.is_finite()) {
            return Err(Error::invalid(format!("bad time interval [{t0}, {t_final}]")));
        }
        Ok(Self { t0, t_final, dt })
    }

    /// Step sizes taking the solution from `t0` to `t_final`; the last step
    /// is shortened to land exactly on `t_final`.
    pub fn steps(&self) -> Vec<f64> {
        let span = self.t_final - self.t0;
        if span <= 0.0 {
            return Vec::new();
        }
        let full = (span / self.dt * (1.0 - 1e-12)).floor() as usize;
        let mut v = vec![self.dt; full];
        let rest = span - full as f64 * self.dt;
        if rest > 1e-12 * self.dt {
            v.push(rest);
        }
        v
    }
}

/// One classical RK4 step.
pub fn rk4_step<D, F>(y: &Array<f64, D>, dt: f64, rhs: &mut F) -> Result<Array<f64, D>>
where
    D: Dimension,
    F: FnMut(&Array<f64, D>) -> Result<Array<f64, D>>,
{
    let k1 = rhs(y)?;
    let k2 = rhs(&(y + &(&k1 * (0.5 * dt))))?;
    let k3 = rhs(&(y + &(&k2 * (0.5 * dt))))?;
    let k4 = rhs(&(y + &(&k3 * dt)))?;
    let mut out = y.clone();
    let w = dt / 6.0;
    Zip::from(&mut out).and(&k1).and(&k2).and(&k3).and(&k4).for_each(|o, &a, &b, &c, &d| {
        *o += w * (a + 2.0 * b + 2.0 * c + d);
    });
    Ok(out)
}

/// What the observer sees after each accepted step.
pub struct StepInfo<'a, D: Dimension> {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub state: &'a Array<f64, D>,
}

/// Integrates from `spec.t0` to `spec.t_final`. The observer is called once
/// for the initial state (`step = 0`, `dt = 0`) and after every step.
///
/// Any non-finite value, and any singular state met by the right-hand side,
/// aborts with [`Error::BlowUp`] carrying the time of the failing step.
pub fn integrate<D, F, O>(y0: Array<f64, D>, spec: &TimeSpec, mut rhs: F, mut observer: O) -> Result<Array<f64, D>>
where
    D: Dimension,
    F: FnMut(&Array<f64, D>) -> Result<Array<f64, D>>,
    O: FnMut(StepInfo<'_, D>) -> Result<()>,
{
    let mut y = y0;
    let mut t = spec.t0;
    observer(StepInfo { step: 0, t, dt: 0.0, state: &y })?;
    let steps = spec.steps();
    let n = steps.len();
    let report_every = (n / 10).max(1);
    for (k, dt) in steps.into_iter().enumerate() {
        let t_next = if k + 1 == n { spec.t_final } else { t + dt };
        y = match rk4_step(&y, dt, &mut rhs) {
            Ok(y) => y,
            Err(Error::SingularState { a1, i, j }) => {
                return Err(Error::BlowUp { time: t_next, reason: format!("singular state a1 = {a1} at ({i}, {j})") })
            }
            Err(e) => return Err(e),
        };
        t = t_next;
        if let Some(v) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::BlowUp { time: t, reason: format!("non-finite value {v}") });
        }
        if (k + 1) % report_every == 0 || k + 1 == n {
            let max = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            debug!("step {} t = {t:.6} max|y| = {max:.6e}", k + 1);
        }
        observer(StepInfo { step: k + 1, t, dt, state: &y })?;
    }
    info!("integrated {n} steps to t = {t:.6}");
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{arr1, Array1};

    #[test]
    fn cfl_examples() {
        let c = ModelConstants::default();
        let g = Grid::vertex(0.0, 0.0, 1.0, 1.0, 20, 20).unwrap();
        assert_abs_diff_eq!(cfl_dt(&g, &c, 1.0).unwrap(), 1.0 / (38.0 * 3f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(cfl_dt(&g, &c, 1.0).unwrap(), 0.015193, epsilon = 1e-6);
        let g = Grid::vertex(-1.0, -1.0, 2.0, 2.0, 21, 21).unwrap();
        assert_abs_diff_eq!(cfl_dt(&g, &c, 1.0).unwrap(), 0.028868, epsilon = 1e-6);
        assert_eq!(cfl_dt(&g, &c, 0.5).unwrap(), 0.5 * cfl_dt(&g, &c, 1.0).unwrap());
        assert!(cfl_dt(&g, &c, 0.0).is_err());
    }

    #[test]
    fn zero_rhs_keeps_state() {
        let y = arr1(&[1.0, -2.0, 3.5]);
        let out = rk4_step(&y, 0.3, &mut |v: &Array1<f64>| Ok(Array1::zeros(v.len()))).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn decay_single_step() {
        let y = arr1(&[1.0]);
        let out = rk4_step(&y, 0.1, &mut |v: &Array1<f64>| Ok(-v)).unwrap();
        assert_abs_diff_eq!(out[0], 0.9048375, epsilon = 1e-7);
        assert_abs_diff_eq!(out[0], 1.0 - 0.1 + 0.005 - 1e-3 / 6.0 + 1e-4 / 24.0, epsilon = 1e-15);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |dt: f64| {
            let spec = TimeSpec::new(0.0, 1.0, dt).unwrap();
            let y = integrate(arr1(&[1.0]), &spec, |v| Ok(-v), |_| Ok(())).unwrap();
            (y[0] - (-1.0f64).exp()).abs()
        };
        let e: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|&d| err(d)).collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).log2() >= 3.8, "{e:?}");
        }
    }

    #[test]
    fn final_step_is_shortened() {
        let spec = TimeSpec::new(0.0, 1.0, 0.3).unwrap();
        let s = spec.steps();
        assert_eq!(s.len(), 4);
        assert_abs_diff_eq!(s[3], 0.1, epsilon = 1e-12);
        let spec = TimeSpec::new(0.0, 1.0, 0.25).unwrap();
        assert_eq!(spec.steps(), vec![0.25; 4]);
        let mut last = 0.0;
        integrate(
            arr1(&[0.0]),
            &spec,
            |v| Ok(v.clone()),
            |s| {
                last = s.t;
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(last, 1.0);
    }

    #[test]
    fn blow_up_is_detected() {
        let spec = TimeSpec::new(0.0, 10.0, 1.0).unwrap();
        let r = integrate(arr1(&[1.0]), &spec, |v| Ok(v.mapv(|x| x * x * 1e100)), |_| Ok(()));
        match r {
            Err(Error::BlowUp { time, .. }) => assert!(time > 0.0 && time <= 10.0),
            other => panic!("{other:?}"),
        }
    }
}
