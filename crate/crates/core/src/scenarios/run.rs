//! Paired runs: the layered system on the physical domain plus layer, and
//! the plain system on a stretched reference domain.

use log::info;
use ndarray::{s, Array2, Array3};

use super::config::ScenarioConfig;
use super::init::initial_state;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::NCOEF;
use crate::pml::{with_zero_aux, BgkOperator, Layer};
use crate::time::{integrate, TimeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    /// Layered system on the physical domain plus the appended layer.
    Pml,
    /// Plain system on the stretched reference domain.
    Reference,
}

/// Coefficient state captured near a requested time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub requested: f64,
    /// Time of the first step at or after `requested`.
    pub time: f64,
    /// Six coefficient fields on the run's full grid.
    pub state: Array3<f64>,
}

/// Recorded output of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub kind: RunKind,
    /// Computational grid of the run.
    pub grid: Grid,
    /// Physical domain, a column prefix of `grid`.
    pub domain: Grid,
    pub probe_column: usize,
    pub dt: f64,
    /// Time of every realised step, starting at zero.
    pub times: Vec<f64>,
    /// `a1` on the probe line per step.
    pub probe_a1: Vec<Vec<f64>>,
    /// Transverse velocity on the probe line per step.
    pub probe_v: Vec<Vec<f64>>,
    /// Times at which domain fields were stored.
    pub field_times: Vec<f64>,
    /// `a1` on the physical domain at `field_times`.
    pub domain_a1: Vec<Array2<f64>>,
    /// Transverse velocity on the physical domain at `field_times`.
    pub domain_v: Vec<Array2<f64>>,
    pub snapshots: Vec<Snapshot>,
}

/// The two runs of a scenario.
#[derive(Debug, Clone)]
pub struct RunPair {
    pub pml: Trajectory,
    pub reference: Trajectory,
}

/// Transverse velocity `a3 sqrt(RT) / a1` of a coefficient block.
fn transverse_velocity(a1: &Array2<f64>, a3: &Array2<f64>, sqrt_rt: f64) -> Array2<f64> {
    let mut v = a3 * sqrt_rt;
    v.zip_mut_with(a1, |v, r| *v /= r);
    v
}

/// Integrates one run, recording probe data every step, domain fields every
/// `probe.field_stride` steps (and at the final step), and snapshots at the
/// first step reaching each of `snap_times`.
pub fn run_single(cfg: &ScenarioConfig, kind: RunKind, snap_times: &[f64]) -> Result<Trajectory> {
    cfg.validate()?;
    let domain = cfg.domain_grid()?;
    let consts = cfg.consts();
    let dt = cfg.dt()?;
    let spec = TimeSpec::new(0.0, cfg.time.t_final, dt)?;
    let total_steps = spec.steps().len();
    let probe_column = cfg.probe_column()?;
    let stride = cfg.probe.field_stride;
    let sqrt_rt = consts.rt.sqrt();
    let nx = domain.nx;

    let (grid, layered) = match kind {
        RunKind::Pml => (cfg.pml_grid()?, cfg.pml.enabled),
        RunKind::Reference => (cfg.reference_grid()?, false),
    };
    let op = BgkOperator::new(consts, grid, cfg.boundary, cfg.model.source)?;
    let a0 = initial_state(cfg, &grid)?;

    let mut snaps: Vec<f64> = snap_times.to_vec();
    snaps.sort_by(f64::total_cmp);
    let mut traj = Trajectory {
        kind,
        grid,
        domain,
        probe_column,
        dt,
        times: Vec::with_capacity(total_steps + 1),
        probe_a1: Vec::with_capacity(total_steps + 1),
        probe_v: Vec::with_capacity(total_steps + 1),
        field_times: Vec::new(),
        domain_a1: Vec::new(),
        domain_v: Vec::new(),
        snapshots: Vec::new(),
    };
    let mut next_snap = 0;
    let mut record = |step: usize, t: f64, state: &Array3<f64>| {
        let a1 = state.slice(s![0, 0..nx, ..]).to_owned();
        let a3 = state.slice(s![2, 0..nx, ..]).to_owned();
        let v = transverse_velocity(&a1, &a3, sqrt_rt);
        traj.times.push(t);
        traj.probe_a1.push(a1.column(probe_column).to_vec());
        traj.probe_v.push(v.column(probe_column).to_vec());
        if step.is_multiple_of(stride) || step == total_steps {
            traj.field_times.push(t);
            traj.domain_a1.push(a1);
            traj.domain_v.push(v);
        }
        while next_snap < snaps.len() && t >= snaps[next_snap] - 1e-9 * dt {
            traj.snapshots.push(Snapshot {
                requested: snaps[next_snap],
                time: t,
                state: state.slice(s![0..NCOEF, .., ..]).to_owned(),
            });
            next_snap += 1;
        }
    };

    info!("{kind:?} run: {}x{} grid, dt = {dt:.6}, {total_steps} steps", grid.nx, grid.ny);
    if layered {
        let layer = Layer::new(cfg.pml_params(), &cfg.damping_profile()?, &grid);
        let min_sigma = layer.sigma.iter().copied().fold(f64::INFINITY, f64::min);
        cfg.pml_params().warn_if_unstable(min_sigma);
        integrate(
            with_zero_aux(&a0),
            &spec,
            |y| op.rhs_pml(y, &layer),
            |info| {
                record(info.step, info.t, info.state);
                Ok(())
            },
        )?;
    } else {
        integrate(
            a0,
            &spec,
            |y| op.rhs_plain(y),
            |info| {
                record(info.step, info.t, info.state);
                Ok(())
            },
        )?;
    }
    Ok(traj)
}

/// Runs the layered and the reference system concurrently with identical
/// time steps. A blow-up in either run aborts the pair.
pub fn run_pair(cfg: &ScenarioConfig, snap_times: &[f64]) -> Result<RunPair> {
    let (pml, reference) =
        rayon::join(|| run_single(cfg, RunKind::Pml, snap_times), || run_single(cfg, RunKind::Reference, snap_times));
    let pair = RunPair { pml: pml?, reference: reference? };
    if pair.pml.times != pair.reference.times {
        return Err(Error::invalid("runs of a pair have misaligned time levels"));
    }
    Ok(pair)
}
