//! Error functionals comparing the layered run with the reference run.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::run::RunPair;
use crate::error::{Error, Result};
use crate::grid::{integrate, trapezoid_weight, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalKind {
    /// Peak normalised line error of `a1`.
    G1,
    /// Time integral of the normalised line error of `a1`.
    G2,
    /// Time integral of the normalised domain error of `a1`.
    G3,
    /// Peak sup-norm error of `v` on the probe line.
    H1,
    /// Time integral of the normalised domain error of `v`.
    H2,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 5] = [Self::G1, Self::G2, Self::G3, Self::H1, Self::H2];

    pub fn name(self) -> &'static str {
        match self {
            Self::G1 => "g1",
            Self::G2 => "g2",
            Self::G3 => "g3",
            Self::H1 => "h1",
            Self::H2 => "h2",
        }
    }
}

impl std::fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FunctionalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown functional `{s}` (expected g1, g2, g3, h1 or h2)")))
    }
}

/// Trapezoid L² norm of a line of samples with spacing `h`.
fn line_norm(values: impl Iterator<Item = f64>, n: usize, h: f64) -> f64 {
    let s: f64 = values.enumerate().map(|(j, d)| trapezoid_weight(j, n) * d * d).sum();
    (s * h).sqrt()
}

fn domain_norm(f: &Array2<f64>, grid: &Grid) -> f64 {
    integrate(&f.mapv(|v| v * v), grid).sqrt()
}

/// Trapezoid rule in time over (possibly non-uniform) samples.
fn time_integral(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1])).sum()
}

fn nonzero(norm: f64, what: &str) -> Result<f64> {
    if norm > 0.0 && norm.is_finite() {
        Ok(norm)
    } else {
        Err(Error::invalid(format!("{what} of the reference initial state is zero; the normalised error is undefined")))
    }
}

/// `(t, err-a1(t))` per realised step: the line L² error of `a1` on the
/// probe line, normalised by the reference `a1` on that line at `t = 0`.
pub fn err_a1_series(pair: &RunPair) -> Result<Vec<(f64, f64)>> {
    let r = &pair.reference;
    let p = &pair.pml;
    let (ny, hy) = (r.domain.ny, r.domain.hy);
    let first = r.probe_a1.first().ok_or_else(|| Error::invalid("no probe data recorded"))?;
    let denom = nonzero(line_norm(first.iter().copied(), ny, hy), "probe-line norm")?;
    Ok(r.times
        .iter()
        .zip(p.probe_a1.iter().zip(&r.probe_a1))
        .map(|(&t, (a, b))| (t, line_norm(a.iter().zip(b).map(|(a, b)| a - b), ny, hy) / denom))
        .collect())
}

/// `(t, max_y |v_pml - v_ref|)` on the probe line per realised step.
pub fn v_probe_series(pair: &RunPair) -> Vec<(f64, f64)> {
    let r = &pair.reference;
    r.times
        .iter()
        .zip(pair.pml.probe_v.iter().zip(&r.probe_v))
        .map(|(&t, (a, b))| (t, a.iter().zip(b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)))
        .collect()
}

/// `(t, ‖f_pml - f_ref‖ / ‖f_ref(0)‖)` over the physical domain at the stored
/// field times, for `a1` (`velocity = false`) or `v`.
pub fn domain_error_series(pair: &RunPair, velocity: bool) -> Result<Vec<(f64, f64)>> {
    let r = &pair.reference;
    let p = &pair.pml;
    let (rf, pf) = if velocity { (&r.domain_v, &p.domain_v) } else { (&r.domain_a1, &p.domain_a1) };
    if rf.is_empty() || rf.len() != pf.len() || r.field_times.first() != Some(&0.0) {
        return Err(Error::invalid("domain fields were not recorded for both runs"));
    }
    let what = if velocity { "domain norm of v" } else { "domain norm of a1" };
    let denom = nonzero(domain_norm(&rf[0], &r.domain), what)?;
    Ok(r.field_times
        .iter()
        .zip(pf.iter().zip(rf))
        .map(|(&t, (a, b))| (t, domain_norm(&(a - b), &r.domain) / denom))
        .collect())
}

fn split(series: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    series.iter().copied().unzip()
}

/// Scalar error functional of a run pair.
pub fn functional(pair: &RunPair, kind: FunctionalKind) -> Result<f64> {
    match kind {
        FunctionalKind::G1 => Ok(err_a1_series(pair)?.iter().map(|p| p.1).fold(0.0, f64::max)),
        FunctionalKind::G2 => {
            let (t, f) = split(&err_a1_series(pair)?);
            Ok(time_integral(&t, &f))
        }
        FunctionalKind::G3 => {
            let (t, f) = split(&domain_error_series(pair, false)?);
            Ok(time_integral(&t, &f))
        }
        FunctionalKind::H1 => Ok(v_probe_series(pair).iter().map(|p| p.1).fold(0.0, f64::max)),
        FunctionalKind::H2 => {
            let (t, f) = split(&domain_error_series(pair, true)?);
            Ok(time_integral(&t, &f))
        }
    }
}

/// Probe series as CSV: `t,err_a1,v_probe_sup,a1_domain,v_domain`. Domain
/// columns are empty at steps without stored fields or when undefined.
pub fn probe_csv(pair: &RunPair) -> Result<String> {
    let err = err_a1_series(pair)?;
    let vp = v_probe_series(pair);
    let da = domain_error_series(pair, false).ok();
    let dv = domain_error_series(pair, true).ok();
    let lookup = |s: &Option<Vec<(f64, f64)>>, t: f64| -> String {
        s.as_ref().and_then(|s| s.iter().find(|p| p.0 == t)).map(|p| format!("{:e}", p.1)).unwrap_or_default()
    };
    let mut out = String::from("t,err_a1,v_probe_sup,a1_domain,v_domain\n");
    for ((t, e), (_, v)) in err.iter().zip(&vp) {
        out.push_str(&format!("{t:e},{e:e},{v:e},{},{}\n", lookup(&da, *t), lookup(&dv, *t)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::config::{ScenarioCase, ScenarioConfig};
    use crate::scenarios::run::run_pair;

    fn identical_pair() -> RunPair {
        let mut cfg = ScenarioConfig::default();
        cfg.pml.enabled = false;
        cfg.reference.stretch = 1.0;
        cfg.time.t_final = 0.2;
        run_pair(&cfg, &[]).unwrap()
    }

    #[test]
    fn identical_runs_give_zero() {
        let p = identical_pair();
        assert!(err_a1_series(&p).unwrap().iter().all(|e| e.1 == 0.0));
        for k in [FunctionalKind::G1, FunctionalKind::G2, FunctionalKind::G3, FunctionalKind::H1] {
            assert_eq!(functional(&p, k).unwrap(), 0.0, "{k}");
        }
        // the pulse starts at rest, so the velocity normalisation is undefined
        assert!(functional(&p, FunctionalKind::H2).is_err());
    }

    #[test]
    fn order_relations() {
        let mut cfg = ScenarioConfig::default();
        cfg.time.t_final = 0.6;
        let p = run_pair(&cfg, &[]).unwrap();
        let series = err_a1_series(&p).unwrap();
        assert_eq!(series[0].1, 0.0);
        let g1 = functional(&p, FunctionalKind::G1).unwrap();
        let g2 = functional(&p, FunctionalKind::G2).unwrap();
        assert!(series.iter().all(|s| s.1 <= g1));
        assert!(g1 > 0.0 && g2 <= 0.6 * g1);
        let csv = probe_csv(&p).unwrap();
        assert_eq!(csv.lines().count(), series.len() + 1);
    }

    #[test]
    fn vortex_normalisation_defined() {
        let mut cfg = ScenarioConfig::preset(ScenarioCase::IsentropicVortex);
        cfg.time.t_final = 0.1;
        let p = run_pair(&cfg, &[]).unwrap();
        assert!(functional(&p, FunctionalKind::H2).unwrap().is_finite());
        assert!(functional(&p, FunctionalKind::H1).unwrap() >= 0.0);
    }

    #[test]
    fn parse_kinds() {
        for k in FunctionalKind::ALL {
            assert_eq!(k.name().parse::<FunctionalKind>().unwrap(), k);
        }
        assert!("g4".parse::<FunctionalKind>().is_err());
    }
}
