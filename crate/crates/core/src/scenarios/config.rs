//! Scenario configuration: TOML schema, case presets and derived quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoundarySpec, BoundaryTag, Grid};
use crate::model::ModelConstants;
use crate::pml::{DampingProfile, PmlParams, SourceTerm};
use crate::time::cfl_dt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioCase {
    #[default]
    GaussianPulse,
    IsentropicVortex,
}

impl std::fmt::Display for ScenarioCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScenarioCase::GaussianPulse => "gaussian-pulse",
            ScenarioCase::IsentropicVortex => "isentropic-vortex",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(rename = "RT")]
    pub rt: f64,
    pub tau: f64,
    pub source: SourceTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    /// Lower-left corner of the physical domain.
    pub origin: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AutoTag {
    Auto,
}

/// Damping strength at the outer edge of the layer: `1/dt` or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DampingStrength {
    #[serde(with = "auto_tag")]
    Auto,
    Fixed(f64),
}

mod auto_tag {
    use super::AutoTag;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        AutoTag::Auto.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        AutoTag::deserialize(d).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmlSection {
    pub enabled: bool,
    pub alpha0: f64,
    pub lambda0: f64,
    pub alpha1: f64,
    pub lambda1: f64,
    #[serde(rename = "L")]
    pub thickness: f64,
    pub beta: f64,
    #[serde(rename = "Cmode")]
    pub strength: DampingStrength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(rename = "T")]
    pub t_final: f64,
    /// Fraction of the CFL bound used when `dt` is absent.
    pub safety: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexParams {
    #[serde(rename = "U0")]
    pub u0: f64,
    #[serde(rename = "V0")]
    pub v0: f64,
    #[serde(rename = "Umax")]
    pub u_max: f64,
    pub b: f64,
    /// Isentropic exponent of the density profile.
    pub gamma: f64,
}

impl Default for VortexParams {
    fn default() -> Self {
        Self { u0: 0.5, v0: 0.0, u_max: 0.25, b: 0.2, gamma: 1.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub case: ScenarioCase,
    /// Pressure excess of the pulse.
    pub amplitude: f64,
    /// Radial decay rate of the pulse.
    pub eps: f64,
    pub vortex: VortexParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    /// Abscissa of the probe line; defaults to the last interior grid line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_star: Option<f64>,
    /// Domain-wide fields are stored every `field_stride` steps.
    pub field_stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    /// Reference length in x as a multiple of the physical length.
    pub stretch: f64,
}

/// Complete description of one simulation pair.
///
/// The PML run covers the physical domain plus a layer appended on its
/// right; the reference run covers the physical domain stretched to the
/// right. `boundary.right` applies to the outer right edge of either run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub pml: PmlSection,
    pub time: TimeSection,
    pub scenario: CaseSection,
    pub probe: ProbeSection,
    pub reference: ReferenceSection,
    pub boundary: BoundarySpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::preset(ScenarioCase::GaussianPulse)
    }
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config { key: key.into(), message: message.into() }
}

/// Overlays `user` on `base`, recursing into tables.
fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

impl ScenarioConfig {
    /// Stock set-up of a case.
    pub fn preset(case: ScenarioCase) -> Self {
        match case {
            ScenarioCase::GaussianPulse => Self {
                model: ModelSection { rt: 1.0, tau: 0.01, source: SourceTerm::Full },
                grid: GridSection { nx: 20, ny: 20, lx: 1.0, ly: 1.0, origin: [0.0, 0.0] },
                pml: PmlSection {
                    enabled: true,
                    alpha0: 1.0,
                    lambda0: 0.0,
                    alpha1: 0.0,
                    lambda1: 0.0,
                    thickness: 0.4,
                    beta: 4.0,
                    strength: DampingStrength::Auto,
                },
                time: TimeSection { t_final: 1.0, safety: 0.9, dt: None },
                scenario: CaseSection { case, amplitude: 0.05, eps: 10.0, vortex: VortexParams::default() },
                probe: ProbeSection { x_star: None, field_stride: 1 },
                reference: ReferenceSection { stretch: 2.5 },
                boundary: BoundarySpec { right: BoundaryTag::PmlBacked, ..BoundarySpec::walls() },
            },
            ScenarioCase::IsentropicVortex => Self {
                model: ModelSection { rt: 1.0, tau: 0.01, source: SourceTerm::Full },
                grid: GridSection { nx: 21, ny: 21, lx: 2.0, ly: 2.0, origin: [-1.0, -1.0] },
                pml: PmlSection {
                    enabled: true,
                    alpha0: 1.0,
                    lambda0: 0.0,
                    alpha1: 0.0,
                    lambda1: 0.0,
                    thickness: 0.5,
                    beta: 4.0,
                    strength: DampingStrength::Auto,
                },
                time: TimeSection { t_final: 3.5, safety: 0.9, dt: Some(0.025) },
                scenario: CaseSection { case, amplitude: 0.05, eps: 10.0, vortex: VortexParams::default() },
                probe: ProbeSection { x_star: Some(0.9), field_stride: 1 },
                reference: ReferenceSection { stretch: 2.5 },
                boundary: BoundarySpec {
                    left: BoundaryTag::Open,
                    right: BoundaryTag::Open,
                    bottom: BoundaryTag::Wall,
                    top: BoundaryTag::Wall,
                },
            },
        }
    }

    /// Parses a TOML document. Missing keys fall back to the preset of the
    /// selected `scenario.case`; unknown or ill-typed keys are reported by
    /// their dotted path.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err("<document>", e.message()))?;
        let case = match user.get("scenario").and_then(|s| s.get("case")) {
            None => ScenarioCase::default(),
            Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| config_err("scenario.case", e.message()))?,
        };
        let mut base = toml::Table::try_from(Self::preset(case)).map_err(|e| config_err("<preset>", e.to_string()))?;
        merge(&mut base, user);
        let cfg: Self = serde_path_to_error::deserialize(toml::Value::Table(base)).map_err(|e| {
            let key = e.path().to_string();
            config_err(&key, e.into_inner().message())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fully resolved configuration as TOML.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_err(key, format!("must be positive and finite, got {v}")))
            }
        };
        pos("model.RT", self.model.rt)?;
        pos("model.tau", self.model.tau)?;
        pos("grid.Lx", self.grid.lx)?;
        pos("grid.Ly", self.grid.ly)?;
        if !self.grid.origin.iter().all(|v| v.is_finite()) {
            return Err(config_err("grid.origin", "must be finite"));
        }
        for (key, n) in [("grid.nx", self.grid.nx), ("grid.ny", self.grid.ny)] {
            if n < crate::grid::MIN_POINTS {
                return Err(config_err(key, format!("needs at least {} points, got {n}", crate::grid::MIN_POINTS)));
            }
        }
        if self.grid.nx.saturating_mul(self.grid.ny) > crate::grid::MAX_SNAPSHOT_NODES {
            return Err(config_err("grid.nx", "grid is too large"));
        }
        pos("time.T", self.time.t_final)?;
        pos("time.safety", self.time.safety)?;
        if let Some(dt) = self.time.dt {
            pos("time.dt", dt)?;
        }
        let p = &self.pml;
        for (key, v) in
            [("pml.alpha0", p.alpha0), ("pml.lambda0", p.lambda0), ("pml.alpha1", p.alpha1), ("pml.lambda1", p.lambda1)]
        {
            if !v.is_finite() {
                return Err(config_err(key, "must be finite"));
            }
        }
        pos("pml.L", p.thickness)?;
        if !(p.beta >= 0.0 && p.beta.is_finite()) {
            return Err(config_err("pml.beta", format!("must be non-negative, got {}", p.beta)));
        }
        if let DampingStrength::Fixed(c) = p.strength {
            pos("pml.Cmode", c)?;
        }
        if p.enabled && p.thickness < self.hx() * (1.0 - 1e-9) {
            return Err(config_err("pml.L", "layer must span at least one grid spacing"));
        }
        let c = &self.scenario;
        match c.case {
            ScenarioCase::GaussianPulse => {
                if !(c.amplitude >= 0.0 && c.amplitude.is_finite()) {
                    return Err(config_err("scenario.amplitude", "must be non-negative"));
                }
                pos("scenario.eps", c.eps)?;
            }
            ScenarioCase::IsentropicVortex => {
                let v = &c.vortex;
                pos("scenario.vortex.b", v.b)?;
                if !(v.gamma > 1.0 && v.gamma.is_finite()) {
                    return Err(config_err("scenario.vortex.gamma", "must exceed 1"));
                }
                if !(v.u0.is_finite() && v.v0.is_finite() && v.u_max.is_finite()) {
                    return Err(config_err("scenario.vortex", "velocities must be finite"));
                }
                let core = 1.0 - 0.5 * (v.gamma - 1.0) * v.u_max * v.u_max * std::f64::consts::E;
                if core <= 0.0 {
                    return Err(config_err("scenario.vortex.Umax", "vortex core density would be non-positive"));
                }
            }
        }
        if self.probe.field_stride == 0 {
            return Err(config_err("probe.field_stride", "must be at least 1"));
        }
        if !(self.reference.stretch >= 1.0 && self.reference.stretch.is_finite()) {
            return Err(config_err("reference.stretch", "must be at least 1"));
        }
        self.boundary.validate().map_err(|e| config_err("boundary", e.to_string()))?;
        if self.boundary.left == crate::grid::BoundaryTag::Periodic {
            return Err(config_err("boundary", "periodic x-edges are incompatible with a right-hand layer"));
        }
        self.probe_column()?;
        Ok(())
    }

    pub fn consts(&self) -> ModelConstants {
        ModelConstants { rt: self.model.rt, tau: self.model.tau }
    }

    pub fn hx(&self) -> f64 {
        self.grid.lx / (self.grid.nx - 1) as f64
    }

    /// Vertex grid of the physical domain.
    pub fn domain_grid(&self) -> Result<Grid> {
        let g = &self.grid;
        Grid::vertex(g.origin[0], g.origin[1], g.lx, g.ly, g.nx, g.ny)
    }

    /// Abscissa where the layer starts: the right edge of the physical
    /// domain.
    pub fn layer_start(&self) -> f64 {
        self.grid.origin[0] + self.grid.lx
    }

    /// Grid columns appended for the layer.
    pub fn layer_columns(&self) -> usize {
        if !self.pml.enabled {
            return 0;
        }
        (self.pml.thickness / self.hx() - 1e-9).ceil() as usize
    }

    /// Grid of the run with the layer.
    pub fn pml_grid(&self) -> Result<Grid> {
        let d = self.domain_grid()?;
        Grid::with_spacing(d.x_min, d.y_min, d.hx, d.hy, d.nx + self.layer_columns(), d.ny)
    }

    /// Grid of the reference run: same spacing, stretched to the right.
    pub fn reference_grid(&self) -> Result<Grid> {
        let d = self.domain_grid()?;
        let nx = (self.reference.stretch * (d.nx - 1) as f64).round() as usize + 1;
        Grid::with_spacing(d.x_min, d.y_min, d.hx, d.hy, nx.max(d.nx), d.ny)
    }

    /// Time step: explicit `time.dt` or the scaled CFL bound.
    pub fn dt(&self) -> Result<f64> {
        match self.time.dt {
            Some(dt) => Ok(dt),
            None => cfl_dt(&self.domain_grid()?, &self.consts(), self.time.safety),
        }
    }

    pub fn pml_params(&self) -> PmlParams {
        PmlParams {
            alpha0: self.pml.alpha0,
            lambda0: self.pml.lambda0,
            alpha1: self.pml.alpha1,
            lambda1: self.pml.lambda1,
            ..PmlParams::default()
        }
    }

    pub fn damping_profile(&self) -> Result<DampingProfile> {
        let c = match self.pml.strength {
            DampingStrength::Auto => 1.0 / self.dt()?,
            DampingStrength::Fixed(c) => c,
        };
        DampingProfile::new(c, self.layer_start(), self.pml.thickness, self.pml.beta)
    }

    /// Column of the probe line in the physical grid. It must lie strictly
    /// left of the layer start.
    pub fn probe_column(&self) -> Result<usize> {
        let nx = self.grid.nx;
        let Some(x) = self.probe.x_star else {
            return Ok(nx - 2);
        };
        let d = self.domain_grid()?;
        if !(x >= d.x_min && x < self.layer_start()) {
            return Err(config_err("probe.x_star", format!("must lie in [{}, {}) ", d.x_min, self.layer_start())));
        }
        let i = d.nearest_i(x);
        if (d.x(i) - x).abs() > 1e-6 * d.hx {
            log::warn!("probe x* = {x} is off-grid; using the nearest line x = {}", d.x(i));
        }
        if i >= nx - 1 {
            return Err(config_err("probe.x_star", "nearest grid line coincides with the layer start"));
        }
        Ok(i)
    }

    /// Probe abscissa actually used.
    pub fn probe_x(&self) -> Result<f64> {
        Ok(self.domain_grid()?.x(self.probe_column()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for case in [ScenarioCase::GaussianPulse, ScenarioCase::IsentropicVortex] {
            ScenarioConfig::preset(case).validate().unwrap();
        }
        let p = ScenarioConfig::default();
        assert!((p.hx() - 1.0 / 19.0).abs() < 1e-15);
        assert_eq!(p.layer_columns(), 8);
        assert_eq!(p.reference_grid().unwrap().nx, 49);
        assert_eq!(p.probe_column().unwrap(), 18);
        let v = ScenarioConfig::preset(ScenarioCase::IsentropicVortex);
        assert_eq!(v.layer_columns(), 5);
        assert_eq!(v.probe_column().unwrap(), 19);
        assert!((v.pml_grid().unwrap().x_max() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn toml_overlays_preset() {
        let cfg =
            ScenarioConfig::from_toml_str("[scenario]\ncase = \"isentropic-vortex\"\n[pml]\nL = 0.3\nCmode = 40.0\n")
                .unwrap();
        assert_eq!(cfg.scenario.case, ScenarioCase::IsentropicVortex);
        assert_eq!(cfg.pml.thickness, 0.3);
        assert_eq!(cfg.pml.strength, DampingStrength::Fixed(40.0));
        assert_eq!(cfg.time.dt, Some(0.025));
        assert_eq!(ScenarioConfig::from_toml_str("").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn round_trip() {
        for case in [ScenarioCase::GaussianPulse, ScenarioCase::IsentropicVortex] {
            let cfg = ScenarioConfig::preset(case);
            let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    fn bad_key(text: &str) -> String {
        match ScenarioConfig::from_toml_str(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_the_key() {
        assert_eq!(bad_key("[grid]\nnx = \"twenty\"\n"), "grid.nx");
        assert_eq!(bad_key("[pml]\nbogus = 1\n"), "pml.bogus");
        assert_eq!(bad_key("[pml]\nCmode = \"sometimes\"\n"), "pml.Cmode");
        assert_eq!(bad_key("[scenario]\ncase = \"tornado\"\n"), "scenario.case");
        assert_eq!(bad_key("[model]\ntau = -1.0\n"), "model.tau");
        assert_eq!(bad_key("[probe]\nx_star = 1.0\n"), "probe.x_star");
        assert_eq!(bad_key("[time]\nT = 0.0\n"), "time.T");
        assert_eq!(bad_key("not toml ["), "<document>");
        assert_eq!(bad_key("[boundary]\nleft = \"periodic\"\n"), "boundary");
    }
}
