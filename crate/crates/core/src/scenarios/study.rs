//! Parameter studies: which layer parameters to sweep, over which box, with
//! which cubature and functional.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{ScenarioCase, ScenarioConfig};
use super::functionals::{functional, FunctionalKind};
use super::run::run_pair;
use crate::anova::{anova_terms, evaluate_on_grid, AnovaDecomposition, CubatureRule, EvalCache, ParameterBox};
use crate::error::{Error, Result};

/// Layer parameters a study may sweep or freeze, in table column order.
pub const STUDY_PARAMETERS: [&str; 4] = ["alpha0", "alpha1", "beta", "L"];

/// Sets one study parameter on a config.
pub fn apply_parameter(cfg: &mut ScenarioConfig, name: &str, value: f64) -> Result<()> {
    match name {
        "alpha0" => cfg.pml.alpha0 = value,
        "alpha1" => cfg.pml.alpha1 = value,
        "beta" => cfg.pml.beta = value,
        "L" => cfg.pml.thickness = value,
        _ => return Err(Error::invalid(format!("`{name}` is not a study parameter"))),
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyOutput {
    /// Directory receiving the TSI table, decomposition export and cache.
    pub dir: Option<String>,
}

/// A sensitivity study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub functional: FunctionalKind,
    /// Stock case used when no scenario file is given.
    #[serde(default)]
    pub case: ScenarioCase,
    /// Scenario config file, relative to the study file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Nodes per coordinate of the tensor Gauss-Legendre rule.
    pub n: usize,
    /// Swept parameters and their intervals.
    #[serde(rename = "box")]
    pub ranges: BTreeMap<String, [f64; 2]>,
    /// Parameters held fixed.
    #[serde(default)]
    pub frozen: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: StudyOutput,
}

/// Largest accepted nodes-per-axis and total node count.
pub const MAX_RULE_NODES: usize = 16;
pub const MAX_STUDY_NODES: usize = 1 << 16;

impl StudySpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::de::Deserializer::parse(text)
            .map_err(|e| Error::Config { key: "<document>".into(), message: e.message().into() })?;
        let spec: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            Error::Config { key, message: e.into_inner().message().into() }
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("study spec serialises to TOML")
    }

    /// Swept parameter names in table column order.
    pub fn swept(&self) -> Vec<&'static str> {
        STUDY_PARAMETERS.into_iter().filter(|p| self.ranges.contains_key(*p)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: String, message: String| Err(Error::Config { key, message });
        if self.ranges.is_empty() {
            return bad("box".into(), "at least one parameter must be swept".into());
        }
        for name in self.ranges.keys().chain(self.frozen.keys()) {
            if !STUDY_PARAMETERS.contains(&name.as_str()) {
                return bad(name.clone(), format!("unknown parameter (expected one of {STUDY_PARAMETERS:?})"));
            }
        }
        for name in self.frozen.keys() {
            if self.ranges.contains_key(name) {
                return bad(format!("frozen.{name}"), "parameter is both swept and frozen".into());
            }
        }
        for (name, [lo, hi]) in &self.ranges {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad(format!("box.{name}"), format!("bad interval [{lo}, {hi}]"));
            }
            let lower = match name.as_str() {
                "alpha0" | "beta" => 0.0,
                "L" => f64::MIN_POSITIVE,
                _ => f64::NEG_INFINITY,
            };
            if *lo < lower {
                return bad(format!("box.{name}"), format!("lower end {lo} is out of range"));
            }
        }
        for (name, v) in &self.frozen {
            if !v.is_finite() {
                return bad(format!("frozen.{name}"), "must be finite".into());
            }
        }
        if self.n == 0 || self.n > MAX_RULE_NODES {
            return bad("n".into(), format!("must lie in 1..={MAX_RULE_NODES}"));
        }
        let total = (0..self.ranges.len()).try_fold(1usize, |acc, _| acc.checked_mul(self.n));
        if total.is_none_or(|t| t > MAX_STUDY_NODES) {
            return bad("n".into(), "too many cubature nodes".into());
        }
        Ok(())
    }

    pub fn parameter_box(&self) -> Result<ParameterBox> {
        let names = self.swept();
        let lo = names.iter().map(|n| self.ranges[*n][0]).collect();
        let hi = names.iter().map(|n| self.ranges[*n][1]).collect();
        ParameterBox::new(names.into_iter().map(String::from).collect(), lo, hi)
    }

    pub fn rule(&self) -> Result<CubatureRule> {
        CubatureRule::gauss_legendre(self.n, self.ranges.len())
    }

    /// Base config with the frozen parameters applied.
    pub fn base_config(&self, scenario: Option<ScenarioConfig>) -> Result<ScenarioConfig> {
        let mut cfg = scenario.unwrap_or_else(|| ScenarioConfig::preset(self.case));
        for (name, v) in &self.frozen {
            apply_parameter(&mut cfg, name, *v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The study functional at a box point: one run pair per call.
    pub fn evaluator(&self, base: ScenarioConfig) -> impl Fn(&[f64]) -> Result<f64> + Sync + '_ {
        let names = self.swept();
        move |x: &[f64]| {
            let mut cfg = base;
            for (name, v) in names.iter().zip(x) {
                apply_parameter(&mut cfg, name, *v)?;
            }
            cfg.validate()?;
            let pair = run_pair(&cfg, &[])?;
            functional(&pair, self.functional)
        }
    }
}

/// Outcome of a completed study.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub parameter_box: ParameterBox,
    pub decomposition: AnovaDecomposition,
    /// Total sensitivity indices in [`StudySpec::swept`] order.
    pub tsi: Vec<f64>,
    /// Run pairs actually computed (cache misses).
    pub evaluated: usize,
}

impl StudySpec {
    /// Evaluates `f` on every cubature node not in `cache` and decomposes
    /// the resulting table up to full order.
    pub fn run_with<F>(&self, f: F, cache: &EvalCache) -> Result<StudyResult>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let bx = self.parameter_box()?;
        let rule = self.rule()?;
        let report = evaluate_on_grid(f, &bx, &rule, cache)?;
        let decomposition = anova_terms(&report.table, rule.dim)?;
        let tsi = decomposition.tsi()?;
        Ok(StudyResult { parameter_box: bx, decomposition, tsi, evaluated: report.evaluated })
    }

    /// Runs the study on the solver pipeline.
    pub fn run(&self, base: ScenarioConfig, cache: &EvalCache) -> Result<StudyResult> {
        self.run_with(self.evaluator(base), cache)
    }
}
