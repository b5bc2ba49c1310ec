//! Parameter boxes, tensor-grid evaluation and the evaluation cache.

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::Mutex;

use super::cubature::CubatureRule;
use crate::error::{Error, Result};

/// Named axis-aligned box, mapped affinely onto the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterBox {
    pub names: Vec<String>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ParameterBox {
    pub fn new(names: Vec<String>, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if names.is_empty() || names.len() != lo.len() || names.len() != hi.len() {
            return Err(Error::invalid("parameter box needs matching, non-empty names and bounds"));
        }
        for (k, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid(format!("bad interval [{a}, {b}] for `{}`", names[k])));
            }
        }
        Ok(Self { names, lo, hi })
    }

    pub fn unit(p: usize) -> Self {
        Self { names: (0..p).map(|i| format!("x{i}")).collect(), lo: vec![0.0; p], hi: vec![1.0; p] }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn from_unit(&self, t: &[f64]) -> Vec<f64> {
        t.iter().enumerate().map(|(k, v)| self.lo[k] + v * (self.hi[k] - self.lo[k])).collect()
    }

    /// Unit-cube coordinates of `x`; points outside the box are rejected.
    pub fn to_unit(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!("expected {} coordinates, got {}", self.dim(), x.len())));
        }
        x.iter()
            .enumerate()
            .map(|(k, v)| {
                let t = (v - self.lo[k]) / (self.hi[k] - self.lo[k]);
                if (-1e-12..=1.0 + 1e-12).contains(&t) {
                    Ok(t.clamp(0.0, 1.0))
                } else {
                    Err(Error::OutOfBox { coordinate: k, value: *v })
                }
            })
            .collect()
    }
}

/// Write-once store of node values keyed by multi-index.
#[derive(Debug, Default)]
pub struct EvalCache {
    map: Mutex<BTreeMap<Vec<usize>, f64>>,
}

impl EvalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, idx: &[usize]) -> Option<f64> {
        self.map.lock().expect("cache lock").get(idx).copied()
    }

    /// Stores a value unless one is present already.
    pub fn insert(&self, idx: Vec<usize>, value: f64) {
        self.map.lock().expect("cache lock").entry(idx).or_insert(value);
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `i0,...,i_{p-1},value` lines under a `#` header.
    pub fn write<W: Write>(&self, mut w: W, rule: &CubatureRule) -> Result<()> {
        writeln!(w, "# bgkpml eval-cache p={} n={}", rule.dim, rule.n)?;
        for (idx, v) in self.map.lock().expect("cache lock").iter() {
            let cols: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            writeln!(w, "{},{v:e}", cols.join(","))?;
        }
        Ok(())
    }

    /// Reads a cache written by [`EvalCache::write`] for the given rule.
    pub fn read<R: BufRead>(r: R, rule: &CubatureRule) -> Result<Self> {
        let cache = Self::new();
        let mut seen_header = false;
        for (n, line) in r.lines().enumerate() {
            let n = n + 1;
            let line = line.map_err(|e| Error::parse(n, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                if !seen_header {
                    let want = format!("bgkpml eval-cache p={} n={}", rule.dim, rule.n);
                    if h.trim() != want {
                        return Err(Error::parse(n, format!("cache header mismatch: expected `{want}`")));
                    }
                    seen_header = true;
                }
                continue;
            }
            if !seen_header {
                return Err(Error::parse(n, "missing cache header"));
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != rule.dim + 1 {
                return Err(Error::parse(n, format!("expected {} columns", rule.dim + 1)));
            }
            let mut idx = Vec::with_capacity(rule.dim);
            for f in &fields[..rule.dim] {
                let i: usize = f.trim().parse().map_err(|_| Error::parse(n, format!("bad index `{f}`")))?;
                if i >= rule.n {
                    return Err(Error::parse(n, format!("node index {i} out of range")));
                }
                idx.push(i);
            }
            let v: f64 = fields[rule.dim]
                .trim()
                .parse()
                .map_err(|_| Error::parse(n, format!("bad value `{}`", fields[rule.dim])))?;
            if !v.is_finite() {
                return Err(Error::parse(n, "non-finite cached value"));
            }
            cache.insert(idx, v);
        }
        Ok(cache)
    }
}

/// Complete table of node values, flat in [`CubatureRule::multi_index`]
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationTable {
    pub rule: CubatureRule,
    pub values: Vec<f64>,
}

impl EvaluationTable {
    pub fn value(&self, idx: &[usize]) -> f64 {
        self.values[self.rule.flat_index(idx)]
    }
}

/// Outcome of a grid evaluation.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub table: EvaluationTable,
    /// Number of nodes that were actually evaluated (cache misses).
    pub evaluated: usize,
}

/// Evaluates `f` at every tensor node not already in `cache`. `f` receives
/// box coordinates. Nodes whose evaluation fails or returns a non-finite
/// value are poisoned; if any are, the call fails listing them.
pub fn evaluate_on_grid<F>(f: F, bx: &ParameterBox, rule: &CubatureRule, cache: &EvalCache) -> Result<EvalReport>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if rule.dim != bx.dim() {
        return Err(Error::invalid(format!("rule dimension {} does not match box dimension {}", rule.dim, bx.dim())));
    }
    let missing: Vec<Vec<usize>> =
        (0..rule.len()).map(|k| rule.multi_index(k)).filter(|idx| cache.get(idx).is_none()).collect();
    info!("{}: {} of {} nodes to evaluate", rule.label(), missing.len(), rule.len());
    let failures: Vec<Vec<usize>> = missing
        .par_iter()
        .filter_map(|idx| {
            let x = bx.from_unit(&rule.point(idx));
            match f(&x) {
                Ok(v) if v.is_finite() => {
                    cache.insert(idx.clone(), v);
                    None
                }
                Ok(v) => {
                    warn!("node {idx:?} at {x:?}: non-finite value {v}");
                    Some(idx.clone())
                }
                Err(e) => {
                    warn!("node {idx:?} at {x:?}: {e}");
                    Some(idx.clone())
                }
            }
        })
        .collect();
    if !failures.is_empty() {
        let mut nodes = failures;
        nodes.sort();
        return Err(Error::PoisonedNodes { count: nodes.len(), nodes });
    }
    let values = (0..rule.len()).map(|k| cache.get(&rule.multi_index(k)).expect("all nodes cached")).collect();
    Ok(EvalReport { table: EvaluationTable { rule: rule.clone(), values }, evaluated: missing.len() })
}
