//! ANOVA terms, variances and sensitivity indices on a tensor rule.

use ndarray::{ArrayD, Axis, Dimension, IxDyn};
use serde::Serialize;
use std::collections::BTreeMap;

use super::cubature::CubatureRule;
use super::eval::{EvaluationTable, ParameterBox};
use crate::error::{Error, Result};

/// Coordinate subset encoded as a bit mask.
pub type Subset = u32;

pub fn subset_vars(mask: Subset) -> Vec<usize> {
    (0..Subset::BITS as usize).filter(|i| mask & (1 << i) != 0).collect()
}

/// One ANOVA term on its node subgrid; axes follow `vars` in ascending order.
#[derive(Debug, Clone)]
pub struct Term {
    pub vars: Vec<usize>,
    pub values: ArrayD<f64>,
    pub variance: f64,
}

#[derive(Debug, Clone)]
pub struct AnovaDecomposition {
    pub rule: CubatureRule,
    pub order: usize,
    pub g0: f64,
    /// Terms for all nonempty subsets up to `order`.
    pub terms: BTreeMap<Subset, Term>,
    /// Cubature variance of the function.
    pub total_variance: f64,
    second_moment: f64,
    table: EvaluationTable,
}

fn weighted_sum(values: &ArrayD<f64>, weights: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    values.indexed_iter().map(|(idx, v)| idx.slice().iter().map(|&i| weights[i]).product::<f64>() * f(*v)).sum()
}

/// Builds all ANOVA terms of order at most `order` from a complete table.
pub fn anova_terms(table: &EvaluationTable, order: usize) -> Result<AnovaDecomposition> {
    let rule = &table.rule;
    let p = rule.dim;
    if p > 16 {
        return Err(Error::invalid("at most 16 parameters are supported"));
    }
    if table.values.len() != rule.len() {
        return Err(Error::invalid("evaluation table is incomplete"));
    }
    let order = order.min(p);
    let w = &rule.weights;
    let full = ArrayD::from_shape_vec(IxDyn(&vec![rule.n; p]), table.values.clone())
        .map_err(|e| Error::invalid(e.to_string()))?;
    let g0 = weighted_sum(&full, w, |v| v);
    let total_variance = weighted_sum(&full, w, |v| (v - g0) * (v - g0));
    let second_moment = weighted_sum(&full, w, |v| v * v);

    let mut masks: Vec<Subset> = (1..(1 << p)).filter(|m: &Subset| m.count_ones() as usize <= order).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    let mut terms: BTreeMap<Subset, Term> = BTreeMap::new();
    for &mask in &masks {
        let vars = subset_vars(mask);
        // integrate out the complement, highest axis first so indices stay valid
        let mut m = full.clone();
        for ax in (0..p).rev() {
            if mask & (1 << ax) == 0 {
                m = m.map_axis(Axis(ax), |lane| lane.iter().zip(w).map(|(v, w)| v * w).sum());
            }
        }
        m.mapv_inplace(|v| v - g0);
        for (&sub, t) in &terms {
            if sub & mask == sub && sub != mask {
                // positions of the sub-term's axes inside this subset
                let pos: Vec<usize> =
                    t.vars.iter().map(|v| vars.iter().position(|u| u == v).expect("subset")).collect();
                for (idx, val) in m.indexed_iter_mut() {
                    let sub_idx: Vec<usize> = pos.iter().map(|&k| idx[k]).collect();
                    *val -= t.values[IxDyn(&sub_idx)];
                }
            }
        }
        let variance = weighted_sum(&m, w, |v| v * v);
        terms.insert(mask, Term { vars, values: m, variance });
    }
    Ok(AnovaDecomposition { rule: rule.clone(), order, g0, terms, total_variance, second_moment, table: table.clone() })
}

/// A truncated expansion evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedValue {
    pub value: f64,
    /// Share of the variance carried by the retained terms.
    pub captured: f64,
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let prod: f64 = (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product();
            1.0 / prod
        })
        .collect()
}

/// Lagrange basis values at `t` for nodes `x`.
fn lagrange_basis(x: &[f64], bw: &[f64], t: f64) -> Vec<f64> {
    if let Some(j) = x.iter().position(|&v| v == t) {
        let mut e = vec![0.0; x.len()];
        e[j] = 1.0;
        return e;
    }
    let terms: Vec<f64> = x.iter().zip(bw).map(|(xj, wj)| wj / (t - xj)).collect();
    let s: f64 = terms.iter().sum();
    terms.iter().map(|v| v / s).collect()
}

impl AnovaDecomposition {
    pub fn dim(&self) -> usize {
        self.rule.dim
    }

    pub fn variance(&self, mask: Subset) -> f64 {
        self.terms.get(&mask).map_or(0.0, |t| t.variance)
    }

    fn require_variance(&self) -> Result<f64> {
        // variance at round-off level of the mean counts as zero
        if !(self.total_variance > 1e-24 * self.second_moment) || !self.total_variance.is_finite() {
            return Err(Error::UndefinedSensitivity);
        }
        Ok(self.total_variance)
    }

    /// Sensitivity measures `S_T = V_T / V`.
    pub fn sensitivities(&self) -> Result<BTreeMap<Subset, f64>> {
        let v = self.require_variance()?;
        Ok(self.terms.iter().map(|(m, t)| (*m, t.variance / v)).collect())
    }

    /// Total sensitivity index of each coordinate.
    pub fn tsi(&self) -> Result<Vec<f64>> {
        let v = self.require_variance()?;
        Ok((0..self.dim())
            .map(|i| self.terms.iter().filter(|(m, _)| *m & (1 << i) != 0).map(|(_, t)| t.variance).sum::<f64>() / v)
            .collect())
    }

    /// Share of variance carried by terms of order `1..=r`.
    pub fn captured_proportion(&self, r: usize) -> Result<f64> {
        let v = self.require_variance()?;
        Ok(self.terms.iter().filter(|(m, _)| m.count_ones() as usize <= r).map(|(_, t)| t.variance).sum::<f64>() / v)
    }

    /// Smallest `r` whose terms carry at least `q` of the variance.
    pub fn superposition_dimension(&self, q: f64) -> Result<usize> {
        self.require_variance()?;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid(format!("proportion must lie in [0, 1], got {q}")));
        }
        for r in 1..=self.order {
            // allow round-off in the variance sum
            if self.captured_proportion(r)? >= q - 1e-12 {
                return Ok(r);
            }
        }
        Ok(self.order.max(1))
    }

    /// Cubature inner product of two terms over the unit cube.
    pub fn inner_product(&self, a: Subset, b: Subset) -> f64 {
        let (Some(ta), Some(tb)) = (self.terms.get(&a), self.terms.get(&b)) else {
            return 0.0;
        };
        let union = subset_vars(a | b);
        let w = &self.rule.weights;
        let mut s = 0.0;
        let total = self.rule.n.pow(union.len() as u32);
        let mut idx = vec![0usize; union.len()];
        for mut k in 0..total {
            for d in (0..union.len()).rev() {
                idx[d] = k % self.rule.n;
                k /= self.rule.n;
            }
            let pick = |t: &Term| -> f64 {
                let sub: Vec<usize> =
                    t.vars.iter().map(|v| idx[union.iter().position(|u| u == v).expect("in union")]).collect();
                t.values[IxDyn(&sub)]
            };
            let wt: f64 = idx.iter().map(|&i| w[i]).product();
            s += wt * pick(ta) * pick(tb);
        }
        s
    }

    /// Cubature mean of one term.
    pub fn term_mean(&self, mask: Subset) -> f64 {
        self.terms.get(&mask).map_or(0.0, |t| weighted_sum(&t.values, &self.rule.weights, |v| v))
    }

    /// Truncated expansion `g0 + sum_{|T| <= r} g_T` at a point given in box
    /// coordinates; terms are interpolated between nodes.
    pub fn truncated_eval(&self, bx: &ParameterBox, x: &[f64], r: usize) -> Result<TruncatedValue> {
        if bx.dim() != self.dim() {
            return Err(Error::invalid("box does not match the decomposition"));
        }
        if r > self.order {
            return Err(Error::invalid(format!("terms of order {r} were not computed (order {})", self.order)));
        }
        let t = bx.to_unit(x)?;
        let nodes = &self.rule.nodes;
        let bw = barycentric_weights(nodes);
        let basis: Vec<Vec<f64>> = t.iter().map(|&ti| lagrange_basis(nodes, &bw, ti)).collect();
        let mut value = self.g0;
        for (mask, term) in &self.terms {
            if mask.count_ones() as usize > r {
                continue;
            }
            for (idx, v) in term.values.indexed_iter() {
                let wt: f64 = term.vars.iter().enumerate().map(|(k, &var)| basis[var][idx[k]]).product();
                value += wt * v;
            }
        }
        let captured = self.captured_proportion(r).unwrap_or(1.0);
        Ok(TruncatedValue { value, captured })
    }

    /// Node value stored in the evaluation table.
    pub fn node_value(&self, idx: &[usize]) -> f64 {
        self.table.value(idx)
    }

    pub fn export(&self, bx: &ParameterBox) -> Result<DecompositionExport> {
        let tsi = self.tsi().ok();
        Ok(DecompositionExport {
            names: bx.names.clone(),
            lo: bx.lo.clone(),
            hi: bx.hi.clone(),
            rule: self.rule.label(),
            nodes_per_dim: self.rule.n,
            order: self.order,
            g0: self.g0,
            total_variance: self.total_variance,
            terms: self
                .terms
                .iter()
                .map(|(m, t)| TermExport {
                    subset: subset_vars(*m).iter().map(|&i| bx.names[i].clone()).collect(),
                    variance: t.variance,
                    sensitivity: tsi.as_ref().map(|_| t.variance / self.total_variance),
                })
                .collect(),
            tsi,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermExport {
    pub subset: Vec<String>,
    pub variance: f64,
    pub sensitivity: Option<f64>,
}

/// Serializable summary of a decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionExport {
    pub names: Vec<String>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub rule: String,
    pub nodes_per_dim: usize,
    pub order: usize,
    pub g0: f64,
    pub total_variance: f64,
    pub terms: Vec<TermExport>,
    pub tsi: Option<Vec<f64>>,
}

/// TSI table: one row per rule label, one column per parameter.
pub fn tsi_table_csv(names: &[String], rows: &[(String, Vec<f64>)]) -> String {
    let mut s = format!("rule,{}\n", names.join(","));
    for (label, vals) in rows {
        let cols: Vec<String> = vals.iter().map(|v| format!("{v:.4}")).collect();
        s.push_str(&format!("{label},{}\n", cols.join(",")));
    }
    s
}
