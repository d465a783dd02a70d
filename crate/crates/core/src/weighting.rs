//! Run weights, DAG weights and truncated language mass.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::automaton::DagAutomaton;
use crate::derivation::{enumerate_language, Mode};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::recognition::{distinct_runs, Run};
use crate::series::{probe_terms, SeriesReport, Term};

/// Product of the weights of the transitions `r` uses.
pub fn run_weight(a: &DagAutomaton, g: &Dag, r: &Run) -> Result<f64> {
    let used = r.transitions_used(a, g)?;
    used.into_iter().map(|t| a.weight(t)).product()
}

/// Sum of the weights of the accepting runs, counted up to automorphisms of
/// `g` (see [`distinct_runs`]); 0 if `g` is not recognized.
pub fn dag_weight(a: &DagAutomaton, g: &Dag) -> Result<f64> {
    distinct_runs(a, g)?.iter().map(|r| run_weight(a, g, r)).sum()
}

fn require_weights(a: &DagAutomaton) -> Result<()> {
    match a.transitions().iter().position(|t| t.weight.is_none()) {
        Some(i) => Err(Error::MissingWeight(i)),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedDag {
    pub dag: Dag,
    pub weight: f64,
}

/// Truncated language mass.
#[derive(Clone, Debug, Serialize)]
pub struct MassReport {
    pub total: f64,
    /// Node count -> (number of DAGs, summed weight).
    pub by_size: BTreeMap<usize, (usize, f64)>,
    pub dags: Vec<WeightedDag>,
}

/// Sum of `dag_weight` over the language enumerated with `max_nodes`.
pub fn partial_mass(a: &DagAutomaton, mode: Mode, max_nodes: usize) -> Result<MassReport> {
    require_weights(a)?;
    let lang = enumerate_language(a, mode, max_nodes)?;
    let mut by_size: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    let mut dags = Vec::with_capacity(lang.len());
    for g in lang {
        let w = dag_weight(a, &g)?;
        let slot = by_size.entry(g.node_count()).or_default();
        slot.0 += 1;
        slot.1 += w;
        dags.push(WeightedDag { dag: g, weight: w });
    }
    let total = by_size.values().map(|&(_, w)| w).sum();
    Ok(MassReport { total, by_size, dags })
}

/// Summed weight of the enumerated DAGs, bucketed by how many nodes carry
/// `label`.
pub fn mass_by_group(a: &DagAutomaton, mode: Mode, max_nodes: usize, label: &str) -> Result<BTreeMap<usize, f64>> {
    a.alphabet().check_label(label)?;
    let report = partial_mass(a, mode, max_nodes)?;
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for wd in &report.dags {
        let n = wd.dag.nodes().iter().filter(|v| v.label == label).count();
        *out.entry(n).or_default() += wd.weight;
    }
    Ok(out)
}

/// Findings of [`full_support_check`].
#[derive(Clone, Debug, Serialize)]
pub struct FullSupportReport {
    /// Enumerated DAGs whose weight lies outside `(0, 1]`.
    pub violations: Vec<WeightedDag>,
    pub mass: f64,
    /// Probe over the per-size totals, skipping sizes with no DAGs.
    pub series: SeriesReport,
}

pub fn full_support_check(a: &DagAutomaton, mode: Mode, max_nodes: usize) -> Result<FullSupportReport> {
    let report = partial_mass(a, mode, max_nodes)?;
    let violations = report
        .dags
        .iter()
        .filter(|wd| !(wd.weight > 0.0 && wd.weight <= 1.0))
        .cloned()
        .collect();
    let terms = report
        .by_size
        .iter()
        .map(|(&size, &(count, total))| Term::new(size, count as f64, total / count as f64))
        .collect();
    Ok(FullSupportReport { violations, mass: report.total, series: probe_terms(terms) })
}
