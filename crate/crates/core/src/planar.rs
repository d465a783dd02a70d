//! Planar DAG automata: transitions between ordered state sequences,
//! applied only to adjacent frontier entries in the right order.
//!
//! Only single-rooted derivations are supported. Planar automata have no
//! notion of run here, so membership is decided by generating every DAG of
//! the right size and comparing canonical forms.

use std::collections::BTreeMap;

use crate::analysis::canon::{canonical_form, canonical_labeling, CanonicalForm};
use crate::analysis::annotated_form;
use crate::automaton::{Alphabet, StateId};
use crate::derivation::{Configuration, Insert};
use crate::error::{Error, Result};
use crate::graph::Dag;

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarTransition {
    pub lhs: Vec<StateId>,
    pub label: String,
    pub rhs: Vec<StateId>,
    pub weight: Option<f64>,
}

impl PlanarTransition {
    pub fn is_start(&self) -> bool {
        self.lhs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarAutomaton {
    alphabet: Alphabet,
    transitions: Vec<PlanarTransition>,
}

impl PlanarAutomaton {
    pub fn new(alphabet: Alphabet, transitions: Vec<PlanarTransition>) -> Result<Self> {
        let nstates = alphabet.states().len() as u32;
        for (i, t) in transitions.iter().enumerate() {
            alphabet.check_label(&t.label)?;
            if let Some(bad) = t.lhs.iter().chain(&t.rhs).find(|s| s.0 >= nstates) {
                return Err(Error::UnknownState(format!("#{}", bad.0)));
            }
            if transitions[..i]
                .iter()
                .any(|u| u.lhs == t.lhs && u.label == t.label && u.rhs == t.rhs)
            {
                return Err(Error::DuplicateTransition(format!("t{}", i + 1)));
            }
        }
        Ok(PlanarAutomaton { alphabet, transitions })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[PlanarTransition] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &PlanarTransition {
        &self.transitions[i]
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.alphabet.state(name)
    }

    pub fn max_lhs(&self) -> usize {
        self.transitions.iter().map(|t| t.lhs.len()).max().unwrap_or(0)
    }

    pub fn weight(&self, i: usize) -> Result<f64> {
        self.transitions[i].weight.ok_or(Error::MissingWeight(i))
    }

    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.transitions.len() {
            return Err(Error::Format(format!(
                "expected {} weights, got {}",
                self.transitions.len(),
                weights.len()
            )));
        }
        let transitions = self
            .transitions
            .iter()
            .zip(weights)
            .map(|(t, &w)| PlanarTransition { weight: Some(w), ..t.clone() })
            .collect();
        PlanarAutomaton::new(self.alphabet.clone(), transitions)
    }
}

/// Applies transition `t` to the frontier block starting at `position`.
/// The block must carry exactly `t.lhs`, in order; it is replaced in place
/// by fresh edges for `t.rhs`.
pub fn apply_planar(
    cfg: &Configuration,
    pa: &PlanarAutomaton,
    t: usize,
    position: usize,
) -> Result<Configuration> {
    let tr = pa.transitions().get(t).ok_or_else(|| Error::Format(format!("no transition #{t}")))?;
    let len = cfg.frontier().len();
    if tr.is_start() {
        if !cfg.is_empty() {
            return Err(Error::StartReuse(t));
        }
        if position > 0 {
            return Err(Error::PositionOutOfRange { position, len });
        }
    } else if cfg.is_empty() {
        return Err(Error::StateMismatch(t));
    }
    if position + tr.lhs.len() > len {
        return Err(Error::PositionOutOfRange { position, len });
    }
    if !block_matches(cfg, position, &tr.lhs) {
        return Err(Error::StateMismatch(t));
    }
    Ok(expand_at(cfg, tr, t, position))
}

fn block_matches(cfg: &Configuration, position: usize, lhs: &[StateId]) -> bool {
    cfg.frontier()[position..position + lhs.len()]
        .iter()
        .map(|&(_, s)| s)
        .eq(lhs.iter().copied())
}

fn expand_at(cfg: &Configuration, tr: &PlanarTransition, t: usize, position: usize) -> Configuration {
    let positions: Vec<usize> = (position..position + tr.lhs.len()).collect();
    cfg.expand(t, &tr.label, &positions, &tr.rhs, Insert::At(position))
}

fn moves(pa: &PlanarAutomaton, cfg: &Configuration) -> Vec<(usize, usize)> {
    let len = cfg.frontier().len();
    let mut out = Vec::new();
    for (i, t) in pa.transitions().iter().enumerate() {
        if t.is_start() {
            if cfg.is_empty() {
                out.push((i, 0));
            }
        } else if !cfg.is_empty() && t.lhs.len() <= len {
            out.extend((0..=len - t.lhs.len()).filter(|&p| block_matches(cfg, p, &t.lhs)).map(|p| (i, p)));
        }
    }
    out
}

fn explore(pa: &PlanarAutomaton, max_nodes: usize, mut visit: impl FnMut(&Configuration)) -> Result<()> {
    if max_nodes == 0 {
        return Err(Error::InvalidBudget);
    }
    let max_lhs = pa.max_lhs();
    let mut stack = vec![Configuration::new()];
    while let Some(cfg) = stack.pop() {
        if cfg.is_complete() {
            visit(&cfg);
            continue;
        }
        for (t, p) in moves(pa, &cfg).into_iter().rev() {
            let tr = pa.transition(t);
            let after = cfg.frontier().len() - tr.lhs.len() + tr.rhs.len();
            let more = match (after, max_lhs) {
                (0, _) => 0,
                (_, 0) => continue,
                (f, m) => f.div_ceil(m),
            };
            if cfg.node_count() + 1 + more <= max_nodes {
                stack.push(expand_at(&cfg, tr, t, p));
            }
        }
    }
    Ok(())
}

/// Isomorphism classes of DAGs the planar automaton derives with at most
/// `max_nodes` nodes, renumbered canonically and sorted by (size, form).
pub fn enumerate_planar(pa: &PlanarAutomaton, max_nodes: usize) -> Result<Vec<Dag>> {
    let mut found: BTreeMap<(usize, CanonicalForm), Dag> = BTreeMap::new();
    explore(pa, max_nodes, |cfg| {
        let (dag, _) = cfg.to_dag().expect("complete configuration");
        let (form, order) = canonical_labeling(&dag);
        found.entry((dag.node_count(), form)).or_insert_with(|| dag.renumbered(&order));
    })?;
    Ok(found.into_values().collect())
}

/// Generate-and-match membership test.
pub fn planar_recognizes(pa: &PlanarAutomaton, g: &Dag) -> Result<bool> {
    if g.node_count() == 0 {
        return Ok(false);
    }
    let target = canonical_form(g);
    Ok(enumerate_planar(pa, g.node_count())?
        .iter()
        .any(|h| h.node_count() == g.node_count() && canonical_form(h) == target))
}

/// The derived DAG annotated with the transition used at each node and the
/// state on each edge. Two step sequences that only differ in the order of
/// independent steps give isomorphic annotated graphs.
fn derivation_key(cfg: &Configuration, pa: &PlanarAutomaton) -> CanonicalForm {
    let (dag, run) = cfg.to_dag().expect("complete configuration");
    let mut used = vec![String::new(); dag.node_count()];
    for s in cfg.steps() {
        used[s.node.0 as usize] = s.transition.to_string();
    }
    let states: Vec<String> = dag
        .edges()
        .iter()
        .map(|e| pa.alphabet().state_name(run.state(e.id).expect("total run")).to_string())
        .collect();
    annotated_form(&dag, &used, &states)
}

/// Each derivable DAG with its weight: the sum, over its distinct
/// derivations, of the product of the transition weights used.
pub fn planar_weights(pa: &PlanarAutomaton, max_nodes: usize) -> Result<Vec<(Dag, f64)>> {
    for i in 0..pa.transitions().len() {
        pa.weight(i)?;
    }
    let mut derivations: BTreeMap<CanonicalForm, (usize, CanonicalForm, f64, Dag)> = BTreeMap::new();
    explore(pa, max_nodes, |cfg| {
        let key = derivation_key(cfg, pa);
        derivations.entry(key).or_insert_with(|| {
            let (dag, _) = cfg.to_dag().expect("complete configuration");
            let w = cfg.steps().iter().map(|s| pa.transition(s.transition).weight.unwrap_or(0.0)).product();
            let (form, order) = canonical_labeling(&dag);
            (dag.node_count(), form, w, dag.renumbered(&order))
        });
    })?;
    let mut per_dag: BTreeMap<(usize, CanonicalForm), (Dag, f64)> = BTreeMap::new();
    for (size, form, w, dag) in derivations.into_values() {
        per_dag.entry((size, form)).or_insert((dag, 0.0)).1 += w;
    }
    Ok(per_dag.into_values().collect())
}

/// Total weight of the DAGs derivable with at most `max_nodes` nodes.
pub fn planar_partial_mass(pa: &PlanarAutomaton, max_nodes: usize) -> Result<f64> {
    Ok(planar_weights(pa, max_nodes)?.iter().map(|(_, w)| w).sum())
}
