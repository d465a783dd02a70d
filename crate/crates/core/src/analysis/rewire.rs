use std::collections::BTreeMap;

use crate::analysis::canon::{canonical_form, CanonicalForm};
use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId, NodeId};
use crate::recognition::Run;

/// Outcome of [`rewire`].
#[derive(Clone, Debug)]
pub struct RewireReport {
    /// One representative per isomorphism class, sorted by canonical form.
    /// Node and edge ids are those of the input, so the input run still
    /// annotates every result.
    pub dags: Vec<Dag>,
    /// Distinct target assignments tried.
    pub permutations: usize,
    /// Assignments dropped because they closed a directed cycle.
    pub cyclic_discarded: usize,
}

fn permutations_of(items: &[NodeId]) -> Vec<Vec<NodeId>> {
    let mut counts: BTreeMap<NodeId, usize> = BTreeMap::new();
    for &x in items {
        *counts.entry(x).or_default() += 1;
    }
    let mut rest: Vec<(NodeId, usize)> = counts.into_iter().collect();
    fn go(rest: &mut [(NodeId, usize)], cur: &mut Vec<NodeId>, len: usize, out: &mut Vec<Vec<NodeId>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            if rest[i].1 > 0 {
                rest[i].1 -= 1;
                cur.push(rest[i].0);
                go(rest, cur, len, out);
                cur.pop();
                rest[i].1 += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut rest, &mut Vec::new(), items.len(), &mut out);
    out
}

/// All graphs obtained by permuting the targets of `edges`, which must all
/// carry the same state under `run`. Such a permutation leaves the multiset
/// of states entering and leaving every node unchanged.
pub fn rewire(g: &Dag, run: &Run, edges: &[EdgeId]) -> Result<RewireReport> {
    run.check_total(g)?;
    let mut positions = Vec::with_capacity(edges.len());
    for &e in edges {
        positions.push(g.edge_index(e).ok_or(Error::UnknownEdge(e))?);
    }
    if let Some(&first) = edges.first() {
        let s = run.state(first);
        if edges.iter().any(|&e| run.state(e) != s) {
            return Err(Error::MixedStates);
        }
    }
    let base: Vec<NodeId> = g.edges().iter().map(|e| e.tar).collect();
    let current: Vec<NodeId> = positions.iter().map(|&p| base[p]).collect();
    let mut found: BTreeMap<CanonicalForm, Dag> = BTreeMap::new();
    let mut report = RewireReport { dags: Vec::new(), permutations: 0, cyclic_discarded: 0 };
    for perm in permutations_of(&current) {
        report.permutations += 1;
        let mut targets = base.clone();
        for (&p, &t) in positions.iter().zip(&perm) {
            targets[p] = t;
        }
        let h = g.with_targets(&targets);
        if !h.is_acyclic() {
            report.cyclic_discarded += 1;
            continue;
        }
        found.entry(canonical_form(&h)).or_insert(h);
    }
    report.dags = found.into_values().collect();
    Ok(report)
}
