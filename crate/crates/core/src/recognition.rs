//! Runs and recognition: guessing a state for every edge so that each node
//! matches a transition.
//!
//! The search visits nodes in topological order. When a node is reached all
//! of its incoming edges already carry states, so only transitions with that
//! left-hand side and label are tried, and each one fixes the node's
//! outgoing edges. Worst-case exponential.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use crate::analysis::annotated_form;
use crate::automaton::{DagAutomaton, StateId};
use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId};
use crate::multiset::Multiset;

/// A total map from edges to states.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run {
    assignment: BTreeMap<EdgeId, StateId>,
}

impl Run {
    pub fn new(assignment: BTreeMap<EdgeId, StateId>) -> Self {
        Run { assignment }
    }

    pub fn state(&self, e: EdgeId) -> Option<StateId> {
        self.assignment.get(&e).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<EdgeId, StateId> {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Errors unless the run's domain is exactly the edge set of `g`.
    pub fn check_total(&self, g: &Dag) -> Result<()> {
        if let Some(e) = g.edges().iter().find(|e| !self.assignment.contains_key(&e.id)) {
            return Err(Error::PartialRun(e.id));
        }
        if let Some(&e) = self.assignment.keys().find(|&&e| g.edge_index(e).is_none()) {
            return Err(Error::RunOutsideGraph(e));
        }
        Ok(())
    }

    /// The transition used at each node, by node position; `Err` at the
    /// first node with no matching transition.
    pub(crate) fn transitions_used(&self, a: &DagAutomaton, g: &Dag) -> Result<Vec<usize>> {
        self.check_total(g)?;
        (0..g.node_count())
            .map(|v| {
                let ins: Multiset<StateId> = g.in_adj(v).iter().map(|&e| self.assignment[&g.edges()[e].id]).collect();
                let outs: Multiset<StateId> = g.out_adj(v).iter().map(|&e| self.assignment[&g.edges()[e].id]).collect();
                a.find_transition(&ins, &g.nodes()[v].label, &outs)
                    .ok_or(Error::NotAccepting(g.nodes()[v].id))
            })
            .collect()
    }
}

/// True iff every node `v` has a transition `ρ(In(v)) -lab(v)-> ρ(Out(v))`.
pub fn run_is_accepting(a: &DagAutomaton, g: &Dag, r: &Run) -> Result<bool> {
    match r.transitions_used(a, g) {
        Ok(_) => Ok(true),
        Err(Error::NotAccepting(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// All distinct orderings of a multiset.
fn multiset_permutations(m: &Multiset<StateId>) -> Vec<Vec<StateId>> {
    fn go(rest: &mut Vec<(StateId, usize)>, cur: &mut Vec<StateId>, len: usize, out: &mut Vec<Vec<StateId>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            if rest[i].1 == 0 {
                continue;
            }
            rest[i].1 -= 1;
            cur.push(rest[i].0);
            go(rest, cur, len, out);
            cur.pop();
            rest[i].1 += 1;
        }
    }
    let mut rest: Vec<(StateId, usize)> = m.counts().map(|(&s, &c)| (s, c)).collect();
    let mut out = Vec::new();
    go(&mut rest, &mut Vec::new(), m.size(), &mut out);
    out
}

fn search(
    a: &DagAutomaton,
    g: &Dag,
    order: &[usize],
    k: usize,
    states: &mut Vec<Option<StateId>>,
    emit: &mut dyn FnMut(&[Option<StateId>]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let Some(&v) = order.get(k) else {
        return emit(states);
    };
    let lhs: Multiset<StateId> = g
        .in_adj(v)
        .iter()
        .map(|&e| states[e].expect("in-edges are assigned before their target"))
        .collect();
    let outs = g.out_adj(v);
    for &t in a.transitions_from(&g.nodes()[v].label, &lhs) {
        let rhs = &a.transition(t).rhs;
        if rhs.size() != outs.len() {
            continue;
        }
        for perm in multiset_permutations(rhs) {
            for (&e, s) in outs.iter().zip(perm) {
                states[e] = Some(s);
            }
            search(a, g, order, k + 1, states, emit)?;
        }
        for &e in outs {
            states[e] = None;
        }
    }
    ControlFlow::Continue(())
}

fn for_each_run(a: &DagAutomaton, g: &Dag, mut f: impl FnMut(Run) -> ControlFlow<()>) -> Result<()> {
    let order = g.topological_order().ok_or(Error::Cyclic)?;
    let mut states = vec![None; g.edge_count()];
    let mut emit = |st: &[Option<StateId>]| {
        let assignment = g
            .edges()
            .iter()
            .zip(st)
            .map(|(e, s)| (e.id, s.expect("complete assignment")))
            .collect();
        f(Run::new(assignment))
    };
    let _ = search(a, g, &order, 0, &mut states, &mut emit);
    Ok(())
}

/// All accepting runs of `a` on `g`, sorted by their `(edge, state)` lists.
pub fn accepting_runs(a: &DagAutomaton, g: &Dag) -> Result<Vec<Run>> {
    let mut runs = Vec::new();
    for_each_run(a, g, |r| {
        runs.push(r);
        ControlFlow::Continue(())
    })?;
    runs.sort();
    Ok(runs)
}

/// Whether `g` has at least one accepting run. Stops at the first one.
pub fn recognizes(a: &DagAutomaton, g: &Dag) -> bool {
    first_run(a, g).is_some()
}

pub fn first_run(a: &DagAutomaton, g: &Dag) -> Option<Run> {
    let mut found = None;
    for_each_run(a, g, |r| {
        found = Some(r);
        ControlFlow::Break(())
    })
    .ok()?;
    found
}

/// Accepting runs up to automorphisms of `g`: runs that an automorphism
/// maps onto each other (such as the two ways of putting states on a pair
/// of parallel edges) count once. Returns the least run of each class.
pub fn distinct_runs(a: &DagAutomaton, g: &Dag) -> Result<Vec<Run>> {
    let runs = accepting_runs(a, g)?;
    if runs.len() < 2 {
        return Ok(runs);
    }
    let blank = vec![String::new(); g.node_count()];
    let mut seen = BTreeSet::new();
    Ok(runs
        .into_iter()
        .filter(|r| {
            let tags: Vec<String> = g.edges().iter().map(|e| a.state_name(r.assignment[&e.id]).to_string()).collect();
            seen.insert(annotated_form(g, &blank, &tags))
        })
        .collect())
}

/// Reference implementation: tries all `|Q|^|E|` assignments and keeps the
/// accepting ones. Only usable on tiny graphs.
pub fn brute_force_runs(a: &DagAutomaton, g: &Dag) -> Vec<Run> {
    let q = a.alphabet().states().len() as u32;
    let m = g.edge_count();
    if q == 0 {
        let r = Run::new(BTreeMap::new());
        return if m == 0 && run_is_accepting(a, g, &r).unwrap_or(false) { vec![r] } else { Vec::new() };
    }
    let mut digits = vec![0u32; m];
    let mut out = Vec::new();
    loop {
        let r = Run::new(g.edges().iter().zip(&digits).map(|(e, &d)| (e.id, StateId(d))).collect());
        if run_is_accepting(a, g, &r).unwrap_or(false) {
            out.push(r);
        }
        let mut i = 0;
        loop {
            if i == m {
                out.sort();
                return out;
            }
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig1v_blue_run_is_the_only_one() {
        let a = fixtures::example1();
        let g = fixtures::fig1v();
        let blue = fixtures::fig1v_run(&a);
        assert_eq!(run_is_accepting(&a, &g, &blue), Ok(true));
        assert_eq!(accepting_runs(&a, &g).unwrap(), vec![blue]);
    }

    #[test]
    fn all_q_run_rejected() {
        let a = fixtures::example1();
        let g = fixtures::fig1v();
        let q = a.state("q").unwrap();
        let r = Run::new(g.edges().iter().map(|e| (e.id, q)).collect());
        assert_eq!(run_is_accepting(&a, &g, &r), Ok(false));
    }

    #[test]
    fn example4_blue_run() {
        let a = fixtures::example3();
        let g = fixtures::example4();
        let r = fixtures::example4_run(&a);
        assert_eq!(run_is_accepting(&a, &g, &r), Ok(true));
        assert_eq!(accepting_runs(&a, &g).unwrap(), vec![r]);
    }

    #[test]
    fn partial_run_is_an_error() {
        let a = fixtures::example1();
        let g = fixtures::fig1v();
        let mut m = fixtures::fig1v_run(&a).assignment().clone();
        m.remove(&EdgeId(3));
        assert_eq!(run_is_accepting(&a, &g, &Run::new(m.clone())), Err(Error::PartialRun(EdgeId(3))));
        m.insert(EdgeId(3), StateId(0));
        m.insert(EdgeId(99), StateId(0));
        assert_eq!(run_is_accepting(&a, &g, &Run::new(m)), Err(Error::RunOutsideGraph(EdgeId(99))));
    }

    #[test]
    fn recognition_examples() {
        let a = fixtures::example1();
        assert!(recognizes(&a, &fixtures::fig1vii()));
        assert!(recognizes(&a, &fixtures::ace_chain()));
        let abe = Dag::from_parts(&[(0, "a"), (1, "b"), (2, "e")], &[(0, 0, 1), (1, 1, 2)]).unwrap();
        assert!(!recognizes(&a, &abe));
        assert!(brute_force_runs(&a, &abe).is_empty());
        let lone_a = Dag::from_parts(&[(0, "a")], &[]).unwrap();
        assert!(accepting_runs(&a, &lone_a).unwrap().is_empty());
    }

    #[test]
    fn cyclic_graph_is_an_error() {
        let a = fixtures::example1();
        let cyc = Dag::from_parts(&[(0, "b"), (1, "b")], &[(0, 0, 1), (1, 1, 0)]).unwrap();
        assert_eq!(accepting_runs(&a, &cyc), Err(Error::Cyclic));
        assert!(!recognizes(&a, &cyc));
    }

    #[test]
    fn agrees_with_brute_force_on_fixtures() {
        let a = fixtures::example1();
        for g in [fixtures::fig1v(), fixtures::fig1vii(), fixtures::ace_chain()] {
            assert_eq!(accepting_runs(&a, &g).unwrap(), brute_force_runs(&a, &g));
        }
        let a3 = fixtures::example3();
        for n in 0..4 {
            let g = fixtures::example3_g(n);
            assert_eq!(accepting_runs(&a3, &g).unwrap(), brute_force_runs(&a3, &g));
        }
    }

    #[test]
    fn parallel_edges_give_one_distinct_run() {
        let a = fixtures::example3();
        let g0 = fixtures::example3_g(0);
        assert_eq!(accepting_runs(&a, &g0).unwrap().len(), 2);
        assert_eq!(distinct_runs(&a, &g0).unwrap().len(), 1);
        let g2 = fixtures::example3_g(2);
        assert_eq!(distinct_runs(&a, &g2).unwrap(), accepting_runs(&a, &g2).unwrap());
    }

    #[test]
    fn several_runs_on_symmetric_graph() {
        // ∅ -a-> {p, q}; {p} -b-> ∅; {q} -b-> ∅ on a -> b, a -> b: two runs
        let a = DagAutomaton::builder(&["p", "q"], &["a", "b"])
            .unwrap()
            .transition(&[], "a", &["p", "q"], None)
            .unwrap()
            .transition(&["p"], "b", &[], None)
            .unwrap()
            .transition(&["q"], "b", &[], None)
            .unwrap()
            .build()
            .unwrap();
        let g = Dag::from_parts(&[(0, "a"), (1, "b"), (2, "b")], &[(0, 0, 1), (1, 0, 2)]).unwrap();
        let runs = accepting_runs(&a, &g).unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs, brute_force_runs(&a, &g));
        assert!(runs.windows(2).all(|w| w[0] < w[1]));
        // swapping the two b nodes maps one run onto the other
        assert_eq!(distinct_runs(&a, &g).unwrap(), vec![runs[0].clone()]);
    }
}
