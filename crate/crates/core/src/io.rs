//! JSON and DOT formats.
//!
//! Automata: `{"states":[..],"labels":[..],"ordered":false,"transitions":[{"lhs":[..],"label":"a","rhs":[..],"weight":0.5}]}`.
//! DAGs: `{"nodes":[{"id":0,"label":"a"}],"edges":[{"id":0,"src":0,"tar":1}]}`,
//! with an optional `"elabel"` per edge. Runs: `[{"edge":0,"state":"p"}]`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::automaton::{Alphabet, DagAutomaton, StateId, Transition};
use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId};
use crate::planar::{PlanarAutomaton, PlanarTransition};
use crate::recognition::Run;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonRepr {
    states: Vec<String>,
    labels: Vec<String>,
    #[serde(default)]
    ordered: bool,
    transitions: Vec<TransitionRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionRepr {
    lhs: Vec<String>,
    label: String,
    rhs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunEntry {
    edge: EdgeId,
    state: String,
}

/// An automaton file holds either flavour, told apart by `"ordered"`.
#[derive(Clone, Debug)]
pub enum AnyAutomaton {
    Multiset(DagAutomaton),
    Planar(PlanarAutomaton),
}

impl AnyAutomaton {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            AnyAutomaton::Multiset(a) => a.alphabet(),
            AnyAutomaton::Planar(a) => a.alphabet(),
        }
    }
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Format(format!("{what}: {e}"))
}

fn states_of(alphabet: &Alphabet, names: &[String], at: &str) -> Result<Vec<StateId>> {
    names
        .iter()
        .map(|s| alphabet.state(s).map_err(|_| Error::Format(format!("{at}: unknown state `{s}`"))))
        .collect()
}

pub fn parse_automaton(text: &str) -> Result<AnyAutomaton> {
    let repr: AutomatonRepr = serde_json::from_str(text).map_err(|e| json_error("automaton", e))?;
    let alphabet = Alphabet::new(&repr.states, &repr.labels)?;
    let mut lhs_rhs = Vec::with_capacity(repr.transitions.len());
    for (i, t) in repr.transitions.iter().enumerate() {
        if !alphabet.has_label(&t.label) {
            return Err(Error::Format(format!("transitions[{i}].label: unknown label `{}`", t.label)));
        }
        let lhs = states_of(&alphabet, &t.lhs, &format!("transitions[{i}].lhs"))?;
        let rhs = states_of(&alphabet, &t.rhs, &format!("transitions[{i}].rhs"))?;
        lhs_rhs.push((lhs, rhs));
    }
    if repr.ordered {
        let ts = repr
            .transitions
            .into_iter()
            .zip(lhs_rhs)
            .map(|(t, (lhs, rhs))| PlanarTransition { lhs, label: t.label, rhs, weight: t.weight })
            .collect();
        Ok(AnyAutomaton::Planar(PlanarAutomaton::new(alphabet, ts)?))
    } else {
        let ts = repr
            .transitions
            .into_iter()
            .zip(lhs_rhs)
            .map(|(t, (lhs, rhs))| Transition {
                lhs: lhs.into_iter().collect(),
                label: t.label,
                rhs: rhs.into_iter().collect(),
                weight: t.weight,
            })
            .collect();
        Ok(AnyAutomaton::Multiset(DagAutomaton::new(alphabet, ts)?))
    }
}

/// Parses a file that must hold an unordered automaton.
pub fn parse_multiset_automaton(text: &str) -> Result<DagAutomaton> {
    match parse_automaton(text)? {
        AnyAutomaton::Multiset(a) => Ok(a),
        AnyAutomaton::Planar(_) => Err(Error::Format("expected \"ordered\": false".into())),
    }
}

pub fn parse_planar_automaton(text: &str) -> Result<PlanarAutomaton> {
    match parse_automaton(text)? {
        AnyAutomaton::Planar(a) => Ok(a),
        AnyAutomaton::Multiset(_) => Err(Error::Format("expected \"ordered\": true".into())),
    }
}

fn names(alphabet: &Alphabet, states: impl Iterator<Item = StateId>) -> Vec<String> {
    states.map(|s| alphabet.state_name(s).to_string()).collect()
}

fn automaton_json(repr: &AutomatonRepr) -> String {
    serde_json::to_string_pretty(repr).expect("automaton serializes")
}

pub fn automaton_to_json(a: &DagAutomaton) -> String {
    let al = a.alphabet();
    automaton_json(&AutomatonRepr {
        states: al.states().to_vec(),
        labels: al.labels().to_vec(),
        ordered: false,
        transitions: a
            .transitions()
            .iter()
            .map(|t| TransitionRepr {
                lhs: names(al, t.lhs.iter().copied()),
                label: t.label.clone(),
                rhs: names(al, t.rhs.iter().copied()),
                weight: t.weight,
            })
            .collect(),
    })
}

pub fn planar_automaton_to_json(a: &PlanarAutomaton) -> String {
    let al = a.alphabet();
    automaton_json(&AutomatonRepr {
        states: al.states().to_vec(),
        labels: al.labels().to_vec(),
        ordered: true,
        transitions: a
            .transitions()
            .iter()
            .map(|t| TransitionRepr {
                lhs: names(al, t.lhs.iter().copied()),
                label: t.label.clone(),
                rhs: names(al, t.rhs.iter().copied()),
                weight: t.weight,
            })
            .collect(),
    })
}

pub fn parse_dag(text: &str) -> Result<Dag> {
    serde_json::from_str(text).map_err(|e| json_error("dag", e))
}

pub fn dag_to_json(g: &Dag) -> String {
    serde_json::to_string_pretty(g).expect("dag serializes")
}

pub fn parse_run(text: &str, alphabet: &Alphabet) -> Result<Run> {
    let entries: Vec<RunEntry> = serde_json::from_str(text).map_err(|e| json_error("run", e))?;
    let mut assignment = std::collections::BTreeMap::new();
    for (i, r) in entries.iter().enumerate() {
        let s = alphabet
            .state(&r.state)
            .map_err(|_| Error::Format(format!("run[{i}].state: unknown state `{}`", r.state)))?;
        if assignment.insert(r.edge, s).is_some() {
            return Err(Error::Format(format!("run[{i}].edge: edge {} assigned twice", r.edge)));
        }
    }
    Ok(Run::new(assignment))
}

pub fn run_to_value(r: &Run, alphabet: &Alphabet) -> serde_json::Value {
    let entries: Vec<RunEntry> = r
        .assignment()
        .iter()
        .map(|(&edge, &s)| RunEntry { edge, state: alphabet.state_name(s).to_string() })
        .collect();
    serde_json::to_value(entries).expect("run serializes")
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering. With a run, each edge is labelled by its state;
/// otherwise by its edge label, if any.
pub fn to_dot(g: &Dag, run: Option<(&Run, &Alphabet)>) -> String {
    let mut out = String::from("digraph G {\n");
    for v in g.nodes() {
        let _ = writeln!(out, "  n{} [label={}];", v.id, quote(&v.label));
    }
    for e in g.edges() {
        let label = match run {
            Some((r, al)) => r.state(e.id).map(|s| al.state_name(s).to_string()),
            None => e.label.clone(),
        };
        match label {
            Some(l) => {
                let _ = writeln!(out, "  n{} -> n{} [id={}, label={}];", e.src, e.tar, quote(&format!("e{}", e.id)), quote(&l));
            }
            None => {
                let _ = writeln!(out, "  n{} -> n{} [id={}];", e.src, e.tar, quote(&format!("e{}", e.id)));
            }
        }
    }
    out.push_str("}\n");
    out
}
