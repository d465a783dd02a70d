//! Multiset DAG automata `(Q, Σ, T)` with optional real transition weights.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::multiset::Multiset;

/// Index of a state in its automaton's state list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub lhs: Multiset<StateId>,
    pub label: String,
    pub rhs: Multiset<StateId>,
    /// Any real value is allowed, including zero and negatives.
    pub weight: Option<f64>,
}

impl Transition {
    /// Start transitions have an empty left-hand side and create roots.
    pub fn is_start(&self) -> bool {
        self.lhs.is_empty()
    }
}

/// State and label tables shared by both automaton flavours.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Alphabet {
    states: Vec<String>,
    labels: Vec<String>,
    state_pos: HashMap<String, StateId>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>, L: AsRef<str>>(states: &[S], labels: &[L]) -> Result<Self> {
        let mut state_pos = HashMap::new();
        let mut st = Vec::new();
        for s in states {
            let s = s.as_ref().to_string();
            if state_pos.contains_key(&s) {
                return Err(Error::Format(format!("duplicate state `{s}`")));
            }
            state_pos.insert(s.clone(), StateId(st.len() as u32));
            st.push(s);
        }
        let mut lb: Vec<String> = Vec::new();
        for l in labels {
            let l = l.as_ref().to_string();
            if lb.contains(&l) {
                return Err(Error::Format(format!("duplicate label `{l}`")));
            }
            lb.push(l);
        }
        Ok(Alphabet { states: st, labels: lb, state_pos })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.state_pos
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0 as usize]
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn check_label(&self, label: &str) -> Result<()> {
        if self.has_label(label) {
            Ok(())
        } else {
            Err(Error::UnknownLabel(label.to_string()))
        }
    }
}

/// A DAG automaton whose transitions rewrite multisets of states.
#[derive(Clone, Debug)]
pub struct DagAutomaton {
    alphabet: Alphabet,
    transitions: Vec<Transition>,
    // label -> lhs -> transition indices
    by_lhs: HashMap<String, HashMap<Multiset<StateId>, Vec<usize>>>,
    by_rule: HashMap<(Multiset<StateId>, String, Multiset<StateId>), usize>,
}

impl PartialEq for DagAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.transitions == other.transitions
    }
}

impl DagAutomaton {
    pub fn new(alphabet: Alphabet, transitions: Vec<Transition>) -> Result<Self> {
        let nstates = alphabet.states().len() as u32;
        let mut by_lhs: HashMap<String, HashMap<Multiset<StateId>, Vec<usize>>> = HashMap::new();
        let mut by_rule = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            alphabet.check_label(&t.label)?;
            if let Some(bad) = t.lhs.iter().chain(t.rhs.iter()).find(|s| s.0 >= nstates) {
                return Err(Error::UnknownState(format!("#{}", bad.0)));
            }
            let key = (t.lhs.clone(), t.label.clone(), t.rhs.clone());
            if by_rule.insert(key, i).is_some() {
                return Err(Error::DuplicateTransition(format_rule(&alphabet, t)));
            }
            by_lhs
                .entry(t.label.clone())
                .or_default()
                .entry(t.lhs.clone())
                .or_default()
                .push(i);
        }
        Ok(DagAutomaton { alphabet, transitions, by_lhs, by_rule })
    }

    pub fn builder<S: AsRef<str>, L: AsRef<str>>(states: &[S], labels: &[L]) -> Result<AutomatonBuilder> {
        Ok(AutomatonBuilder { alphabet: Alphabet::new(states, labels)?, transitions: Vec::new() })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &Transition {
        &self.transitions[i]
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.alphabet.state(name)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        self.alphabet.state_name(s)
    }

    /// Transitions with the given label and left-hand side.
    pub fn transitions_from(&self, label: &str, lhs: &Multiset<StateId>) -> &[usize] {
        self.by_lhs
            .get(label)
            .and_then(|m| m.get(lhs))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn find_transition(
        &self,
        lhs: &Multiset<StateId>,
        label: &str,
        rhs: &Multiset<StateId>,
    ) -> Option<usize> {
        self.by_rule.get(&(lhs.clone(), label.to_string(), rhs.clone())).copied()
    }

    pub fn max_lhs(&self) -> usize {
        self.transitions.iter().map(|t| t.lhs.size()).max().unwrap_or(0)
    }

    pub fn is_weighted(&self) -> bool {
        self.transitions.iter().all(|t| t.weight.is_some())
    }

    pub fn weight(&self, i: usize) -> Result<f64> {
        self.transitions[i].weight.ok_or(Error::MissingWeight(i))
    }

    /// Copy of this automaton with the given weights, one per transition.
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
            .map(|(t, &w)| Transition { weight: Some(w), ..t.clone() })
            .collect();
        DagAutomaton::new(self.alphabet.clone(), transitions)
    }

    pub fn with_uniform_weight(&self, w: f64) -> Self {
        self.with_weights(&vec![w; self.transitions.len()])
            .expect("same transitions, same validity")
    }

    pub fn format_transition(&self, i: usize) -> String {
        format_rule(&self.alphabet, &self.transitions[i])
    }
}

fn format_rule(alphabet: &Alphabet, t: &Transition) -> String {
    let side = |m: &Multiset<StateId>| {
        if m.is_empty() {
            "∅".to_string()
        } else {
            let names: Vec<&str> = m.iter().map(|&s| alphabet.state_name(s)).collect();
            format!("{{{}}}", names.join(","))
        }
    };
    match t.weight {
        Some(w) => format!("{} -{}/{}-> {}", side(&t.lhs), t.label, w, side(&t.rhs)),
        None => format!("{} -{}-> {}", side(&t.lhs), t.label, side(&t.rhs)),
    }
}

impl fmt::Display for DagAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.transitions.len() {
            writeln!(f, "t{}: {}", i + 1, self.format_transition(i))?;
        }
        Ok(())
    }
}

pub struct AutomatonBuilder {
    alphabet: Alphabet,
    transitions: Vec<Transition>,
}

impl AutomatonBuilder {
    pub fn transition(mut self, lhs: &[&str], label: &str, rhs: &[&str], weight: Option<f64>) -> Result<Self> {
        let lhs = lhs.iter().map(|s| self.alphabet.state(s)).collect::<Result<_>>()?;
        let rhs = rhs.iter().map(|s| self.alphabet.state(s)).collect::<Result<_>>()?;
        self.transitions.push(Transition { lhs, label: label.to_string(), rhs, weight });
        Ok(self)
    }

    pub fn build(self) -> Result<DagAutomaton> {
        DagAutomaton::new(self.alphabet, self.transitions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example1_shape() {
        let a = fixtures::example1();
        assert_eq!(a.transitions().len(), 5);
        assert_eq!(a.alphabet().states().len(), 3);
        assert_eq!(a.max_lhs(), 2);
        assert!(a.transition(0).is_start());
        assert!(!a.is_weighted());
        let p = a.state("p").unwrap();
        let lhs: Multiset<StateId> = [p].into_iter().collect();
        assert_eq!(a.transitions_from("b", &lhs), &[1]);
        assert_eq!(a.transitions_from("d", &lhs), &[] as &[usize]);
    }

    #[test]
    fn rejects_unknown_names_and_duplicates() {
        let b = DagAutomaton::builder(&["p"], &["a"]).unwrap();
        assert!(matches!(b.transition(&["q"], "a", &[], None), Err(Error::UnknownState(_))));
        let b = DagAutomaton::builder(&["p"], &["a"]).unwrap();
        let r = b.transition(&[], "z", &["p"], None).unwrap().build();
        assert!(matches!(r, Err(Error::UnknownLabel(_))));
        let r = DagAutomaton::builder(&["p"], &["a"])
            .unwrap()
            .transition(&[], "a", &["p"], None)
            .unwrap()
            .transition(&[], "a", &["p"], Some(1.0))
            .unwrap()
            .build();
        assert!(matches!(r, Err(Error::DuplicateTransition(_))));
    }

    #[test]
    fn weights() {
        let a = fixtures::example1();
        assert_eq!(a.weight(0), Err(Error::MissingWeight(0)));
        let w = a.with_uniform_weight(0.5);
        assert!(w.is_weighted());
        assert_eq!(w.weight(3), Ok(0.5));
        assert!(a.with_weights(&[1.0]).is_err());
    }
}
