//! Bundled example automata and graphs.
//!
//! The JSON sources live in the crate's `fixtures/` directory and are
//! compiled in. [`FixtureSet::load`] reads the same files from another
//! directory, which is how tests inject faults.

use std::path::Path;

use crate::automaton::DagAutomaton;
use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId};
use crate::io;
use crate::planar::PlanarAutomaton;
use crate::recognition::Run;

/// Environment variable naming a directory to load fixtures from instead
/// of the compiled-in copies.
pub const FIXTURES_ENV: &str = "DAGAUT_FIXTURES";

const FILES: [(&str, &str); 12] = [
    ("example1.json", include_str!("../fixtures/example1.json")),
    ("example3.json", include_str!("../fixtures/example3.json")),
    ("example6.json", include_str!("../fixtures/example6.json")),
    ("fig1v.json", include_str!("../fixtures/fig1v.json")),
    ("fig1vii.json", include_str!("../fixtures/fig1vii.json")),
    ("fig1v_run.json", include_str!("../fixtures/fig1v_run.json")),
    ("example4.json", include_str!("../fixtures/example4.json")),
    ("nonplanar_dotted.json", include_str!("../fixtures/nonplanar_dotted.json")),
    ("amr_rahul.json", include_str!("../fixtures/amr_rahul.json")),
    ("amr_rahul_encoded.json", include_str!("../fixtures/amr_rahul_encoded.json")),
    ("amr_coordination.json", include_str!("../fixtures/amr_coordination.json")),
    ("k33.json", include_str!("../fixtures/k33.json")),
];

fn bundled(name: &str) -> &'static str {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).expect("bundled fixture")
}

fn dag(name: &str) -> Dag {
    io::parse_dag(bundled(name)).expect("bundled fixture parses")
}

/// Multiset automaton with transitions a, b, c, d, e over states p, p', q.
pub fn example1() -> DagAutomaton {
    io::parse_multiset_automaton(bundled("example1.json")).expect("bundled fixture parses")
}

/// Weighted automaton generating the chains `G_n`.
pub fn example3() -> DagAutomaton {
    io::parse_multiset_automaton(bundled("example3.json")).expect("bundled fixture parses")
}

/// Planar version of [`example1`] with weights ½, ½, 1, 1, 1.
pub fn example6() -> PlanarAutomaton {
    io::parse_planar_automaton(bundled("example6.json")).expect("bundled fixture parses")
}

pub fn fig1v() -> Dag {
    dag("fig1v.json")
}

pub fn fig1vii() -> Dag {
    dag("fig1vii.json")
}

pub fn fig1v_run(a: &DagAutomaton) -> Run {
    io::parse_run(bundled("fig1v_run.json"), a.alphabet()).expect("bundled fixture parses")
}

pub fn example4() -> Dag {
    dag("example4.json")
}

/// The run `p, q, p, p` on [`example4`] under [`example3`].
pub fn example4_run(a: &DagAutomaton) -> Run {
    let p = a.state("p").expect("state p");
    let q = a.state("q").expect("state q");
    Run::new([(EdgeId(0), p), (EdgeId(1), q), (EdgeId(2), p), (EdgeId(3), p)].into_iter().collect())
}

pub fn nonplanar_dotted() -> Dag {
    dag("nonplanar_dotted.json")
}

pub fn amr_rahul() -> Dag {
    dag("amr_rahul.json")
}

pub fn amr_rahul_encoded() -> Dag {
    dag("amr_rahul_encoded.json")
}

pub fn amr_coordination() -> Dag {
    dag("amr_coordination.json")
}

pub fn k33() -> Dag {
    dag("k33.json")
}

/// a -> c -> e
pub fn ace_chain() -> Dag {
    Dag::from_parts(&[(0, "a"), (1, "c"), (2, "e")], &[(0, 0, 1), (1, 1, 2)]).expect("valid chain")
}

/// `G_n`: a, then `n` b's, then c, plus the direct a -> c edge.
pub fn example3_g(n: usize) -> Dag {
    let n = n as u32;
    let mut nodes = vec![(0, "a")];
    nodes.extend((1..=n).map(|i| (i, "b")));
    nodes.push((n + 1, "c"));
    let mut edges = vec![(0, 0, n + 1)];
    edges.extend((0..=n).map(|i| (i + 1, i, i + 1)));
    Dag::from_parts(&nodes, &edges).expect("valid chain")
}

/// A member of [`example1`]'s language with `n` b's: the b chain, c, then
/// the d chain, where the i-th b feeds the i-th d counted from e.
pub fn example1_member(n: usize) -> Dag {
    let n = n as u32;
    // a = 0, b_i = i, c = n+1, d_i = n+1+i (d_1 feeds e), e = 2n+2
    let mut nodes = vec![(0, "a")];
    nodes.extend((1..=n).map(|i| (i, "b")));
    nodes.push((n + 1, "c"));
    nodes.extend((1..=n).map(|i| (n + 1 + i, "d")));
    nodes.push((2 * n + 2, "e"));
    let mut edges = Vec::new();
    let mut push = |s: u32, t: u32| edges.push((edges.len() as u32, s, t));
    for i in 0..=n {
        push(i, i + 1);
    }
    let d = |i: u32| n + 1 + i;
    push(n + 1, if n == 0 { 2 * n + 2 } else { d(n) });
    for i in (2..=n).rev() {
        push(d(i), d(i - 1));
    }
    if n > 0 {
        push(d(1), 2 * n + 2);
    }
    for i in 1..=n {
        push(i, d(i));
    }
    Dag::from_parts(&nodes, &edges).expect("valid member")
}

/// Every bundled input, as used by the reproduction suite.
#[derive(Clone, Debug)]
pub struct FixtureSet {
    pub example1: DagAutomaton,
    pub example3: DagAutomaton,
    pub example6: PlanarAutomaton,
    pub fig1v: Dag,
    pub fig1vii: Dag,
    pub fig1v_run: Run,
    pub example4: Dag,
    pub nonplanar_dotted: Dag,
    pub amr_rahul: Dag,
    pub amr_rahul_encoded: Dag,
    pub amr_coordination: Dag,
    pub k33: Dag,
}

impl FixtureSet {
    pub fn bundled() -> Self {
        Self::from_source(|name| Ok(bundled(name).to_string())).expect("bundled fixtures parse")
    }

    /// Reads every fixture file from `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        Self::from_source(|name| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
        })
    }

    /// [`FixtureSet::load`] from `$DAGAUT_FIXTURES` if set, else the
    /// bundled copies.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(FIXTURES_ENV) {
            Some(dir) => Self::load(Path::new(&dir)),
            None => Ok(Self::bundled()),
        }
    }

    fn from_source(read: impl Fn(&str) -> Result<String>) -> Result<Self> {
        let ctx = |name: &str, e: Error| Error::Format(format!("{name}: {e}"));
        let text = |name: &str| read(name);
        let dag = |name: &str| io::parse_dag(&text(name)?).map_err(|e| ctx(name, e));
        let example1 = io::parse_multiset_automaton(&text("example1.json")?).map_err(|e| ctx("example1.json", e))?;
        let fig1v_run = io::parse_run(&text("fig1v_run.json")?, example1.alphabet()).map_err(|e| ctx("fig1v_run.json", e))?;
        Ok(FixtureSet {
            example3: io::parse_multiset_automaton(&text("example3.json")?).map_err(|e| ctx("example3.json", e))?,
            example6: io::parse_planar_automaton(&text("example6.json")?).map_err(|e| ctx("example6.json", e))?,
            fig1v: dag("fig1v.json")?,
            fig1vii: dag("fig1vii.json")?,
            fig1v_run,
            example4: dag("example4.json")?,
            nonplanar_dotted: dag("nonplanar_dotted.json")?,
            amr_rahul: dag("amr_rahul.json")?,
            amr_rahul_encoded: dag("amr_rahul_encoded.json")?,
            amr_coordination: dag("amr_coordination.json")?,
            k33: dag("k33.json")?,
            example1,
        })
    }

    /// Names of the files [`FixtureSet::load`] expects.
    pub fn file_names() -> impl Iterator<Item = &'static str> {
        FILES.iter().map(|(n, _)| *n)
    }

    /// Contents of a bundled fixture file.
    pub fn bundled_text(name: &str) -> Option<&'static str> {
        FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::canonical_form;
    use crate::graph::RootPolicy;
    use crate::recognition::{accepting_runs, recognizes};

    #[test]
    fn bundled_fixtures_validate() {
        let f = FixtureSet::bundled();
        for g in [&f.fig1v, &f.fig1vii, &f.example4, &f.amr_rahul, &f.amr_rahul_encoded] {
            assert_eq!(g.validate(RootPolicy::One), Ok(()));
        }
        for g in [&f.nonplanar_dotted, &f.amr_coordination, &f.k33] {
            assert!(g.is_acyclic() && g.is_connected());
        }
    }

    #[test]
    fn members_are_recognized() {
        let a = example1();
        assert_eq!(canonical_form(&example1_member(0)), canonical_form(&ace_chain()));
        assert_eq!(canonical_form(&example1_member(2)), canonical_form(&fig1v()));
        for n in 0..5 {
            let g = example1_member(n);
            assert_eq!(g.node_count(), 2 * n + 3);
            assert_eq!(accepting_runs(&a, &g).unwrap().len(), 1);
        }
        for n in 0..4 {
            assert!(recognizes(&example3(), &example3_g(n)));
        }
    }
}
