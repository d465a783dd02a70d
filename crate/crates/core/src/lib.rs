//! DAG automata over multisets and ordered sequences of states.
//!
//! The crate generates and recognizes node-labelled DAGs, weighs them,
//! probes the resulting series numerically, and provides the graph
//! utilities (canonical forms, planarity, path languages) those tasks need.
//!
//! ```
//! use dag_automata::{fixtures, recognition::accepting_runs};
//!
//! let a = fixtures::example1();
//! let runs = accepting_runs(&a, &fixtures::fig1v()).unwrap();
//! assert_eq!(runs.len(), 1);
//! ```

pub mod analysis;
pub mod automaton;
pub mod derivation;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod multiset;
pub mod planar;
pub mod recognition;
pub mod reproduce;
pub mod series;
pub mod weighting;

pub use automaton::{Alphabet, DagAutomaton, StateId, Transition};
pub use derivation::{Configuration, Mode};
pub use error::{Error, Result};
pub use graph::{Dag, Edge, EdgeId, Node, NodeId, RootPolicy};
pub use multiset::Multiset;
pub use planar::{PlanarAutomaton, PlanarTransition};
pub use recognition::Run;
