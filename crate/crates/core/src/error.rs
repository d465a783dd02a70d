use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("edge {edge} references missing node {node}")]
    DanglingEdge { edge: EdgeId, node: NodeId },
    #[error("graph contains a directed cycle")]
    Cyclic,
    #[error("edge {0} has no label")]
    UnlabeledEdge(EdgeId),

    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate transition {0}")]
    DuplicateTransition(String),
    #[error("transition {0} has no weight")]
    MissingWeight(usize),

    #[error("run does not assign a state to edge {0}")]
    PartialRun(EdgeId),
    #[error("run assigns a state to edge {0}, which is not in the graph")]
    RunOutsideGraph(EdgeId),
    #[error("run is not accepting at node {0}")]
    NotAccepting(NodeId),

    #[error("consumed states do not match the left-hand side of transition {0}")]
    StateMismatch(usize),
    #[error("start transition {0} may only be applied to an empty configuration")]
    StartReuse(usize),
    #[error("edge {0} is not on the frontier")]
    NotOnFrontier(EdgeId),
    #[error("frontier position {position} out of range for frontier of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("node budget must be at least 1")]
    InvalidBudget,

    #[error("edges to rewire carry different states")]
    MixedStates,

    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
