use crate::analysis::canon::{canonical_form, CanonicalForm};
use crate::error::{Error, Result};
use crate::graph::{Dag, Edge, EdgeId, Node, NodeId};

/// Replaces every labeled edge `u -l-> v` by `u -> x -> v` where the new
/// node `x` carries label `l`. Original nodes keep their ids; new nodes are
/// numbered after the largest existing id, in edge order. Edge `k` becomes
/// edges `2k` (into `x`) and `2k + 1` (out of `x`).
pub fn encode_edge_labels(g: &Dag) -> Result<Dag> {
    let first = g.nodes().iter().map(|n| n.id.0 + 1).max().unwrap_or(0);
    let mut nodes = g.nodes().to_vec();
    let mut edges = Vec::with_capacity(2 * g.edge_count());
    for (k, e) in g.edges().iter().enumerate() {
        let label = e.label.clone().ok_or(Error::UnlabeledEdge(e.id))?;
        let mid = NodeId(first + k as u32);
        nodes.push(Node { id: mid, label });
        let k = k as u32;
        edges.push(Edge { id: EdgeId(2 * k), src: e.src, tar: mid, label: None });
        edges.push(Edge { id: EdgeId(2 * k + 1), src: mid, tar: e.tar, label: None });
    }
    Dag::new(nodes, edges)
}

/// Canonical form of `g` with every node tagged by `node_tags` and every
/// edge by `edge_tags` (both by position). Two annotations of the same graph
/// get equal forms iff an automorphism carries one onto the other.
pub(crate) fn annotated_form(g: &Dag, node_tags: &[String], edge_tags: &[String]) -> CanonicalForm {
    let nodes = g
        .nodes()
        .iter()
        .zip(node_tags)
        .map(|(v, t)| Node { id: v.id, label: format!("n{}:{}:{t}", v.label.len(), v.label) })
        .collect();
    let edges = g
        .edges()
        .iter()
        .zip(edge_tags)
        .map(|(e, t)| Edge { label: Some(format!("s:{t}")), ..e.clone() })
        .collect();
    let annotated = Dag::new(nodes, edges).expect("same shape");
    canonical_form(&encode_edge_labels(&annotated).expect("every edge tagged"))
}
