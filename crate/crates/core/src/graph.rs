//! Node-labeled directed graphs with explicit edge identity.
//!
//! Parallel edges are allowed and are told apart by their [`EdgeId`]; runs and
//! rewiring address individual edges through it.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub tar: NodeId,
    /// Optional edge label; only meaningful as input to
    /// [`encode_edge_labels`](crate::analysis::encode_edge_labels).
    #[serde(rename = "elabel", default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Edge {
    pub fn new(id: u32, src: u32, tar: u32) -> Self {
        Edge { id: EdgeId(id), src: NodeId(src), tar: NodeId(tar), label: None }
    }

    pub fn labeled(id: u32, src: u32, tar: u32, label: &str) -> Self {
        Edge { label: Some(label.to_string()), ..Edge::new(id, src, tar) }
    }
}

#[derive(Serialize, Deserialize)]
struct DagRepr {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

/// A node-labeled directed graph `(V, E, lab, src, tar)`.
///
/// Construction only checks referential integrity (unique ids, edges between
/// existing nodes). Acyclicity, connectivity and the root policy are checked by
/// [`Dag::validate`], so that cyclic inputs can be reported rather than
/// rejected at parse time.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DagRepr", into = "DagRepr")]
pub struct Dag {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_pos: HashMap<NodeId, usize>,
    edge_pos: HashMap<EdgeId, usize>,
    in_adj: Vec<Vec<usize>>,
    out_adj: Vec<Vec<usize>>,
}

impl TryFrom<DagRepr> for Dag {
    type Error = Error;
    fn try_from(r: DagRepr) -> Result<Self> {
        Dag::new(r.nodes, r.edges)
    }
}

impl From<Dag> for DagRepr {
    fn from(d: Dag) -> Self {
        DagRepr { nodes: d.nodes, edges: d.edges }
    }
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

/// Root-count policy for [`Dag::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootPolicy {
    One,
    Any,
}

/// First property violated by a graph, as reported by [`Dag::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Cycle,
    NotConnected,
    RootCount { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle => write!(f, "graph contains a directed cycle"),
            Violation::NotConnected => write!(f, "graph is not connected"),
            Violation::RootCount { expected, found } => {
                write!(f, "expected {expected} root(s), found {found}")
            }
        }
    }
}

impl Dag {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let mut node_pos = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if node_pos.insert(n.id, i).is_some() {
                return Err(Error::DuplicateNode(n.id));
            }
        }
        let mut edge_pos = HashMap::with_capacity(edges.len());
        let mut in_adj = vec![Vec::new(); nodes.len()];
        let mut out_adj = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            if edge_pos.insert(e.id, i).is_some() {
                return Err(Error::DuplicateEdge(e.id));
            }
            let s = *node_pos
                .get(&e.src)
                .ok_or(Error::DanglingEdge { edge: e.id, node: e.src })?;
            let t = *node_pos
                .get(&e.tar)
                .ok_or(Error::DanglingEdge { edge: e.id, node: e.tar })?;
            out_adj[s].push(i);
            in_adj[t].push(i);
        }
        Ok(Dag { nodes, edges, node_pos, edge_pos, in_adj, out_adj })
    }

    /// Shorthand for tests and fixtures: nodes are `(id, label)`, edges
    /// `(id, src, tar)`.
    pub fn from_parts(nodes: &[(u32, &str)], edges: &[(u32, u32, u32)]) -> Result<Self> {
        Dag::new(
            nodes
                .iter()
                .map(|&(id, l)| Node { id: NodeId(id), label: l.to_string() })
                .collect(),
            edges.iter().map(|&(id, s, t)| Edge::new(id, s, t)).collect(),
        )
    }

    pub fn empty() -> Self {
        Dag::new(Vec::new(), Vec::new()).expect("empty graph is well-formed")
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, v: NodeId) -> Option<usize> {
        self.node_pos.get(&v).copied()
    }

    pub fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edge_pos.get(&e).copied()
    }

    pub fn node(&self, v: NodeId) -> Result<&Node> {
        self.node_index(v).map(|i| &self.nodes[i]).ok_or(Error::UnknownNode(v))
    }

    pub fn edge(&self, e: EdgeId) -> Result<&Edge> {
        self.edge_index(e).map(|i| &self.edges[i]).ok_or(Error::UnknownEdge(e))
    }

    /// Edge positions entering the node at position `i`.
    pub fn in_adj(&self, i: usize) -> &[usize] {
        &self.in_adj[i]
    }

    /// Edge positions leaving the node at position `i`.
    pub fn out_adj(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn src_index(&self, e: usize) -> usize {
        self.node_pos[&self.edges[e].src]
    }

    pub fn tar_index(&self, e: usize) -> usize {
        self.node_pos[&self.edges[e].tar]
    }

    pub fn in_edges(&self, v: NodeId) -> Result<Vec<EdgeId>> {
        let i = self.node_index(v).ok_or(Error::UnknownNode(v))?;
        Ok(self.in_adj[i].iter().map(|&e| self.edges[e].id).collect())
    }

    pub fn out_edges(&self, v: NodeId) -> Result<Vec<EdgeId>> {
        let i = self.node_index(v).ok_or(Error::UnknownNode(v))?;
        Ok(self.out_adj[i].iter().map(|&e| self.edges[e].id).collect())
    }

    /// Parallel edges count separately.
    pub fn degree(&self, v: NodeId) -> Result<usize> {
        let i = self.node_index(v).ok_or(Error::UnknownNode(v))?;
        Ok(self.in_adj[i].len() + self.out_adj[i].len())
    }

    pub fn roots(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.in_adj[i].is_empty())
            .map(|i| self.nodes[i].id)
            .collect()
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.out_adj[i].is_empty())
            .map(|i| self.nodes[i].id)
            .collect()
    }

    pub fn roots_and_leaves(&self) -> (Vec<NodeId>, Vec<NodeId>) {
        (self.roots(), self.leaves())
    }

    /// Kahn's algorithm over node positions; `None` when a cycle exists.
    /// Ties are broken by node position, so the order is deterministic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = self.in_adj.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in &self.out_adj[v] {
                let t = self.tar_index(e);
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push_back(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Connectivity in the undirected sense. The empty graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            let nbrs = self.out_adj[v]
                .iter()
                .map(|&e| self.tar_index(e))
                .chain(self.in_adj[v].iter().map(|&e| self.src_index(e)));
            for w in nbrs {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Checks acyclicity, then connectivity, then the root policy, and
    /// reports the first property that fails.
    pub fn validate(&self, policy: RootPolicy) -> std::result::Result<(), Violation> {
        if !self.is_acyclic() {
            return Err(Violation::Cycle);
        }
        if !self.is_connected() {
            return Err(Violation::NotConnected);
        }
        let roots = self.roots().len();
        match policy {
            RootPolicy::One if roots != 1 => {
                Err(Violation::RootCount { expected: 1, found: roots })
            }
            _ => Ok(()),
        }
    }

    /// Rebuilds the graph with nodes listed in `order` (positions into
    /// [`Dag::nodes`]) and renumbered `0..n`; edges are renumbered `0..m`
    /// after sorting by new endpoints.
    pub fn renumbered(&self, order: &[usize]) -> Dag {
        let mut new_pos = vec![0u32; self.nodes.len()];
        for (k, &i) in order.iter().enumerate() {
            new_pos[i] = k as u32;
        }
        let nodes = order
            .iter()
            .enumerate()
            .map(|(k, &i)| Node { id: NodeId(k as u32), label: self.nodes[i].label.clone() })
            .collect();
        let mut ends: Vec<(u32, u32, Option<String>)> = (0..self.edges.len())
            .map(|e| {
                (
                    new_pos[self.src_index(e)],
                    new_pos[self.tar_index(e)],
                    self.edges[e].label.clone(),
                )
            })
            .collect();
        ends.sort();
        let edges = ends
            .into_iter()
            .enumerate()
            .map(|(k, (s, t, label))| Edge { id: EdgeId(k as u32), src: NodeId(s), tar: NodeId(t), label })
            .collect();
        Dag::new(nodes, edges).expect("renumbering preserves well-formedness")
    }

    /// Same nodes, same edge ids, with edge targets replaced by `targets`
    /// (indexed by edge position).
    pub(crate) fn with_targets(&self, targets: &[NodeId]) -> Dag {
        let edges = self
            .edges
            .iter()
            .zip(targets)
            .map(|(e, &t)| Edge { tar: t, ..e.clone() })
            .collect();
        Dag::new(self.nodes.clone(), edges).expect("targets reference existing nodes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn in_edges_of_fig1v_c_node() {
        let g = fixtures::fig1v();
        let c = g.nodes().iter().find(|n| n.label == "c").unwrap().id;
        let ins = g.in_edges(c).unwrap();
        assert_eq!(ins.len(), 1);
        let e = g.edge(ins[0]).unwrap();
        assert_eq!(g.node(e.src).unwrap().label, "b");
    }

    #[test]
    fn in_edges_of_example4_sink() {
        let g = fixtures::example4();
        let c = g.nodes().iter().find(|n| n.label == "c").unwrap().id;
        let ins = g.in_edges(c).unwrap();
        assert_eq!(ins.len(), 2);
        let mut srcs: Vec<_> = ins
            .iter()
            .map(|&e| g.node(g.edge(e).unwrap().src).unwrap().label.clone())
            .collect();
        srcs.sort();
        assert_eq!(srcs, vec!["a", "b"]);
        // the b source is the second b, i.e. the one with a b parent
        let b_src = ins
            .iter()
            .map(|&e| g.edge(e).unwrap().src)
            .find(|&s| g.node(s).unwrap().label == "b")
            .unwrap();
        let parent = g.edge(g.in_edges(b_src).unwrap()[0]).unwrap().src;
        assert_eq!(g.node(parent).unwrap().label, "b");
    }

    #[test]
    fn isolated_node_has_no_edges() {
        let g = Dag::from_parts(&[(0, "a")], &[]).unwrap();
        assert!(g.in_edges(NodeId(0)).unwrap().is_empty());
        assert_eq!(g.roots_and_leaves(), (vec![NodeId(0)], vec![NodeId(0)]));
        assert_eq!(g.in_edges(NodeId(7)), Err(Error::UnknownNode(NodeId(7))));
    }

    #[test]
    fn roots_and_leaves_examples() {
        let g = fixtures::fig1v();
        let (r, l) = g.roots_and_leaves();
        assert_eq!(r.len(), 1);
        assert_eq!(l.len(), 1);
        assert_eq!(g.node(r[0]).unwrap().label, "a");
        assert_eq!(g.node(l[0]).unwrap().label, "e");

        let chain = fixtures::ace_chain();
        let (r, l) = chain.roots_and_leaves();
        assert_eq!(chain.node(r[0]).unwrap().label, "a");
        assert_eq!(chain.node(l[0]).unwrap().label, "e");
    }

    #[test]
    fn validate_examples() {
        assert_eq!(fixtures::fig1v().validate(RootPolicy::One), Ok(()));
        let two = Dag::from_parts(&[(0, "a"), (1, "a")], &[]).unwrap();
        assert_eq!(two.validate(RootPolicy::Any), Err(Violation::NotConnected));
        let cyc = Dag::from_parts(&[(0, "u"), (1, "v")], &[(0, 0, 1), (1, 1, 0)]).unwrap();
        assert_eq!(cyc.validate(RootPolicy::Any), Err(Violation::Cycle));
        let v = Dag::from_parts(&[(0, "a"), (1, "a"), (2, "b")], &[(0, 0, 2), (1, 1, 2)]).unwrap();
        assert_eq!(v.validate(RootPolicy::Any), Ok(()));
        assert_eq!(
            v.validate(RootPolicy::One),
            Err(Violation::RootCount { expected: 1, found: 2 })
        );
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Dag::from_parts(&[(0, "a"), (0, "b")], &[]).unwrap_err(),
            Error::DuplicateNode(NodeId(0))
        );
        assert_eq!(
            Dag::from_parts(&[(0, "a")], &[(0, 0, 3)]).unwrap_err(),
            Error::DanglingEdge { edge: EdgeId(0), node: NodeId(3) }
        );
        assert_eq!(
            Dag::from_parts(&[(0, "a"), (1, "b")], &[(0, 0, 1), (0, 0, 1)]).unwrap_err(),
            Error::DuplicateEdge(EdgeId(0))
        );
    }

    #[test]
    fn parallel_edges_count_towards_degree() {
        let g0 = fixtures::example3_g(0);
        let c = g0.nodes().iter().find(|n| n.label == "c").unwrap().id;
        assert_eq!(g0.degree(c).unwrap(), 2);
    }

    #[test]
    fn degree_sums_match_edge_count() {
        for g in [fixtures::fig1v(), fixtures::fig1vii(), fixtures::nonplanar_dotted(), fixtures::example4()] {
            let ins: usize = g.nodes().iter().map(|n| g.in_edges(n.id).unwrap().len()).sum();
            let outs: usize = g.nodes().iter().map(|n| g.out_edges(n.id).unwrap().len()).sum();
            assert_eq!(ins, g.edge_count());
            assert_eq!(outs, g.edge_count());
        }
    }

    #[test]
    fn json_round_trip() {
        let g = fixtures::fig1v();
        let s = serde_json::to_string(&g).unwrap();
        let back: Dag = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
        let bad = r#"{"nodes":[{"id":0,"label":"a"}],"edges":[{"id":0,"src":0,"tar":1}]}"#;
        assert!(serde_json::from_str::<Dag>(bad).is_err());
    }
}
