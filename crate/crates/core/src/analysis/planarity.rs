//! Left-right planarity test (Brandes' formulation of de Fraysseix and
//! Rosenstiehl), decision only.
//!
//! Works on the underlying simple undirected graph: directions are dropped,
//! parallel edges merged and self-loops ignored. None of these change
//! planarity.

use std::collections::HashSet;

use crate::graph::Dag;

#[derive(Clone, Copy, Default, PartialEq, Eq)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy)]
struct ConflictPair {
    id: usize,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState {
    adj: Vec<Vec<usize>>,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    // oriented edges
    ends: Vec<(usize, usize)>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    out: Vec<Vec<usize>>,
    // testing phase
    refs: Vec<Option<usize>>,
    lowpt_edge: Vec<Option<usize>>,
    stack_bottom: Vec<Option<usize>>,
    stack: Vec<ConflictPair>,
    next_id: usize,
}

impl LrState {
    fn new(adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        LrState {
            adj,
            height: vec![None; n],
            parent_edge: vec![None; n],
            ends: Vec::new(),
            lowpt: Vec::new(),
            lowpt2: Vec::new(),
            nesting_depth: Vec::new(),
            out: vec![Vec::new(); n],
            refs: Vec::new(),
            lowpt_edge: Vec::new(),
            stack_bottom: Vec::new(),
            stack: Vec::new(),
            next_id: 0,
        }
    }

    fn orient(&mut self, v: usize, seen: &mut HashSet<(usize, usize)>) {
        let e = self.parent_edge[v];
        let hv = self.height[v].expect("visited");
        for i in 0..self.adj[v].len() {
            let w = self.adj[v][i];
            if !seen.insert((v.min(w), v.max(w))) {
                continue;
            }
            let vw = self.ends.len();
            self.ends.push((v, w));
            self.out[v].push(vw);
            self.lowpt.push(hv);
            self.lowpt2.push(hv);
            self.nesting_depth.push(0);
            match self.height[w] {
                None => {
                    self.parent_edge[w] = Some(vw);
                    self.height[w] = Some(hv + 1);
                    self.orient(w, seen);
                }
                Some(hw) => self.lowpt[vw] = hw,
            }
            self.nesting_depth[vw] = 2 * self.lowpt[vw] + usize::from(self.lowpt2[vw] < hv);
            if let Some(e) = e {
                let (lv, l2v) = (self.lowpt[vw], self.lowpt2[vw]);
                if lv < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(l2v);
                    self.lowpt[e] = lv;
                } else if lv > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(lv);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(l2v);
                }
            }
        }
    }

    fn top_id(&self) -> Option<usize> {
        self.stack.last().map(|p| p.id)
    }

    fn push(&mut self, left: Interval, right: Interval) {
        let id = self.next_id;
        self.next_id += 1;
        self.stack.push(ConflictPair { id, left, right });
    }

    fn conflicting(&self, i: &Interval, b: usize) -> bool {
        !i.is_empty() && i.high.is_some_and(|h| self.lowpt[h] > self.lowpt[b])
    }

    fn lowest(&self, p: &ConflictPair) -> Option<usize> {
        let l = p.left.low.map(|e| self.lowpt[e]);
        let r = p.right.low.map(|e| self.lowpt[e]);
        match (p.left.is_empty(), p.right.is_empty()) {
            (true, _) => r,
            (_, true) => l,
            _ => Some(l?.min(r?)),
        }
    }

    fn test(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let hv = self.height[v].expect("visited");
        let mut order = self.out[v].clone();
        order.sort_by_key(|&x| self.nesting_depth[x]);
        for (idx, &ei) in order.iter().enumerate() {
            let w = self.ends[ei].1;
            self.stack_bottom[ei] = self.top_id();
            if self.parent_edge[w] == Some(ei) {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = Some(ei);
                self.push(Interval::default(), Interval { low: Some(ei), high: Some(ei) });
            }
            if self.lowpt[ei] < hv {
                let e = e.expect("only non-root nodes have return edges below them");
                if idx == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = e {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p_left = Interval::default();
        let mut p_right = Interval::default();
        // merge return edges of ei into the right interval
        loop {
            let mut q = self.stack.pop().expect("ei has return edges on the stack");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qlow = q.right.low.expect("nonempty right interval");
            if self.lowpt[qlow] > self.lowpt[e] {
                if p_right.is_empty() {
                    p_right = q.right;
                } else if let Some(pl) = p_right.low {
                    self.refs[pl] = q.right.high;
                }
                p_right.low = q.right.low;
            } else {
                self.refs[qlow] = self.lowpt_edge[e];
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into the left
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(pl) = p_right.low {
                self.refs[pl] = q.right.high;
            }
            if q.right.low.is_some() {
                p_right.low = q.right.low;
            }
            if p_left.is_empty() {
                p_left = q.left;
            } else if let Some(pl) = p_left.low {
                self.refs[pl] = q.left.high;
            }
            p_left.low = q.left.low;
        }
        if !(p_left.is_empty() && p_right.is_empty()) {
            self.push(p_left, p_right);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.ends[e].0;
        let hu = self.height[u];
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            self.stack.pop();
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high.filter(|&h| self.ends[h].1 == u) {
                p.left.high = self.refs[h];
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low.take() {
                    self.refs[l] = p.right.low;
                }
            }
            while let Some(h) = p.right.high.filter(|&h| self.ends[h].1 == u) {
                p.right.high = self.refs[h];
            }
            if p.right.high.is_none() {
                if let Some(l) = p.right.low.take() {
                    self.refs[l] = p.left.low;
                }
            }
            self.stack.push(p);
        }
        if Some(self.lowpt[e]) < hu {
            if let Some(top) = self.stack.last() {
                let (hl, hr) = (top.left.high, top.right.high);
                self.refs[e] = match (hl, hr) {
                    (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                    (Some(l), None) => Some(l),
                    _ => hr,
                };
            }
        }
    }

    fn run(mut self) -> bool {
        let n = self.adj.len();
        let mut seen = HashSet::new();
        let mut roots = Vec::new();
        for v in 0..n {
            if self.height[v].is_none() {
                self.height[v] = Some(0);
                roots.push(v);
                self.orient(v, &mut seen);
            }
        }
        let m = self.ends.len();
        self.refs = vec![None; m];
        self.lowpt_edge = vec![None; m];
        self.stack_bottom = vec![None; m];
        roots.into_iter().all(|r| self.test(r))
    }
}

/// Planarity of a simple undirected graph given as an edge list over
/// vertices `0..n`.
pub fn is_planar_edges(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut simple: Vec<(usize, usize)> = edges
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    simple.sort_unstable();
    simple.dedup();
    if n > 2 && simple.len() > 3 * n - 6 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &simple {
        adj[a].push(b);
        adj[b].push(a);
    }
    LrState::new(adj).run()
}

/// Whether the graph, with directions dropped and parallel edges merged,
/// can be drawn in the plane without crossings.
pub fn is_planar(g: &Dag) -> bool {
    let edges: Vec<(usize, usize)> = (0..g.edge_count()).map(|e| (g.src_index(e), g.tar_index(e))).collect();
    is_planar_edges(g.node_count(), &edges)
}
