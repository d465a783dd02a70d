//! Canonical forms for node-labeled DAGs with parallel edges.
//!
//! Colour refinement seeded by `(label, in-degree, out-degree)`, then
//! individualisation of the first non-singleton colour class with
//! backtracking. The canonical form is the least adjacency encoding over all
//! leaves of the search tree. Two graphs get the same form iff they are
//! isomorphic as labeled directed multigraphs.

use std::collections::BTreeMap;
use std::fmt;

use crate::graph::Dag;

/// Byte encoding of a graph in canonical node order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Smallest edge encoding found so far, with the colouring that produced it.
type Best = (Vec<(u32, u32)>, Vec<u32>);

struct Structure {
    labels: Vec<u32>,
    out_nbrs: Vec<Vec<usize>>,
    in_nbrs: Vec<Vec<usize>>,
}

impl Structure {
    fn new(g: &Dag) -> Self {
        let mut distinct: Vec<&str> = g.nodes().iter().map(|v| v.label.as_str()).collect();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = g
            .nodes()
            .iter()
            .map(|v| distinct.binary_search(&v.label.as_str()).unwrap() as u32)
            .collect();
        let n = g.node_count();
        let mut out_nbrs = vec![Vec::new(); n];
        let mut in_nbrs = vec![Vec::new(); n];
        for e in 0..g.edge_count() {
            let (s, t) = (g.src_index(e), g.tar_index(e));
            out_nbrs[s].push(t);
            in_nbrs[t].push(s);
        }
        for v in out_nbrs.iter_mut().chain(in_nbrs.iter_mut()) {
            v.sort_unstable();
        }
        Structure { labels, out_nbrs, in_nbrs }
    }

    fn n(&self) -> usize {
        self.labels.len()
    }

    /// Replaces each signature by its rank among the sorted distinct
    /// signatures.
    fn rank<K: Ord + Clone>(sigs: &[K]) -> Vec<u32> {
        let mut sorted: Vec<K> = sigs.to_vec();
        sorted.sort();
        sorted.dedup();
        sigs.iter().map(|s| sorted.binary_search(s).unwrap() as u32).collect()
    }

    fn initial_colors(&self) -> Vec<u32> {
        let sigs: Vec<(u32, usize, usize)> = (0..self.n())
            .map(|v| (self.labels[v], self.in_nbrs[v].len(), self.out_nbrs[v].len()))
            .collect();
        Self::rank(&sigs)
    }

    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let mut classes = count_classes(&colors);
        loop {
            let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..self.n())
                .map(|v| {
                    let mut o: Vec<u32> = self.out_nbrs[v].iter().map(|&w| colors[w]).collect();
                    let mut i: Vec<u32> = self.in_nbrs[v].iter().map(|&w| colors[w]).collect();
                    o.sort_unstable();
                    i.sort_unstable();
                    (colors[v], o, i)
                })
                .collect();
            let next = Self::rank(&sigs);
            let c = count_classes(&next);
            colors = next;
            if c == classes {
                return colors;
            }
            classes = c;
        }
    }

    /// Edge list under the discrete colouring `colors`, which doubles as
    /// the new node index.
    fn encode_edges(&self, colors: &[u32]) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> = (0..self.n())
            .flat_map(|v| self.out_nbrs[v].iter().map(move |&w| (colors[v], colors[w])))
            .collect();
        edges.sort_unstable();
        edges
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
            && self.out_nbrs[u] == self.out_nbrs[v]
            && self.in_nbrs[u] == self.in_nbrs[v]
    }

    fn search(&self, colors: Vec<u32>, best: &mut Option<Best>) {
        let colors = self.refine(colors);
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            cells.entry(c).or_default().push(v);
        }
        let Some((&target, cell)) = cells.iter().find(|(_, vs)| vs.len() > 1) else {
            let edges = self.encode_edges(&colors);
            if best.as_ref().is_none_or(|(b, _)| edges < *b) {
                *best = Some((edges, colors));
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            // twins are interchangeable, so they lead to identical leaves
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let next: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| {
                    if c > target || (c == target && u != v) {
                        c * 2 + 1
                    } else {
                        c * 2
                    }
                })
                .collect();
            self.search(next, best);
        }
    }
}

fn count_classes(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Canonical form plus the canonical node order (node positions listed in
/// canonical sequence).
pub fn canonical_labeling(g: &Dag) -> (CanonicalForm, Vec<usize>) {
    let s = Structure::new(g);
    let n = s.n();
    let mut best = None;
    s.search(s.initial_colors(), &mut best);
    let (edges, colors) = best.unwrap_or_default();
    let mut order = vec![0usize; n];
    for (v, &c) in colors.iter().enumerate() {
        order[c as usize] = v;
    }
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&(n as u32).to_be_bytes());
    for &v in &order {
        let l = g.nodes()[v].label.as_bytes();
        bytes.extend_from_slice(&(l.len() as u32).to_be_bytes());
        bytes.extend_from_slice(l);
    }
    bytes.extend_from_slice(&(edges.len() as u32).to_be_bytes());
    for (a, b) in edges {
        bytes.extend_from_slice(&a.to_be_bytes());
        bytes.extend_from_slice(&b.to_be_bytes());
    }
    (CanonicalForm(bytes), order)
}

pub fn canonical_form(g: &Dag) -> CanonicalForm {
    canonical_labeling(g).0
}

pub fn is_isomorphic(g: &Dag, h: &Dag) -> bool {
    g.node_count() == h.node_count()
        && g.edge_count() == h.edge_count()
        && canonical_form(g) == canonical_form(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{Edge, Node, NodeId};
    use proptest::prelude::*;
    use std::collections::HashMap;

    /// Tries every label-preserving bijection.
    fn brute_force_isomorphic(g: &Dag, h: &Dag) -> bool {
        let n = g.node_count();
        if n != h.node_count() || g.edge_count() != h.edge_count() {
            return false;
        }
        let mult = |d: &Dag| {
            let mut m: HashMap<(usize, usize), usize> = HashMap::new();
            for e in 0..d.edge_count() {
                *m.entry((d.src_index(e), d.tar_index(e))).or_default() += 1;
            }
            m
        };
        let (mg, mh) = (mult(g), mult(h));
        fn go(
            g: &Dag,
            h: &Dag,
            mg: &HashMap<(usize, usize), usize>,
            mh: &HashMap<(usize, usize), usize>,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            let k = map.len();
            if k == g.node_count() {
                return mg.iter().all(|(&(a, b), &c)| mh.get(&(map[a], map[b])) == Some(&c));
            }
            for w in 0..h.node_count() {
                if used[w] || g.nodes()[k].label != h.nodes()[w].label {
                    continue;
                }
                // partial check on already-mapped pairs
                let ok = (0..k).all(|j| {
                    mg.get(&(k, j)) == mh.get(&(w, map[j])) && mg.get(&(j, k)) == mh.get(&(map[j], w))
                }) && mg.get(&(k, k)) == mh.get(&(w, w));
                if !ok {
                    continue;
                }
                used[w] = true;
                map.push(w);
                if go(g, h, mg, mh, map, used) {
                    return true;
                }
                map.pop();
                used[w] = false;
            }
            false
        }
        go(g, h, &mg, &mh, &mut Vec::new(), &mut vec![false; n])
    }

    fn permuted(g: &Dag, perm: &[u32]) -> Dag {
        let nodes = g
            .nodes()
            .iter()
            .map(|v| Node { id: NodeId(perm[v.id.0 as usize] + 100), label: v.label.clone() })
            .rev()
            .collect();
        let edges = g
            .edges()
            .iter()
            .rev()
            .enumerate()
            .map(|(k, e)| Edge::new(k as u32 * 3, perm[e.src.0 as usize] + 100, perm[e.tar.0 as usize] + 100))
            .collect();
        Dag::new(nodes, edges).unwrap()
    }

    #[test]
    fn permutation_invariance_on_example3() {
        let g1 = fixtures::example3_g(1);
        let h = permuted(&g1, &[2, 0, 1]);
        assert_eq!(canonical_form(&g1), canonical_form(&h));
    }

    #[test]
    fn fig1v_and_fig1vii_differ() {
        assert_ne!(canonical_form(&fixtures::fig1v()), canonical_form(&fixtures::fig1vii()));
    }

    #[test]
    fn parallel_edges_matter() {
        let g0 = fixtures::example3_g(0);
        let single = Dag::from_parts(&[(0, "a"), (1, "c")], &[(0, 0, 1)]).unwrap();
        assert_ne!(canonical_form(&g0), canonical_form(&single));
        assert!(!is_isomorphic(&g0, &single));
    }

    #[test]
    fn renumbered_graph_has_same_form() {
        let g = fixtures::nonplanar_dotted();
        let (f, order) = canonical_labeling(&g);
        let r = g.renumbered(&order);
        assert_eq!(canonical_form(&r), f);
        assert_eq!(canonical_labeling(&r).1, (0..r.node_count()).collect::<Vec<_>>());
    }

    #[test]
    fn symmetric_star_is_fast() {
        let mut nodes = vec![(0, "a")];
        let mut edges = Vec::new();
        for i in 1..=14u32 {
            nodes.push((i, "b"));
            edges.push((i - 1, 0, i));
        }
        let g = Dag::from_parts(&nodes, &edges).unwrap();
        let (_, order) = canonical_labeling(&g);
        assert_eq!(order[0], 0);
    }

    #[test]
    fn empty_graph() {
        assert_eq!(canonical_form(&Dag::empty()), canonical_form(&Dag::empty()));
    }

    fn small_dag() -> impl Strategy<Value = Dag> {
        (1usize..=8).prop_flat_map(|n| {
            (
                proptest::collection::vec(0u8..2, n),
                proptest::collection::vec((0..n, 0..n), 0..12),
            )
                .prop_map(move |(labels, pairs)| {
                    let names = ["x", "y"];
                    let nodes: Vec<(u32, &str)> =
                        labels.iter().enumerate().map(|(i, &l)| (i as u32, names[l as usize])).collect();
                    let edges: Vec<(u32, u32, u32)> = pairs
                        .iter()
                        .filter(|(a, b)| a != b)
                        .enumerate()
                        .map(|(k, &(a, b))| (k as u32, a.min(b) as u32, a.max(b) as u32))
                        .collect();
                    Dag::from_parts(&nodes, &edges).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn agrees_with_brute_force(g in small_dag(), h in small_dag()) {
            prop_assert_eq!(canonical_form(&g) == canonical_form(&h), brute_force_isomorphic(&g, &h));
        }

        #[test]
        fn invariant_under_relabeling(g in small_dag(), seed in any::<u64>()) {
            let n = g.node_count();
            let mut perm: Vec<u32> = (0..n as u32).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let h = permuted(&g, &perm);
            prop_assert!(brute_force_isomorphic(&g, &h));
            prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        }
    }
}
