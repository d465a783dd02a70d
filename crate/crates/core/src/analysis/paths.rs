use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::Dag;

/// Label sequences along every root-to-leaf path.
pub fn label_paths(g: &Dag) -> Result<BTreeSet<Vec<String>>> {
    let order = g.topological_order().ok_or(Error::Cyclic)?;
    // suffixes[v]: label sequences of paths from v to a leaf
    let mut suffixes: Vec<BTreeSet<Vec<String>>> = vec![BTreeSet::new(); g.node_count()];
    for &v in order.iter().rev() {
        let label = &g.nodes()[v].label;
        let mut own = BTreeSet::new();
        if g.out_adj(v).is_empty() {
            own.insert(vec![label.clone()]);
        }
        for &e in g.out_adj(v) {
            for tail in &suffixes[g.tar_index(e)] {
                let mut p = Vec::with_capacity(tail.len() + 1);
                p.push(label.clone());
                p.extend_from_slice(tail);
                own.insert(p);
            }
        }
        suffixes[v] = own;
    }
    Ok((0..g.node_count())
        .filter(|&v| g.in_adj(v).is_empty())
        .flat_map(|v| suffixes[v].iter().cloned())
        .collect())
}

/// The path language of a DAG: root-to-leaf label strings, labels
/// concatenated without separator.
pub fn path_language(g: &Dag) -> Result<BTreeSet<String>> {
    Ok(label_paths(g)?.into_iter().map(|p| p.concat()).collect())
}
