//! The display check: a tree is displayed by a binary network when some
//! switching of the network's reticulations cleans up to a refinement of it.

use std::collections::BTreeSet;

use crate::leafset::LeafSet;
use crate::networks::{cleanup, Network, NetworkError};
use crate::trees::{clusters, is_refinement, Tree, TreeBuilder};

/// Converts a reticulation-free network into a [`Tree`].
pub fn to_tree(n: &Network) -> Option<Tree> {
    if n.reticulations().next().is_some() {
        return None;
    }
    let mut builder = TreeBuilder::new();
    let root = copy(n, n.root(), &mut builder);
    Some(builder.finish(root))
}

fn copy(n: &Network, v: u32, builder: &mut TreeBuilder) -> u32 {
    let node = n.node(v);
    if let Some(l) = node.label {
        return builder.leaf(l);
    }
    let children: Vec<u32> = node
        .children
        .iter()
        .map(|&c| copy(n, c, builder))
        .collect();
    builder.internal(children)
}

/// All trees displayed by the binary network `n`: one per choice of a single
/// incoming edge at every reticulation, deduplicated by cluster set. At most
/// `2^r(n)` results. A choice that loses a leaf yields no tree and is
/// skipped.
pub fn displayed_trees(n: &Network) -> Vec<Tree> {
    let retics: Vec<u32> = n.reticulations().collect();
    let want = n.leaf_set();
    let mut seen: BTreeSet<Vec<LeafSet>> = BTreeSet::new();
    let mut out = Vec::new();
    let combos: u64 = retics
        .iter()
        .map(|&r| n.node(r).parents.len() as u64)
        .product();
    for mut code in 0..combos {
        let mut g = n.graph().clone();
        for &r in &retics {
            let parents = n.node(r).parents.clone();
            let keep = (code % parents.len() as u64) as usize;
            code /= parents.len() as u64;
            for (i, &p) in parents.iter().enumerate() {
                if i != keep {
                    g.remove_edge(p, r);
                }
            }
        }
        let tree_net = match cleanup(g) {
            Ok(t) => t,
            Err(_) => continue,
        };
        if tree_net.leaf_set() != want {
            continue;
        }
        let tree = match to_tree(&tree_net) {
            Some(t) => t,
            None => continue,
        };
        let mut key = clusters(&tree);
        key.sort();
        if seen.insert(key) {
            out.push(tree);
        }
    }
    out
}

/// True iff `n` displays `t`: some displayed tree of `n` refines `t`.
pub fn displays(n: &Network, t: &Tree) -> Result<bool, NetworkError> {
    if n.leaf_set() != t.leaf_set() {
        return Err(NetworkError::LabelMismatch);
    }
    let want: std::collections::HashSet<LeafSet> = clusters(t).into_iter().collect();
    for cand in displayed_trees(n) {
        let fine: std::collections::HashSet<LeafSet> = clusters(&cand).into_iter().collect();
        if want.iter().all(|c| fine.contains(c)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Checks that `n` displays every tree of the slice; first failure index is
/// reported.
pub fn displays_all(n: &Network, trees: &[Tree]) -> Result<Option<usize>, NetworkError> {
    for (i, t) in trees.iter().enumerate() {
        if !displays(n, t)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::reticulation_number;
    use crate::newick::{parse_network, parse_tree, serialize_tree, LabelSet};

    #[test]
    fn tree_displays_itself_only() {
        let mut labels = LabelSet::new();
        let n = parse_network("((a,b),c);", &mut labels).unwrap();
        let t = parse_tree("((a,b),c);", &mut labels).unwrap();
        let shown = displayed_trees(&n);
        assert_eq!(shown.len(), 1);
        assert!(displays(&n, &t).unwrap());
    }

    #[test]
    fn one_reticulation_two_trees() {
        let mut labels = LabelSet::new();
        let n = parse_network("((a,(h)#H1),(#H1,b));", &mut labels).unwrap();
        let shown = displayed_trees(&n);
        let mut strs: Vec<String> = shown.iter().map(|t| serialize_tree(t, &labels)).collect();
        strs.sort();
        assert_eq!(strs, vec!["((a,h),b);", "(a,(b,h));"]);

        let not_shown = parse_tree("((a,b),h);", &mut labels).unwrap();
        assert!(!displays(&n, &not_shown).unwrap());
        let shown_t = parse_tree("((a,h),b);", &mut labels).unwrap();
        assert!(displays(&n, &shown_t).unwrap());
    }

    #[test]
    fn label_mismatch_is_an_error() {
        let mut labels = LabelSet::new();
        let n = parse_network("((a,b),c);", &mut labels).unwrap();
        let t = parse_tree("((a,b),d);", &mut labels).unwrap();
        assert!(displays(&n, &t).is_err());
    }

    /// Display oracle straight from the definition: enumerate subgraphs
    /// (edge subsets), keep those that form a root-connected tree spanning
    /// all leaves, contract their unary vertices, and test whether further
    /// contractions can produce `t` (cluster containment).
    fn displays_by_subgraph_oracle(n: &Network, t: &Tree) -> bool {
        let edges: Vec<(u32, u32)> = n
            .vertices()
            .flat_map(|v| n.node(v).children.iter().map(move |&c| (v, c)))
            .collect();
        let want_leaves = n.leaf_set();
        let want: std::collections::HashSet<LeafSet> = clusters(t).into_iter().collect();
        for mask in 0u64..(1 << edges.len()) {
            let mut g = crate::networks::Digraph::new();
            for v in n.vertices() {
                g.add_node(n.node(v).label);
            }
            for (i, &(u, v)) in edges.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    g.add_edge(u, v);
                }
            }
            // indegree <= 1 everywhere makes the subgraph a forest
            if (0..g.len() as u32).any(|v| g.node(v).parents.len() > 1) {
                continue;
            }
            let net = match cleanup(g) {
                Ok(x) => x,
                Err(_) => continue,
            };
            if net.leaf_set() != want_leaves {
                continue;
            }
            if let Some(tree) = to_tree(&net) {
                let fine: std::collections::HashSet<LeafSet> =
                    clusters(&tree).into_iter().collect();
                if want.iter().all(|c| fine.contains(c)) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn displays_agrees_with_subgraph_contraction_oracle() {
        let mut labels = LabelSet::new();
        let nets = [
            "((a,(h)#H1),(#H1,b));",
            "((a,b),c);",
            "(((a)#H1,b),(#H1,c));",
        ];
        let trees = [
            "((a,h),b);",
            "(a,(b,h));",
            "((a,b),h);",
            "(a,b,h);",
            "((a,b),c);",
            "((a,c),b);",
            "(a,(b,c));",
            "(a,b,c);",
        ];
        for nt in nets {
            let n = parse_network(nt, &mut labels).unwrap();
            assert!(n.vertex_count() <= 8 || n.edge_count() <= 12);
            for tt in trees {
                let mut scratch = labels.clone();
                let t = parse_tree(tt, &mut scratch).unwrap();
                if t.leaf_set() != n.leaf_set() {
                    continue;
                }
                assert_eq!(
                    displays(&n, &t).unwrap(),
                    displays_by_subgraph_oracle(&n, &t),
                    "network {nt} tree {tt}"
                );
            }
        }
    }
}
