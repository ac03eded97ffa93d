//! Detection of a nontrivial maximal common pendant subtree of a tree set.
//!
//! The search starts from a leaf pair with a common parent in every tree,
//! contracts it to a scratch label, and recurses; re-expanding the scratch
//! labels on the way out yields a maximal common pendant subtree.

use crate::leafset::LeafSet;
use crate::newick::LabelId;
use crate::trees::{is_refinement, Instance, NodeId, Tree, TreeBuilder};

/// A common pendant subtree together with, for each input tree, the vertex
/// whose pendant subtree it refines.
#[derive(Clone, Debug)]
pub struct PendantSubtree {
    /// The subtree, a standalone tree on a subset of the instance's labels.
    pub subtree: Tree,
    /// Per input tree: the root of the pendant subtree on the same leaf set.
    pub attach: Vec<NodeId>,
}

/// First leaf pair (by label id) that has a common parent in every tree, or
/// `None` when no such pair exists. The instance has a nontrivial common
/// pendant subtree iff this returns `Some`.
pub fn shared_parent_pair(trees: &[Tree]) -> Option<(LabelId, LabelId)> {
    let first = &trees[0];
    let mut leaves: Vec<LabelId> = first.leaves().map(|(_, l)| l).collect();
    leaves.sort();
    for &x in &leaves {
        let px = first.node(first.leaf_node(x)?).parent?;
        let mut siblings: Vec<LabelId> = first
            .node(px)
            .children
            .iter()
            .filter_map(|&c| first.node(c).label)
            .filter(|&y| y > x)
            .collect();
        siblings.sort();
        'sib: for y in siblings {
            for t in &trees[1..] {
                let ly = match t.leaf_node(y) {
                    Some(v) => v,
                    None => continue 'sib,
                };
                let lx = match t.leaf_node(x) {
                    Some(v) => v,
                    None => continue 'sib,
                };
                if t.node(lx).parent != t.node(ly).parent || t.node(lx).parent.is_none() {
                    continue 'sib;
                }
            }
            return Some((x, y));
        }
    }
    None
}

/// Finds a nontrivial (at least two leaves) maximal common pendant subtree of
/// the instance's trees, or `None` when none exists.
pub fn find_common_pendant_subtree(ts: &Instance) -> Option<PendantSubtree> {
    // scratch labels live above the interned universe and never escape
    let scratch_base = ts.labels.len() as u32;
    let subtree = search(ts.trees.clone(), scratch_base)?;
    let cluster = subtree.leaf_set();
    debug_assert!(cluster.len() >= 2);
    let attach = ts
        .trees
        .iter()
        .map(|t| {
            let desc = t.leaf_descendants();
            let v = (0..t.node_count() as NodeId)
                .find(|&v| desc[v as usize] == cluster)
                .expect("common pendant subtree has a pendant image in every tree");
            debug_assert!(is_refinement(&subtree, &t.subtree_at(v)).unwrap());
            v
        })
        .collect();
    Some(PendantSubtree { subtree, attach })
}

fn search(trees: Vec<Tree>, scratch: u32) -> Option<Tree> {
    let (x, y) = shared_parent_pair(&trees)?;
    let z = LabelId(scratch);
    let reduced: Vec<Tree> = trees
        .iter()
        .map(|t| {
            t.delete_leaves(&LeafSet::singleton(y))
                .expect("tree keeps at least one leaf")
                .relabel(x, z)
        })
        .collect();
    let inner = search(reduced, scratch + 1).unwrap_or_else(|| {
        let mut b = TreeBuilder::new();
        let root = b.leaf(z);
        b.finish(root)
    });
    if inner.leaf_node(z).is_none() {
        return Some(inner);
    }
    // expand z back into the cherry {x, y}
    let mut b = TreeBuilder::new();
    let lx = b.leaf(x);
    let ly = b.leaf(y);
    let cherry_root = b.internal(vec![lx, ly]);
    let cherry = b.finish(cherry_root);
    Some(inner.graft(z, &cherry).expect("z is a leaf of inner"))
}

/// True iff `sub`'s leaf set is the cluster of some vertex of `t` and `sub`
/// refines the subtree there. Test-support predicate.
pub fn is_pendant_in(sub: &Tree, t: &Tree) -> bool {
    let want = sub.leaf_set();
    let desc = t.leaf_descendants();
    (0..t.node_count() as NodeId).any(|v| {
        desc[v as usize] == want && is_refinement(sub, &t.subtree_at(v)).unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::{parse_tree, serialize_tree, LabelSet};

    fn instance(texts: &[&str]) -> Instance {
        let mut labels = LabelSet::new();
        let trees: Vec<Tree> = texts
            .iter()
            .map(|s| parse_tree(s, &mut labels).unwrap())
            .collect();
        Instance::new(labels, trees, 1).unwrap()
    }

    #[test]
    fn shared_cherry_is_found() {
        let ts = instance(&["((a,b),c);", "((a,b),c);"]);
        let found = find_common_pendant_subtree(&ts).unwrap();
        // identical trees: the whole tree is a common pendant subtree
        assert_eq!(found.subtree.leaf_count(), 3);
    }

    #[test]
    fn incompatible_cherries_yield_none() {
        let ts = instance(&["((a,b),c);", "((a,c),b);"]);
        // exhaustive pair scan agrees: no pair shares a parent in both trees
        assert!(shared_parent_pair(&ts.trees).is_none());
        assert!(find_common_pendant_subtree(&ts).is_none());
    }

    #[test]
    fn none_iff_no_shared_parent_pair() {
        let cases = [
            vec!["((a,b),(c,d));", "((a,c),(b,d));"],
            vec!["((a,b),(c,d));", "((a,b),(c,d));"],
            vec!["(((a,b),c),d);", "(a,(b,(c,d)));"],
            vec!["((a,b),c,d);", "(a,b,(c,d));"],
        ];
        for texts in cases {
            let ts = instance(&texts);
            assert_eq!(
                find_common_pendant_subtree(&ts).is_none(),
                shared_parent_pair(&ts.trees).is_none(),
            );
        }
    }

    #[test]
    fn result_is_pendant_in_every_tree() {
        let ts = instance(&["((a,b),c,d);", "(a,b,(c,d));"]);
        let found = find_common_pendant_subtree(&ts).unwrap();
        for t in &ts.trees {
            assert!(is_pendant_in(&found.subtree, t));
        }
        let s = serialize_tree(&found.subtree, &ts.labels);
        assert_eq!(s, "(a,b);");
    }
}
