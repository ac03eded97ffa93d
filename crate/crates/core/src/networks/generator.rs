//! Generators: the multigraph skeleton of a binary network without
//! nontrivial pendant subtrees. Sides (edges plus indegree-2 outdegree-0
//! vertices) are the locations where leaves attach; extraction and
//! realization are inverse up to isomorphism.

use crate::leafset::LeafSet;
use crate::networks::{
    reticulation_number, Digraph, NetNodeId, Network, NetworkError,
};
use crate::newick::LabelId;

/// A binary k-reticulation generator: a rooted acyclic multigraph with an
/// outdegree-1 root, exactly k vertices of indegree 2 and outdegree at most
/// 1, and all other vertices of indegree 1 and outdegree 2.
///
/// Vertex 0 is the root. Each entry of `edges` is one edge side (parallel
/// edges appear as repeated pairs); `vertex_sides` lists the indegree-2
/// outdegree-0 vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub vert_count: usize,
    pub edges: Vec<(u32, u32)>,
    pub vertex_sides: Vec<u32>,
    pub k: u32,
}

/// A side of a generator, indexing into `edges` or `vertex_sides`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Edge(usize),
    Vertex(usize),
}

/// Placement of leaves on the sides of a generator. Edge-side sequences run
/// top to bottom; every vertex side carries exactly one leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideAssignment {
    pub edge_leaves: Vec<Vec<LabelId>>,
    pub vertex_leaves: Vec<LabelId>,
}

impl Generator {
    pub const ROOT: u32 = 0;

    pub fn out_degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|&&(u, _)| u == v).count()
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|&&(_, w)| w == v).count()
    }

    /// Vertices reachable from `v`, including `v` itself.
    pub fn reachable_from(&self, v: u32) -> Vec<bool> {
        let mut seen = vec![false; self.vert_count];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut seen[u as usize], true) {
                continue;
            }
            for &(a, b) in &self.edges {
                if a == u && !seen[b as usize] {
                    stack.push(b);
                }
            }
        }
        seen
    }

    /// Degree-spec validation; used by the enumerator and in tests.
    pub fn validate(&self) -> Result<(), NetworkError> {
        let mut indeg = vec![0usize; self.vert_count];
        let mut outdeg = vec![0usize; self.vert_count];
        for &(u, v) in &self.edges {
            outdeg[u as usize] += 1;
            indeg[v as usize] += 1;
        }
        if indeg[0] != 0 || outdeg[0] != 1 {
            return Err(NetworkError::Structural("generator root degree".into()));
        }
        let mut k = 0;
        for v in 1..self.vert_count {
            match (indeg[v], outdeg[v]) {
                (2, 0) | (2, 1) => k += 1,
                (1, 2) => {}
                other => {
                    return Err(NetworkError::Structural(format!(
                        "generator vertex degree {other:?}"
                    )))
                }
            }
        }
        if k != self.k as usize {
            return Err(NetworkError::Structural("generator k mismatch".into()));
        }
        let expect_vs: Vec<u32> = (1..self.vert_count as u32)
            .filter(|&v| indeg[v as usize] == 2 && outdeg[v as usize] == 0)
            .collect();
        if expect_vs != self.vertex_sides {
            return Err(NetworkError::Structural("vertex side list mismatch".into()));
        }
        Ok(())
    }

    /// Canonical edge-list encoding under iterative colour refinement with
    /// backtracking inside the remaining cells. Two generators are isomorphic
    /// (respecting edge multiplicities) iff their canonical forms are equal.
    pub fn canonical_form(&self) -> Vec<(u32, u32)> {
        use std::collections::BTreeMap;
        let n = self.vert_count;
        let mut indeg = vec![0u32; n];
        let mut outdeg = vec![0u32; n];
        for &(u, v) in &self.edges {
            outdeg[u as usize] += 1;
            indeg[v as usize] += 1;
        }
        let mut color: Vec<u32> = (0..n).map(|v| indeg[v] * 8 + outdeg[v]).collect();
        loop {
            // signature: own colour plus sorted out/in neighbour colour
            // multisets; BTreeMap gives an isomorphism-invariant reindexing
            let mut sig: Vec<(u32, Vec<u32>, Vec<u32>)> =
                (0..n).map(|v| (color[v], Vec::new(), Vec::new())).collect();
            for &(u, v) in &self.edges {
                sig[u as usize].1.push(color[v as usize]);
                sig[v as usize].2.push(color[u as usize]);
            }
            for s in &mut sig {
                s.1.sort_unstable();
                s.2.sort_unstable();
            }
            // renumber by sorted signature order so colours stay invariant
            let mut keys: Vec<&(u32, Vec<u32>, Vec<u32>)> = sig.iter().collect();
            keys.sort();
            keys.dedup();
            let rank: BTreeMap<&(u32, Vec<u32>, Vec<u32>), u32> = keys
                .iter()
                .enumerate()
                .map(|(i, &k)| (k, i as u32))
                .collect();
            let new_color: Vec<u32> = (0..n).map(|v| rank[&sig[v]]).collect();
            let old_classes = distinct(&color);
            let new_classes = distinct(&new_color);
            color = new_color;
            if new_classes == old_classes {
                break;
            }
        }
        // cells in colour order; backtrack over orderings within cells
        let mut cells: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for v in 0..n {
            cells.entry(color[v]).or_default().push(v as u32);
        }
        let cells: Vec<Vec<u32>> = cells.into_values().collect();
        let mut offsets = Vec::with_capacity(cells.len());
        let mut acc = 0u32;
        for c in &cells {
            offsets.push(acc);
            acc += c.len() as u32;
        }
        // flatten assignment slots: (cell, position)
        let order: Vec<(usize, u32)> = cells
            .iter()
            .enumerate()
            .flat_map(|(ci, c)| (0..c.len() as u32).map(move |p| (ci, offsets[ci] + p)))
            .collect();
        let mut taken: Vec<Vec<bool>> = cells.iter().map(|c| vec![false; c.len()]).collect();
        let mut perm = vec![u32::MAX; n];
        let mut best: Option<Vec<(u32, u32)>> = None;
        search(
            &order, &cells, &mut taken, &mut perm, 0, &self.edges, &mut best,
        );
        return best.expect("at least one labelling");

        fn distinct(colors: &[u32]) -> usize {
            let mut v = colors.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        }

        fn search(
            order: &[(usize, u32)],
            cells: &[Vec<u32>],
            taken: &mut [Vec<bool>],
            perm: &mut [u32],
            pos: usize,
            edges: &[(u32, u32)],
            best: &mut Option<Vec<(u32, u32)>>,
        ) {
            if pos == order.len() {
                let mut img: Vec<(u32, u32)> = edges
                    .iter()
                    .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
                    .collect();
                img.sort_unstable();
                if best.is_none() || img < *best.as_ref().unwrap() {
                    *best = Some(img);
                }
                return;
            }
            let (ci, canon) = order[pos];
            for slot in 0..cells[ci].len() {
                if taken[ci][slot] {
                    continue;
                }
                taken[ci][slot] = true;
                perm[cells[ci][slot] as usize] = canon;
                search(order, cells, taken, perm, pos + 1, edges, best);
                taken[ci][slot] = false;
                perm[cells[ci][slot] as usize] = u32::MAX;
            }
        }
    }
}

/// Extracts the generator underlying a binary network with at least one
/// reticulation and no nontrivial pendant subtree, along with the assignment
/// of every leaf to a side.
pub fn underlying_generator(n: &Network) -> Result<(Generator, SideAssignment), NetworkError> {
    if !n.is_binary() {
        return Err(NetworkError::NotBinary);
    }
    let k = reticulation_number(n);
    if k == 0 {
        return Err(NetworkError::NoReticulation);
    }
    check_no_pendant_subtree(n)?;

    let is_leaf = |v: NetNodeId| n.node(v).label.is_some();
    // effective degrees after adding a root edge and deleting leaves
    let indeg = |v: NetNodeId| {
        if v == n.root() {
            1
        } else {
            n.node(v).parents.len()
        }
    };
    let outdeg = |v: NetNodeId| {
        n.node(v)
            .children
            .iter()
            .filter(|&&c| !is_leaf(c))
            .count()
    };
    let survives =
        |v: NetNodeId| !is_leaf(v) && !(indeg(v) == 1 && outdeg(v) == 1);

    // dense generator ids: 0 = added root, then surviving vertices in
    // original order
    let mut gen_id = vec![u32::MAX; n.vertex_count()];
    let mut next = 1u32;
    for v in n.vertices() {
        if survives(v) {
            gen_id[v as usize] = next;
            next += 1;
        }
    }
    let vert_count = next as usize;

    let mut edges = Vec::new();
    let mut edge_leaves = Vec::new();
    let mut push_walk = |from_gen: u32, start: NetNodeId| {
        // follow suppressed subdividers, collecting their leaves in order
        let mut leaves = Vec::new();
        let mut cur = start;
        while !survives(cur) {
            let node = n.node(cur);
            let mut nxt = None;
            for &c in &node.children {
                match n.node(c).label {
                    Some(l) => leaves.push(l),
                    None => nxt = Some(c),
                }
            }
            cur = nxt.expect("subdivider has exactly one internal child");
        }
        edges.push((from_gen, gen_id[cur as usize]));
        edge_leaves.push(leaves);
    };

    // the added root's single edge heads for the old root
    push_walk(0, n.root());
    for v in n.vertices() {
        if !survives(v) {
            continue;
        }
        for &c in &n.node(v).children {
            if !is_leaf(c) {
                push_walk(gen_id[v as usize], c);
            }
        }
    }

    // vertex sides: surviving reticulations whose only child is a leaf
    let mut vertex_sides = Vec::new();
    let mut vertex_leaves = Vec::new();
    for v in n.vertices() {
        if survives(v) && n.node(v).parents.len() == 2 && outdeg(v) == 0 {
            vertex_sides.push(gen_id[v as usize]);
            let leaf = n.node(v).children[0];
            vertex_leaves.push(n.node(leaf).label.unwrap());
        }
    }

    let gen = Generator {
        vert_count,
        edges,
        vertex_sides,
        k,
    };
    debug_assert!(gen.validate().is_ok());
    Ok((
        gen,
        SideAssignment {
            edge_leaves,
            vertex_leaves,
        },
    ))
}

/// A nontrivial pendant subtree exists iff some non-root vertex has at least
/// two leaf descendants and no reticulation strictly below it.
pub(crate) fn check_no_pendant_subtree(n: &Network) -> Result<(), NetworkError> {
    let order = crate::networks::topo_order(n);
    let mut leafdesc = vec![LeafSet::new(); n.vertex_count()];
    let mut retic_below = vec![false; n.vertex_count()];
    for &v in order.iter().rev() {
        let node = n.node(v);
        if let Some(l) = node.label {
            leafdesc[v as usize].insert(l);
            continue;
        }
        let mut acc = LeafSet::new();
        for &c in &node.children {
            acc.union_with(&leafdesc[c as usize]);
            if n.node(c).parents.len() >= 2 || retic_below[c as usize] {
                retic_below[v as usize] = true;
            }
        }
        leafdesc[v as usize] = acc;
    }
    for v in n.vertices() {
        if v != n.root()
            && n.node(v).label.is_none()
            && leafdesc[v as usize].len() >= 2
            && !retic_below[v as usize]
        {
            return Err(NetworkError::PendantSubtree);
        }
    }
    Ok(())
}

/// Reconstructs a network from a generator and a side assignment:
/// subdivide each edge side with one vertex per leaf in order, attach vertex
/// side leaves to their reticulations, and delete the outdegree-1 root.
///
/// Fails when the result is not a valid network — in particular when both
/// copies of a parallel edge remain unsubdivided, or a leaf is placed twice.
pub fn realize(gen: &Generator, assign: &SideAssignment) -> Result<Network, NetworkError> {
    if assign.edge_leaves.len() != gen.edges.len()
        || assign.vertex_leaves.len() != gen.vertex_sides.len()
    {
        return Err(NetworkError::Structural("side assignment shape".into()));
    }
    let mut g = Digraph::new();
    for _ in 0..gen.vert_count {
        g.add_node(None);
    }
    let mut placed = LeafSet::new();
    let mut place = |g: &mut Digraph, l: LabelId| -> Result<NetNodeId, NetworkError> {
        if placed.contains(l) {
            return Err(NetworkError::Structural("leaf placed twice".into()));
        }
        placed.insert(l);
        Ok(g.add_node(Some(l)))
    };
    for (i, &(u, v)) in gen.edges.iter().enumerate() {
        let mut cur = u;
        for &l in &assign.edge_leaves[i] {
            let mid = g.add_node(None);
            let leaf = place(&mut g, l)?;
            g.add_edge(cur, mid);
            g.add_edge(mid, leaf);
            cur = mid;
        }
        g.add_edge(cur, v);
    }
    for (j, &w) in gen.vertex_sides.iter().enumerate() {
        let leaf = place(&mut g, assign.vertex_leaves[j])?;
        g.add_edge(w, leaf);
    }
    // delete the outdegree-1 root added during extraction
    g.delete_node(Generator::ROOT);
    Network::from_digraph(g.compact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::isomorphic;
    use crate::newick::{parse_network, LabelSet};

    #[test]
    fn one_reticulation_generator_shape() {
        let mut labels = LabelSet::new();
        let n = parse_network("((a,(h)#H1),(#H1,b));", &mut labels).unwrap();
        let (gen, assign) = underlying_generator(&n).unwrap();
        // root -> split, double edge split => reticulation
        assert_eq!(gen.k, 1);
        assert_eq!(gen.vert_count, 3);
        assert_eq!(gen.edges.len(), 3);
        assert_eq!(gen.vertex_sides.len(), 1);
        let h = labels.get("h").unwrap();
        assert_eq!(assign.vertex_leaves, vec![h]);
        // a and b sit on the two copies of the double edge
        let mut on_edges: Vec<usize> = assign.edge_leaves.iter().map(|l| l.len()).collect();
        on_edges.sort();
        assert_eq!(on_edges, vec![0, 1, 1]);
    }

    #[test]
    fn realize_inverts_extraction() {
        let mut labels = LabelSet::new();
        for text in [
            "((a,(h)#H1),(#H1,b));",
            "(((a)#H1,b),(#H1,(c,(d)#H2)),(#H2,e));",
        ] {
            let mut scratch = labels.clone();
            let n = parse_network(text, &mut scratch).unwrap();
            let n = if n.is_binary() {
                n
            } else {
                crate::networks::binarize(&n)
            };
            let (gen, assign) = underlying_generator(&n).unwrap();
            let back = realize(&gen, &assign).unwrap();
            assert!(isomorphic(&n, &back), "{text}");
        }
        let _ = labels;
    }

    #[test]
    fn pendant_subtree_is_rejected() {
        let mut labels = LabelSet::new();
        let n = parse_network("(((a,b),(h)#H1),(#H1,c));", &mut labels).unwrap();
        assert!(matches!(
            underlying_generator(&n),
            Err(NetworkError::PendantSubtree)
        ));
        let t = parse_network("((a,b),c);", &mut labels).unwrap();
        assert!(matches!(
            underlying_generator(&t),
            Err(NetworkError::NoReticulation)
        ));
    }

    #[test]
    fn canonical_form_separates_and_identifies() {
        // the unique 1-reticulation generator vs itself with renumbered
        // vertices
        let g1 = Generator {
            vert_count: 3,
            edges: vec![(0, 1), (1, 2), (1, 2)],
            vertex_sides: vec![2],
            k: 1,
        };
        let g2 = Generator {
            vert_count: 3,
            edges: vec![(0, 2), (2, 1), (2, 1)],
            vertex_sides: vec![1],
            k: 1,
        };
        assert_eq!(g1.canonical_form(), g2.canonical_form());
    }
}
