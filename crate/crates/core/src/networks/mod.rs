//! Rooted binary phylogenetic networks: cleanup of raw digraphs,
//! reticulation number, binarization, the display check, and extraction of
//! the underlying generator with side identification.

mod display;
mod generator;

pub use display::{displayed_trees, displays, to_tree};
pub use generator::{realize, underlying_generator, Generator, Side, SideAssignment};

use thiserror::Error;

use crate::leafset::LeafSet;
use crate::newick::LabelId;

pub type NetNodeId = u32;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("network and tree are not on the same label set")]
    LabelMismatch,
    #[error("network is not binary")]
    NotBinary,
    #[error("network has a nontrivial pendant subtree")]
    PendantSubtree,
    #[error("network has no reticulation")]
    NoReticulation,
}

#[derive(Clone, Debug, Default)]
pub struct DiNode {
    pub parents: Vec<NetNodeId>,
    pub children: Vec<NetNodeId>,
    pub label: Option<LabelId>,
}

/// A mutable directed multigraph with labelled sinks. The raw material for
/// [`cleanup`] and for network surgery.
#[derive(Clone, Debug, Default)]
pub struct Digraph {
    nodes: Vec<DiNode>,
    dead: Vec<bool>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: Option<LabelId>) -> NetNodeId {
        let id = self.nodes.len() as NetNodeId;
        self.nodes.push(DiNode {
            parents: Vec::new(),
            children: Vec::new(),
            label,
        });
        self.dead.push(false);
        id
    }

    pub fn add_edge(&mut self, u: NetNodeId, v: NetNodeId) {
        self.nodes[u as usize].children.push(v);
        self.nodes[v as usize].parents.push(u);
    }

    /// Removes one copy of the edge (u, v).
    pub fn remove_edge(&mut self, u: NetNodeId, v: NetNodeId) {
        remove_one(&mut self.nodes[u as usize].children, v);
        remove_one(&mut self.nodes[v as usize].parents, u);
    }

    pub fn node(&self, id: NetNodeId) -> &DiNode {
        &self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_live(&self, id: NetNodeId) -> bool {
        !self.dead[id as usize]
    }

    pub fn live_nodes(&self) -> impl Iterator<Item = NetNodeId> + '_ {
        (0..self.nodes.len() as NetNodeId).filter(move |&v| !self.dead[v as usize])
    }

    pub fn set_label(&mut self, id: NetNodeId, label: Option<LabelId>) {
        self.nodes[id as usize].label = label;
    }

    fn delete_node(&mut self, v: NetNodeId) {
        let parents = std::mem::take(&mut self.nodes[v as usize].parents);
        for p in parents {
            remove_one(&mut self.nodes[p as usize].children, v);
        }
        let children = std::mem::take(&mut self.nodes[v as usize].children);
        for c in children {
            remove_one(&mut self.nodes[c as usize].parents, v);
        }
        self.dead[v as usize] = true;
    }

    /// One pass of the four reduction steps on a single vertex; returns true
    /// when something changed.
    fn reduce_vertex(&mut self, v: NetNodeId) -> bool {
        if self.dead[v as usize] {
            return false;
        }
        let node = &self.nodes[v as usize];
        let indeg = node.parents.len();
        let outdeg = node.children.len();
        if outdeg == 0 && node.label.is_none() && !(indeg == 0 && self.live_count() == 1) {
            self.delete_node(v);
            return true;
        }
        if indeg == 0 && outdeg == 1 {
            self.delete_node(v);
            return true;
        }
        if indeg == 1 && outdeg == 1 {
            let p = self.nodes[v as usize].parents[0];
            let c = self.nodes[v as usize].children[0];
            self.delete_node(v);
            self.add_edge(p, c);
            return true;
        }
        // merge parallel edges
        let mut seen = std::collections::HashSet::new();
        let mut dup = None;
        for &c in &self.nodes[v as usize].children {
            if !seen.insert(c) {
                dup = Some(c);
                break;
            }
        }
        if let Some(c) = dup {
            self.remove_edge(v, c);
            return true;
        }
        false
    }

    fn live_count(&self) -> usize {
        self.dead.iter().filter(|d| !**d).count()
    }

    /// Compacts away deleted vertices, renumbering densely.
    fn compact(self) -> Digraph {
        let mut map = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !self.dead[i] {
                map[i] = nodes.len() as u32;
                nodes.push(node.clone());
            }
        }
        for node in &mut nodes {
            for p in &mut node.parents {
                *p = map[*p as usize];
            }
            for c in &mut node.children {
                *c = map[*c as usize];
            }
        }
        Digraph {
            dead: vec![false; nodes.len()],
            nodes,
        }
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn over live vertices
        let mut indeg: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| if self.dead[i] { usize::MAX } else { n.parents.len() })
            .collect();
        let mut stack: Vec<NetNodeId> = self.live_nodes().filter(|&v| indeg[v as usize] == 0).collect();
        let mut seen = 0usize;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &c in &self.nodes[v as usize].children {
                indeg[c as usize] -= 1;
                if indeg[c as usize] == 0 {
                    stack.push(c);
                }
            }
        }
        seen == self.live_count()
    }
}

fn remove_one(v: &mut Vec<NetNodeId>, x: NetNodeId) {
    if let Some(pos) = v.iter().position(|&y| y == x) {
        v.remove(pos);
    }
}

/// Exhaustively applies the reduction steps — delete unlabelled sinks,
/// delete indegree-0 outdegree-1 vertices, suppress indegree-1 outdegree-1
/// vertices, merge parallel edges — and validates the fixed point.
pub fn cleanup(mut g: Digraph) -> Result<Network, NetworkError> {
    if !g.is_acyclic() {
        return Err(NetworkError::Structural("input graph has a cycle".into()));
    }
    loop {
        let mut changed = false;
        for v in 0..g.nodes.len() as NetNodeId {
            while g.reduce_vertex(v) {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Network::from_digraph(g.compact())
}

/// A validated rooted phylogenetic network: acyclic, single root, no
/// indegree-1 outdegree-1 vertices, no parallel edges, sinks bijectively
/// labelled. Not necessarily binary; see [`Network::is_binary`].
#[derive(Clone, Debug)]
pub struct Network {
    graph: Digraph,
    root: NetNodeId,
}

impl Network {
    pub fn from_digraph(graph: Digraph) -> Result<Network, NetworkError> {
        if graph.is_empty() {
            return Err(NetworkError::Structural("empty graph".into()));
        }
        if graph.dead.iter().any(|&d| d) {
            return Err(NetworkError::Structural("graph not compacted".into()));
        }
        let roots: Vec<NetNodeId> = graph
            .live_nodes()
            .filter(|&v| graph.node(v).parents.is_empty())
            .collect();
        if roots.len() != 1 {
            return Err(NetworkError::Structural(format!(
                "expected a single root, found {}",
                roots.len()
            )));
        }
        let root = roots[0];
        if !graph.is_acyclic() {
            return Err(NetworkError::Structural("graph has a cycle".into()));
        }
        let mut labels_seen = LeafSet::new();
        for v in graph.live_nodes() {
            let node = graph.node(v);
            let indeg = node.parents.len();
            let outdeg = node.children.len();
            if indeg == 1 && outdeg == 1 {
                return Err(NetworkError::Structural(
                    "indegree-1 outdegree-1 vertex".into(),
                ));
            }
            if indeg == 0 && outdeg == 1 {
                return Err(NetworkError::Structural("outdegree-1 root".into()));
            }
            match node.label {
                Some(l) => {
                    if outdeg > 0 {
                        return Err(NetworkError::Structural(
                            "labelled vertex with outdegree > 0".into(),
                        ));
                    }
                    if labels_seen.contains(l) {
                        return Err(NetworkError::Structural("duplicate leaf label".into()));
                    }
                    labels_seen.insert(l);
                }
                None => {
                    if outdeg == 0 {
                        return Err(NetworkError::Structural(
                            "unlabelled outdegree-0 vertex".into(),
                        ));
                    }
                }
            }
            let mut kids = node.children.clone();
            kids.sort();
            kids.dedup();
            if kids.len() != node.children.len() {
                return Err(NetworkError::Structural("parallel edges".into()));
            }
        }
        Ok(Network { graph, root })
    }

    pub fn root(&self) -> NetNodeId {
        self.root
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn into_digraph(self) -> Digraph {
        self.graph
    }

    pub fn node(&self, v: NetNodeId) -> &DiNode {
        self.graph.node(v)
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.nodes.iter().map(|n| n.children.len()).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = NetNodeId> + '_ {
        0..self.graph.len() as NetNodeId
    }

    pub fn leaves(&self) -> impl Iterator<Item = (NetNodeId, LabelId)> + '_ {
        self.vertices()
            .filter_map(move |v| self.node(v).label.map(|l| (v, l)))
    }

    pub fn leaf_set(&self) -> LeafSet {
        self.leaves().map(|(_, l)| l).collect()
    }

    pub fn leaf_node(&self, label: LabelId) -> Option<NetNodeId> {
        self.leaves().find(|&(_, l)| l == label).map(|(v, _)| v)
    }

    pub fn reticulations(&self) -> impl Iterator<Item = NetNodeId> + '_ {
        self.vertices().filter(move |&v| self.node(v).parents.len() >= 2)
    }

    /// Binary means indegree and outdegree at most two, with indegree-2
    /// vertices having outdegree at most one.
    pub fn is_binary(&self) -> bool {
        self.vertices().all(|v| {
            let n = self.node(v);
            n.parents.len() <= 2
                && n.children.len() <= 2
                && (n.parents.len() < 2 || n.children.len() <= 1)
        })
    }
}

/// Reticulation number: edges minus vertices plus one. Computed by both
/// definitional routes and asserted equal.
pub fn reticulation_number(n: &Network) -> u32 {
    let by_count = (n.edge_count() + 1 - n.vertex_count()) as u32;
    let by_degrees: u32 = n
        .vertices()
        .map(|v| {
            let d = n.node(v).parents.len() as u32;
            d.saturating_sub(1)
        })
        .sum();
    assert_eq!(by_count, by_degrees, "reticulation number formulas disagree");
    by_count
}

/// Refines a (possibly nonbinary) network into a binary one that contracts
/// back to it: outdegree-d vertices become left-deep caterpillars over the
/// children sorted by smallest descendant leaf, indegree-d reticulations
/// become chains of indegree-2 vertices. The reticulation number is
/// preserved.
pub fn binarize(n: &Network) -> Network {
    let mut g = Digraph::new();
    for v in n.vertices() {
        g.add_node(n.node(v).label);
    }
    // order children deterministically by their minimum descendant leaf id
    let min_leaf = min_leaf_map(n);
    for v in n.vertices() {
        let mut kids = n.node(v).children.clone();
        kids.sort_by_key(|&c| min_leaf[c as usize]);
        match kids.len() {
            0 => {}
            1 | 2 => {
                for c in kids {
                    g.add_edge(v, c);
                }
            }
            _ => {
                // left-deep caterpillar: ((c1,c2),c3)...
                let mut acc = g.add_node(None);
                g.add_edge(acc, kids[0]);
                g.add_edge(acc, kids[1]);
                for &c in &kids[2..] {
                    let up = g.add_node(None);
                    g.add_edge(up, acc);
                    g.add_edge(up, c);
                    acc = up;
                }
                g.add_edge(v, acc);
            }
        }
    }
    // now every vertex has outdegree <= 2 except through the new chain roots;
    // resolve indegree > 2 and indegree-2-with-outdegree-2 vertices
    let upper = g.len() as NetNodeId;
    for v in 0..upper {
        let parents = g.node(v).parents.clone();
        if parents.len() > 2 {
            // chain of indegree-2 reticulations feeding v
            for p in &parents {
                g.remove_edge(*p, v);
            }
            let mut acc = g.add_node(None);
            g.add_edge(parents[0], acc);
            g.add_edge(parents[1], acc);
            for &p in &parents[2..] {
                let nxt = g.add_node(None);
                g.add_edge(acc, nxt);
                g.add_edge(p, nxt);
                acc = nxt;
            }
            g.add_edge(acc, v);
        }
    }
    for v in 0..g.len() as NetNodeId {
        if g.node(v).parents.len() == 2 && g.node(v).children.len() >= 2 {
            let kids = g.node(v).children.clone();
            let w = g.add_node(None);
            for c in kids {
                g.remove_edge(v, c);
                g.add_edge(w, c);
            }
            g.add_edge(v, w);
        }
    }
    let out = cleanup(g).expect("binarization preserves validity");
    debug_assert!(out.is_binary());
    out
}

fn min_leaf_map(n: &Network) -> Vec<LabelId> {
    let mut out = vec![LabelId(u32::MAX); n.vertex_count()];
    // vertices in reverse topological order
    let order = topo_order(n);
    for &v in order.iter().rev() {
        let node = n.node(v);
        if let Some(l) = node.label {
            out[v as usize] = l;
        } else {
            out[v as usize] = node
                .children
                .iter()
                .map(|&c| out[c as usize])
                .min()
                .unwrap_or(LabelId(u32::MAX));
        }
    }
    out
}

pub(crate) fn topo_order(n: &Network) -> Vec<NetNodeId> {
    let mut indeg: Vec<usize> = n.vertices().map(|v| n.node(v).parents.len()).collect();
    let mut stack = vec![n.root()];
    let mut order = Vec::with_capacity(n.vertex_count());
    while let Some(v) = stack.pop() {
        order.push(v);
        for &c in &n.node(v).children {
            indeg[c as usize] -= 1;
            if indeg[c as usize] == 0 {
                stack.push(c);
            }
        }
    }
    order
}

/// Exact isomorphism test for two networks with identically labelled leaves:
/// a backtracking search over degree- and label-consistent vertex bijections.
/// Intended for tests and small witnesses.
pub fn isomorphic(a: &Network, b: &Network) -> bool {
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || a.leaf_set() != b.leaf_set()
    {
        return false;
    }
    let n = a.vertex_count();
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; n];
    // anchor the leaves by label
    for (v, l) in a.leaves() {
        match b.leaf_node(l) {
            Some(w) => {
                map[v as usize] = w;
                used[w as usize] = true;
            }
            None => return false,
        }
    }
    let av: Vec<NetNodeId> = a
        .vertices()
        .filter(|&v| a.node(v).label.is_none())
        .collect();
    fn compatible(a: &Network, b: &Network, v: NetNodeId, w: NetNodeId) -> bool {
        a.node(v).parents.len() == b.node(w).parents.len()
            && a.node(v).children.len() == b.node(w).children.len()
    }
    fn edges_ok(a: &Network, b: &Network, map: &[u32]) -> bool {
        for v in a.vertices() {
            if map[v as usize] == u32::MAX {
                continue;
            }
            for &c in &a.node(v).children {
                if map[c as usize] == u32::MAX {
                    continue;
                }
                if !b.node(map[v as usize])
                    .children
                    .contains(&map[c as usize])
                {
                    return false;
                }
            }
        }
        true
    }
    fn assign(
        a: &Network,
        b: &Network,
        av: &[NetNodeId],
        i: usize,
        map: &mut Vec<u32>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == av.len() {
            return edges_ok(a, b, map);
        }
        let v = av[i];
        for w in b.vertices() {
            if used[w as usize] || b.node(w).label.is_some() || !compatible(a, b, v, w) {
                continue;
            }
            map[v as usize] = w;
            used[w as usize] = true;
            if edges_ok(a, b, map) && assign(a, b, av, i + 1, map, used) {
                return true;
            }
            map[v as usize] = u32::MAX;
            used[w as usize] = false;
        }
        false
    }
    assign(a, b, &av, 0, &mut map, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::{parse_network, LabelSet};

    #[test]
    fn cleanup_suppresses_chain() {
        // root -> u -> v -> leaf collapses to a two-vertex path, then the
        // outdegree-1 root is deleted and the leaf stands alone
        let mut g = Digraph::new();
        let root = g.add_node(None);
        let u = g.add_node(None);
        let v = g.add_node(None);
        let leaf = g.add_node(Some(LabelId(0)));
        g.add_edge(root, u);
        g.add_edge(u, v);
        g.add_edge(v, leaf);
        let n = cleanup(g).unwrap();
        assert_eq!(n.vertex_count(), 1);
        assert_eq!(n.node(n.root()).label, Some(LabelId(0)));
    }

    #[test]
    fn cleanup_removes_dangling_sink_and_merges_parallels() {
        let mut g = Digraph::new();
        let root = g.add_node(None);
        let u = g.add_node(None);
        let a = g.add_node(Some(LabelId(0)));
        let b = g.add_node(Some(LabelId(1)));
        let dangling = g.add_node(None);
        g.add_edge(root, u);
        g.add_edge(root, b);
        g.add_edge(u, a);
        g.add_edge(u, dangling);
        let n = cleanup(g).unwrap();
        // dangling sink removed, u suppressed: (a,b) cherry
        assert_eq!(n.vertex_count(), 3);
        assert_eq!(reticulation_number(&n), 0);

        let mut g = Digraph::new();
        let root = g.add_node(None);
        let u = g.add_node(None);
        let v = g.add_node(None);
        let a = g.add_node(Some(LabelId(0)));
        let b = g.add_node(Some(LabelId(1)));
        g.add_edge(root, u);
        g.add_edge(root, b);
        g.add_edge(u, v);
        g.add_edge(u, v);
        g.add_edge(v, a);
        let n = cleanup(g).unwrap();
        // double edge merged, then u and v suppressed
        assert_eq!(reticulation_number(&n), 0);
        assert_eq!(n.leaf_set().len(), 2);
    }

    #[test]
    fn reticulation_number_examples() {
        let mut labels = LabelSet::new();
        let n = parse_network("((a,(h)#H1),(#H1,b));", &mut labels).unwrap();
        assert_eq!(reticulation_number(&n), 1);
        let tree = parse_network("((a,b),c);", &mut labels).unwrap();
        assert_eq!(reticulation_number(&tree), 0);
    }

    #[test]
    fn binarize_star_and_identity() {
        let mut labels = LabelSet::new();
        let star = parse_network("(a,b,c);", &mut labels).unwrap();
        let bin = binarize(&star);
        assert!(bin.is_binary());
        assert_eq!(reticulation_number(&bin), 0);
        assert_eq!(
            crate::newick::serialize_network(&bin, &labels),
            "((a,b),c);"
        );

        let already = parse_network("((a,b),c);", &mut labels).unwrap();
        let bin2 = binarize(&already);
        assert!(isomorphic(&already, &bin2));
    }

    #[test]
    fn binarize_high_indegree_reticulation() {
        let mut labels = LabelSet::new();
        // indegree-3 reticulation: r(N) = 2 both before and after
        let n = parse_network(
            "(((h)#H1,a),(#H1,b),(#H1,c));",
            &mut labels,
        )
        .unwrap();
        assert_eq!(reticulation_number(&n), 2);
        let bin = binarize(&n);
        assert!(bin.is_binary());
        assert_eq!(reticulation_number(&bin), 2);
    }

    #[test]
    fn cleanup_is_confluent_under_shuffled_order() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..120 {
            let g = random_raw_graph(&mut rng, case);
            let a = cleanup(g.clone());
            let b = cleanup_shuffled(g, &mut rng);
            match (a, b) {
                (Ok(x), Ok(y)) => assert!(isomorphic(&x, &y), "case {case}"),
                (Err(_), Err(_)) => {}
                (x, y) => panic!("case {case}: divergent outcomes {x:?} vs {y:?}"),
            }
        }

        fn random_raw_graph(rng: &mut rand_chacha::ChaCha8Rng, _case: usize) -> Digraph {
            use rand::Rng;
            let mut g = Digraph::new();
            let n = rng.gen_range(4..10);
            for i in 0..n {
                let label = if rng.gen_bool(0.4) {
                    Some(LabelId(i as u32))
                } else {
                    None
                };
                g.add_node(label);
            }
            // forward edges only, so the graph is acyclic
            for v in 1..n {
                let edges = rng.gen_range(0..3);
                for _ in 0..edges.max(usize::from(v < 3)) {
                    let u = rng.gen_range(0..v);
                    g.add_edge(u as NetNodeId, v as NetNodeId);
                }
            }
            g
        }

        fn cleanup_shuffled(
            mut g: Digraph,
            rng: &mut rand_chacha::ChaCha8Rng,
        ) -> Result<Network, NetworkError> {
            if !g.is_acyclic() {
                return Err(NetworkError::Structural("cycle".into()));
            }
            loop {
                let mut applicable: Vec<NetNodeId> = (0..g.nodes.len() as NetNodeId)
                    .filter(|&v| {
                        let mut probe = g.clone();
                        probe.reduce_vertex(v)
                    })
                    .collect();
                if applicable.is_empty() {
                    break;
                }
                applicable.shuffle(rng);
                g.reduce_vertex(applicable[0]);
            }
            Network::from_digraph(g.compact())
        }
    }
}
