//! Common chain machinery: chainability of a leaf set, and maximum common
//! (q-star) chain search over all ordered leaf pairs.
//!
//! A chain of a tree is an ordered leaf sequence whose parents lie on a
//! directed path, marching down in steps of at most one vertex, such that
//! interior path vertices have no children besides the next path vertex and
//! chain leaves. A common chain is a chain of every tree; a q-star chain
//! additionally forms a star (all leaves under one parent) in exactly q
//! trees.

use std::collections::HashMap;

use crate::leafset::LeafSet;
use crate::newick::LabelId;
use crate::trees::{verify_chain, Instance, NodeId, Tree, TreeIndex};

/// A common chain of an instance's trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    /// Leaves in chain order, topmost parent first.
    pub leaves: Vec<LabelId>,
    /// Number of trees in which all chain leaves share one parent.
    pub q: u32,
    /// Per tree: whether the chain is pendant there.
    pub pendant_in: Vec<bool>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }
}

struct ChainCtx<'a> {
    ts: &'a Instance,
    idx: Vec<TreeIndex>,
    // per tree: parent vertex of each leaf label (None for a root leaf)
    parent: Vec<HashMap<LabelId, NodeId>>,
}

impl<'a> ChainCtx<'a> {
    fn new(ts: &'a Instance) -> ChainCtx<'a> {
        let idx = ts.trees.iter().map(TreeIndex::new).collect();
        let parent = ts
            .trees
            .iter()
            .map(|t| {
                t.leaves()
                    .filter_map(|(v, l)| t.node(v).parent.map(|p| (l, p)))
                    .collect()
            })
            .collect();
        ChainCtx { ts, idx, parent }
    }

    fn parent_of(&self, tree: usize, leaf: LabelId) -> Option<NodeId> {
        self.parent[tree].get(&leaf).copied()
    }

    /// Strict ancestor test for two leaf parents in one tree.
    fn strictly_above(&self, tree: usize, a: NodeId, b: NodeId) -> bool {
        a != b && self.idx[tree].ancestor_eq(a, b)
    }
}

/// Decides whether some ordering of `set` is a common chain of the
/// instance's trees and returns that chain.
///
/// When the instance has no nontrivial common pendant subtree the ordering is
/// unique; with one present, leaves that share a parent in every tree are
/// mutually unordered and are tie-broken by ascending label id.
pub fn is_chainable(ts: &Instance, set: &LeafSet) -> Option<Chain> {
    let ctx = ChainCtx::new(ts);
    chain_on(&ctx, set)
}

fn chain_on(ctx: &ChainCtx, set: &LeafSet) -> Option<Chain> {
    let members: Vec<LabelId> = set.iter().collect();
    if members.len() < 2 {
        return None;
    }
    for (ti, tree) in ctx.ts.trees.iter().enumerate() {
        if !set_conditions_hold(ctx, ti, tree, set, &members) {
            return None;
        }
    }
    // D_C: edge (x, y) when some tree puts x's parent strictly above y's
    let m = members.len();
    let mut adj = vec![Vec::new(); m];
    let mut indeg = vec![0usize; m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let orders = (0..ctx.ts.t()).any(|ti| {
                let pi = ctx.parent_of(ti, members[i]).unwrap();
                let pj = ctx.parent_of(ti, members[j]).unwrap();
                ctx.strictly_above(ti, pi, pj)
            });
            if orders {
                adj[i].push(j);
                indeg[j] += 1;
            }
        }
    }
    // Kahn with ascending-label tie-break; a cycle in D_C means no ordering
    let mut order = Vec::with_capacity(m);
    let mut ready: Vec<usize> = (0..m).filter(|&i| indeg[i] == 0).collect();
    while !ready.is_empty() {
        ready.sort_by_key(|&i| std::cmp::Reverse(members[i]));
        let i = ready.pop().unwrap();
        order.push(members[i]);
        for &j in &adj[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(j);
            }
        }
    }
    if order.len() != m {
        return None;
    }
    finish_chain(ctx, order)
}

fn finish_chain(ctx: &ChainCtx, order: Vec<LabelId>) -> Option<Chain> {
    let mut pendant_in = Vec::with_capacity(ctx.ts.t());
    for (ti, tree) in ctx.ts.trees.iter().enumerate() {
        pendant_in.push(crate::trees::verify_chain_with(tree, &ctx.idx[ti], &order)?);
    }
    let q = (0..ctx.ts.t())
        .filter(|&ti| {
            let p0 = ctx.parent_of(ti, order[0]).unwrap();
            order.iter().all(|&l| ctx.parent_of(ti, l) == Some(p0))
        })
        .count() as u32;
    Some(Chain {
        leaves: order,
        q,
        pendant_in,
    })
}

/// Per-tree structural conditions on an unordered set: all parents lie on
/// one directed path, and interior path vertices have only the next path
/// vertex and set leaves as children.
fn set_conditions_hold(
    ctx: &ChainCtx,
    ti: usize,
    tree: &Tree,
    set: &LeafSet,
    members: &[LabelId],
) -> bool {
    let mut parents: Vec<NodeId> = Vec::with_capacity(members.len());
    for &l in members {
        match ctx.parent_of(ti, l) {
            Some(p) => parents.push(p),
            None => return false,
        }
    }
    parents.sort_by_key(|&p| ctx.idx[ti].depth[p as usize]);
    parents.dedup();
    for w in parents.windows(2) {
        if !ctx.strictly_above(ti, w[0], w[1]) {
            return false;
        }
    }
    let top = parents[0];
    let bottom = *parents.last().unwrap();
    // walk the tree path bottom -> top; interior vertices must carry only
    // set leaves besides the next path vertex
    let mut path = vec![bottom];
    let mut v = bottom;
    while v != top {
        v = match tree.node(v).parent {
            Some(p) => p,
            None => return false,
        };
        path.push(v);
    }
    path.reverse();
    for (i, &v) in path.iter().enumerate() {
        if i == 0 || i + 1 == path.len() {
            continue;
        }
        for &c in &tree.node(v).children {
            if c == path[i + 1] {
                continue;
            }
            match tree.node(c).label {
                Some(l) if set.contains(l) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Maximum-size common q-star chain, or `None` when no common q-star chain
/// exists. Requests with `q >= t` return `None`: a t-star chain would be a
/// common pendant subtree and is handled by the subtree reduction.
pub fn max_q_star_chain(ts: &Instance, q: u32) -> Option<Chain> {
    if q as usize >= ts.t() {
        return None;
    }
    best_chain(ts, Some(q))
}

/// Maximum-size common chain with no constraint on the star count.
pub fn max_common_chain(ts: &Instance) -> Option<Chain> {
    best_chain(ts, None)
}

fn best_chain(ts: &Instance, q_filter: Option<u32>) -> Option<Chain> {
    let ctx = ChainCtx::new(ts);
    if ts.trees.iter().any(|t| t.leaf_count() < 2) {
        return None;
    }
    let leaves: Vec<LabelId> = ts.leaf_ids().iter().collect();
    let mut best: Option<Chain> = None;
    for &s in &leaves {
        for &t in &leaves {
            if s == t {
                continue;
            }
            if let Some(chain) = st_chain(&ctx, s, t, q_filter) {
                best = Some(match best.take() {
                    None => chain,
                    Some(cur) => pick_better(ts, cur, chain),
                });
            }
        }
    }
    best
}

fn pick_better(ts: &Instance, a: Chain, b: Chain) -> Chain {
    use std::cmp::Ordering;
    match a.len().cmp(&b.len()) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            let key = |c: &Chain| -> Vec<&str> {
                c.leaves.iter().map(|&l| ts.labels.name(l)).collect()
            };
            if key(&a) <= key(&b) {
                a
            } else {
                b
            }
        }
    }
}

/// Maximum common (q-star) s-t-chain: mandatory leaves are those hanging off
/// interior path vertices; the optional ones attach at the endpoints' parents
/// and are maximised by a longest path in the insertion DAG.
fn st_chain(ctx: &ChainCtx, s: LabelId, t: LabelId, q_filter: Option<u32>) -> Option<Chain> {
    let nt = ctx.ts.t();
    let mut star = 0u32;
    let mut ps = Vec::with_capacity(nt);
    let mut pt = Vec::with_capacity(nt);
    for ti in 0..nt {
        let a = ctx.parent_of(ti, s)?;
        let b = ctx.parent_of(ti, t)?;
        if !ctx.idx[ti].ancestor_eq(a, b) {
            return None;
        }
        if a == b {
            star += 1;
        }
        ps.push(a);
        pt.push(b);
    }
    if let Some(q) = q_filter {
        if star != q {
            return None;
        }
    }
    // mandatory set: s, t, and every leaf whose parent is interior to some
    // per-tree path
    let mut set = LeafSet::from_iter([s, t]);
    for (ti, tree) in ctx.ts.trees.iter().enumerate() {
        let mut v = pt[ti];
        while v != ps[ti] {
            v = tree.node(v).parent.expect("path walk passed the root");
            if v == ps[ti] {
                break;
            }
            for &c in &tree.node(v).children {
                if let Some(l) = tree.node(c).label {
                    set.insert(l);
                }
            }
        }
    }
    chain_on(ctx, &set)?;
    // optional leaves: parent at an endpoint parent in every tree, and
    // individually insertable
    let mut cands: Vec<LabelId> = Vec::new();
    for &x in &ctx.ts.leaf_ids().iter().collect::<Vec<_>>() {
        if set.contains(x) {
            continue;
        }
        let fits = (0..nt).all(|ti| {
            ctx.parent_of(ti, x)
                .map(|p| p == ps[ti] || p == pt[ti])
                .unwrap_or(false)
        });
        if !fits {
            continue;
        }
        let mut with_x = set.clone();
        with_x.insert(x);
        if chain_on(ctx, &with_x).is_some() {
            cands.push(x);
        }
    }
    let picked = longest_insertion_path(ctx, &cands);
    let mut full = set;
    for x in picked {
        full.insert(x);
    }
    let chain = chain_on(ctx, &full)?;
    debug_assert!(q_filter.map(|q| chain.q == q).unwrap_or(true));
    Some(chain)
}

/// Longest directed path in the DAG on `cands` with an edge (x, y) when
/// every tree has a (possibly empty) downward path from x's parent to y's
/// parent. Deterministic: vertices are processed in ascending label order and
/// ties prefer the smaller label.
fn longest_insertion_path(ctx: &ChainCtx, cands: &[LabelId]) -> Vec<LabelId> {
    let m = cands.len();
    if m == 0 {
        return Vec::new();
    }
    let nt = ctx.ts.t();
    let mut adj = vec![Vec::new(); m];
    let mut indeg = vec![0usize; m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let below = (0..nt).all(|ti| {
                let pi = ctx.parent_of(ti, cands[i]).unwrap();
                let pj = ctx.parent_of(ti, cands[j]).unwrap();
                ctx.idx[ti].ancestor_eq(pi, pj)
            });
            if below {
                adj[i].push(j);
                indeg[j] += 1;
            }
        }
    }
    // topological order (cycles can only arise from a common cherry, i.e. a
    // violated precondition; bail out to the mandatory set then)
    let mut topo = Vec::with_capacity(m);
    let mut ready: Vec<usize> = (0..m).filter(|&i| indeg[i] == 0).collect();
    while !ready.is_empty() {
        ready.sort_by_key(|&i| std::cmp::Reverse(cands[i]));
        let i = ready.pop().unwrap();
        topo.push(i);
        for &j in &adj[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(j);
            }
        }
    }
    if topo.len() != m {
        return Vec::new();
    }
    let mut len = vec![1usize; m];
    let mut pred = vec![usize::MAX; m];
    for &i in &topo {
        for &j in &adj[i] {
            let cand = len[i] + 1;
            if cand > len[j] || (cand == len[j] && pred[j] != usize::MAX && cands[i] < cands[pred[j]])
            {
                len[j] = cand;
                pred[j] = i;
            }
        }
    }
    let mut end = 0;
    for i in 1..m {
        if len[i] > len[end] || (len[i] == len[end] && cands[i] < cands[end]) {
            end = i;
        }
    }
    let mut path = Vec::with_capacity(len[end]);
    let mut cur = end;
    loop {
        path.push(cands[cur]);
        if pred[cur] == usize::MAX {
            break;
        }
        cur = pred[cur];
    }
    path.reverse();
    path
}
