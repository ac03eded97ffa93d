//! Newick parsing and serialization for rooted multifurcating trees, and
//! extended Newick (`#H<int>` hybrid nodes) for rooted networks.
//!
//! Branch lengths and internal labels are accepted and discarded; the
//! problems here are purely topological. Serialization is canonical:
//! children are emitted in ascending order of their smallest descendant leaf
//! label, so equal objects serialize byte-identically.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::networks::{Digraph, NetNodeId, Network, NetworkError};
use crate::trees::{Tree, TreeBuilder, TreesError};

/// Dense id of a leaf label within a [`LabelSet`].
#[derive(
    Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize,
)]
pub struct LabelId(pub u32);

/// Position of a parse problem, 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Error)]
pub enum NewickError {
    #[error("syntax error at {0}")]
    Syntax(ParseDiagnostics),
    #[error("semantic error at {0}")]
    Semantic(ParseDiagnostics),
    #[error("invalid label {0:?}: labels must be non-empty and free of `(),;:#` and whitespace")]
    BadLabel(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Tree(#[from] TreesError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

impl NewickError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> NewickError {
        NewickError::Syntax(ParseDiagnostics {
            line,
            column,
            message: message.into(),
        })
    }

    fn semantic(line: usize, column: usize, message: impl Into<String>) -> NewickError {
        NewickError::Semantic(ParseDiagnostics {
            line,
            column,
            message: message.into(),
        })
    }

    /// The positioned diagnostic, when the error carries one.
    pub fn diagnostics(&self) -> Option<&ParseDiagnostics> {
        match self {
            NewickError::Syntax(d) | NewickError::Semantic(d) => Some(d),
            _ => None,
        }
    }

    fn at_line(mut self, line: usize) -> NewickError {
        if let NewickError::Syntax(d) | NewickError::Semantic(d) = &mut self {
            d.line = line;
        }
        self
    }
}

/// The taxon universe: an append-only bijection between label strings and
/// dense ids. Ids are stable for the lifetime of the set.
#[derive(Clone, Debug, Default)]
pub struct LabelSet {
    names: Vec<String>,
    index: HashMap<String, LabelId>,
}

const METACHARS: &[char] = &['(', ')', ',', ';', ':', '#'];

impl LabelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn valid_label(name: &str) -> bool {
        !name.is_empty() && !name.contains(METACHARS) && !name.contains(char::is_whitespace)
    }

    /// Interns a label, appending it when new.
    pub fn intern(&mut self, name: &str) -> Result<LabelId, NewickError> {
        if !Self::valid_label(name) {
            return Err(NewickError::BadLabel(name.to_string()));
        }
        if let Some(&id) = self.index.get(name) {
            return Ok(id);
        }
        let id = LabelId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn get(&self, name: &str) -> Option<LabelId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: LabelId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// A fresh `__ST<j>` label for subtree-reduction placeholders, skipping
    /// any colliding user labels.
    pub fn fresh_subtree_label(&mut self) -> LabelId {
        let mut j = 1usize;
        loop {
            let candidate = format!("__ST{j}");
            if self.index.contains_key(&candidate) {
                j += 1;
                continue;
            }
            return self.intern(&candidate).expect("generated label is valid");
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.text.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, want: u8) -> Result<(), NewickError> {
        match self.peek() {
            Some(b) if b == want => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(NewickError::syntax(
                1,
                self.column(),
                format!("expected `{}`, found `{}`", want as char, b as char),
            )),
            None => Err(NewickError::syntax(
                1,
                self.column(),
                format!("expected `{}`, found end of input", want as char),
            )),
        }
    }

    fn label(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(&b) = self.text.get(self.pos) {
            if b.is_ascii_whitespace() || METACHARS.contains(&(b as char)) {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
        }
    }

    /// Consumes `:<number>` when present; the value is discarded.
    fn skip_branch_length(&mut self) -> Result<(), NewickError> {
        if self.peek() == Some(b':') {
            self.pos += 1;
            let start = self.pos;
            while let Some(&b) = self.text.get(self.pos) {
                if b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.pos == start {
                return Err(NewickError::syntax(1, self.column(), "expected branch length"));
            }
        }
        Ok(())
    }

    fn hybrid_id(&mut self) -> Result<Option<u32>, NewickError> {
        if self.peek() != Some(b'#') {
            return Ok(None);
        }
        self.pos += 1;
        if self.text.get(self.pos) == Some(&b'H') {
            self.pos += 1;
        } else {
            return Err(NewickError::syntax(1, self.column(), "expected `H` after `#`"));
        }
        let start = self.pos;
        while self.text.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(NewickError::syntax(1, self.column(), "expected hybrid number"));
        }
        let id: u32 = std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| NewickError::syntax(1, self.column(), "hybrid number out of range"))?;
        Ok(Some(id))
    }
}

struct RawNode {
    children: Vec<usize>,
    label: Option<String>,
    hybrid: Option<u32>,
    column: usize,
}

fn parse_expression(text: &str, allow_hybrids: bool) -> Result<(Vec<RawNode>, usize), NewickError> {
    let mut cur = Cursor::new(text);
    let mut nodes: Vec<RawNode> = Vec::new();
    let root = parse_node(&mut cur, &mut nodes, allow_hybrids)?;
    cur.expect(b';')?;
    cur.skip_ws();
    if cur.pos != cur.text.len() {
        return Err(NewickError::syntax(1, cur.column(), "trailing input after `;`"));
    }
    Ok((nodes, root))
}

fn parse_node(
    cur: &mut Cursor,
    nodes: &mut Vec<RawNode>,
    allow_hybrids: bool,
) -> Result<usize, NewickError> {
    let column = cur.column();
    let mut children = Vec::new();
    if cur.peek() == Some(b'(') {
        cur.pos += 1;
        loop {
            children.push(parse_node(cur, nodes, allow_hybrids)?);
            match cur.peek() {
                Some(b',') => {
                    cur.pos += 1;
                }
                Some(b')') => {
                    cur.pos += 1;
                    break;
                }
                Some(b) => {
                    return Err(NewickError::syntax(
                        1,
                        cur.column(),
                        format!("expected `,` or `)`, found `{}`", b as char),
                    ))
                }
                None => {
                    return Err(NewickError::syntax(
                        1,
                        cur.column(),
                        "unbalanced parenthesis: expected `,` or `)`, found end of input",
                    ))
                }
            }
        }
    }
    let label = cur.label();
    let hybrid = cur.hybrid_id()?;
    if hybrid.is_some() && !allow_hybrids {
        return Err(NewickError::semantic(
            1,
            cur.column(),
            "hybrid node in a tree expression",
        ));
    }
    cur.skip_branch_length()?;
    if children.is_empty() && label.is_none() && hybrid.is_none() {
        return Err(NewickError::syntax(1, cur.column(), "expected a leaf label or `(`"));
    }
    nodes.push(RawNode {
        children,
        label,
        hybrid,
        column,
    });
    Ok(nodes.len() - 1)
}

/// Parses a single Newick tree expression; new labels are appended to
/// `labels`.
pub fn parse_tree(text: &str, labels: &mut LabelSet) -> Result<Tree, NewickError> {
    let (nodes, root) = parse_expression(text, false)?;
    let mut builder = TreeBuilder::new();
    let mut seen = std::collections::HashSet::new();
    let root = build_tree(&nodes, root, labels, &mut builder, &mut seen)?;
    builder.finish_checked(root).map_err(NewickError::from)
}

fn build_tree(
    nodes: &[RawNode],
    at: usize,
    labels: &mut LabelSet,
    builder: &mut TreeBuilder,
    seen: &mut std::collections::HashSet<LabelId>,
) -> Result<u32, NewickError> {
    let raw = &nodes[at];
    if raw.children.is_empty() {
        let name = raw.label.as_ref().ok_or_else(|| {
            NewickError::syntax(1, raw.column, "leaf without a label")
        })?;
        let id = labels.intern(name)?;
        if !seen.insert(id) {
            return Err(NewickError::semantic(
                1,
                raw.column,
                format!("duplicate leaf label `{name}`"),
            ));
        }
        return Ok(builder.leaf(id));
    }
    if raw.children.len() == 1 {
        return Err(NewickError::semantic(
            1,
            raw.column,
            "internal vertex with outdegree 1",
        ));
    }
    let children = raw
        .children
        .iter()
        .map(|&c| build_tree(nodes, c, labels, builder, seen))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(builder.internal(children))
}

/// Parses an extended Newick network expression. Hybrid nodes are written
/// `(subtree)#H<n>` once and referenced as bare `#H<n>`; a labelled
/// occurrence with no subtree makes the hybrid a leaf.
pub fn parse_network(text: &str, labels: &mut LabelSet) -> Result<Network, NewickError> {
    let (nodes, root) = parse_expression(text, true)?;
    // unify hybrid occurrences
    let mut hybrid_vertex: HashMap<u32, NetNodeId> = HashMap::new();
    let mut hybrid_defined: HashMap<u32, usize> = HashMap::new();
    let mut g = Digraph::new();
    let mut vertex_of = vec![u32::MAX; nodes.len()];
    for (i, raw) in nodes.iter().enumerate() {
        match raw.hybrid {
            Some(h) => {
                let v = *hybrid_vertex
                    .entry(h)
                    .or_insert_with(|| g.add_node(None));
                vertex_of[i] = v;
                if !raw.children.is_empty() {
                    if let Some(first) = hybrid_defined.insert(h, i) {
                        let _ = first;
                        return Err(NewickError::semantic(
                            1,
                            raw.column,
                            format!("hybrid #H{h} defined with children more than once"),
                        ));
                    }
                }
            }
            None => {
                vertex_of[i] = g.add_node(None);
            }
        }
    }
    // labels and edges
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in nodes.iter().enumerate() {
        let v = vertex_of[i];
        if let Some(name) = &raw.label {
            // labels on vertices with children are internal labels: discarded
            let defines_children = !raw.children.is_empty()
                || raw
                    .hybrid
                    .map(|h| hybrid_defined.contains_key(&h))
                    .unwrap_or(false);
            if !defines_children {
                let id = labels.intern(name)?;
                if !seen.insert(id) && g.node(v).label != Some(id) {
                    return Err(NewickError::semantic(
                        1,
                        raw.column,
                        format!("duplicate leaf label `{name}`"),
                    ));
                }
                if let Some(existing) = g.node(v).label {
                    if existing != id {
                        return Err(NewickError::semantic(
                            1,
                            raw.column,
                            format!("hybrid with conflicting labels"),
                        ));
                    }
                }
                g.set_label(v, Some(id));
            }
        }
        for &c in &raw.children {
            g.add_edge(v, vertex_of[c]);
        }
    }
    // every bare hybrid must have a defining occurrence somewhere
    for (h, &v) in &hybrid_vertex {
        if !hybrid_defined.contains_key(h) && g.node(v).label.is_none() {
            let col = nodes
                .iter()
                .find(|r| r.hybrid == Some(*h))
                .map(|r| r.column)
                .unwrap_or(1);
            return Err(NewickError::semantic(
                1,
                col,
                format!("hybrid #H{h} referenced but never defined"),
            ));
        }
    }
    if !g.is_acyclic() {
        return Err(NewickError::semantic(
            1,
            1,
            "cycle introduced by hybrid references",
        ));
    }
    Network::from_digraph(g).map_err(|e| match e {
        NetworkError::Structural(msg) => NewickError::semantic(1, 1, msg),
        other => NewickError::Network(other),
    })
}

// ---------------------------------------------------------------------------
// serialization

/// Canonical Newick for a tree: children ordered by smallest descendant leaf
/// label, no branch lengths.
pub fn serialize_tree(t: &Tree, labels: &LabelSet) -> String {
    fn go(t: &Tree, labels: &LabelSet, v: u32, out: &mut String) -> String {
        let node = t.node(v);
        if let Some(l) = node.label {
            let name = labels.name(l);
            out.push_str(name);
            return name.to_string();
        }
        let mut rendered: Vec<(String, String)> = node
            .children
            .iter()
            .map(|&c| {
                let mut buf = String::new();
                let key = go(t, labels, c, &mut buf);
                (key, buf)
            })
            .collect();
        rendered.sort();
        out.push('(');
        for (i, (_, buf)) in rendered.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(buf);
        }
        out.push(')');
        rendered.into_iter().map(|(k, _)| k).min().unwrap()
    }
    let mut out = String::new();
    go(t, labels, t.root(), &mut out);
    out.push(';');
    out
}

/// Canonical extended Newick for a network. Deterministic: children are
/// ordered by (smallest descendant leaf label, unfolded subtree encoding),
/// hybrid numbers are assigned in emission order, and each hybrid's subtree
/// is written at its first emission.
pub fn serialize_network(n: &Network, labels: &LabelSet) -> String {
    // unfolded code per vertex: sorting key that is invariant under vertex
    // renumbering (memoised; shared subgraphs are small)
    fn code(n: &Network, labels: &LabelSet, v: u32, memo: &mut Vec<Option<String>>) -> String {
        if let Some(c) = &memo[v as usize] {
            return c.clone();
        }
        let node = n.node(v);
        let c = if let Some(l) = node.label {
            labels.name(l).to_string()
        } else {
            let mut kids: Vec<String> = node
                .children
                .iter()
                .map(|&c| code(n, labels, c, memo))
                .collect();
            kids.sort();
            format!("({})", kids.join(","))
        };
        memo[v as usize] = Some(c.clone());
        c
    }
    fn emit(
        n: &Network,
        labels: &LabelSet,
        v: u32,
        memo: &mut Vec<Option<String>>,
        hybrid_no: &mut HashMap<u32, usize>,
        next_no: &mut usize,
        out: &mut String,
    ) {
        let node = n.node(v);
        let is_hybrid = node.parents.len() >= 2;
        if is_hybrid {
            if let Some(&no) = hybrid_no.get(&v) {
                out.push_str(&format!("#H{no}"));
                return;
            }
            let no = *next_no;
            *next_no += 1;
            hybrid_no.insert(v, no);
            if node.label.is_none() {
                emit_children(n, labels, v, memo, hybrid_no, next_no, out);
            }
            if let Some(l) = node.label {
                out.push_str(labels.name(l));
            }
            out.push_str(&format!("#H{no}"));
            return;
        }
        if let Some(l) = node.label {
            out.push_str(labels.name(l));
            return;
        }
        emit_children(n, labels, v, memo, hybrid_no, next_no, out);
    }
    fn emit_children(
        n: &Network,
        labels: &LabelSet,
        v: u32,
        memo: &mut Vec<Option<String>>,
        hybrid_no: &mut HashMap<u32, usize>,
        next_no: &mut usize,
        out: &mut String,
    ) {
        let node = n.node(v);
        let mut kids: Vec<(String, u32)> = node
            .children
            .iter()
            .map(|&c| (code(n, labels, c, memo), c))
            .collect();
        kids.sort();
        out.push('(');
        for (i, (_, c)) in kids.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            emit(n, labels, *c, memo, hybrid_no, next_no, out);
        }
        out.push(')');
    }
    let mut memo = vec![None; n.vertex_count()];
    let mut hybrid_no = HashMap::new();
    let mut next_no = 1usize;
    let mut out = String::new();
    emit(
        n,
        labels,
        n.root(),
        &mut memo,
        &mut hybrid_no,
        &mut next_no,
        &mut out,
    );
    out.push(';');
    out
}

// ---------------------------------------------------------------------------
// file formats

/// Parses a tree file: one Newick tree per line, `#` comment lines, blank
/// lines ignored. All trees must be on the same label set.
pub fn parse_tree_collection(text: &str) -> Result<(LabelSet, Vec<Tree>), NewickError> {
    let mut labels = LabelSet::new();
    let mut trees: Vec<Tree> = Vec::new();
    let mut first_leafset: Option<(crate::leafset::LeafSet, usize)> = None;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tree = parse_tree(trimmed, &mut labels).map_err(|e| e.at_line(lineno))?;
        let ls = tree.leaf_set();
        match &first_leafset {
            None => first_leafset = Some((ls, lineno)),
            Some((want, _)) => {
                if &ls != want {
                    return Err(NewickError::semantic(
                        lineno,
                        1,
                        "tree is not on the same label set as the first tree",
                    ));
                }
            }
        }
        trees.push(tree);
    }
    if trees.is_empty() {
        return Err(NewickError::semantic(1, 1, "no trees in input"));
    }
    Ok((labels, trees))
}

pub fn read_tree_file(path: &Path) -> Result<(LabelSet, Vec<Tree>), NewickError> {
    let text = std::fs::read_to_string(path)?;
    parse_tree_collection(&text)
}

/// Parses a network file: a single extended Newick expression (whitespace
/// and `#`-comment lines around it are ignored).
pub fn parse_network_file_text(text: &str, labels: &mut LabelSet) -> Result<Network, NewickError> {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with("##") )
        .collect::<Vec<_>>()
        .join("\n");
    parse_network(body.trim(), labels)
}

pub fn read_network_file(path: &Path, labels: &mut LabelSet) -> Result<Network, NewickError> {
    let text = std::fs::read_to_string(path)?;
    parse_network_file_text(&text, labels)
}

pub fn write_tree_file(path: &Path, trees: &[Tree], labels: &LabelSet) -> Result<(), NewickError> {
    let mut out = String::new();
    for t in trees {
        out.push_str(&serialize_tree(t, labels));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_simple_trees() {
        let mut labels = LabelSet::new();
        let t = parse_tree("((a,b),c);", &mut labels).unwrap();
        assert_eq!(t.leaf_count(), 3);
        assert_eq!(serialize_tree(&t, &labels), "((a,b),c);");

        let star = parse_tree("(a,b,c,d);", &mut labels).unwrap();
        assert_eq!(star.node(star.root()).children.len(), 4);
        assert_eq!(serialize_tree(&star, &labels), "(a,b,c,d);");
    }

    #[test]
    fn canonical_order_and_fixed_point() {
        let mut labels = LabelSet::new();
        let t = parse_tree("(c,(b,a));", &mut labels).unwrap();
        let s = serialize_tree(&t, &labels);
        assert_eq!(s, "((a,b),c);");
        let t2 = parse_tree(&s, &mut labels).unwrap();
        assert_eq!(serialize_tree(&t2, &labels), s);
    }

    #[test]
    fn unbalanced_and_degenerate_inputs() {
        let mut labels = LabelSet::new();
        let err = parse_tree("((a,b);", &mut labels).unwrap_err();
        assert!(matches!(err, NewickError::Syntax(_)), "{err}");
        let d = err.diagnostics().unwrap();
        assert_eq!(d.line, 1);
        assert!(d.column >= 7);

        let err = parse_tree("((a));", &mut labels).unwrap_err();
        assert!(matches!(err, NewickError::Semantic(_)), "{err}");

        let err = parse_tree("((a,b),a);", &mut labels).unwrap_err();
        assert!(matches!(err, NewickError::Semantic(_)), "{err}");
    }

    #[test]
    fn branch_lengths_and_internal_labels_discarded() {
        let mut labels = LabelSet::new();
        let t = parse_tree("((a:0.5,b:1e-3)anc:2,c);", &mut labels).unwrap();
        assert_eq!(serialize_tree(&t, &labels), "((a,b),c);");
        assert!(labels.get("anc").is_none());
    }

    #[test]
    fn parse_simple_network() {
        let mut labels = LabelSet::new();
        let n = parse_network("((a,(h)#H1),(#H1,b));", &mut labels).unwrap();
        assert_eq!(n.leaf_set().len(), 3);
        assert_eq!(crate::networks::reticulation_number(&n), 1);
    }

    #[test]
    fn network_errors() {
        let mut labels = LabelSet::new();
        // indegree-1 hybrid leaves an indegree-1 outdegree-1 vertex
        let err = parse_network("((a,(h)#H1),b);", &mut labels).unwrap_err();
        assert!(matches!(err, NewickError::Semantic(_)), "{err}");
        // undefined reference
        let err = parse_network("((a,#H7),b);", &mut labels).unwrap_err();
        assert!(format!("{err}").contains("never defined"), "{err}");
        // hybrid cycle: H1's subtree references H2 whose subtree references H1
        let err = parse_network("(((#H2)#H1,a),((#H1)#H2,b));", &mut labels).unwrap_err();
        assert!(matches!(err, NewickError::Semantic(_)), "{err}");
    }

    #[test]
    fn network_roundtrip_isomorphic() {
        let mut labels = LabelSet::new();
        let n = parse_network("((a,(h)#H1),(#H1,b));", &mut labels).unwrap();
        let s = serialize_network(&n, &labels);
        let n2 = parse_network(&s, &mut labels).unwrap();
        assert!(crate::networks::isomorphic(&n, &n2));
        assert_eq!(serialize_network(&n2, &labels), s);
        // a tree serializes without any hybrid tokens
        let t = parse_network("((a,b),c);", &mut labels).unwrap();
        assert!(!serialize_network(&t, &labels).contains("#H"));
    }

    #[test]
    fn tree_collection_format() {
        let (labels, trees) = parse_tree_collection(
            "# comment\n((a,b),c);\n\n(a,(b,c));\n",
        )
        .unwrap();
        assert_eq!(trees.len(), 2);
        assert_eq!(labels.len(), 3);

        let err = parse_tree_collection("((a,b),c);\n((a,b),d);\n").unwrap_err();
        assert!(matches!(err, NewickError::Semantic(_)));
        let err2 = parse_tree_collection("((a,b),c);\n((a,b)\n").unwrap_err();
        assert_eq!(err2.diagnostics().unwrap().line, 2);
    }
}
