//! Directed graphs without self-loops and the surgeries delta-separation is
//! assembled from: parents, ancestral sets, out-edge deletion, induced
//! subgraphs, moralization and undirected separation.
//!
//! Nodes are addressed by index into a label table that is shared between a
//! graph and every graph derived from it by surgery, so a [`NodeSet`] built
//! against one graph stays meaningful for its subgraphs.

use std::fmt::{self, Write as _};
use std::ops::{BitAnd, BitOr, Not, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Maximum number of nodes a graph may carry.
pub const MAX_NODES: usize = 64;

/// A set of node indices, stored as a 64-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        NodeSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_NODES);
        NodeSet(1 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_NODES);
        if n == MAX_NODES {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_NODES && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        self | NodeSet::singleton(i)
    }

    pub fn without(self, i: usize) -> Self {
        self - NodeSet::singleton(i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: NodeSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> NodeSetIter {
        NodeSetIter(self.0)
    }

    /// All subsets of `self`, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = NodeSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(NodeSet(cur))
        })
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitOr for NodeSet {
    type Output = NodeSet;
    fn bitor(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 | rhs.0)
    }
}

impl BitAnd for NodeSet {
    type Output = NodeSet;
    fn bitand(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 & rhs.0)
    }
}

impl Sub for NodeSet {
    type Output = NodeSet;
    fn sub(self, rhs: NodeSet) -> NodeSet {
        NodeSet(self.0 & !rhs.0)
    }
}

impl Not for NodeSet {
    type Output = NodeSet;
    fn not(self) -> NodeSet {
        NodeSet(!self.0)
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(NodeSet::EMPTY, NodeSet::with)
    }
}

pub struct NodeSetIter(u64);

impl Iterator for NodeSetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for NodeSetIter {}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() || label.chars().any(char::is_whitespace) {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

/// Shared label table with index lookup.
#[derive(Clone, PartialEq, Eq)]
struct Labels(Arc<[String]>);

impl Labels {
    fn new<S: AsRef<str>>(nodes: &[S]) -> Result<Self> {
        if nodes.len() > MAX_NODES {
            return Err(Error::TooLarge {
                what: "graph",
                actual: nodes.len(),
                limit: MAX_NODES,
            });
        }
        let mut labels: Vec<String> = Vec::with_capacity(nodes.len());
        for n in nodes {
            let n = n.as_ref();
            validate_label(n)?;
            if labels.iter().any(|l| l == n) {
                return Err(Error::DuplicateNode(n.to_string()));
            }
            labels.push(n.to_string());
        }
        Ok(Labels(labels.into()))
    }

    fn position(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|l| l == label)
    }

    fn name(&self, i: usize) -> String {
        self.0
            .get(i)
            .cloned()
            .unwrap_or_else(|| format!("#{i}"))
    }
}

fn check_members(labels: &Labels, vertices: NodeSet, s: NodeSet) -> Result<()> {
    match (s - vertices).iter().next() {
        Some(i) => Err(Error::UnknownNode(labels.name(i))),
        None => Ok(()),
    }
}

fn resolve<'a, I>(labels: &Labels, vertices: NodeSet, names: I) -> Result<NodeSet>
where
    I: IntoIterator<Item = &'a str>,
{
    names.into_iter().try_fold(NodeSet::EMPTY, |acc, name| {
        match labels.position(name) {
            Some(i) if vertices.contains(i) => Ok(acc.with(i)),
            _ => Err(Error::UnknownNode(name.to_string())),
        }
    })
}

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A directed graph without self-loops. Both `(j, k)` and `(k, j)` may be
/// present.
#[derive(Clone, PartialEq, Eq)]
pub struct DiGraph {
    labels: Labels,
    vertices: NodeSet,
    // parents[k] = { j : (j, k) in E }
    parents: Vec<NodeSet>,
}

impl DiGraph {
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let labels = Labels::new(nodes)?;
        let vertices = NodeSet::full(nodes.len());
        let mut parents = vec![NodeSet::EMPTY; nodes.len()];
        for (from, to) in edges {
            let (from, to) = (from.as_ref(), to.as_ref());
            let j = labels
                .position(from)
                .ok_or_else(|| Error::UnknownNode(from.to_string()))?;
            let k = labels
                .position(to)
                .ok_or_else(|| Error::UnknownNode(to.to_string()))?;
            if j == k {
                return Err(Error::SelfLoop(from.to_string()));
            }
            parents[k] = parents[k].with(j);
        }
        Ok(DiGraph {
            labels,
            vertices,
            parents,
        })
    }

    pub fn edgeless<S: AsRef<str>>(nodes: &[S]) -> Result<Self> {
        DiGraph::new::<S>(nodes, &[])
    }

    /// The graph whose edge set is selected by `bits` from [`ordered_pairs`]
    /// over `nodes`.
    pub fn from_edge_bits<S: AsRef<str>>(nodes: &[S], bits: u64) -> Result<Self> {
        let g = DiGraph::edgeless(nodes)?;
        let pairs = ordered_pairs(nodes.len());
        let mut parents = g.parents.clone();
        for (i, &(j, k)) in pairs.iter().enumerate() {
            if bits >> i & 1 == 1 {
                parents[k] = parents[k].with(j);
            }
        }
        Ok(DiGraph { parents, ..g })
    }

    /// Vertex set of this graph.
    pub fn vertices(&self) -> NodeSet {
        self.vertices
    }

    pub fn node_count(&self) -> usize {
        self.vertices.len()
    }

    /// Size of the label table, which may exceed `node_count` after
    /// [`DiGraph::induced_subgraph`].
    pub fn label_count(&self) -> usize {
        self.labels.0.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels.0[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        match self.labels.position(label) {
            Some(i) if self.vertices.contains(i) => Ok(i),
            _ => Err(Error::UnknownNode(label.to_string())),
        }
    }

    /// Resolve labels to a node set.
    pub fn node_set<'a, I>(&self, names: I) -> Result<NodeSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        resolve(&self.labels, self.vertices, names)
    }

    /// Labels of the members of `s`, in index order.
    pub fn names(&self, s: NodeSet) -> Vec<String> {
        s.iter().map(|i| self.labels.name(i)).collect()
    }

    pub fn check_subset(&self, s: NodeSet) -> Result<()> {
        check_members(&self.labels, self.vertices, s)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents.get(to).is_some_and(|p| p.contains(from))
    }

    /// Edges `(from, to)` ordered by `from`, then `to`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in self.vertices.iter() {
            for k in self.vertices.iter() {
                if self.has_edge(j, k) {
                    out.push((j, k));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    pub fn parents_of(&self, k: usize) -> NodeSet {
        self.parents.get(k).copied().unwrap_or_default()
    }

    pub fn children_of(&self, j: usize) -> NodeSet {
        self.vertices
            .iter()
            .filter(|&k| self.parents[k].contains(j))
            .collect()
    }

    /// `pa(A)`: nodes outside `a` with an edge into `a`.
    pub fn parents(&self, a: NodeSet) -> Result<NodeSet> {
        self.check_subset(a)?;
        Ok(self.parents_unchecked(a))
    }

    pub(crate) fn parents_unchecked(&self, a: NodeSet) -> NodeSet {
        a.iter()
            .fold(NodeSet::EMPTY, |acc, k| acc | self.parents[k])
            - a
    }

    /// `An(A)`: `a` together with every node that has a directed path into it.
    pub fn ancestral_set(&self, a: NodeSet) -> Result<NodeSet> {
        self.check_subset(a)?;
        Ok(self.ancestral_set_unchecked(a))
    }

    pub(crate) fn ancestral_set_unchecked(&self, a: NodeSet) -> NodeSet {
        let mut result = a;
        let mut frontier = a;
        while !frontier.is_empty() {
            let next = self.parents_unchecked(frontier) - result;
            result = result | next;
            frontier = next;
        }
        result
    }

    /// `G^B`: the graph with every edge starting in `b` removed.
    pub fn delete_out_edges(&self, b: NodeSet) -> Result<DiGraph> {
        self.check_subset(b)?;
        Ok(self.delete_out_edges_unchecked(b))
    }

    pub(crate) fn delete_out_edges_unchecked(&self, b: NodeSet) -> DiGraph {
        DiGraph {
            labels: self.labels.clone(),
            vertices: self.vertices,
            parents: self.parents.iter().map(|&p| p - b).collect(),
        }
    }

    /// `G_S`: vertices `s` and the edges with both endpoints in `s`.
    pub fn induced_subgraph(&self, s: NodeSet) -> Result<DiGraph> {
        self.check_subset(s)?;
        Ok(self.induced_subgraph_unchecked(s))
    }

    pub(crate) fn induced_subgraph_unchecked(&self, s: NodeSet) -> DiGraph {
        let parents = self
            .parents
            .iter()
            .enumerate()
            .map(|(k, &p)| if s.contains(k) { p & s } else { NodeSet::EMPTY })
            .collect();
        DiGraph {
            labels: self.labels.clone(),
            vertices: s,
            parents,
        }
    }

    /// `G^m`: drop directions and marry parents of a common child.
    pub fn moralize(&self) -> UGraph {
        let mut adj = vec![NodeSet::EMPTY; self.parents.len()];
        for k in self.vertices.iter() {
            let pa = self.parents[k];
            for j in pa.iter() {
                adj[j] = adj[j].with(k) | (pa - NodeSet::singleton(j));
                adj[k] = adj[k].with(j);
            }
        }
        UGraph {
            labels: self.labels.clone(),
            vertices: self.vertices,
            adj,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for i in self.vertices.iter() {
            let _ = writeln!(out, "  {};", quote(self.label(i)));
        }
        for (j, k) in self.edges() {
            let _ = writeln!(out, "  {} -> {};", quote(self.label(j)), quote(self.label(k)));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(j, k)| format!("{}->{}", self.label(j), self.label(k)))
            .collect();
        f.debug_struct("DiGraph")
            .field("nodes", &self.names(self.vertices))
            .field("edges", &edges)
            .finish()
    }
}

/// Ordered pairs `(j, k)`, `j != k`, over `0..n` in lexicographic order.
/// Bit `i` of an edge mask selects pair `i`.
pub fn ordered_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
        .collect()
}

/// Every digraph on the given labels, in increasing edge-mask order.
pub fn all_digraphs<S: AsRef<str>>(
    nodes: &[S],
) -> Result<impl Iterator<Item = DiGraph> + '_> {
    const LIMIT: usize = 5;
    if nodes.len() > LIMIT {
        return Err(Error::TooLarge {
            what: "graph enumeration",
            actual: nodes.len(),
            limit: LIMIT,
        });
    }
    let base = DiGraph::edgeless(nodes)?;
    let pairs = ordered_pairs(nodes.len());
    let total = 1u64 << pairs.len();
    Ok((0..total).map(move |bits| {
        let mut parents = vec![NodeSet::EMPTY; nodes.len()];
        for (i, &(j, k)) in pairs.iter().enumerate() {
            if bits >> i & 1 == 1 {
                parents[k] = parents[k].with(j);
            }
        }
        DiGraph {
            parents,
            ..base.clone()
        }
    }))
}

/// An undirected graph without self-loops.
#[derive(Clone, PartialEq, Eq)]
pub struct UGraph {
    labels: Labels,
    vertices: NodeSet,
    adj: Vec<NodeSet>,
}

impl UGraph {
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let labels = Labels::new(nodes)?;
        let mut adj = vec![NodeSet::EMPTY; nodes.len()];
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let j = labels
                .position(a)
                .ok_or_else(|| Error::UnknownNode(a.to_string()))?;
            let k = labels
                .position(b)
                .ok_or_else(|| Error::UnknownNode(b.to_string()))?;
            if j == k {
                return Err(Error::SelfLoop(a.to_string()));
            }
            adj[j] = adj[j].with(k);
            adj[k] = adj[k].with(j);
        }
        Ok(UGraph {
            labels,
            vertices: NodeSet::full(nodes.len()),
            adj,
        })
    }

    pub fn vertices(&self) -> NodeSet {
        self.vertices
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels.0[i]
    }

    pub fn node_set<'a, I>(&self, names: I) -> Result<NodeSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        resolve(&self.labels, self.vertices, names)
    }

    pub fn names(&self, s: NodeSet) -> Vec<String> {
        s.iter().map(|i| self.labels.name(i)).collect()
    }

    pub fn neighbors(&self, i: usize) -> NodeSet {
        self.adj.get(i).copied().unwrap_or_default()
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.neighbors(j).contains(k)
    }

    /// Edges `{j, k}` reported once as `(j, k)` with `j < k`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in self.vertices.iter() {
            for k in self.adj[j].iter().filter(|&k| k > j) {
                out.push((j, k));
            }
        }
        out
    }

    /// The same graph as a digraph carrying both orientations of every edge.
    pub fn to_symmetric_digraph(&self) -> DiGraph {
        DiGraph {
            labels: self.labels.clone(),
            vertices: self.vertices,
            parents: self.adj.clone(),
        }
    }

    /// `a ⊥u b | c`: every path from `a` to `b` passes through `c`.
    pub fn separated(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<bool> {
        for s in [a, b, c] {
            check_members(&self.labels, self.vertices, s)?;
        }
        Ok(self.separated_unchecked(a, b, c))
    }

    pub(crate) fn separated_unchecked(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        let mut reached = a - c;
        let mut frontier = reached;
        while !frontier.is_empty() {
            if !(reached & b).is_empty() {
                return false;
            }
            let next = frontier
                .iter()
                .fold(NodeSet::EMPTY, |acc, v| acc | self.adj[v])
                - c
                - reached;
            reached = reached | next;
            frontier = next;
        }
        (reached & b).is_empty()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for i in self.vertices.iter() {
            let _ = writeln!(out, "  {};", quote(self.label(i)));
        }
        for (j, k) in self.edges() {
            let _ = writeln!(out, "  {} -- {};", quote(self.label(j)), quote(self.label(k)));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for UGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(j, k)| format!("{}--{}", self.label(j), self.label(k)))
            .collect();
        f.debug_struct("UGraph")
            .field("nodes", &self.names(self.vertices))
            .field("edges", &edges)
            .finish()
    }
}
