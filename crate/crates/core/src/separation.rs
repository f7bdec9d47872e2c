//! Delta-separation in directed, possibly cyclic graphs.
//!
//! [`delta_separates`] is the normative moral-graph procedure.
//! [`delta_separates_trail`] decides the same question by searching for an
//! open allowed trail and is kept independent of the moral-graph code so the
//! two can cross-check each other.

use std::fmt;

use serde::Serialize;

use crate::digraph::{DiGraph, NodeSet};
use crate::error::{Error, Result};

/// "C delta-separates A from B": the past of `a` is irrelevant for the
/// present of `b` given the past of `c`. Sets may overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeparationQuery {
    pub a: NodeSet,
    pub b: NodeSet,
    pub c: NodeSet,
}

impl SeparationQuery {
    pub fn new(a: NodeSet, b: NodeSet, c: NodeSet) -> Self {
        SeparationQuery { a, b, c }
    }

    /// Resolve a query from node labels.
    pub fn from_names<'a>(
        g: &DiGraph,
        a: impl IntoIterator<Item = &'a str>,
        b: impl IntoIterator<Item = &'a str>,
        c: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        Ok(SeparationQuery {
            a: g.node_set(a)?,
            b: g.node_set(b)?,
            c: g.node_set(c)?,
        })
    }

    /// The disjoint query `(A \ (B ∪ C), B, C \ B)` with the same answer.
    pub fn reduced(&self) -> SeparationQuery {
        SeparationQuery {
            a: self.a - (self.b | self.c),
            b: self.b,
            c: self.c - self.b,
        }
    }

    pub fn is_disjoint(&self) -> bool {
        self.a.is_disjoint(self.b) && self.a.is_disjoint(self.c) && self.b.is_disjoint(self.c)
    }

    fn check(&self, g: &DiGraph) -> Result<()> {
        g.check_subset(self.a)?;
        g.check_subset(self.b)?;
        g.check_subset(self.c)
    }

    pub fn labelled(&self, g: &DiGraph) -> LabelledQuery {
        LabelledQuery {
            a: g.names(self.a),
            b: g.names(self.b),
            c: g.names(self.c),
        }
    }
}

/// A query with its sets spelled out as labels, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelledQuery {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
}

/// Whether `q.c` delta-separates `q.a` from `q.b` in `g`.
///
/// Overlapping sets are first reduced to `(A \ (B ∪ C), B, C \ B)`. An empty
/// `A` is always separated. An empty `B` is answered `true`: there is no
/// present to predict.
pub fn delta_separates(g: &DiGraph, q: &SeparationQuery) -> Result<bool> {
    q.check(g)?;
    Ok(moral_unchecked(g, &q.reduced()))
}

fn moral_unchecked(g: &DiGraph, q: &SeparationQuery) -> bool {
    let SeparationQuery { a, b, c } = *q;
    if a.is_empty() || b.is_empty() {
        return true;
    }
    // With c empty this is the "unconnected in (G^B_An(A∪B))^m" clause.
    let keep = g.ancestral_set_unchecked(a | b | c);
    g.delete_out_edges_unchecked(b)
        .induced_subgraph_unchecked(keep)
        .moralize()
        .separated_unchecked(a, b, c)
}

/// Direction in which a trail step traverses an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traversal {
    /// Along the edge: `from -> to`.
    Forward,
    /// Against the edge: the graph has `to -> from`.
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrailStep {
    pub from: usize,
    pub to: usize,
    pub traversal: Traversal,
}

/// A sequence of edges walked without regard to their direction.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Trail {
    pub steps: Vec<TrailStep>,
}

impl Trail {
    pub fn start(&self) -> Option<usize> {
        self.steps.first().map(|s| s.from)
    }

    pub fn end(&self) -> Option<usize> {
        self.steps.last().map(|s| s.to)
    }

    /// Interior nodes where both adjacent edges point into the node.
    pub fn colliders(&self) -> Vec<usize> {
        self.steps
            .windows(2)
            .filter(|w| {
                w[0].traversal == Traversal::Forward && w[1].traversal == Traversal::Backward
            })
            .map(|w| w[0].to)
            .collect()
    }

    pub fn display(&self, g: &DiGraph) -> String {
        let mut out = String::new();
        if let Some(s) = self.start() {
            out.push_str(g.label(s));
        }
        for step in &self.steps {
            let arrow = match step.traversal {
                Traversal::Forward => " -> ",
                Traversal::Backward => " <- ",
            };
            out.push_str(arrow);
            out.push_str(g.label(step.to));
        }
        out
    }
}

impl fmt::Display for Traversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Traversal::Forward => "forward",
            Traversal::Backward => "backward",
        })
    }
}

/// Trail-based decision: `true` iff every allowed trail from `A` to `B` is
/// blocked by `C`, after the same overlap reduction as [`delta_separates`].
pub fn delta_separates_trail(g: &DiGraph, q: &SeparationQuery) -> Result<bool> {
    Ok(open_allowed_trail(g, q)?.is_none())
}

/// An allowed trail from `A` to `B` that `C` fails to block, if any.
///
/// A trail is allowed when it uses no edge leaving `B`. It is blocked when a
/// non-collider on it lies in `C`, or a collider lies outside the ancestors
/// of `C` (computed in the whole graph). Walks may revisit nodes; the search
/// runs over (node, arrived-along-an-edge-pointing-in) states, so every state
/// is expanded once.
pub fn open_allowed_trail(g: &DiGraph, q: &SeparationQuery) -> Result<Option<Trail>> {
    q.check(g)?;
    let SeparationQuery { a, b, c } = q.reduced();
    if a.is_empty() || b.is_empty() {
        return Ok(None);
    }
    let n = g.label_count();
    let vertices = g.vertices();
    let anc_c = ancestors_by_search(g, c);

    // state = 2 * node + (1 if arrived through an arrowhead)
    let mut pred: Vec<Option<(usize, TrailStep)>> = vec![None; 2 * n];
    let mut seen = vec![false; 2 * n];
    let mut queue = std::collections::VecDeque::new();
    const START: usize = usize::MAX;

    let push = |seen: &mut Vec<bool>,
                    pred: &mut Vec<Option<(usize, TrailStep)>>,
                    queue: &mut std::collections::VecDeque<usize>,
                    from_state: usize,
                    step: TrailStep| {
        let state = 2 * step.to + usize::from(step.traversal == Traversal::Forward);
        if !seen[state] {
            seen[state] = true;
            pred[state] = Some((from_state, step));
            queue.push_back(state);
        }
    };

    let edge_allowed = |from: usize| !b.contains(from);

    for start in a.iter() {
        for w in vertices.iter() {
            if g.has_edge(start, w) {
                let step = TrailStep { from: start, to: w, traversal: Traversal::Forward };
                push(&mut seen, &mut pred, &mut queue, START, step);
            }
            if g.has_edge(w, start) && edge_allowed(w) {
                let step = TrailStep { from: start, to: w, traversal: Traversal::Backward };
                push(&mut seen, &mut pred, &mut queue, START, step);
            }
        }
    }

    while let Some(state) = queue.pop_front() {
        let v = state / 2;
        let into_v = state % 2 == 1;
        if b.contains(v) {
            let mut steps = Vec::new();
            let mut cur = state;
            while cur != START {
                let (prev, step) = pred[cur].expect("every queued state has a predecessor");
                steps.push(step);
                cur = prev;
            }
            steps.reverse();
            return Ok(Some(Trail { steps }));
        }
        let pass_as_noncollider = !c.contains(v);
        let pass_as_collider = into_v && anc_c.contains(v);
        for w in vertices.iter() {
            // continue along v -> w: v is a non-collider
            if g.has_edge(v, w) && pass_as_noncollider {
                let step = TrailStep { from: v, to: w, traversal: Traversal::Forward };
                push(&mut seen, &mut pred, &mut queue, state, step);
            }
            // continue along w -> v: v is a collider iff we also arrived into v
            if g.has_edge(w, v) && edge_allowed(w) {
                let open = if into_v { pass_as_collider } else { pass_as_noncollider };
                if open {
                    let step = TrailStep { from: v, to: w, traversal: Traversal::Backward };
                    push(&mut seen, &mut pred, &mut queue, state, step);
                }
            }
        }
    }
    Ok(None)
}

// Ancestors by depth-first search over single edges, deliberately not reusing
// `DiGraph::ancestral_set`.
fn ancestors_by_search(g: &DiGraph, s: NodeSet) -> NodeSet {
    let mut result = s;
    let mut stack: Vec<usize> = s.iter().collect();
    while let Some(v) = stack.pop() {
        for u in g.vertices().iter() {
            if g.has_edge(u, v) && !result.contains(u) {
                result = result.with(u);
                stack.push(u);
            }
        }
    }
    result
}

/// Largest graph [`all_separations`] will enumerate.
pub const MAX_ENUMERATION_NODES: usize = 6;

/// Every disjoint `(A, B, C)` with `A`, `B` nonempty and `|C| <= max_cond`
/// for which `C` delta-separates `A` from `B`.
///
/// Ordered by `A`, then `B`, then `C`, each in [`ordered_subsets`] order.
pub fn all_separations(g: &DiGraph, max_cond: usize) -> Result<Vec<SeparationQuery>> {
    if g.node_count() > MAX_ENUMERATION_NODES {
        return Err(Error::TooLarge {
            what: "graph for separation enumeration",
            actual: g.node_count(),
            limit: MAX_ENUMERATION_NODES,
        });
    }
    let subsets = ordered_subsets(g, g.vertices());
    let mut out = Vec::new();
    for &a in subsets.iter().filter(|s| !s.is_empty()) {
        for &b in subsets.iter().filter(|s| !s.is_empty() && s.is_disjoint(a)) {
            for &c in subsets
                .iter()
                .filter(|s| s.len() <= max_cond && s.is_disjoint(a | b))
            {
                let q = SeparationQuery { a, b, c };
                if moral_unchecked(g, &q) {
                    out.push(q);
                }
            }
        }
    }
    Ok(out)
}

/// Subsets of `ground` ordered by size, then lexicographically by their
/// sorted member labels.
pub fn ordered_subsets(g: &DiGraph, ground: NodeSet) -> Vec<NodeSet> {
    let mut subsets: Vec<(usize, Vec<&str>, NodeSet)> = ground
        .subsets()
        .map(|s| {
            let mut names: Vec<&str> = s.iter().map(|i| g.label(i)).collect();
            names.sort_unstable();
            (s.len(), names, s)
        })
        .collect();
    subsets.sort();
    subsets.into_iter().map(|(_, _, s)| s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle() -> DiGraph {
        DiGraph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap()
    }

    fn q(g: &DiGraph, a: &[&str], b: &[&str], c: &[&str]) -> SeparationQuery {
        SeparationQuery::from_names(g, a.iter().copied(), b.iter().copied(), c.iter().copied())
            .unwrap()
    }

    fn both(g: &DiGraph, query: &SeparationQuery) -> bool {
        let moral = delta_separates(g, query).unwrap();
        let trail = delta_separates_trail(g, query).unwrap();
        assert_eq!(moral, trail, "methods disagree on {query:?} in {g:?}");
        moral
    }

    #[test]
    fn cycle_is_asymmetric() {
        let g = cycle();
        assert!(both(&g, &q(&g, &["b"], &["a"], &["c"])));
        assert!(!both(&g, &q(&g, &["a"], &["b"], &["c"])));
    }

    #[test]
    fn health_visits_not_separated_from_survival_by_hosp() {
        let g = DiGraph::new(
            &["health", "visits", "hosp", "survival"],
            &[
                ("visits", "hosp"),
                ("hosp", "visits"),
                ("health", "hosp"),
                ("health", "survival"),
                ("hosp", "survival"),
            ],
        )
        .unwrap();
        assert!(!both(&g, &q(&g, &["visits"], &["survival"], &["hosp"])));
        assert!(both(&g, &q(&g, &["visits"], &["survival"], &["hosp", "health"])));
        // visits' intensity ignores health given the rest
        assert!(both(&g, &q(&g, &["health"], &["visits"], &["hosp", "survival"])));
    }

    #[test]
    fn empty_sets() {
        let g = cycle();
        for c in g.vertices().subsets() {
            for b in g.vertices().subsets() {
                assert!(both(&g, &SeparationQuery::new(NodeSet::EMPTY, b, c)));
                assert!(both(&g, &SeparationQuery::new(g.vertices(), NodeSet::EMPTY, c)));
            }
        }
    }

    #[test]
    fn overlap_reduces_to_empty_conditioning() {
        let g = DiGraph::new(&["a", "b"], &[("a", "b")]).unwrap();
        let query = q(&g, &["a"], &["b"], &["b"]);
        assert_eq!(query.reduced(), q(&g, &["a"], &["b"], &[]));
        assert!(!both(&g, &query));
    }

    #[test]
    fn edgeless_graph_separates_everything() {
        let g = DiGraph::edgeless(&["a", "b", "c", "d"]).unwrap();
        let v = g.vertices();
        for a in v.subsets() {
            for b in (v - a).subsets() {
                for c in (v - a - b).subsets() {
                    assert!(both(&g, &SeparationQuery::new(a, b, c)));
                }
            }
        }
    }

    #[test]
    fn unknown_node_rejected() {
        let g = cycle();
        let bad = SeparationQuery::new(NodeSet::singleton(5), NodeSet::EMPTY, NodeSet::EMPTY);
        assert_eq!(delta_separates(&g, &bad).unwrap_err(), Error::UnknownNode("#5".into()));
        assert!(delta_separates_trail(&g, &bad).is_err());
    }

    #[test]
    fn open_trail_witness() {
        let g = cycle();
        let trail = open_allowed_trail(&g, &q(&g, &["a"], &["b"], &["c"]))
            .unwrap()
            .unwrap();
        assert_eq!(trail.display(&g), "a -> b");
        assert!(open_allowed_trail(&g, &q(&g, &["b"], &["a"], &["c"]))
            .unwrap()
            .is_none());
    }

    #[test]
    fn collider_opened_by_descendant_in_conditioning_set() {
        // a -> m <- x -> b, m -> d ; conditioning on d opens the collider at m
        let g = DiGraph::new(
            &["a", "b", "m", "d", "x"],
            &[("a", "m"), ("x", "m"), ("m", "d"), ("x", "b")],
        )
        .unwrap();
        assert!(both(&g, &q(&g, &["a"], &["b"], &[])));
        let query = q(&g, &["a"], &["b"], &["d"]);
        assert!(!both(&g, &query));
        let trail = open_allowed_trail(&g, &query).unwrap().unwrap();
        assert_eq!(trail.display(&g), "a -> m <- x -> b");
        assert_eq!(trail.colliders(), vec![2]);
    }

    #[test]
    fn all_separations_examples() {
        let g = cycle();
        let seps = all_separations(&g, 1).unwrap();
        assert!(seps.contains(&q(&g, &["b"], &["a"], &["c"])));
        assert!(!seps.contains(&q(&g, &["a"], &["b"], &["c"])));

        let e = DiGraph::edgeless(&["a", "b"]).unwrap();
        let seps = all_separations(&e, 0).unwrap();
        assert_eq!(seps, vec![q(&e, &["a"], &["b"], &[]), q(&e, &["b"], &["a"], &[])]);

        let complete = DiGraph::new(
            &["a", "b", "c"],
            &[("a", "b"), ("b", "a"), ("a", "c"), ("c", "a"), ("b", "c"), ("c", "b")],
        )
        .unwrap();
        assert!(all_separations(&complete, 1).unwrap().is_empty());
    }

    #[test]
    fn all_separations_guard() {
        let g = DiGraph::edgeless(&["a", "b", "c", "d", "e", "f", "g"]).unwrap();
        assert!(matches!(
            all_separations(&g, 1),
            Err(Error::TooLarge { limit: 6, .. })
        ));
    }

    #[test]
    fn ordered_subsets_by_size_then_label() {
        let g = DiGraph::edgeless(&["c", "a", "b"]).unwrap();
        let names: Vec<Vec<String>> = ordered_subsets(&g, g.vertices())
            .into_iter()
            .map(|s| {
                let mut n = g.names(s);
                n.sort();
                n
            })
            .collect();
        let expect: Vec<Vec<&str>> = vec![
            vec![],
            vec!["a"],
            vec!["b"],
            vec!["c"],
            vec!["a", "b"],
            vec!["a", "c"],
            vec!["b", "c"],
            vec!["a", "b", "c"],
        ];
        assert_eq!(names, expect);
    }
}
