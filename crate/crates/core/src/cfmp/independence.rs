use super::{CfmpSpec, RateTable, CONSTANCY_TOLERANCE};
use crate::digraph::{DiGraph, NodeSet};
use crate::error::{Error, Result};
use crate::graphoid::IrrelevanceOracle;

fn same_rate(x: f64, y: f64) -> bool {
    (x - y).abs() <= CONSTANCY_TOLERANCE * x.abs().max(y.abs())
}

/// Whether every rate of `t` is unchanged when the dependencies at the
/// given positions vary while the rest of the configuration is held fixed.
fn constant_in(t: &RateTable, own: usize, positions: &[usize]) -> bool {
    if positions.is_empty() {
        return true;
    }
    (0..t.config_count()).all(|config| {
        let mut base = t.config(config);
        for &p in positions {
            base[p] = 0;
        }
        let base = t.config_index(&base);
        (0..own).all(|from| {
            (0..own).filter(|&to| to != from).all(|to| {
                same_rate(
                    t.get_by_config(config, from, to).expect("validated"),
                    t.get_by_config(base, from, to).expect("validated"),
                )
            })
        })
    })
}

/// Positions in `t`'s dependency list of the components in `s`.
fn positions(t: &RateTable, s: NodeSet) -> Vec<usize> {
    t.depends_on()
        .iter()
        .enumerate()
        .filter(|&(_, &d)| s.contains(d))
        .map(|(i, _)| i)
        .collect()
}

fn li_indices(s: &CfmpSpec, k: usize, j: usize) -> bool {
    let t = s.table(j);
    constant_in(t, s.space().cardinality(j), &positions(t, NodeSet::singleton(k)))
}

/// Whether the jump rates of component `j` are constant in the state of
/// component `k`. This can hold even when `k` is a declared dependency of
/// `j` whose table rows happen to coincide.
pub fn is_locally_independent(s: &CfmpSpec, k: &str, j: &str) -> Result<bool> {
    s.require_valid()?;
    let (k, j) = (s.space().index_of(k)?, s.space().index_of(j)?);
    if k == j {
        return Err(Error::InvalidArgument(format!(
            "local independence of `{}` from itself is not defined",
            s.space().name(k)
        )));
    }
    Ok(li_indices(s, k, j))
}

/// Whether the rates of every component in `a` are constant in `y_b`,
/// uniformly over `y_{a ∪ c}`. Only pairwise disjoint triples covering all
/// components are answered; anything else would need the marginal
/// intensities of a subprocess.
pub fn set_locally_independent(s: &CfmpSpec, b: NodeSet, a: NodeSet, c: NodeSet) -> Result<bool> {
    s.require_valid()?;
    let all = NodeSet::full(s.component_count());
    if let Some(i) = (a | b | c).iter().find(|&i| !all.contains(i)) {
        return Err(Error::UnknownComponent(format!("#{i}")));
    }
    if b.is_empty() {
        return Ok(true);
    }
    if !covering(s, a, b, c) {
        return Err(Error::NotCovering);
    }
    Ok(a.iter().all(|j| {
        let t = s.table(j);
        constant_in(t, s.space().cardinality(j), &positions(t, b))
    }))
}

fn covering(s: &CfmpSpec, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
    a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c) && (a | b | c) == NodeSet::full(s.component_count())
}

/// The local independence graph: `j -> k` iff the rates of `k` genuinely
/// vary with the state of `j`.
pub fn derive_graph(s: &CfmpSpec) -> Result<DiGraph> {
    s.require_valid()?;
    let names: Vec<&str> = s.space().components().iter().map(|c| c.name.as_str()).collect();
    let mut edges = Vec::new();
    for (k, t) in s.tables().iter().enumerate() {
        for &j in t.depends_on() {
            if !li_indices(s, j, k) {
                edges.push((names[j], names[k]));
            }
        }
    }
    DiGraph::new(&names, &edges)
}

/// Declared dependencies `(j, k)` with `j ∈ D_k` that the rates of `k` do
/// not actually use, as component names.
pub fn vacuous_dependencies(s: &CfmpSpec) -> Result<Vec<(String, String)>> {
    s.require_valid()?;
    let space = s.space();
    let mut out = Vec::new();
    for (k, t) in s.tables().iter().enumerate() {
        for &j in t.depends_on() {
            if li_indices(s, j, k) {
                out.push((space.name(j).to_string(), space.name(k).to_string()));
            }
        }
    }
    Ok(out)
}

/// The same process with every table restricted to its genuine parents
/// (vacuous dependencies dropped).
pub fn reduce_to_parents(s: &CfmpSpec) -> Result<CfmpSpec> {
    let g = derive_graph(s)?;
    let space = s.space().clone();
    let mut tables = Vec::with_capacity(space.len());
    for (k, full) in s.tables().iter().enumerate() {
        let parents: Vec<usize> = full
            .depends_on()
            .iter()
            .copied()
            .filter(|&j| g.has_edge(j, k))
            .collect();
        let mut t = RateTable::new(&space, k, &parents)?;
        t.fill(|given, from, to| {
            // Dropped dependencies are irrelevant, so read them at state 0.
            let full_given: Vec<usize> = full
                .depends_on()
                .iter()
                .map(|d| parents.iter().position(|p| p == d).map_or(0, |i| given[i]))
                .collect();
            full.get(&full_given, from, to).expect("validated")
        });
        tables.push(t);
    }
    CfmpSpec::new(space, tables)
}

/// `A IR B | C` read as "the rates of `B` are constant in `y_A` given
/// `y_C`". Only covering, pairwise disjoint triples are evaluable.
pub struct LocalIndependenceOracle<'s> {
    spec: &'s CfmpSpec,
}

impl<'s> LocalIndependenceOracle<'s> {
    pub fn new(spec: &'s CfmpSpec) -> Result<Self> {
        spec.require_valid()?;
        Ok(LocalIndependenceOracle { spec })
    }
}

impl IrrelevanceOracle for LocalIndependenceOracle<'_> {
    fn ground(&self) -> NodeSet {
        NodeSet::full(self.spec.component_count())
    }

    fn label(&self, i: usize) -> String {
        self.spec.space().name(i).to_string()
    }

    fn irrelevant(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        set_locally_independent(self.spec, a, b, c).unwrap_or(false)
    }

    fn evaluable(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        covering(self.spec, b, a, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(rows: [f64; 2]) -> CfmpSpec {
        // x has no dependencies; y depends on x with the given 0 -> 1 rows.
        CfmpSpec::from_named_fn(&[("x", 2), ("y", 2)], &[("y", &["x"])], move |k, g, from, _| {
            if k == 1 && from == 0 {
                rows[g[0]]
            } else {
                0.8
            }
        })
        .unwrap()
    }

    #[test]
    fn no_dependency_is_independent() {
        let s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 2), ("z", 3)], &[], |_, _, _, _| 1.0).unwrap();
        for (k, j) in [("x", "y"), ("y", "x"), ("z", "x"), ("x", "z")] {
            assert!(is_locally_independent(&s, k, j).unwrap());
        }
        assert_eq!(derive_graph(&s).unwrap().edge_count(), 0);
    }

    #[test]
    fn genuine_and_vacuous_dependency() {
        let s = pair([0.5, 2.0]);
        assert!(!is_locally_independent(&s, "x", "y").unwrap());
        assert!(vacuous_dependencies(&s).unwrap().is_empty());

        let s = pair([0.5, 0.5 * (1.0 + 1e-12)]);
        assert!(is_locally_independent(&s, "x", "y").unwrap());
        assert_eq!(vacuous_dependencies(&s).unwrap(), vec![("x".to_string(), "y".to_string())]);
        assert_eq!(derive_graph(&s).unwrap().edge_count(), 0);
        let r = reduce_to_parents(&s).unwrap();
        assert!(r.table(1).depends_on().is_empty());
    }

    #[test]
    fn self_and_unknown_rejected() {
        let s = pair([0.5, 2.0]);
        assert!(is_locally_independent(&s, "x", "x").is_err());
        assert!(matches!(is_locally_independent(&s, "w", "x"), Err(Error::UnknownComponent(_))));
    }

    #[test]
    fn set_queries_require_covering() {
        let s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 2), ("z", 2)], &[], |_, _, _, _| 1.0).unwrap();
        let one = NodeSet::singleton;
        assert!(set_locally_independent(&s, NodeSet::EMPTY, one(0), one(1)).unwrap());
        assert_eq!(set_locally_independent(&s, one(1), one(0), NodeSet::EMPTY), Err(Error::NotCovering));
        assert_eq!(set_locally_independent(&s, one(1), one(0), one(1) | one(2)), Err(Error::NotCovering));
        assert!(set_locally_independent(&s, one(1), one(0), one(2)).unwrap());
    }
}
