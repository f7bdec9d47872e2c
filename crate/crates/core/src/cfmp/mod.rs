//! Composable finite Markov processes.
//!
//! A process is a product of components, each with its own finite state
//! space. Component `k` jumps at a rate that depends on its own state and on
//! the states of its declared dependencies `D_k`; two components never jump
//! together. Rates are homogeneous in time.

mod decay;
mod estimate;
mod generator;
mod independence;
mod simulate;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};

pub use decay::{
    ci_decay, uniform_distribution, CiDecayReport, DecayClass, CLASS_SLOPE_BOUNDARY, DEFAULT_HS, ZERO_CMI,
};
pub use estimate::{estimate_intensities, EstimateCell, IntensityEstimate};
pub use generator::{build_generator, transition_matrix, Generator};
pub use independence::{
    derive_graph, is_locally_independent, reduce_to_parents, set_locally_independent,
    vacuous_dependencies, LocalIndependenceOracle,
};
pub use simulate::{simulate, simulate_batch, Jump, Trajectory};

/// Largest product state space a generator will be built for.
pub const MAX_STATES: usize = 4096;

/// Relative tolerance for "the rate does not change" comparisons.
pub const CONSTANCY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub name: String,
    pub states: usize,
}

/// Ordered components and their state-space cardinalities. The product
/// state is encoded in mixed radix with the first component most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSpace {
    components: Vec<Component>,
}

impl ComponentSpace {
    pub fn new<S: Into<String>>(components: impl IntoIterator<Item = (S, usize)>) -> Self {
        ComponentSpace {
            components: components
                .into_iter()
                .map(|(name, states)| Component {
                    name: name.into(),
                    states,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn name(&self, k: usize) -> &str {
        &self.components[k].name
    }

    pub fn cardinality(&self, k: usize) -> usize {
        self.components[k].states
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.components
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownComponent(name.to_string()))
    }

    /// Size of the product state space, `None` on overflow.
    pub fn state_count(&self) -> Option<usize> {
        self.components
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(c.states))
    }

    pub fn encode(&self, state: &[usize]) -> usize {
        debug_assert_eq!(state.len(), self.len());
        state
            .iter()
            .zip(&self.components)
            .fold(0, |acc, (&y, c)| acc * c.states + y)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut state = vec![0; self.len()];
        for (k, c) in self.components.iter().enumerate().rev() {
            state[k] = index % c.states;
            index /= c.states;
        }
        state
    }

    /// Component `k` of the state with the given index.
    pub fn component_of(&self, index: usize, k: usize) -> usize {
        let below: usize = self.components[k + 1..].iter().map(|c| c.states).product();
        index / below % self.components[k].states
    }
}

/// Jump rates of one component, indexed by the states of its dependencies
/// (in declared order), its own current state and its target state.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    component: usize,
    depends_on: Vec<usize>,
    radix: Vec<usize>,
    own: usize,
    cells: Vec<Option<f64>>,
}

impl RateTable {
    pub fn new(space: &ComponentSpace, component: usize, depends_on: &[usize]) -> Result<Self> {
        if component >= space.len() {
            return Err(Error::UnknownComponent(format!("#{component}")));
        }
        for (i, &d) in depends_on.iter().enumerate() {
            if d >= space.len() {
                return Err(Error::UnknownComponent(format!("#{d}")));
            }
            if d == component {
                return Err(Error::InvalidArgument(format!(
                    "component `{}` cannot depend on itself",
                    space.name(d)
                )));
            }
            if depends_on[..i].contains(&d) {
                return Err(Error::InvalidArgument(format!(
                    "component `{}` lists dependency `{}` twice",
                    space.name(component),
                    space.name(d)
                )));
            }
        }
        let radix: Vec<usize> = depends_on.iter().map(|&d| space.cardinality(d)).collect();
        let own = space.cardinality(component);
        let configs: usize = radix.iter().product();
        Ok(RateTable {
            component,
            depends_on: depends_on.to_vec(),
            radix,
            own,
            cells: vec![None; configs * own * own],
        })
    }

    pub fn component(&self) -> usize {
        self.component
    }

    pub fn depends_on(&self) -> &[usize] {
        &self.depends_on
    }

    /// Number of dependency configurations.
    pub fn config_count(&self) -> usize {
        self.radix.iter().product()
    }

    pub fn config_index(&self, given: &[usize]) -> usize {
        given
            .iter()
            .zip(&self.radix)
            .fold(0, |acc, (&y, &r)| acc * r + y)
    }

    pub fn config(&self, mut index: usize) -> Vec<usize> {
        let mut given = vec![0; self.radix.len()];
        for (i, &r) in self.radix.iter().enumerate().rev() {
            given[i] = index % r;
            index /= r;
        }
        given
    }

    fn cell(&self, config: usize, from: usize, to: usize) -> usize {
        (config * self.own + from) * self.own + to
    }

    fn check_cell(&self, given: &[usize], from: usize, to: usize) -> Result<()> {
        if given.len() != self.radix.len() || given.iter().zip(&self.radix).any(|(&y, &r)| y >= r) {
            return Err(Error::InvalidArgument(format!(
                "configuration {given:?} does not match the dependency states {:?}",
                self.radix
            )));
        }
        if from >= self.own || to >= self.own || from == to {
            return Err(Error::InvalidArgument(format!(
                "transition {from} -> {to} is not a jump of a {}-state component",
                self.own
            )));
        }
        Ok(())
    }

    pub fn set(&mut self, given: &[usize], from: usize, to: usize, rate: f64) -> Result<()> {
        self.check_cell(given, from, to)?;
        let i = self.cell(self.config_index(given), from, to);
        self.cells[i] = Some(rate);
        Ok(())
    }

    pub fn get(&self, given: &[usize], from: usize, to: usize) -> Option<f64> {
        self.check_cell(given, from, to).ok()?;
        self.cells[self.cell(self.config_index(given), from, to)]
    }

    pub(crate) fn get_by_config(&self, config: usize, from: usize, to: usize) -> Option<f64> {
        self.cells[self.cell(config, from, to)]
    }

    /// Set every cell from `rate(given, from, to)`.
    pub fn fill(&mut self, mut rate: impl FnMut(&[usize], usize, usize) -> f64) {
        for config in 0..self.config_count() {
            let given = self.config(config);
            for from in 0..self.own {
                for to in (0..self.own).filter(|&t| t != from) {
                    let i = self.cell(config, from, to);
                    self.cells[i] = Some(rate(&given, from, to));
                }
            }
        }
    }

    /// Every cell in canonical order: configuration, then from, then to.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<usize>, usize, usize, Option<f64>)> + '_ {
        (0..self.config_count()).flat_map(move |config| {
            let given = self.config(config);
            (0..self.own).flat_map(move |from| {
                let given = given.clone();
                (0..self.own)
                    .filter(move |&to| to != from)
                    .map(move |to| (given.clone(), from, to, self.get_by_config(config, from, to)))
            })
        })
    }

    /// Configuration index of a full product state.
    pub(crate) fn config_of_state(&self, state: &[usize]) -> usize {
        self.depends_on
            .iter()
            .zip(&self.radix)
            .fold(0, |acc, (&d, &r)| acc * r + state[d])
    }

    /// Rate of jumping to `to` from the full product state `state`.
    pub fn rate_in_state(&self, state: &[usize], to: usize) -> Option<f64> {
        let from = state[self.component];
        if from == to {
            return None;
        }
        self.get_by_config(self.config_of_state(state), from, to)
    }
}

/// A composable finite Markov process: components plus one rate table per
/// component.
#[derive(Clone, Debug, PartialEq)]
pub struct CfmpSpec {
    space: ComponentSpace,
    tables: Vec<RateTable>,
}

impl CfmpSpec {
    pub fn new(space: ComponentSpace, tables: Vec<RateTable>) -> Result<Self> {
        if tables.len() != space.len() || tables.iter().enumerate().any(|(k, t)| t.component != k) {
            return Err(Error::InvalidArgument(
                "expected exactly one rate table per component, in component order".into(),
            ));
        }
        Ok(CfmpSpec { space, tables })
    }

    /// Build every table from `rate(component, given, from, to)`.
    pub fn from_fn(
        space: ComponentSpace,
        depends_on: &[Vec<usize>],
        mut rate: impl FnMut(usize, &[usize], usize, usize) -> f64,
    ) -> Result<Self> {
        if depends_on.len() != space.len() {
            return Err(Error::InvalidArgument(
                "expected one dependency list per component".into(),
            ));
        }
        let mut tables = Vec::with_capacity(space.len());
        for (k, deps) in depends_on.iter().enumerate() {
            let mut t = RateTable::new(&space, k, deps)?;
            t.fill(|given, from, to| rate(k, given, from, to));
            tables.push(t);
        }
        CfmpSpec::new(space, tables)
    }

    /// Like [`CfmpSpec::from_fn`] with dependencies given by name.
    pub fn from_named_fn(
        components: &[(&str, usize)],
        depends_on: &[(&str, &[&str])],
        rate: impl FnMut(usize, &[usize], usize, usize) -> f64,
    ) -> Result<Self> {
        let space = ComponentSpace::new(components.iter().map(|&(n, s)| (n, s)));
        let mut deps = vec![Vec::new(); space.len()];
        for (name, ds) in depends_on {
            let k = space.index_of(name)?;
            deps[k] = ds.iter().map(|d| space.index_of(d)).collect::<Result<_>>()?;
        }
        CfmpSpec::from_fn(space, &deps, rate)
    }

    pub fn space(&self) -> &ComponentSpace {
        &self.space
    }

    pub fn tables(&self) -> &[RateTable] {
        &self.tables
    }

    pub fn table(&self, k: usize) -> &RateTable {
        &self.tables[k]
    }

    pub fn table_mut(&mut self, k: usize) -> &mut RateTable {
        &mut self.tables[k]
    }

    pub fn component_count(&self) -> usize {
        self.space.len()
    }

    /// Resolve component names to a set of component indices.
    pub fn component_set<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<crate::NodeSet> {
        names
            .into_iter()
            .try_fold(crate::NodeSet::EMPTY, |acc, n| Ok(acc.with(self.space.index_of(n)?)))
    }

    pub fn names(&self, s: crate::NodeSet) -> Vec<String> {
        s.iter().map(|k| self.space.name(k).to_string()).collect()
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<SpecViolation>> {
        validate_spec(self)
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        self.validate().map_err(Error::InvalidSpec)
    }
}

/// One broken precondition of a [`CfmpSpec`].
#[derive(Clone, Debug, PartialEq, Error)]
pub enum SpecViolation {
    #[error("K ≥ 2 required, found {0} component(s)")]
    TooFewComponents(usize),

    #[error("component `{component}` has {states} state(s), at least 2 required")]
    TooFewStates { component: String, states: usize },

    #[error("invalid component name {0:?}: names must be nonempty and contain no whitespace")]
    InvalidName(String),

    #[error("duplicate component name `{0}`")]
    DuplicateName(String),

    #[error("product state space has {} states, the limit is {limit}", .states.map_or("too many".to_string(), |s| s.to_string()))]
    StateSpaceTooLarge { states: Option<usize>, limit: usize },

    #[error("missing rate for `{component}` {cell}")]
    MissingRate { component: String, cell: CellRef },

    #[error("rate {rate} for `{component}` {cell} must be finite and non-negative")]
    InvalidRate {
        component: String,
        cell: CellRef,
        rate: f64,
    },
}

/// Location of a rate-table cell, for messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRef {
    pub given: Vec<(String, usize)>,
    pub from: usize,
    pub to: usize,
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("given {")?;
        for (i, (name, y)) in self.given.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={y}")?;
        }
        write!(f, "}} from {} to {}", self.from, self.to)
    }
}

/// Every violated precondition of `s`, or `Ok` if there is none.
pub fn validate_spec(s: &CfmpSpec) -> std::result::Result<(), Vec<SpecViolation>> {
    let space = &s.space;
    let mut out = Vec::new();
    if space.len() < 2 {
        out.push(SpecViolation::TooFewComponents(space.len()));
    }
    for (i, c) in space.components.iter().enumerate() {
        if c.name.is_empty() || c.name.chars().any(char::is_whitespace) {
            out.push(SpecViolation::InvalidName(c.name.clone()));
        }
        if space.components[..i].iter().any(|p| p.name == c.name) {
            out.push(SpecViolation::DuplicateName(c.name.clone()));
        }
        if c.states < 2 {
            out.push(SpecViolation::TooFewStates {
                component: c.name.clone(),
                states: c.states,
            });
        }
    }
    match space.state_count() {
        Some(n) if n <= MAX_STATES => {}
        states => out.push(SpecViolation::StateSpaceTooLarge {
            states,
            limit: MAX_STATES,
        }),
    }
    for t in &s.tables {
        let component = space.name(t.component).to_string();
        for (given, from, to, rate) in t.cells() {
            let cell = || CellRef {
                given: t
                    .depends_on
                    .iter()
                    .zip(&given)
                    .map(|(&d, &y)| (space.name(d).to_string(), y))
                    .collect(),
                from,
                to,
            };
            match rate {
                None => out.push(SpecViolation::MissingRate {
                    component: component.clone(),
                    cell: cell(),
                }),
                Some(r) if !r.is_finite() || r < 0.0 => out.push(SpecViolation::InvalidRate {
                    component: component.clone(),
                    cell: cell(),
                    rate: r,
                }),
                Some(_) => {}
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_binary(rate: f64) -> CfmpSpec {
        CfmpSpec::from_named_fn(&[("x", 2), ("y", 2)], &[], |_, _, _, _| rate).unwrap()
    }

    #[test]
    fn minimal_spec_is_valid() {
        assert_eq!(two_binary(1.0).validate(), Ok(()));
    }

    #[test]
    fn single_component_rejected() {
        let s = CfmpSpec::from_named_fn(&[("x", 2)], &[], |_, _, _, _| 1.0).unwrap();
        let v = s.validate().unwrap_err();
        assert_eq!(v, vec![SpecViolation::TooFewComponents(1)]);
        assert_eq!(v[0].to_string(), "K ≥ 2 required, found 1 component(s)");
    }

    #[test]
    fn negative_rate_names_the_cell() {
        let mut s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 2)], &[("x", &["y"])], |_, _, _, _| 1.0)
            .unwrap();
        s.table_mut(0).set(&[1], 0, 1, -0.5).unwrap();
        let v = s.validate().unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "rate -0.5 for `x` given {y=1} from 0 to 1 must be finite and non-negative");
    }

    #[test]
    fn all_violations_listed() {
        let space = ComponentSpace::new([("x", 1), ("x", 3)]);
        let tables = vec![
            RateTable::new(&space, 0, &[]).unwrap(),
            RateTable::new(&space, 1, &[]).unwrap(),
        ];
        let s = CfmpSpec::new(space, tables).unwrap();
        let v = s.validate().unwrap_err();
        assert!(v.contains(&SpecViolation::DuplicateName("x".into())));
        assert!(v.contains(&SpecViolation::TooFewStates { component: "x".into(), states: 1 }));
        // 3 * 2 missing cells of the 3-state component
        let missing = v.iter().filter(|e| matches!(e, SpecViolation::MissingRate { .. })).count();
        assert_eq!(missing, 6);
    }

    #[test]
    fn state_space_guard() {
        let comps: Vec<(String, usize)> = (0..13).map(|i| (format!("c{i}"), 2)).collect();
        let space = ComponentSpace::new(comps);
        let deps = vec![Vec::new(); 13];
        let s = CfmpSpec::from_fn(space, &deps, |_, _, _, _| 1.0).unwrap();
        assert_eq!(
            s.validate().unwrap_err(),
            vec![SpecViolation::StateSpaceTooLarge { states: Some(8192), limit: MAX_STATES }]
        );
    }

    #[test]
    fn table_construction_errors() {
        let space = ComponentSpace::new([("x", 2), ("y", 2)]);
        assert!(RateTable::new(&space, 0, &[0]).is_err());
        assert!(RateTable::new(&space, 0, &[1, 1]).is_err());
        assert!(RateTable::new(&space, 0, &[7]).is_err());
        let mut t = RateTable::new(&space, 0, &[1]).unwrap();
        assert!(t.set(&[2], 0, 1, 1.0).is_err());
        assert!(t.set(&[0], 1, 1, 1.0).is_err());
    }

    #[test]
    fn encode_decode() {
        let space = ComponentSpace::new([("x", 2), ("y", 3), ("z", 2)]);
        for i in 0..12 {
            let s = space.decode(i);
            assert_eq!(space.encode(&s), i);
            for k in 0..3 {
                assert_eq!(space.component_of(i, k), s[k]);
            }
        }
        assert_eq!(space.decode(1), vec![0, 0, 1]);
    }
}
