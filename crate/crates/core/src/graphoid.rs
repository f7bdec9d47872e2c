//! Executable asymmetric (semi)graphoid properties.
//!
//! An [`IrrelevanceOracle`] answers "A is irrelevant for B given C" over the
//! subsets of a small ground set. Every property is checked by exhaustive
//! enumeration over the power-set lattice (join = union, meet = intersection,
//! order = inclusion). The oracle is first materialized into a truth table,
//! so each property costs table lookups only.
//!
//! Instances are enumerated with `A`, then `B`, then `C`, then `D` varying
//! slowest to fastest, each over subsets ordered by size and then by sorted
//! labels. The reported counterexample is the first violation in that order,
//! whatever the number of worker threads.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::digraph::{DiGraph, NodeSet, UGraph};
use crate::error::{Error, Result};
use crate::separation::delta_separates;

/// Largest ground set the axiom checks will enumerate.
pub const MAX_GROUND: usize = 5;

/// A ternary irrelevance relation over subsets of a finite ground set.
pub trait IrrelevanceOracle: Sync {
    fn ground(&self) -> NodeSet;

    /// Display label of ground element `i`; also fixes enumeration order.
    fn label(&self, i: usize) -> String;

    /// "`a` is irrelevant for `b` given `c`".
    fn irrelevant(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool;

    /// Whether the oracle can answer this triple. Instances touching an
    /// unevaluable triple are skipped.
    fn evaluable(&self, _a: NodeSet, _b: NodeSet, _c: NodeSet) -> bool {
        true
    }
}

/// Delta-separation on a fixed graph: `A IR B | C` iff `C` delta-separates
/// `A` from `B`.
pub struct DeltaSeparationOracle<'g>(pub &'g DiGraph);

impl IrrelevanceOracle for DeltaSeparationOracle<'_> {
    fn ground(&self) -> NodeSet {
        self.0.vertices()
    }

    fn label(&self, i: usize) -> String {
        self.0.label(i).to_string()
    }

    fn irrelevant(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        delta_separates(self.0, &crate::SeparationQuery::new(a, b, c))
            .expect("enumerated sets lie inside the ground set")
    }
}

/// Ordinary undirected separation, `A ⊥u B | C`.
pub struct UndirectedSeparationOracle<'g>(pub &'g UGraph);

impl IrrelevanceOracle for UndirectedSeparationOracle<'_> {
    fn ground(&self) -> NodeSet {
        self.0.vertices()
    }

    fn label(&self, i: usize) -> String {
        self.0.label(i).to_string()
    }

    fn irrelevant(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        self.0
            .separated(a, b, c)
            .expect("enumerated sets lie inside the ground set")
    }
}

/// The relation that holds for every triple.
pub struct ConstantOracle {
    pub labels: Vec<String>,
    pub value: bool,
}

impl IrrelevanceOracle for ConstantOracle {
    fn ground(&self) -> NodeSet {
        NodeSet::full(self.labels.len())
    }

    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn irrelevant(&self, _: NodeSet, _: NodeSet, _: NodeSet) -> bool {
        self.value
    }
}

/// An explicitly tabulated relation over `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableOracle {
    labels: Vec<String>,
    truth: Vec<bool>,
}

impl TableOracle {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        guard(labels.len())?;
        let n = labels.len();
        Ok(TableOracle {
            labels,
            truth: vec![false; 1 << (3 * n)],
        })
    }

    /// Tabulate any oracle whose ground set is `{0, .., n-1}`.
    pub fn from_oracle(o: &dyn IrrelevanceOracle) -> Result<Self> {
        let n = o.ground().len();
        if o.ground() != NodeSet::full(n) {
            return Err(Error::InvalidArgument(
                "table oracles need a ground set of the form {0, .., n-1}".into(),
            ));
        }
        let mut t = TableOracle::new((0..n).map(|i| o.label(i)).collect())?;
        for idx in 0..t.truth.len() {
            let (a, b, c) = t.unpack(idx);
            t.truth[idx] = o.irrelevant(a, b, c);
        }
        Ok(t)
    }

    fn n(&self) -> usize {
        self.labels.len()
    }

    fn index(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> usize {
        let n = self.n();
        a.bits() as usize | (b.bits() as usize) << n | (c.bits() as usize) << (2 * n)
    }

    fn unpack(&self, idx: usize) -> (NodeSet, NodeSet, NodeSet) {
        let n = self.n();
        let m = (1usize << n) - 1;
        let f = |x: usize| NodeSet::from_bits((x & m) as u64);
        (f(idx), f(idx >> n), f(idx >> (2 * n)))
    }

    pub fn get(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        self.truth[self.index(a, b, c)]
    }

    pub fn set(&mut self, a: NodeSet, b: NodeSet, c: NodeSet, value: bool) {
        let idx = self.index(a, b, c);
        self.truth[idx] = value;
    }

    /// Every triple, as `(a, b, c, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (NodeSet, NodeSet, NodeSet, bool)> + '_ {
        (0..self.truth.len()).map(|idx| {
            let (a, b, c) = self.unpack(idx);
            (a, b, c, self.truth[idx])
        })
    }
}

impl IrrelevanceOracle for TableOracle {
    fn ground(&self) -> NodeSet {
        NodeSet::full(self.n())
    }

    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn irrelevant(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        self.get(a, b, c)
    }
}

/// The ten asymmetric semi-graphoid and graphoid properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    LeftRedundancy,
    RightRedundancy,
    LeftDecomposition,
    RightDecomposition,
    LeftWeakUnion,
    RightWeakUnion,
    LeftContraction,
    RightContraction,
    LeftIntersection,
    RightIntersection,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::LeftRedundancy,
        Axiom::RightRedundancy,
        Axiom::LeftDecomposition,
        Axiom::RightDecomposition,
        Axiom::LeftWeakUnion,
        Axiom::RightWeakUnion,
        Axiom::LeftContraction,
        Axiom::RightContraction,
        Axiom::LeftIntersection,
        Axiom::RightIntersection,
    ];
}

/// Properties derived from the axioms, plus the special right-decomposition
/// results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Derived {
    /// `A IR B | C ⇔ A \ C IR B | C`.
    Eq5,
    /// `A IR B | C ⇔ A IR B \ C | C`.
    Eq6,
    /// Disjoint sets: `A IR B | C∪D ∧ C IR B | A∪D ⇒ A∪C IR B | D`.
    Eq7,
    /// Disjoint sets: `A IR B | C∪D ∧ A IR C | B∪D ⇒ A IR B∪C | D`.
    Eq8,
    /// `A IR B | C, D ⊆ B ⇒ A IR D | (C ∪ B) \ D`, stated for local
    /// independence.
    Lemma4_5,
    /// The same implication, stated for delta-separation.
    Lemma4_11,
    /// [`Derived::Eq8`] for delta-separation on pairwise disjoint sets.
    Prop4_12,
    /// Right decomposition under the side conditions that make it valid for
    /// delta-separation.
    Prop4_13,
}

impl Derived {
    pub const ALL: [Derived; 8] = [
        Derived::Eq5,
        Derived::Eq6,
        Derived::Eq7,
        Derived::Eq8,
        Derived::Lemma4_5,
        Derived::Lemma4_11,
        Derived::Prop4_12,
        Derived::Prop4_13,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum Property {
    Axiom(Axiom),
    Derived(Derived),
    /// [`Derived::Eq8`] with `A` allowed to meet `B` and `C`.
    AlternativeIntersectionOverlap,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Axiom(a) => write!(f, "{a:?}"),
            Property::Derived(d) => write!(f, "{d:?}"),
            Property::AlternativeIntersectionOverlap => f.write_str("AlternativeIntersectionOverlap"),
        }
    }
}

impl From<Axiom> for Property {
    fn from(a: Axiom) -> Self {
        Property::Axiom(a)
    }
}

impl From<Derived> for Property {
    fn from(d: Derived) -> Self {
        Property::Derived(d)
    }
}

/// The quantified sets of one instance, in the oracle's indexing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instance {
    pub a: NodeSet,
    pub b: NodeSet,
    pub c: NodeSet,
    pub d: Option<NodeSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub property: Property,
    pub holds: bool,
    pub counterexample: Option<Instance>,
    pub instances_checked: u64,
}

impl CheckReport {
    pub fn to_json(&self, o: &dyn IrrelevanceOracle) -> Value {
        let names = |s: NodeSet| -> Vec<String> { sorted_labels(o, s) };
        let counterexample = self.counterexample.map(|i| {
            json!({
                "a": names(i.a),
                "b": names(i.b),
                "c": names(i.c),
                "d": i.d.map(names),
            })
        });
        json!({
            "property": self.property.to_string(),
            "holds": self.holds,
            "counterexample": counterexample,
            "instances_checked": self.instances_checked,
        })
    }
}

fn sorted_labels(o: &dyn IrrelevanceOracle, s: NodeSet) -> Vec<String> {
    let mut v: Vec<String> = s.iter().map(|i| o.label(i)).collect();
    v.sort();
    v
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_GROUND {
        return Err(Error::TooLarge {
            what: "ground set",
            actual: n,
            limit: MAX_GROUND,
        });
    }
    Ok(())
}

/// Lookup of the relation on local masks; `None` if not evaluable.
trait Rel {
    fn ir(&self, a: u64, b: u64, c: u64) -> Option<bool>;
}

/// The oracle materialized over local masks `0..2^n`, together with the
/// enumeration order and the map back to oracle node sets.
struct Lattice {
    n: usize,
    // 0 = false, 1 = true, 2 = not evaluable
    table: Vec<u8>,
    order: Vec<u64>,
    // submasks[m] = subsets of m, in enumeration order
    submasks: Vec<Vec<u64>>,
    expand: Vec<NodeSet>,
}

fn expansion(members: &[usize]) -> Vec<NodeSet> {
    (0..1usize << members.len())
        .map(|m| {
            members
                .iter()
                .enumerate()
                .filter(|(p, _)| m >> p & 1 == 1)
                .map(|(_, &i)| i)
                .collect()
        })
        .collect()
}

impl Lattice {
    fn build(o: &dyn IrrelevanceOracle) -> Result<Self> {
        let ground = o.ground();
        let n = ground.len();
        guard(n)?;
        // positions sorted by label so local bit order follows label order
        let size = 1usize << n;
        let expand = expansion(&sorted_members(o));

        let table: Vec<u8> = (0..size * size * size)
            .into_par_iter()
            .map(|idx| {
                let (a, b, c) = (idx % size, idx / size % size, idx / (size * size));
                let (a, b, c) = (expand[a], expand[b], expand[c]);
                if !o.evaluable(a, b, c) {
                    2
                } else {
                    u8::from(o.irrelevant(a, b, c))
                }
            })
            .collect();

        // local masks are label-sorted bit positions, so lexicographic order
        // on sorted labels is lexicographic order on increasing bit positions
        let mut order: Vec<u64> = (0..size as u64).collect();
        order.sort_by_key(|&m| {
            let positions: Vec<u32> = (0..n as u32).filter(|p| m >> p & 1 == 1).collect();
            (m.count_ones(), positions)
        });
        let submasks = (0..size as u64)
            .map(|m| order.iter().copied().filter(|d| d & !m == 0).collect())
            .collect();

        Ok(Lattice {
            n,
            table,
            order,
            submasks,
            expand,
        })
    }

    fn instance(&self, a: u64, b: u64, c: u64, d: Option<u64>) -> Instance {
        Instance {
            a: self.expand[a as usize],
            b: self.expand[b as usize],
            c: self.expand[c as usize],
            d: d.map(|d| self.expand[d as usize]),
        }
    }
}

impl Rel for Lattice {
    fn ir(&self, a: u64, b: u64, c: u64) -> Option<bool> {
        let size = 1usize << self.n;
        match self.table[a as usize + size * (b as usize + size * c as usize)] {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        }
    }
}

/// Ground members sorted by label; local bit `p` is the `p`-th of these.
fn sorted_members(o: &dyn IrrelevanceOracle) -> Vec<usize> {
    let mut members: Vec<(String, usize)> = o.ground().iter().map(|i| (o.label(i), i)).collect();
    members.sort();
    members.into_iter().map(|(_, i)| i).collect()
}

/// Which sets a property quantifies over beyond `A` and `B`.
#[derive(Clone, Copy)]
enum Shape {
    /// `A`, `B` only; `C` is fixed by the rule.
    Pair,
    /// `A`, `B`, `C`.
    Triple,
    /// `A`, `B`, `C` and `D ⊆ A`.
    DInA,
    /// `A`, `B`, `C` and `D ⊆ B`.
    DInB,
    /// `A`, `B`, `C` and any `D`.
    Quad,
}

/// Outcome of one instance: `None` if skipped (side condition unmet or
/// unevaluable), `Some(true)` if violated.
type Rule = fn(&dyn Rel, u64, u64, u64, u64) -> Option<bool>;

fn implies(premise: Option<bool>, conclusion: impl FnOnce() -> Option<bool>) -> Option<bool> {
    if !premise? {
        // the conclusion still has to be evaluable for the instance to count
        conclusion()?;
        return Some(false);
    }
    Some(!conclusion()?)
}

fn both(x: Option<bool>, y: Option<bool>) -> Option<bool> {
    Some(x? && y?)
}

fn disjoint4(a: u64, b: u64, c: u64, d: u64) -> bool {
    a & b == 0 && a & c == 0 && a & d == 0 && b & c == 0 && b & d == 0 && c & d == 0
}

fn rule_for(p: Property) -> (Shape, Rule) {
    use Axiom::*;
    match p {
        Property::Axiom(LeftRedundancy) => (Shape::Pair, |l, a, b, _, _| Some(!l.ir(a, b, a)?)),
        Property::Axiom(RightRedundancy) => (Shape::Pair, |l, a, b, _, _| Some(!l.ir(a, b, b)?)),
        Property::Axiom(LeftDecomposition) => (Shape::DInA, |l, a, b, c, d| {
            implies(l.ir(a, b, c), || l.ir(d, b, c))
        }),
        Property::Axiom(RightDecomposition) => (Shape::DInB, |l, a, b, c, d| {
            implies(l.ir(a, b, c), || l.ir(a, d, c))
        }),
        Property::Axiom(LeftWeakUnion) => (Shape::DInA, |l, a, b, c, d| {
            implies(l.ir(a, b, c), || l.ir(a, b, c | d))
        }),
        Property::Axiom(RightWeakUnion) => (Shape::DInB, |l, a, b, c, d| {
            implies(l.ir(a, b, c), || l.ir(a, b, c | d))
        }),
        Property::Axiom(LeftContraction) => (Shape::Quad, |l, a, b, c, d| {
            implies(both(l.ir(a, b, c), l.ir(d, b, a | c)), || l.ir(a | d, b, c))
        }),
        Property::Axiom(RightContraction) => (Shape::Quad, |l, a, b, c, d| {
            implies(both(l.ir(a, b, c), l.ir(a, d, b | c)), || l.ir(a, b | d, c))
        }),
        Property::Axiom(LeftIntersection) => (Shape::Triple, |l, a, b, c, _| {
            implies(both(l.ir(a, b, c), l.ir(c, b, a)), || l.ir(a | c, b, a & c))
        }),
        Property::Axiom(RightIntersection) => (Shape::Triple, |l, a, b, c, _| {
            implies(both(l.ir(a, b, c), l.ir(a, c, b)), || l.ir(a, b | c, b & c))
        }),
        Property::Derived(Derived::Eq5) => (Shape::Triple, |l, a, b, c, _| {
            Some(l.ir(a, b, c)? != l.ir(a & !c, b, c)?)
        }),
        Property::Derived(Derived::Eq6) => (Shape::Triple, |l, a, b, c, _| {
            Some(l.ir(a, b, c)? != l.ir(a, b & !c, c)?)
        }),
        Property::Derived(Derived::Eq7) => (Shape::Quad, |l, a, b, c, d| {
            if !disjoint4(a, b, c, d) {
                return None;
            }
            implies(both(l.ir(a, b, c | d), l.ir(c, b, a | d)), || l.ir(a | c, b, d))
        }),
        Property::Derived(Derived::Eq8 | Derived::Prop4_12) => (Shape::Quad, |l, a, b, c, d| {
            if !disjoint4(a, b, c, d) {
                return None;
            }
            alternative_intersection(l, a, b, c, d)
        }),
        Property::Derived(Derived::Lemma4_5 | Derived::Lemma4_11) => {
            (Shape::DInB, |l, a, b, c, d| {
                implies(l.ir(a, b, c), || l.ir(a, d, (c | b) & !d))
            })
        }
        Property::Derived(Derived::Prop4_13) => (Shape::DInB, prop_4_13),
        Property::AlternativeIntersectionOverlap => (Shape::Quad, |l, a, b, c, d| {
            if b & c != 0 || b & d != 0 || c & d != 0 || a & d != 0 {
                return None;
            }
            alternative_intersection(l, a, b, c, d)
        }),
    }
}

fn alternative_intersection(l: &dyn Rel, a: u64, b: u64, c: u64, d: u64) -> Option<bool> {
    implies(both(l.ir(a, b, c | d), l.ir(a, c, b | d)), || l.ir(a, b | c, d))
}

fn prop_4_13(l: &dyn Rel, a: u64, b: u64, c: u64, d: u64) -> Option<bool> {
    if (a & b) & !(c | d) != 0 {
        return None;
    }
    let cond_i = l.ir(b, d, a | c)?;
    let cond_ii = || -> Option<bool> {
        if !l.ir(b, a & !(c | d), c | d)? {
            return Some(false);
        }
        let mut rest = c & !d;
        while rest != 0 {
            let k = rest & rest.wrapping_neg();
            rest &= rest - 1;
            let others = c & !k;
            if !(l.ir(a, k, others | b)? || l.ir(b, k, others | d | a)?) {
                return Some(false);
            }
        }
        Some(true)
    };
    let side = cond_i || cond_ii()?;
    implies(both(l.ir(a, b, c), Some(side)), || l.ir(a, d, c))
}

fn run(l: &Lattice, p: Property) -> CheckReport {
    let (shape, rule) = rule_for(p);
    let order = &l.order;

    // A's are scanned in parallel, each sequentially; the earliest A with a
    // violation wins
    let per_a: Vec<(u64, Option<Instance>)> = order
        .par_iter()
        .map(|&a| {
            let mut count = 0u64;
            for &b in order {
                let c_values: &[u64] = match shape {
                    Shape::Pair => &[0],
                    _ => order,
                };
                let d_values: &[u64] = match shape {
                    Shape::Pair | Shape::Triple => &[0],
                    Shape::DInA => &l.submasks[a as usize],
                    Shape::DInB => &l.submasks[b as usize],
                    Shape::Quad => order,
                };
                for &c in c_values {
                    for &d in d_values {
                        let Some(violated) = rule(l, a, b, c, d) else {
                            continue;
                        };
                        count += 1;
                        if violated {
                            let (c, d) = match shape {
                                Shape::Pair if p == Property::Axiom(Axiom::LeftRedundancy) => (a, None),
                                Shape::Pair => (b, None),
                                Shape::Triple => (c, None),
                                _ => (c, Some(d)),
                            };
                            return (count, Some(l.instance(a, b, c, d)));
                        }
                    }
                }
            }
            (count, None)
        })
        .collect();

    let mut checked = 0;
    for (count, found) in per_a {
        checked += count;
        if let Some(inst) = found {
            return CheckReport {
                property: p,
                holds: false,
                counterexample: Some(inst),
                instances_checked: checked,
            };
        }
    }
    CheckReport {
        property: p,
        holds: true,
        counterexample: None,
        instances_checked: checked,
    }
}

/// Check one axiom exhaustively.
pub fn check_axiom(o: &dyn IrrelevanceOracle, ax: Axiom) -> Result<CheckReport> {
    Ok(run(&Lattice::build(o)?, ax.into()))
}

/// Check one derived property exhaustively, enforcing its side conditions.
pub fn check_derived(o: &dyn IrrelevanceOracle, p: Derived) -> Result<CheckReport> {
    Ok(run(&Lattice::build(o)?, p.into()))
}

/// Check any property, including [`Property::AlternativeIntersectionOverlap`].
pub fn check_property(o: &dyn IrrelevanceOracle, p: Property) -> Result<CheckReport> {
    Ok(run(&Lattice::build(o)?, p))
}

/// Check several properties against one materialization of the oracle.
pub fn check_properties(o: &dyn IrrelevanceOracle, ps: &[Property]) -> Result<Vec<CheckReport>> {
    let l = Lattice::build(o)?;
    Ok(ps.iter().map(|&p| run(&l, p)).collect())
}

/// Whether `inst` violates `p` for oracle `o`: the premise holds and the
/// conclusion does not. Returns `None` if the instance is outside the
/// property's side conditions or touches an unevaluable triple.
pub fn violates(o: &dyn IrrelevanceOracle, p: Property, inst: &Instance) -> Option<bool> {
    let members = sorted_members(o);
    let compress = |s: NodeSet| -> u64 {
        members
            .iter()
            .enumerate()
            .filter(|(_, &i)| s.contains(i))
            .fold(0u64, |acc, (p, _)| acc | 1 << p)
    };
    let direct = Direct {
        o,
        expand: expansion(&members),
    };
    let d = inst.d.map(compress).unwrap_or(0);
    let (_, rule) = rule_for(p);
    rule(&direct, compress(inst.a), compress(inst.b), compress(inst.c), d)
}

// Queries the oracle on demand, bypassing the materialized table.
struct Direct<'a> {
    o: &'a dyn IrrelevanceOracle,
    expand: Vec<NodeSet>,
}

impl Rel for Direct<'_> {
    fn ir(&self, a: u64, b: u64, c: u64) -> Option<bool> {
        let (a, b, c) = (
            self.expand[a as usize],
            self.expand[b as usize],
            self.expand[c as usize],
        );
        self.o.evaluable(a, b, c).then(|| self.o.irrelevant(a, b, c))
    }
}

/// Expected outcome per axiom; axioms not listed are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Profile(pub BTreeMap<Axiom, bool>);

impl Profile {
    /// The nine properties delta-separation always satisfies.
    pub fn delta_separation() -> Self {
        use Axiom::*;
        Profile(
            [
                LeftRedundancy,
                LeftDecomposition,
                LeftWeakUnion,
                RightWeakUnion,
                LeftContraction,
                RightContraction,
                LeftIntersection,
                RightIntersection,
            ]
            .into_iter()
            .map(|a| (a, true))
            .collect(),
        )
    }

    /// The properties local independence always satisfies.
    pub fn local_independence() -> Self {
        use Axiom::*;
        Profile(
            [
                LeftRedundancy,
                LeftDecomposition,
                LeftWeakUnion,
                RightWeakUnion,
                LeftContraction,
                RightIntersection,
            ]
            .into_iter()
            .map(|a| (a, true))
            .collect(),
        )
    }

    /// Every axiom expected to hold.
    pub fn graphoid() -> Self {
        Profile(Axiom::ALL.into_iter().map(|a| (a, true)).collect())
    }
}

#[derive(Clone, Debug)]
pub struct ProfileReport {
    pub reports: Vec<CheckReport>,
    /// Axioms whose observed outcome differs from the expectation.
    pub mismatches: Vec<Axiom>,
}

impl ProfileReport {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn report(&self, ax: Axiom) -> &CheckReport {
        self.reports
            .iter()
            .find(|r| r.property == Property::Axiom(ax))
            .expect("profile covers all ten axioms")
    }
}

/// Run all ten axioms and compare the outcome with `expected`.
pub fn check_semigraphoid_profile(
    o: &dyn IrrelevanceOracle,
    expected: &Profile,
) -> Result<ProfileReport> {
    let props: Vec<Property> = Axiom::ALL.iter().map(|&a| a.into()).collect();
    let reports = check_properties(o, &props)?;
    let mismatches = reports
        .iter()
        .filter_map(|r| match r.property {
            Property::Axiom(ax) => match expected.0.get(&ax) {
                Some(&want) if want != r.holds => Some(ax),
                _ => None,
            },
            _ => None,
        })
        .collect();
    Ok(ProfileReport {
        reports,
        mismatches,
    })
}

/// A graph and sets on which right decomposition fails for delta-separation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightDecompositionWitness {
    pub graph: DiGraph,
    pub a: NodeSet,
    pub b: NodeSet,
    pub c: NodeSet,
    pub d: NodeSet,
}

/// Search every digraph on `ground_size` nodes (labelled `a`, `b`, ...) for
/// pairwise disjoint `A`, `B`, `C` with `A`, `B` nonempty and some `D ⊆ B`
/// such that `C` delta-separates `A` from `B` but not `A` from `D`.
///
/// Graphs are visited in edge-mask order, sets in size-then-label order;
/// the first hit is returned.
pub fn find_right_decomposition_counterexample(
    ground_size: usize,
) -> Result<Option<RightDecompositionWitness>> {
    const LIMIT: usize = 4;
    if ground_size > LIMIT {
        return Err(Error::TooLarge {
            what: "ground set for graph search",
            actual: ground_size,
            limit: LIMIT,
        });
    }
    let labels: Vec<String> = (0..ground_size)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    for g in crate::digraph::all_digraphs(&labels)? {
        if let Some(w) = right_decomposition_failure(&g) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// First disjoint right-decomposition failure of delta-separation in `g`.
pub fn right_decomposition_failure(g: &DiGraph) -> Option<RightDecompositionWitness> {
    let sep = |a, b, c| {
        delta_separates(g, &crate::SeparationQuery::new(a, b, c))
            .expect("sets are drawn from the vertex set")
    };
    let subsets = crate::separation::ordered_subsets(g, g.vertices());
    for &a in subsets.iter().filter(|s| !s.is_empty()) {
        for &b in subsets.iter().filter(|s| !s.is_empty() && s.is_disjoint(a)) {
            for &c in subsets.iter().filter(|s| s.is_disjoint(a | b)) {
                if !sep(a, b, c) {
                    continue;
                }
                for &d in subsets.iter().filter(|s| s.is_subset(b)) {
                    if !sep(a, d, c) {
                        return Some(RightDecompositionWitness {
                            graph: g.clone(),
                            a,
                            b,
                            c,
                            d,
                        });
                    }
                }
            }
        }
    }
    None
}
