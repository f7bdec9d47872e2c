//! Small reference graphs and processes used by tests, examples and the
//! command line.
//!
//! The process rates are deliberately asymmetric so that no dependence
//! cancels by accident.

use crate::cfmp::CfmpSpec;
use crate::digraph::DiGraph;

/// Three-cycle `a -> b -> c -> a`.
pub fn cycle_graph() -> DiGraph {
    DiGraph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).expect("valid graph")
}

/// Health, doctor visits, hospitalization and survival: visits and
/// hospitalizations drive each other, health drives hospitalization and
/// survival, hospitalization drives survival.
pub fn health_graph() -> DiGraph {
    DiGraph::new(
        &["health", "visits", "hosp", "survival"],
        &[
            ("health", "hosp"),
            ("health", "survival"),
            ("visits", "hosp"),
            ("hosp", "visits"),
            ("hosp", "survival"),
        ],
    )
    .expect("valid graph")
}

/// Binary `(0 -> 1, 1 -> 0)` rates for each dependency configuration.
fn binary(rates: &[(f64, f64)]) -> impl Fn(&[usize], usize) -> f64 + '_ {
    move |given, from| {
        let config = given.iter().fold(0, |acc, &y| acc * 2 + y);
        let (up, down) = rates[config];
        if from == 0 {
            up
        } else {
            down
        }
    }
}

/// Binary process wired as the three-cycle: `a` depends on `c`, `b` on
/// `a`, `c` on `b`.
pub fn cycle_spec() -> CfmpSpec {
    let a = [(0.6, 1.1), (1.9, 0.3)];
    let b = [(0.5, 1.4), (2.2, 0.7)];
    let c = [(0.8, 1.6), (1.7, 0.45)];
    let tables = [binary(&a), binary(&b), binary(&c)];
    CfmpSpec::from_named_fn(
        &[("a", 2), ("b", 2), ("c", 2)],
        &[("a", &["c"]), ("b", &["a"]), ("c", &["b"])],
        |k, given, from, _| tables[k](given, from),
    )
    .expect("valid spec")
}

/// Binary process wired as [`health_graph`].
pub fn health_spec() -> CfmpSpec {
    let health = [(0.3, 0.5)];
    let visits = [(0.4, 1.2), (2.0, 0.6)];
    // Configurations (visits, health) and (health, hosp) in mixed radix.
    let hosp = [(0.5, 1.0), (1.5, 0.6), (0.2, 1.3), (0.8, 0.9)];
    let survival = [(0.1, 0.9), (0.5, 0.3), (0.4, 0.5), (1.1, 0.2)];
    let tables = [binary(&health), binary(&visits), binary(&hosp), binary(&survival)];
    CfmpSpec::from_named_fn(
        &[("health", 2), ("visits", 2), ("hosp", 2), ("survival", 2)],
        &[
            ("visits", &["hosp"]),
            ("hosp", &["visits", "health"]),
            ("survival", &["health", "hosp"]),
        ],
        |k, given, from, _| tables[k](given, from),
    )
    .expect("valid spec")
}

/// Three components, one with three states, none depending on another.
pub fn independent_spec() -> CfmpSpec {
    // Rates indexed by [from][to].
    let x = [[0.0, 0.5], [0.65, 0.0]];
    let y = [[0.0, 1.0, 1.15], [1.2, 0.0, 1.45], [0.9, 1.6, 0.0]];
    let z = [[0.0, 1.5], [1.65, 0.0]];
    CfmpSpec::from_named_fn(&[("x", 2), ("y", 3), ("z", 2)], &[], |k, _, from, to| match k {
        0 => x[from][to],
        1 => y[from][to],
        _ => z[from][to],
    })
    .expect("valid spec")
}

/// [`cycle_spec`] with an extra declared dependency of `a` on `b` whose
/// table rows coincide, so it is vacuous.
pub fn vacuous_spec() -> CfmpSpec {
    let base = cycle_spec();
    CfmpSpec::from_named_fn(
        &[("a", 2), ("b", 2), ("c", 2)],
        &[("a", &["c", "b"]), ("b", &["a"]), ("c", &["b"])],
        |k, given, from, to| {
            let given = if k == 0 { &given[..1] } else { given };
            base.table(k).get(given, from, to).expect("complete table")
        },
    )
    .expect("valid spec")
}
