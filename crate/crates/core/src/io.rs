//! JSON formats for graphs, process specifications and trajectories.
//!
//! Writers are canonical: parsing a file they produced and writing it
//! again gives the same bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cfmp::{CfmpSpec, ComponentSpace, Jump, RateTable, Trajectory};
use crate::digraph::DiGraph;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

/// `{"nodes": [...], "edges": [[from, to], ...]}`
pub fn parse_graph(text: &str) -> Result<DiGraph> {
    let f: GraphFile = serde_json::from_str(text)?;
    DiGraph::new(&f.nodes, &f.edges)
}

pub fn write_graph(g: &DiGraph) -> String {
    let f = GraphFile {
        nodes: g.names(g.vertices()),
        edges: g
            .edges()
            .into_iter()
            .map(|(j, k)| (g.label(j).to_string(), g.label(k).to_string()))
            .collect(),
    };
    pretty(&f)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    components: Vec<ComponentEntry>,
    intensities: BTreeMap<String, IntensityEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentEntry {
    name: String,
    states: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntensityEntry {
    depends_on: Vec<String>,
    table: Vec<CellEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellEntry {
    given: BTreeMap<String, usize>,
    from: usize,
    to: usize,
    rate: f64,
}

/// Parse a process specification. Structural problems (unknown names,
/// incomplete `given`, out-of-range states, duplicate cells) are format
/// errors; missing cells and bad rates are left for validation to report.
pub fn parse_cfmp(text: &str) -> Result<CfmpSpec> {
    let f: SpecFile = serde_json::from_str(text)?;
    let space = ComponentSpace::new(f.components.iter().map(|c| (c.name.clone(), c.states)));
    let index = |name: &str| {
        space
            .index_of(name)
            .map_err(|_| Error::Format(format!("unknown component `{name}`")))
    };
    for name in f.intensities.keys() {
        index(name)?;
    }
    let mut tables = Vec::with_capacity(space.len());
    for k in 0..space.len() {
        let name = space.name(k);
        let Some(entry) = f.intensities.get(name) else {
            tables.push(RateTable::new(&space, k, &[])?);
            continue;
        };
        let deps: Vec<usize> = entry.depends_on.iter().map(|d| index(d)).collect::<Result<_>>()?;
        let mut t = RateTable::new(&space, k, &deps).map_err(|e| Error::Format(e.to_string()))?;
        for cell in &entry.table {
            if let Some(extra) = cell.given.keys().find(|g| !entry.depends_on.contains(g)) {
                return Err(Error::Format(format!(
                    "`{name}` table: `given` names `{extra}`, which is not a dependency"
                )));
            }
            let given: Vec<usize> = entry
                .depends_on
                .iter()
                .map(|d| {
                    cell.given.get(d).copied().ok_or_else(|| {
                        Error::Format(format!("`{name}` table: `given` does not assign `{d}`"))
                    })
                })
                .collect::<Result<_>>()?;
            if t.get(&given, cell.from, cell.to).is_some() {
                return Err(Error::Format(format!(
                    "`{name}` table: duplicate cell given {:?} from {} to {}",
                    cell.given, cell.from, cell.to
                )));
            }
            t.set(&given, cell.from, cell.to, cell.rate)
                .map_err(|e| Error::Format(format!("`{name}` table: {e}")))?;
        }
        tables.push(t);
    }
    CfmpSpec::new(space, tables)
}

pub fn write_cfmp(s: &CfmpSpec) -> String {
    let space = s.space();
    let f = SpecFile {
        components: space
            .components()
            .iter()
            .map(|c| ComponentEntry {
                name: c.name.clone(),
                states: c.states,
            })
            .collect(),
        intensities: s
            .tables()
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let deps: Vec<String> = t.depends_on().iter().map(|&d| space.name(d).to_string()).collect();
                let table = t
                    .cells()
                    .filter_map(|(given, from, to, rate)| {
                        Some(CellEntry {
                            given: deps.iter().cloned().zip(given).collect(),
                            from,
                            to,
                            rate: rate?,
                        })
                    })
                    .collect();
                (
                    space.name(k).to_string(),
                    IntensityEntry {
                        depends_on: deps,
                        table,
                    },
                )
            })
            .collect(),
    };
    pretty(&f)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryHeader {
    horizon: f64,
    initial: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JumpLine {
    time: f64,
    component: String,
    new_state: usize,
}

/// One header line `{"horizon", "initial"}` followed by one
/// `{"time", "component", "new_state"}` line per jump.
pub fn write_trajectory(t: &Trajectory, space: &ComponentSpace) -> String {
    let header = TrajectoryHeader {
        horizon: t.horizon,
        initial: t
            .initial
            .iter()
            .enumerate()
            .map(|(k, &y)| (space.name(k).to_string(), y))
            .collect(),
    };
    let mut out = serde_json::to_string(&header).expect("serializable");
    out.push('\n');
    for j in &t.jumps {
        let line = JumpLine {
            time: j.time,
            component: space.name(j.component).to_string(),
            new_state: j.state,
        };
        out.push_str(&serde_json::to_string(&line).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn parse_trajectory(text: &str, space: &ComponentSpace) -> Result<Trajectory> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Format("empty trajectory file".into()))?;
    let header: TrajectoryHeader =
        serde_json::from_str(first).map_err(|e| Error::Format(format!("line 1: {e}")))?;
    let mut initial = vec![usize::MAX; space.len()];
    for (name, &y) in &header.initial {
        initial[space.index_of(name).map_err(|e| Error::Format(e.to_string()))?] = y;
    }
    if let Some(k) = initial.iter().position(|&y| y == usize::MAX) {
        return Err(Error::Format(format!("initial state does not assign `{}`", space.name(k))));
    }
    let mut jumps = Vec::new();
    for (n, line) in lines {
        let j: JumpLine =
            serde_json::from_str(line).map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
        jumps.push(Jump {
            time: j.time,
            component: space
                .index_of(&j.component)
                .map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?,
            state: j.new_state,
        });
    }
    let t = Trajectory {
        initial,
        jumps,
        horizon: header.horizon,
    };
    t.check(space)?;
    Ok(t)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
