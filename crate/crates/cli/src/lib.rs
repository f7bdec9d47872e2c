//! The `localind` command line, as a library so it can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use localind::cfmp::{self, CfmpSpec};
use localind::graphoid::{self, Axiom, DeltaSeparationOracle, Derived, Profile, Property};
use localind::{io, DiGraph, Error, NodeSet, Result, SeparationQuery};

/// A separation decider, swappable so tests can inject faults.
pub type Decider = fn(&DiGraph, &SeparationQuery) -> Result<bool>;

#[derive(Clone, Copy)]
pub struct Methods {
    pub moral: Decider,
    pub trail: Decider,
}

impl Default for Methods {
    fn default() -> Self {
        Methods {
            moral: localind::delta_separates,
            trail: localind::delta_separates_trail,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser)]
#[command(name = "localind", version, about = "Local independence graphs and delta-separation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether C delta-separates A from B.
    Dsep {
        graph: PathBuf,
        /// Space-separated node names; "" is the empty set.
        #[arg(long = "a", value_name = "NAMES")]
        a: String,
        #[arg(long = "b", value_name = "NAMES")]
        b: String,
        #[arg(long = "c", value_name = "NAMES", default_value = "")]
        c: String,
        #[arg(long, value_enum, default_value_t = Method::Moral)]
        method: Method,
    },
    /// Print the moral graph as DOT, optionally after deleting edges out of
    /// a set and restricting to an ancestral set.
    Moralize {
        graph: PathBuf,
        #[arg(long, value_name = "NAMES")]
        delete_out: Option<String>,
        #[arg(long, value_name = "NAMES")]
        ancestral_of: Option<String>,
    },
    /// Check the asymmetric graphoid axioms for delta-separation on a graph.
    Axioms {
        graph: PathBuf,
        /// Also check the derived properties.
        #[arg(long)]
        derived: bool,
    },
    /// Derive the local independence graph of a process.
    DeriveGraph { spec: PathBuf },
    /// Track how a conditional independence decays as the time step shrinks.
    CiCheck {
        spec: PathBuf,
        #[arg(long, value_name = "NAMES")]
        target: String,
        #[arg(long, value_name = "NAMES")]
        source: String,
        #[arg(long, value_name = "NAMES", default_value = "")]
        cond: String,
        /// Decreasing time steps, separated by spaces or commas.
        #[arg(long, value_name = "LIST")]
        hs: Option<String>,
    },
    /// Simulate trajectories and write them as JSON lines.
    Simulate {
        spec: PathBuf,
        #[arg(long)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Estimate rates from trajectory files by occurrence over exposure.
    Estimate {
        spec: PathBuf,
        trajectories: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Moral,
    Trail,
    Both,
}

/// Run one command line. Reports go to `out`, diagnostics to `err`; the
/// return value is the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, methods: &Methods) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err, methods) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write, methods: &Methods) -> Result<i32> {
    match cmd {
        Command::Dsep { graph, a, b, c, method } => dsep(&graph, &a, &b, &c, method, out, err, methods),
        Command::Moralize { graph, delete_out, ancestral_of } => {
            moralize(&graph, delete_out.as_deref(), ancestral_of.as_deref(), out)
        }
        Command::Axioms { graph, derived } => axioms(&graph, derived, out, err),
        Command::DeriveGraph { spec } => derive_graph(&spec, out, err),
        Command::CiCheck { spec, target, source, cond, hs } => {
            ci_check(&spec, &target, &source, &cond, hs.as_deref(), out)
        }
        Command::Simulate { spec, horizon, seed, count, out: dir } => {
            simulate(&spec, horizon, seed, count, &dir, out)
        }
        Command::Estimate { spec, trajectories } => estimate(&spec, &trajectories, out),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<DiGraph> {
    io::parse_graph(&read(path)?)
}

fn load_spec(path: &Path) -> Result<CfmpSpec> {
    io::parse_cfmp(&read(path)?)
}

fn names(list: &str) -> impl Iterator<Item = &str> {
    list.split_whitespace()
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    writeln!(out, "{text}").map_err(|e| Error::InvalidArgument(format!("writing output: {e}")))
}

fn write_text(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::InvalidArgument(format!("writing output: {e}")))
}

#[allow(clippy::too_many_arguments)]
fn dsep(
    path: &Path,
    a: &str,
    b: &str,
    c: &str,
    method: Method,
    out: &mut dyn Write,
    err: &mut dyn Write,
    methods: &Methods,
) -> Result<i32> {
    let g = load_graph(path)?;
    let q = SeparationQuery::from_names(&g, names(a), names(b), names(c))?;
    let reduced = serde_json::to_value(q.reduced().labelled(&g))?;
    let report = match method {
        Method::Moral | Method::Trail => {
            let (name, decide) = if method == Method::Moral {
                ("moral", methods.moral)
            } else {
                ("trail", methods.trail)
            };
            json!({ "separated": decide(&g, &q)?, "method": name, "reduced_query": reduced })
        }
        Method::Both => {
            let moral = (methods.moral)(&g, &q)?;
            let trail = (methods.trail)(&g, &q)?;
            if moral != trail {
                let _ = writeln!(
                    err,
                    "error: the moral-graph method says {moral} but the trail method says {trail}"
                );
            }
            let report = json!({
                "separated": if moral == trail { json!(moral) } else { Value::Null },
                "method": "both",
                "moral": moral,
                "trail": trail,
                "agree": moral == trail,
                "reduced_query": reduced,
            });
            emit(out, &report)?;
            return Ok(if moral == trail { EXIT_OK } else { EXIT_NEGATIVE });
        }
    };
    emit(out, &report)?;
    Ok(EXIT_OK)
}

fn moralize(path: &Path, delete_out: Option<&str>, ancestral_of: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let mut g = load_graph(path)?;
    if let Some(b) = delete_out {
        let b = g.node_set(names(b))?;
        g = g.delete_out_edges(b)?;
    }
    if let Some(a) = ancestral_of {
        let a = g.node_set(names(a))?;
        let keep = g.ancestral_set(a)?;
        g = g.induced_subgraph(keep)?;
    }
    write_text(out, &g.moralize().to_dot())?;
    Ok(EXIT_OK)
}

fn axioms(path: &Path, derived: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let g = load_graph(path)?;
    let oracle = DeltaSeparationOracle(&g);
    let mut props: Vec<Property> = Axiom::ALL.iter().map(|&a| a.into()).collect();
    if derived {
        props.extend(Derived::ALL.iter().map(|&d| Property::from(d)));
        props.push(Property::AlternativeIntersectionOverlap);
    }
    let reports = graphoid::check_properties(&oracle, &props)?;
    let expected = Profile::delta_separation();
    let mut failed = Vec::new();
    for r in &reports {
        if let Property::Axiom(ax) = r.property {
            if expected.0.get(&ax) == Some(&true) && !r.holds {
                failed.push(r.property.to_string());
            }
        }
    }
    emit(out, &Value::Array(reports.iter().map(|r| r.to_json(&oracle)).collect()))?;
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(err, "delta-separation property failed: {}", failed.join(", "));
        Ok(EXIT_NEGATIVE)
    }
}

fn derive_graph(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let s = load_spec(path)?;
    let g = cfmp::derive_graph(&s)?;
    let vacuous = cfmp::vacuous_dependencies(&s)?;
    for (j, k) in &vacuous {
        let _ = writeln!(
            err,
            "warning: vacuous dependency: `{k}` declares `{j}` but its rates do not vary with it"
        );
    }
    let graph: Value = serde_json::from_str(&io::write_graph(&g))?;
    emit(
        out,
        &json!({ "graph": graph, "dot": g.to_dot(), "vacuous_dependencies": vacuous }),
    )?;
    Ok(EXIT_OK)
}

fn parse_hs(list: &str) -> Result<Vec<f64>> {
    list.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("`{t}` is not a number")))
        })
        .collect()
}

fn ci_check(
    path: &Path,
    target: &str,
    source: &str,
    cond: &str,
    hs: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32> {
    let s = load_spec(path)?;
    let hs = match hs {
        Some(list) => parse_hs(list)?,
        None => cfmp::DEFAULT_HS.to_vec(),
    };
    let set = |list: &str| -> Result<NodeSet> { s.component_set(names(list)) };
    let pi = cfmp::uniform_distribution(s.space());
    let report = cfmp::ci_decay(&s, &pi, set(target)?, set(source)?, set(cond)?, &hs)?;
    emit(out, &serde_json::to_value(&report)?)?;
    Ok(EXIT_OK)
}

fn simulate(path: &Path, horizon: f64, seed: u64, count: usize, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let s = load_spec(path)?;
    let pi = cfmp::uniform_distribution(s.space());
    let trajs = cfmp::simulate_batch(&s, &pi, horizon, seed, count)?;
    fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::with_capacity(count);
    for (i, t) in trajs.iter().enumerate() {
        let file = dir.join(format!("trajectory_{i:04}.jsonl"));
        fs::write(&file, io::write_trajectory(t, s.space()))
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", file.display())))?;
        files.push(json!({ "file": file.display().to_string(), "seed": seed.wrapping_add(i as u64), "jumps": t.jumps.len() }));
    }
    emit(out, &json!({ "horizon": horizon, "trajectories": files }))?;
    Ok(EXIT_OK)
}

fn estimate(path: &Path, files: &[PathBuf], out: &mut dyn Write) -> Result<i32> {
    let s = load_spec(path)?;
    let trajs = files
        .iter()
        .map(|f| {
            io::parse_trajectory(&read(f)?, s.space())
                .map_err(|e| Error::Format(format!("{}: {e}", f.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let est = cfmp::estimate_intensities(&trajs, &s)?;
    let space = s.space();
    let cells: Vec<Value> = est
        .cells
        .iter()
        .map(|c| {
            let given: serde_json::Map<String, Value> = s
                .table(c.component)
                .depends_on()
                .iter()
                .zip(&c.given)
                .map(|(&d, &y)| (space.name(d).to_string(), json!(y)))
                .collect();
            json!({
                "component": space.name(c.component),
                "given": given,
                "from": c.from,
                "to": c.to,
                "count": c.count,
                "exposure": c.exposure,
                "rate": c.rate(),
                "standard_error": c.standard_error(),
            })
        })
        .collect();
    emit(out, &json!({ "trajectories": trajs.len(), "cells": cells }))?;
    Ok(EXIT_OK)
}
