use serde::Serialize;

use super::{CfmpSpec, Trajectory};
use crate::error::Result;

/// Occurrences and time at risk for one rate-table cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateCell {
    pub component: usize,
    pub given: Vec<usize>,
    pub from: usize,
    pub to: usize,
    pub count: u64,
    pub exposure: f64,
}

impl EstimateCell {
    /// Occurrence/exposure rate; undefined without exposure.
    pub fn rate(&self) -> Option<f64> {
        (self.exposure > 0.0).then(|| self.count as f64 / self.exposure)
    }

    /// Poisson standard error `sqrt(rate / exposure)`.
    pub fn standard_error(&self) -> Option<f64> {
        self.rate().map(|r| (r / self.exposure).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntensityEstimate {
    /// In rate-table order: component, configuration, from, to.
    pub cells: Vec<EstimateCell>,
}

impl IntensityEstimate {
    pub fn cell(&self, component: usize, given: &[usize], from: usize, to: usize) -> Option<&EstimateCell> {
        self.cells
            .iter()
            .find(|c| c.component == component && c.given == given && c.from == from && c.to == to)
    }
}

/// Estimate every rate of `shape`'s tables from observed paths. Only the
/// components and dependency lists of `shape` are used, not its rates.
pub fn estimate_intensities(trajs: &[Trajectory], shape: &CfmpSpec) -> Result<IntensityEstimate> {
    let space = shape.space();
    let tables = shape.tables();
    // Per component: exposure by (config, from), counts by (config, from, to).
    let mut exposure: Vec<Vec<f64>> = tables
        .iter()
        .enumerate()
        .map(|(k, t)| vec![0.0; t.config_count() * space.cardinality(k)])
        .collect();
    let mut counts: Vec<Vec<u64>> = tables
        .iter()
        .enumerate()
        .map(|(k, t)| vec![0; t.config_count() * space.cardinality(k).pow(2)])
        .collect();

    for traj in trajs {
        traj.check(space)?;
        let mut y = traj.initial.clone();
        let mut t0 = 0.0;
        let hold = |y: &[usize], dt: f64, exposure: &mut Vec<Vec<f64>>| {
            for (k, t) in tables.iter().enumerate() {
                exposure[k][t.config_of_state(y) * space.cardinality(k) + y[k]] += dt;
            }
        };
        for j in &traj.jumps {
            hold(&y, j.time - t0, &mut exposure);
            let k = j.component;
            let t = &tables[k];
            let n = space.cardinality(k);
            counts[k][(t.config_of_state(&y) * n + y[k]) * n + j.state] += 1;
            y[k] = j.state;
            t0 = j.time;
        }
        hold(&y, traj.horizon - t0, &mut exposure);
    }

    let mut cells = Vec::new();
    for (k, t) in tables.iter().enumerate() {
        let n = space.cardinality(k);
        for config in 0..t.config_count() {
            for from in 0..n {
                for to in (0..n).filter(|&to| to != from) {
                    cells.push(EstimateCell {
                        component: k,
                        given: t.config(config),
                        from,
                        to,
                        count: counts[k][(config * n + from) * n + to],
                        exposure: exposure[k][config * n + from],
                    });
                }
            }
        }
    }
    Ok(IntensityEstimate { cells })
}
