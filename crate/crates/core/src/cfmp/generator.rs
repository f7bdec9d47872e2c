use ndarray::Array2;

use super::{CfmpSpec, ComponentSpace};
use crate::error::{Error, Result};

/// Sparse intensity matrix of the product process. Row `i` holds the
/// off-diagonal rates out of state `i`; the diagonal is implied.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    space: ComponentSpace,
    rows: Vec<Vec<(usize, f64)>>,
    exit: Vec<f64>,
}

impl Generator {
    pub fn space(&self) -> &ComponentSpace {
        &self.space
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    /// Off-diagonal `(target, rate)` pairs out of `i`, zero rates omitted.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn exit_rate(&self, i: usize) -> f64 {
        self.exit[i]
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return -self.exit[i];
        }
        self.rows[i]
            .iter()
            .find(|&&(t, _)| t == j)
            .map_or(0.0, |&(_, r)| r)
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.exit.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.state_count();
        let mut q = Array2::zeros((n, n));
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, r) in row {
                q[[i, j]] = r;
            }
            q[[i, i]] = -self.exit[i];
        }
        q
    }
}

/// Assemble the generator: a state pair differing in exactly one component
/// gets that component's tabulated rate, every other off-diagonal is zero.
pub fn build_generator(s: &CfmpSpec) -> Result<Generator> {
    s.require_valid()?;
    let space = s.space().clone();
    let n = space.state_count().expect("validated");
    let mut rows = Vec::with_capacity(n);
    let mut exit = Vec::with_capacity(n);
    let mut state = vec![0; space.len()];
    for i in 0..n {
        let mut row = Vec::new();
        for (k, t) in s.tables().iter().enumerate() {
            let from = state[k];
            for to in (0..space.cardinality(k)).filter(|&y| y != from) {
                let r = t.rate_in_state(&state, to).expect("validated");
                if r > 0.0 {
                    state[k] = to;
                    row.push((space.encode(&state), r));
                    state[k] = from;
                }
            }
        }
        row.sort_by_key(|&(j, _)| j);
        exit.push(row.iter().map(|&(_, r)| r).sum());
        rows.push(row);
        increment(&mut state, &space);
        debug_assert!(i + 1 == n || space.encode(&state) == i + 1);
    }
    Ok(Generator { space, rows, exit })
}

fn increment(state: &mut [usize], space: &ComponentSpace) {
    for k in (0..state.len()).rev() {
        state[k] += 1;
        if state[k] < space.cardinality(k) {
            return;
        }
        state[k] = 0;
    }
}

const POISSON_TAIL: f64 = 1e-14;
const MAX_STEP_MASS: f64 = 400.0;

/// `exp(h Q)` by uniformization. The Poisson series is truncated once the
/// remaining mass is below 1e-14; long horizons are split into steps of
/// mass at most 400 and recombined by repeated squaring.
pub fn transition_matrix(q: &Generator, h: f64) -> Result<Array2<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {h}")));
    }
    let n = q.state_count();
    let lambda = q.max_exit_rate();
    if lambda == 0.0 {
        return Ok(Array2::eye(n));
    }
    let steps = (lambda * h / MAX_STEP_MASS).ceil().max(1.0) as u64;
    let mut p = uniformized(q, lambda, h / steps as f64);
    if steps > 1 {
        p = matrix_power(&p, steps);
    }
    p.mapv_inplace(|x| if x < 0.0 { 0.0 } else { x });
    Ok(p)
}

fn uniformized(q: &Generator, lambda: f64, h: f64) -> Array2<f64> {
    let n = q.state_count();
    let mass = lambda * h;
    // M = I + Q / lambda, stored sparsely with its diagonal.
    let m: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            let mut row: Vec<(usize, f64)> = q.row(i).iter().map(|&(j, r)| (j, r / lambda)).collect();
            row.push((i, 1.0 - q.exit_rate(i) / lambda));
            row
        })
        .collect();

    let mut power = Array2::<f64>::eye(n);
    let mut weight = (-mass).exp();
    let mut acc = &power * weight;
    let mut k = 0u64;
    loop {
        let next = weight * mass / (k + 1) as f64;
        // Bound on the mass of all terms after k: a geometric majorant once
        // the terms are decreasing.
        let ratio = mass / (k + 2) as f64;
        if ratio < 1.0 && next / (1.0 - ratio) < POISSON_TAIL {
            break;
        }
        power = times_sparse(&power, &m);
        k += 1;
        weight = next;
        acc.scaled_add(weight, &power);
    }
    acc
}

fn times_sparse(a: &Array2<f64>, m: &[Vec<(usize, f64)>]) -> Array2<f64> {
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let x = a[[i, j]];
            if x != 0.0 {
                for &(l, v) in &m[j] {
                    out[[i, l]] += x * v;
                }
            }
        }
    }
    out
}

fn matrix_power(p: &Array2<f64>, mut e: u64) -> Array2<f64> {
    let mut base = p.clone();
    let mut out = Array2::eye(p.nrows());
    while e > 0 {
        if e & 1 == 1 {
            out = out.dot(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.dot(&base);
        }
    }
    out
}
