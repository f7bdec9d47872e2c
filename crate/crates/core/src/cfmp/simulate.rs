use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use rayon::prelude::*;

use super::{build_generator, CfmpSpec, ComponentSpace, Generator};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub component: usize,
    pub state: usize,
}

/// One sample path on `[0, horizon]`: the initial product state and the
/// single-component jumps after it.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub initial: Vec<usize>,
    pub jumps: Vec<Jump>,
    pub horizon: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> Vec<usize> {
        let mut y = self.initial.clone();
        for j in &self.jumps {
            y[j.component] = j.state;
        }
        y
    }

    /// Check the path lives on `space`: states in range, times strictly
    /// increasing within the horizon, and every jump a real change.
    pub fn check(&self, space: &ComponentSpace) -> Result<()> {
        let bad = |m: String| Err(Error::Format(m));
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return bad(format!("horizon {} is not a nonnegative number", self.horizon));
        }
        if self.initial.len() != space.len() {
            return bad(format!(
                "initial state has {} components, expected {}",
                self.initial.len(),
                space.len()
            ));
        }
        let mut y = self.initial.clone();
        if let Some(k) = (0..y.len()).find(|&k| y[k] >= space.cardinality(k)) {
            return bad(format!("initial state of `{}` is out of range", space.name(k)));
        }
        let mut last = 0.0;
        for (n, j) in self.jumps.iter().enumerate() {
            if !(j.time.is_finite() && j.time > last || n == 0 && j.time == 0.0) || j.time > self.horizon {
                return bad(format!("jump {n} at time {} is out of order or past the horizon", j.time));
            }
            if j.component >= space.len() || j.state >= space.cardinality(j.component) {
                return bad(format!("jump {n} leaves the state space"));
            }
            if y[j.component] == j.state {
                return bad(format!("jump {n} does not change `{}`", space.name(j.component)));
            }
            y[j.component] = j.state;
            last = j.time;
        }
        Ok(())
    }
}

/// Exact event-driven sample path. Deterministic in `seed`.
pub fn simulate(s: &CfmpSpec, pi: &[f64], horizon: f64, seed: u64) -> Result<Trajectory> {
    let q = build_generator(s)?;
    let initial = initial_law(&q, pi)?;
    check_horizon(horizon)?;
    Ok(sample(&q, &initial, horizon, seed))
}

/// `count` independent paths; path `i` uses seed `seed + i`.
pub fn simulate_batch(
    s: &CfmpSpec,
    pi: &[f64],
    horizon: f64,
    seed: u64,
    count: usize,
) -> Result<Vec<Trajectory>> {
    let q = build_generator(s)?;
    let initial = initial_law(&q, pi)?;
    check_horizon(horizon)?;
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| sample(&q, &initial, horizon, seed.wrapping_add(i)))
        .collect())
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")))
    }
}

fn initial_law(q: &Generator, pi: &[f64]) -> Result<WeightedIndex<f64>> {
    if pi.len() != q.state_count() {
        return Err(Error::InvalidDistribution(format!(
            "expected {} probabilities, got {}",
            q.state_count(),
            pi.len()
        )));
    }
    WeightedIndex::new(pi).map_err(|e| Error::InvalidDistribution(e.to_string()))
}

fn sample(q: &Generator, initial: &WeightedIndex<f64>, horizon: f64, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = q.space();
    let start = initial.sample(&mut rng);
    let mut i = start;
    let mut jumps = Vec::new();
    let mut t = 0.0;
    loop {
        let exit = q.exit_rate(i);
        if exit <= 0.0 {
            break;
        }
        t += Exp::new(exit).expect("positive rate").sample(&mut rng);
        if t > horizon {
            break;
        }
        let row = q.row(i);
        let mut u = rng.gen::<f64>() * exit;
        let mut next = row[row.len() - 1].0;
        for &(j, r) in row {
            if u < r {
                next = j;
                break;
            }
            u -= r;
        }
        let component = (0..space.len())
            .find(|&k| space.component_of(i, k) != space.component_of(next, k))
            .expect("a jump changes one component");
        jumps.push(Jump {
            time: t,
            component,
            state: space.component_of(next, component),
        });
        i = next;
    }
    Trajectory {
        initial: space.decode(start),
        jumps,
        horizon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfmp::uniform_distribution;

    fn single(rate: f64) -> CfmpSpec {
        CfmpSpec::from_named_fn(&[("x", 2), ("y", 2)], &[], move |k, _, _, _| if k == 0 { rate } else { 0.0 })
            .unwrap()
    }

    #[test]
    fn absorbing_process_never_jumps() {
        let s = single(0.0);
        let t = simulate(&s, &uniform_distribution(s.space()), 10.0, 3).unwrap();
        assert!(t.jumps.is_empty());
        assert_eq!(t.final_state(), t.initial);
    }

    #[test]
    fn same_seed_same_path() {
        let s = single(1.3);
        let pi = uniform_distribution(s.space());
        assert_eq!(simulate(&s, &pi, 50.0, 9).unwrap(), simulate(&s, &pi, 50.0, 9).unwrap());
        assert_ne!(simulate(&s, &pi, 50.0, 9).unwrap(), simulate(&s, &pi, 50.0, 10).unwrap());
        let batch = simulate_batch(&s, &pi, 50.0, 9, 3).unwrap();
        assert_eq!(batch[1], simulate(&s, &pi, 50.0, 10).unwrap());
    }

    #[test]
    fn jump_count_matches_poisson() {
        let s = single(2.0);
        let t = simulate(&s, &uniform_distribution(s.space()), 1000.0, 1).unwrap();
        let n = t.jumps.len() as f64;
        assert!((n - 2000.0).abs() <= 3.0 * 2000f64.sqrt(), "{n}");
        t.check(s.space()).unwrap();
        assert!(t.jumps.iter().all(|j| j.component == 0));
    }

    #[test]
    fn bad_horizon_rejected() {
        let s = single(1.0);
        assert!(simulate(&s, &uniform_distribution(s.space()), 0.0, 1).is_err());
    }
}
