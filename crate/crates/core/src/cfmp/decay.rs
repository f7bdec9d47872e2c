use std::collections::HashMap;

use serde::Serialize;

use super::{build_generator, transition_matrix, CfmpSpec, ComponentSpace};
use crate::digraph::NodeSet;
use crate::error::{Error, Result};

/// CMI values at or below this are treated as exact zeros.
pub const ZERO_CMI: f64 = 1e-13;

/// Log-log slope of CMI against `h` separating slow from fast decay. A
/// dependence that enters the transition probabilities at first order gives
/// CMI ≈ h; one that only enters at second order gives CMI ≈ h³.
pub const CLASS_SLOPE_BOUNDARY: f64 = 2.0;

pub const DEFAULT_HS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

const MIN_H: f64 = 1e-4;
const NEGLIGIBLE_MASS: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayClass {
    /// Conditional independence holds exactly at every `h`.
    Zero,
    /// Dependence is of second or higher order in `h`.
    Fast,
    /// Dependence is visible at first order in `h`.
    Slow,
}

impl std::fmt::Display for DecayClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecayClass::Zero => "zero",
            DecayClass::Fast => "fast",
            DecayClass::Slow => "slow",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CiDecayReport {
    pub targets: Vec<String>,
    pub sources: Vec<String>,
    /// Conditioning components, always including the targets.
    pub conditioning: Vec<String>,
    pub hs: Vec<f64>,
    /// `I(Y_targets(h); Y_sources(0) | Y_conditioning(0))` in nats.
    pub cmi: Vec<f64>,
    /// `cmi[i + 1] / cmi[i]`, undefined when `cmi[i]` is zero.
    pub ratios: Vec<Option<f64>>,
    /// Log-log slope over the smallest pair of nonzero values.
    pub slope: Option<f64>,
    pub class: DecayClass,
}

pub fn uniform_distribution(space: &ComponentSpace) -> Vec<f64> {
    let n = space.state_count().unwrap_or(0);
    vec![1.0 / n as f64; n]
}

/// Track the conditional mutual information between the future of
/// `targets` and the present of `sources`, given the present of
/// `cond ∪ targets`, as `h` shrinks. `pi` is the law of the initial state.
pub fn ci_decay(
    s: &CfmpSpec,
    pi: &[f64],
    targets: NodeSet,
    sources: NodeSet,
    cond: NodeSet,
    hs: &[f64],
) -> Result<CiDecayReport> {
    let q = build_generator(s)?;
    let space = s.space();
    check_distribution(pi, q.state_count())?;
    let all = NodeSet::full(space.len());
    if !(targets | sources | cond).is_subset(all) {
        return Err(Error::UnknownComponent(format!("{:?}", (targets | sources | cond) - all)));
    }
    if targets.is_empty() || sources.is_empty() {
        return Err(Error::InvalidArgument("targets and sources must be nonempty".into()));
    }
    let given = cond | targets;
    if !sources.is_disjoint(given) {
        return Err(Error::InvalidArgument(
            "sources must be disjoint from the targets and the conditioning set".into(),
        ));
    }
    if hs.len() < 2 {
        return Err(Error::InvalidArgument("at least two values of h are needed".into()));
    }
    for (i, &h) in hs.iter().enumerate() {
        if !(h.is_finite() && h >= MIN_H) {
            return Err(Error::InvalidArgument(format!("h = {h} is below {MIN_H}")));
        }
        if i > 0 && h >= hs[i - 1] {
            return Err(Error::InvalidArgument("h values must be strictly decreasing".into()));
        }
    }

    let n = q.state_count();
    let z: Vec<usize> = (0..n).map(|i| project(space, i, given)).collect();
    let src: Vec<usize> = (0..n).map(|i| project(space, i, sources)).collect();
    let x: Vec<usize> = (0..n).map(|i| project(space, i, targets)).collect();
    let nx = targets.iter().map(|k| space.cardinality(k)).product::<usize>();

    let mut cmi = Vec::with_capacity(hs.len());
    for &h in hs {
        let p = transition_matrix(&q, h)?;
        // Joint mass of (z, s) and the future target state x.
        let mut joint: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
        for i in 0..n {
            if pi[i] == 0.0 {
                continue;
            }
            let row = joint.entry((z[i], src[i])).or_insert_with(|| vec![0.0; nx]);
            for j in 0..n {
                row[x[j]] += pi[i] * p[[i, j]];
            }
        }
        cmi.push(conditional_mutual_information(&joint, nx));
    }

    let ratios = cmi
        .windows(2)
        .map(|w| (w[0] > 0.0).then(|| w[1] / w[0]))
        .collect();
    let slope = (0..hs.len() - 1)
        .rev()
        .find(|&i| cmi[i] > ZERO_CMI && cmi[i + 1] > ZERO_CMI)
        .map(|i| (cmi[i] / cmi[i + 1]).ln() / (hs[i] / hs[i + 1]).ln());
    let class = if cmi.iter().all(|&v| v <= ZERO_CMI) {
        DecayClass::Zero
    } else {
        match slope {
            Some(sl) if sl < CLASS_SLOPE_BOUNDARY => DecayClass::Slow,
            // A value that drops to zero between successive h is fast too.
            _ => DecayClass::Fast,
        }
    };

    Ok(CiDecayReport {
        targets: s.names(targets),
        sources: s.names(sources),
        conditioning: s.names(given),
        hs: hs.to_vec(),
        cmi,
        ratios,
        slope,
        class,
    })
}

fn check_distribution(pi: &[f64], n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(Error::InvalidDistribution(format!(
            "expected {n} probabilities, got {}",
            pi.len()
        )));
    }
    if let Some(p) = pi.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("mass {p} is negative or not finite")));
    }
    let total: f64 = pi.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!("masses sum to {total}, not 1")));
    }
    Ok(())
}

/// Mixed-radix index of the components `set` of product state `i`.
fn project(space: &ComponentSpace, i: usize, set: NodeSet) -> usize {
    set.iter()
        .fold(0, |acc, k| acc * space.cardinality(k) + space.component_of(i, k))
}

fn conditional_mutual_information(joint: &HashMap<(usize, usize), Vec<f64>>, nx: usize) -> f64 {
    let mut pz: HashMap<usize, f64> = HashMap::new();
    let mut pzx: HashMap<usize, Vec<f64>> = HashMap::new();
    for (&(z, _), row) in joint {
        *pz.entry(z).or_default() += row.iter().sum::<f64>();
        let acc = pzx.entry(z).or_insert_with(|| vec![0.0; nx]);
        for (a, p) in acc.iter_mut().zip(row) {
            *a += p;
        }
    }
    let mut total = 0.0;
    for (&(z, _), row) in joint {
        let pzs: f64 = row.iter().sum();
        for (x, &p) in row.iter().enumerate() {
            if p < NEGLIGIBLE_MASS {
                continue;
            }
            total += p * (p * pz[&z] / (pzs * pzx[&z][x])).ln();
        }
    }
    total.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_components_have_zero_cmi() {
        let s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 3), ("z", 2)], &[], |k, _, f, t| {
            0.3 + 0.4 * k as f64 + 0.2 * f as f64 + 0.1 * t as f64
        })
        .unwrap();
        let pi = uniform_distribution(s.space());
        let one = NodeSet::singleton;
        let r = ci_decay(&s, &pi, one(0), one(1), one(2), &DEFAULT_HS).unwrap();
        assert!(r.cmi.iter().all(|&v| v.abs() < 1e-12), "{:?}", r.cmi);
        assert_eq!(r.class, DecayClass::Zero);
        assert_eq!(r.conditioning, vec!["x", "z"]);
    }

    #[test]
    fn direct_dependence_is_slow() {
        let s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 2)], &[("y", &["x"])], |k, g, _, _| {
            if k == 1 { [0.4, 2.5][g[0]] } else { 1.0 }
        })
        .unwrap();
        let pi = uniform_distribution(s.space());
        let r = ci_decay(&s, &pi, NodeSet::singleton(1), NodeSet::singleton(0), NodeSet::EMPTY, &DEFAULT_HS)
            .unwrap();
        assert_eq!(r.class, DecayClass::Slow);
        assert!(r.slope.unwrap() > 0.5 && r.slope.unwrap() < 1.5);
    }

    #[test]
    fn argument_checks() {
        let s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 2)], &[], |_, _, _, _| 1.0).unwrap();
        let pi = uniform_distribution(s.space());
        let (x, y) = (NodeSet::singleton(0), NodeSet::singleton(1));
        let e = NodeSet::EMPTY;
        assert!(matches!(
            ci_decay(&s, &[0.5, 0.5, 0.5, -0.5], x, y, e, &DEFAULT_HS),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            ci_decay(&s, &[0.3, 0.3, 0.3, 0.3], x, y, e, &DEFAULT_HS),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(ci_decay(&s, &pi, x, y, e, &[0.1, 0.2]).is_err());
        assert!(ci_decay(&s, &pi, x, y, e, &[0.1, 1e-5]).is_err());
        assert!(ci_decay(&s, &pi, x, y, y, &DEFAULT_HS).is_err());
        assert!(ci_decay(&s, &pi, x, x, e, &DEFAULT_HS).is_err());
    }
}
