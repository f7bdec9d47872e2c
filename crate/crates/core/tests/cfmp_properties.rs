use std::collections::HashMap;

use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use localind::cfmp::{
    build_generator, ci_decay, derive_graph, estimate_intensities, is_locally_independent,
    reduce_to_parents, set_locally_independent, simulate_batch, transition_matrix,
    uniform_distribution, vacuous_dependencies, CfmpSpec, ComponentSpace, DecayClass, DEFAULT_HS,
};
use localind::fixtures;
use localind::NodeSet;

/// A random valid process: 2–4 components of 2–3 states, random
/// dependencies, rates drawn from a coarse grid (so some rows repeat and
/// some rates are zero).
fn random_spec(seed: u64) -> CfmpSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=4);
    let space = ComponentSpace::new((0..k).map(|i| (format!("y{i}"), rng.gen_range(2..=3))));
    let deps: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && rng.gen_bool(0.5)).collect())
        .collect();
    CfmpSpec::from_fn(space, &deps, |_, _, _, _| rng.gen_range(0..8) as f64 * 0.25).unwrap()
}

/// `exp(q h)` by Taylor series with scaling and squaring.
fn expm_taylor(q: &Array2<f64>, h: f64) -> Array2<f64> {
    let n = q.nrows();
    let norm = q.rows().into_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max) * h;
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.25 {
        squarings += 1;
    }
    let a = q * (h / 2f64.powi(squarings));
    let mut term = Array2::<f64>::eye(n);
    let mut sum = term.clone();
    for i in 1..40 {
        term = term.dot(&a) / i as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

fn hamming(space: &ComponentSpace, i: usize, j: usize) -> usize {
    let (x, y) = (space.decode(i), space.decode(j));
    x.iter().zip(&y).filter(|(a, b)| a != b).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_structure(seed in any::<u64>()) {
        let s = random_spec(seed);
        let q = build_generator(&s).unwrap().to_dense();
        let space = s.space();
        for i in 0..q.nrows() {
            prop_assert!(q.row(i).sum().abs() <= 1e-12);
            for j in 0..q.ncols() {
                if hamming(space, i, j) >= 2 {
                    prop_assert_eq!(q[[i, j]], 0.0);
                } else if i != j {
                    prop_assert!(q[[i, j]] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn uniformization_matches_taylor(seed in any::<u64>(), h in prop::sample::select(vec![0.01, 0.3, 2.5])) {
        let s = random_spec(seed);
        let g = build_generator(&s).unwrap();
        let p = transition_matrix(&g, h).unwrap();
        let oracle = expm_taylor(&g.to_dense(), h);
        for ((i, j), &x) in p.indexed_iter() {
            prop_assert!(x >= 0.0);
            prop_assert!((x - oracle[[i, j]]).abs() <= 1e-11, "{} vs {}", x, oracle[[i, j]]);
        }
        for row in p.rows() {
            prop_assert!((row.sum() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn derived_graph_is_the_non_vacuous_part_of_the_declared_one(seed in any::<u64>()) {
        let s = random_spec(seed);
        let g = derive_graph(&s).unwrap();
        let vacuous = vacuous_dependencies(&s).unwrap();
        let space = s.space();
        let mut declared = 0;
        for (k, t) in s.tables().iter().enumerate() {
            for &j in t.depends_on() {
                declared += 1;
                let is_vacuous = vacuous.contains(&(space.name(j).to_string(), space.name(k).to_string()));
                prop_assert_eq!(g.has_edge(j, k), !is_vacuous);
                prop_assert_eq!(is_locally_independent(&s, space.name(j), space.name(k)).unwrap(), is_vacuous);
            }
        }
        prop_assert_eq!(g.edge_count() + vacuous.len(), declared);
        for (j, k) in g.edges() {
            prop_assert!(s.table(k).depends_on().contains(&j));
        }
    }

    #[test]
    fn local_markov_property(seed in any::<u64>()) {
        // Each component's rates are determined by its parents in the
        // derived graph: the reduced tables reproduce every cell.
        let s = random_spec(seed);
        let g = derive_graph(&s).unwrap();
        let r = reduce_to_parents(&s).unwrap();
        let space = s.space();
        for i in 0..space.state_count().unwrap() {
            let y = space.decode(i);
            for k in 0..space.len() {
                for to in (0..space.cardinality(k)).filter(|&t| t != y[k]) {
                    prop_assert_eq!(r.table(k).rate_in_state(&y, to), s.table(k).rate_in_state(&y, to));
                }
            }
        }
        let all = NodeSet::full(space.len());
        for k in 0..space.len() {
            let pa = g.parents_of(k);
            let rest = all - pa - NodeSet::singleton(k);
            prop_assert!(set_locally_independent(&s, rest, NodeSet::singleton(k), pa).unwrap());
            for j in pa.iter() {
                prop_assert!(!set_locally_independent(&s, NodeSet::singleton(j), NodeSet::singleton(k), all - NodeSet::singleton(j) - NodeSet::singleton(k)).unwrap());
            }
        }
    }
}

#[test]
fn small_step_flip_probability_is_first_order() {
    let r = 1.7;
    let s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 2)], &[], |k, _, _, _| if k == 0 { r } else { 0.0 }).unwrap();
    let g = build_generator(&s).unwrap();
    for h in [0.1, 0.01, 0.001] {
        let p = transition_matrix(&g, h).unwrap();
        assert!((p[[0, 2]] - r * h).abs() <= r * r * h * h);
    }
}

#[test]
fn cycle_fixture_set_queries() {
    let s = fixtures::cycle_spec();
    let one = NodeSet::singleton;
    // the rates of a do not use b, the rates of b use a
    assert!(set_locally_independent(&s, one(1), one(0), one(2)).unwrap());
    assert!(!set_locally_independent(&s, one(0), one(1), one(2)).unwrap());
}

/// Brute-force conditional mutual information from a dense transition
/// matrix, keyed by full component tuples.
fn cmi_brute(space: &ComponentSpace, p: &Array2<f64>, targets: &[usize], sources: &[usize], cond: &[usize]) -> f64 {
    let n = p.nrows();
    let pi = 1.0 / n as f64;
    let mut z_set: Vec<usize> = cond.iter().chain(targets).copied().collect();
    z_set.sort();
    z_set.dedup();
    let pick = |y: &[usize], idx: &[usize]| idx.iter().map(|&k| y[k]).collect::<Vec<_>>();
    let mut joint: HashMap<(Vec<usize>, Vec<usize>, Vec<usize>), f64> = HashMap::new();
    for i in 0..n {
        let y0 = space.decode(i);
        for j in 0..n {
            let y1 = space.decode(j);
            *joint.entry((pick(&y0, &z_set), pick(&y0, sources), pick(&y1, targets))).or_default() += pi * p[[i, j]];
        }
    }
    let mut pz: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut pzs: HashMap<(Vec<usize>, Vec<usize>), f64> = HashMap::new();
    let mut pzx: HashMap<(Vec<usize>, Vec<usize>), f64> = HashMap::new();
    for ((z, s, x), &v) in &joint {
        *pz.entry(z.clone()).or_default() += v;
        *pzs.entry((z.clone(), s.clone())).or_default() += v;
        *pzx.entry((z.clone(), x.clone())).or_default() += v;
    }
    joint
        .iter()
        .filter(|(_, &v)| v >= 1e-15)
        .map(|((z, s, x), &v)| {
            v * (v * pz[z] / (pzs[&(z.clone(), s.clone())] * pzx[&(z.clone(), x.clone())])).ln()
        })
        .sum()
}

#[test]
fn ci_decay_matches_brute_force() {
    for (s, t, src, c) in [
        (fixtures::cycle_spec(), vec![0], vec![1], vec![2]),
        (fixtures::cycle_spec(), vec![1], vec![0], vec![2]),
        (fixtures::health_spec(), vec![3], vec![1], vec![2]),
        (fixtures::health_spec(), vec![2, 3], vec![1], vec![0]),
    ] {
        let set = |v: &[usize]| v.iter().copied().collect::<NodeSet>();
        let pi = uniform_distribution(s.space());
        let r = ci_decay(&s, &pi, set(&t), set(&src), set(&c), &DEFAULT_HS).unwrap();
        let q = build_generator(&s).unwrap().to_dense();
        for (h, got) in r.hs.iter().zip(&r.cmi) {
            let want = cmi_brute(s.space(), &expm_taylor(&q, *h), &t, &src, &c);
            assert!((got - want).abs() <= 1e-9 * want.abs() + 1e-15, "h={h}: {got} vs {want}");
        }
    }
}

#[test]
fn ci_decay_matches_the_scipy_reference() {
    // Computed with scipy.linalg.expm and a dictionary-based CMI, uniform
    // initial law, h = 0.2, 0.1, 0.05, 0.025.
    let reference: [(CfmpSpec, usize, usize, NodeSet, [f64; 4]); 4] = [
        (fixtures::cycle_spec(), 0, 1, NodeSet::singleton(2),
            [2.132599662288668e-4, 3.7090586410497864e-5, 5.508585411013592e-6, 7.524824376962057e-7]),
        (fixtures::cycle_spec(), 1, 0, NodeSet::singleton(2),
            [2.103536371440744e-2, 1.3535627624701039e-2, 7.6722041540230185e-3, 4.0858531983951245e-3]),
        (fixtures::health_spec(), 3, 1, NodeSet::singleton(2),
            [1.7369046862442545e-5, 2.974241955072557e-6, 4.386201118334848e-7, 5.969393918741808e-8]),
        (fixtures::health_spec(), 2, 1, NodeSet::singleton(0) | NodeSet::singleton(3),
            [3.527203490488306e-3, 2.2328155366645097e-3, 1.2525954831428935e-3, 6.629573520028755e-4]),
    ];
    for (s, t, src, c, want) in reference {
        let pi = uniform_distribution(s.space());
        let r = ci_decay(&s, &pi, NodeSet::singleton(t), NodeSet::singleton(src), c, &DEFAULT_HS).unwrap();
        for (got, want) in r.cmi.iter().zip(want) {
            assert!((got - want).abs() <= 1e-8 * want, "{got} vs {want}");
        }
    }
}

#[test]
fn ci_decay_classes_on_the_cycle() {
    let s = fixtures::cycle_spec();
    let pi = uniform_distribution(s.space());
    let one = NodeSet::singleton;
    let sep = ci_decay(&s, &pi, one(0), one(1), one(2), &[0.1, 0.05]).unwrap();
    assert_eq!(sep.class, DecayClass::Fast);
    let edge = ci_decay(&s, &pi, one(1), one(0), one(2), &[0.1, 0.05]).unwrap();
    assert_eq!(edge.class, DecayClass::Slow);
    // the separated direction is orders of magnitude weaker
    assert!(sep.cmi[1] < 0.01 * edge.cmi[1]);
}

#[test]
fn independent_components_have_exactly_zero_cmi() {
    let s = fixtures::independent_spec();
    let pi = uniform_distribution(s.space());
    let one = NodeSet::singleton;
    for (t, src, c) in [(0, 1, one(2)), (1, 2, NodeSet::EMPTY), (2, 0, one(1))] {
        let r = ci_decay(&s, &pi, one(t), one(src), c, &DEFAULT_HS).unwrap();
        assert!(r.cmi.iter().all(|&v| v <= 1e-12), "{:?}", r.cmi);
        assert_eq!(r.class, DecayClass::Zero);
    }
}

#[test]
fn equal_rates_give_overlapping_estimates() {
    let s = CfmpSpec::from_named_fn(&[("x", 2), ("y", 3)], &[("y", &["x"])], |_, _, _, _| 1.2).unwrap();
    let trajs = simulate_batch(&s, &uniform_distribution(s.space()), 100.0, 77, 10).unwrap();
    let est = estimate_intensities(&trajs, &s).unwrap();
    let bands: Vec<(f64, f64)> = est
        .cells
        .iter()
        .filter(|c| c.exposure > 5.0)
        .map(|c| {
            let (r, se) = (c.rate().unwrap(), c.standard_error().unwrap());
            (r - 3.0 * se, r + 3.0 * se)
        })
        .collect();
    assert!(bands.len() >= 10);
    let lo = bands.iter().map(|b| b.0).fold(f64::MIN, f64::max);
    let hi = bands.iter().map(|b| b.1).fold(f64::MAX, f64::min);
    assert!(lo <= hi, "bands do not overlap: [{lo}, {hi}]");
}
