use std::collections::BTreeSet;

use dag_automata::analysis::{canonical_form, encode_edge_labels, is_isomorphic, is_planar, rewire};
use dag_automata::derivation::{enumerate_language, sample_derivation, Configuration, SampleOutcome};
use dag_automata::fixtures;
use dag_automata::planar::{enumerate_planar, planar_recognizes};
use dag_automata::recognition::{accepting_runs, brute_force_runs, distinct_runs, first_run, recognizes};
use dag_automata::reproduce::random_pair;
use dag_automata::weighting::{dag_weight, partial_mass, run_weight};
use dag_automata::{Dag, DagAutomaton, Edge, Mode, Node, NodeId, RootPolicy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frontier_change(a: &DagAutomaton, cfg: &Configuration) -> i64 {
    cfg.steps()
        .iter()
        .map(|s| {
            let t = a.transition(s.transition);
            t.rhs.size() as i64 - t.lhs.size() as i64
        })
        .sum()
}

#[test]
fn generated_dags_are_recognized_and_well_formed() {
    let a = fixtures::example1();
    for g in enumerate_language(&a, Mode::Single, 11).unwrap() {
        assert!(recognizes(&a, &g));
        assert_eq!(g.roots().len(), 1);
        assert!(g.validate(RootPolicy::One).is_ok());
        let count = |l: &str| g.nodes().iter().filter(|v| v.label == l).count();
        assert_eq!((count("a"), count("c"), count("e")), (1, 1, 1));
        assert_eq!(count("b"), count("d"));
    }
    for g in enumerate_language(&a, Mode::Multi, 9).unwrap() {
        assert!(recognizes(&a, &g));
        assert!(g.is_connected());
    }
}

#[test]
fn enumeration_is_monotone_in_the_budget() {
    let a = fixtures::example1();
    let mut prev: BTreeSet<_> = BTreeSet::new();
    for k in 1..=11 {
        let forms: BTreeSet<_> = enumerate_language(&a, Mode::Single, k).unwrap().iter().map(canonical_form).collect();
        assert!(prev.is_subset(&forms), "budget {k}");
        prev = forms;
    }
}

#[test]
fn example1_weights_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let w: Vec<f64> = (0..5).map(|_| rand::Rng::gen_range(&mut rng, 0.05..1.0)).collect();
        let a = fixtures::example1().with_weights(&w).unwrap();
        for g in enumerate_language(&a, Mode::Single, 11).unwrap() {
            let n = g.nodes().iter().filter(|v| v.label == "b").count() as i32;
            let expect = w[0] * w[2] * w[4] * (w[1] * w[3]).powi(n);
            assert!((dag_weight(&a, &g).unwrap() - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn example3_mass_matches_geometric_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let w: Vec<f64> = (0..3).map(|_| rand::Rng::gen_range(&mut rng, 0.05..0.95)).collect();
        let a = fixtures::example3().with_weights(&w).unwrap();
        for max in [2usize, 5, 9] {
            let k = (max - 1) as i32;
            let expect = w[0] * w[2] * (1.0 - w[1].powi(k)) / (1.0 - w[1]);
            let got = partial_mass(&a, Mode::Single, max).unwrap().total;
            assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        }
    }
}

#[test]
fn partial_mass_never_decreases() {
    let a = fixtures::example1().with_uniform_weight(0.5);
    let totals: Vec<f64> = (1..=11).map(|k| partial_mass(&a, Mode::Single, k).unwrap().total).collect();
    assert!(totals.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn planar_outputs_are_planar_and_in_the_unordered_language() {
    let pa = fixtures::example6();
    let a = fixtures::example1();
    for g in enumerate_planar(&pa, 11).unwrap() {
        assert!(is_planar(&g));
        assert!(recognizes(&a, &g));
        assert!(planar_recognizes(&pa, &g).unwrap());
    }
}

#[test]
fn rewired_graphs_keep_the_run() {
    let a = fixtures::example1();
    for n in 1..=3 {
        let g = fixtures::example1_member(n);
        let r = first_run(&a, &g).unwrap();
        let q = a.state("q").unwrap();
        let qs: Vec<_> = g.edges().iter().filter(|e| r.state(e.id) == Some(q)).map(|e| e.id).collect();
        let report = rewire(&g, &r, &qs).unwrap();
        for h in &report.dags {
            assert!(recognizes(&a, h));
            assert_eq!(h.edge_count(), g.edge_count());
        }
    }
}

#[test]
fn sampled_derivations_conserve_the_frontier() {
    let a = fixtures::example1();
    for seed in 0..40 {
        for steps in [1, 3, 6, 50] {
            match sample_derivation(&a, Mode::Single, steps, seed) {
                SampleOutcome::Complete { dag, run } => {
                    assert!(recognizes(&a, &dag));
                    assert_eq!(run.len(), dag.edge_count());
                }
                SampleOutcome::StepLimit { partial } | SampleOutcome::DeadEnd { partial, .. } => {
                    assert_eq!(partial.frontier().len() as i64, frontier_change(&a, &partial));
                }
                SampleOutcome::Disconnected { .. } => panic!("single mode never disconnects"),
            }
        }
    }
}

fn labelled_dag() -> impl Strategy<Value = Dag> {
    (1u32..7).prop_flat_map(|n| {
        let labels = prop::collection::vec(prop::sample::select(vec!["x", "y"]), n as usize);
        let edges = prop::collection::vec((0..n, 0..n, prop::sample::select(vec!["r", "s"])), 0..8);
        (labels, edges).prop_map(move |(labels, raw)| {
            let nodes = labels.iter().enumerate().map(|(i, l)| Node { id: NodeId(i as u32), label: l.to_string() }).collect();
            let edges = raw
                .into_iter()
                .filter(|(s, t, _)| s != t)
                .enumerate()
                .map(|(k, (s, t, l))| Edge::labeled(k as u32, s.min(t), s.max(t), l))
                .collect();
            Dag::new(nodes, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_recognition_agrees_with_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, g) = random_pair(&mut rng);
        prop_assert_eq!(accepting_runs(&a, &g).unwrap(), brute_force_runs(&a, &g));
    }

    #[test]
    fn weights_scale_with_node_count(seed in any::<u64>(), lambda in 0.1f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, g) = random_pair(&mut rng);
        let a = a.with_uniform_weight(0.7);
        let scaled = a.with_uniform_weight(0.7 * lambda);
        let w = dag_weight(&a, &g).unwrap();
        let ws = dag_weight(&scaled, &g).unwrap();
        prop_assert!((ws - w * lambda.powi(g.node_count() as i32)).abs() < 1e-9);
    }

    #[test]
    fn dag_weight_counts_distinct_runs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, g) = random_pair(&mut rng);
        let distinct = distinct_runs(&a, &g).unwrap();
        let all = accepting_runs(&a, &g).unwrap();
        prop_assert!(distinct.len() <= all.len());
        prop_assert_eq!(distinct.is_empty(), all.is_empty());
        let ones = a.with_uniform_weight(1.0);
        prop_assert_eq!(dag_weight(&ones, &g).unwrap(), distinct.len() as f64);
        for r in &distinct {
            prop_assert_eq!(run_weight(&ones, &g, r).unwrap(), 1.0);
        }
    }

    #[test]
    fn canonical_form_ignores_numbering(g in labelled_dag(), perm in Just(()).prop_perturb(|_, mut r| r.next_u64())) {
        let mut order: Vec<usize> = (0..g.node_count()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(perm);
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let h = g.renumbered(&order);
        prop_assert!(is_isomorphic(&g, &h));
        let mut nodes = h.nodes().to_vec();
        nodes[0].label = "z".into();
        let changed = Dag::new(nodes, h.edges().to_vec()).unwrap();
        prop_assert!(!is_isomorphic(&g, &changed));
    }

    #[test]
    fn edge_encoding_sizes(g in labelled_dag()) {
        let e = encode_edge_labels(&g).unwrap();
        prop_assert_eq!(e.node_count(), g.node_count() + g.edge_count());
        prop_assert_eq!(e.edge_count(), 2 * g.edge_count());
        prop_assert!(e.is_acyclic());
        prop_assert_eq!(e.roots().len(), g.roots().len());
    }
}
