mod common;

use common::random_schedule;
use drp::network::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metropolis_weights_pass_every_clause(seed in any::<u64>(), m in 1usize..11, q in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sched = random_schedule(&mut rng, m, q);
        for k in 0..sched.period() {
            let audit = sched.weights_at(k).audit(sched.edges_at(k));
            prop_assert!(audit.passed(), "{:?}", audit.failures());
        }
        prop_assert!(sched.check_q_connectivity(q, 5 * q).unwrap());
    }

    #[test]
    fn products_stay_within_the_geometric_bound(seed in any::<u64>(), m in 2usize..8, q in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sched = random_schedule(&mut rng, m, q);
        let ws: Vec<WeightMatrix> = (0..60).map(|k| sched.weights_at(k).clone()).collect();
        let (theta, beta) = geometric_mixing_bound(sched.eta(), m, q);
        for s in (0..60).step_by(7) {
            for k in s..60 {
                let phi = transition_product(&ws, k, s).unwrap();
                prop_assert!(max_deviation_from_average(&phi) <= theta * beta.powi((k - s) as i32));
                // products of doubly stochastic matrices stay doubly stochastic
                for i in 0..m {
                    prop_assert!((phi.row(i).sum() - 1.0).abs() < 1e-12);
                    prop_assert!((phi.column(i).sum() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn schedule_text_round_trip(seed in any::<u64>(), m in 1usize..8, q in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sched = random_schedule(&mut rng, m, q);
        let text = sched.to_text(sched.period());
        let parsed = parse_schedule(&text, m).unwrap();
        prop_assert_eq!(parsed.as_slice(), sched.edge_sets());
    }
}

#[test]
fn expander_degrees() {
    for seed in 0..20 {
        let g = random_regular_graph(8, 3, seed).unwrap();
        for i in 0..8 {
            assert_eq!(g.in_degree(i), 4);
            assert_eq!(g.out_degree(i), 4);
        }
        assert!(is_strongly_connected(&g));
    }
    assert!(random_regular_graph(5, 3, 0).is_err());
}

#[test]
fn three_clique_weights() {
    let w = metropolis_weights(&EdgeSet::complete(3)).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((w.get(i, j) - 1.0 / 3.0).abs() < 1e-15);
        }
    }
}

#[test]
fn uniform_weights_on_a_ring_violate_the_topology_clause() {
    let ring = TopologySchedule::new(5, Topology::Ring, 0).unwrap();
    let audit = WeightMatrix::uniform(5).audit(ring.edges_at(0));
    assert!(!audit.respects_topology);
    assert!(audit.rows_sum_to_one && audit.columns_sum_to_one);
    assert_eq!(audit.failures(), vec!["weights nonnegative and zero off the edge set"]);
}

#[test]
fn alternating_schedule_connectivity() {
    let m = 5;
    let ring: Vec<(usize, usize)> = (0..m).map(|i| (i, (i + 1) % m)).collect();
    let sets = vec![EdgeSet::isolated(m), EdgeSet::from_undirected(m, ring).unwrap()];
    let two = TopologySchedule::new(m, Topology::PeriodicSequence { edge_sets: sets.clone(), q: 2 }, 0).unwrap();
    assert!(two.check_q_connectivity(2, 20).unwrap());
    assert!(!two.check_q_connectivity(1, 20).unwrap());
    assert!(TopologySchedule::new(m, Topology::PeriodicSequence { edge_sets: sets, q: 1 }, 0).is_err());
}

#[test]
fn clique_products_are_exactly_average() {
    let ws = vec![WeightMatrix::uniform(4); 10];
    for k in 1..10 {
        let phi = transition_product(&ws, k, 0).unwrap();
        assert!(max_deviation_from_average(&phi) < 1e-15);
    }
}

#[test]
fn convolution_with_vanishing_input_vanishes() {
    let beta = 0.9;
    let gamma: Vec<f64> = (0..20_000).map(|l| 1.0 / (l as f64 + 1.0)).collect();
    let mut prev = f64::INFINITY;
    for k in (1000..20_000).step_by(500) {
        let s = convolution_limit_check(beta, &gamma[..=k]).unwrap();
        // direct summation of the tail-weighted series
        let direct: f64 = (0..=k).map(|l| beta.powi((k - l) as i32) * gamma[l]).sum();
        assert!((s - direct).abs() <= 1e-12 * direct);
        assert!(s < prev);
        prev = s;
    }
    assert!(prev < 1e-3);
}

#[test]
fn convolution_with_constant_input_approaches_geometric_limit() {
    let s = convolution_limit_check(0.9, &[2.0; 1000]).unwrap();
    assert!((s - 2.0 / (1.0 - 0.9)).abs() < 1e-9);
}
