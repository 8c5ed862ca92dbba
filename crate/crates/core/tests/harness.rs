mod common;

use common::*;
use drp::engine::{AgentSpec, InitialPoints, RunConfig, StepsizeSchedule, TraceRecord, Verdict};
use drp::geometry::{Component, IntersectionSet, Point};
use drp::harness::audit::*;
use drp::harness::*;
use drp::network::{EdgeSet, Topology, TopologySchedule, WeightMatrix};
use drp::objectives::{Objective, Quadratic};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rec(k: usize, objective: f64) -> TraceRecord {
    TraceRecord {
        k,
        objective,
        max_disagreement: 0.0,
        max_infeasibility: None,
        stepsize: 1.0 / (k as f64 + 1.0),
        min_agent_objective: objective,
        max_agent_objective: objective,
        accuracy: None,
    }
}

fn random_spd<R: Rng>(rng: &mut R, d: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    &b * b.transpose() + DMatrix::identity(d, d) * 0.5
}

/// Records whose consecutive relative changes are exactly `ratios`.
fn ratio_trace(start: f64, ratios: &[f64]) -> Vec<TraceRecord> {
    let mut f = start;
    let mut out = vec![rec(0, f)];
    for (k, r) in ratios.iter().enumerate() {
        f *= 1.0 - r;
        out.push(rec(k + 1, f));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn smaller_threshold_never_stops_earlier(
        values in proptest::collection::vec(0.1f64..10.0, 2..60),
        t1 in 1e-4f64..0.5,
        t2 in 1e-4f64..0.5,
    ) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let records: Vec<TraceRecord> = values.iter().enumerate().map(|(k, f)| rec(k, *f)).collect();
        let strict = evaluate_stopping(&StoppingRule::RelativeObjective { theta: lo }, &records);
        let loose = evaluate_stopping(&StoppingRule::RelativeObjective { theta: hi }, &records);
        if let Some(s) = strict {
            let l = loose.expect("a looser threshold must fire whenever a stricter one does");
            prop_assert!(l.k <= s.k);
        }
        // the decision is the first index of the first qualifying pair
        let naive = values.windows(2).position(|w| (w[0] - w[1]).abs() / w[0] < hi);
        prop_assert_eq!(loose.map(|d| d.k), naive);
        prop_assert_eq!(loose.map(|d| d.record), naive.map(|k| k + 1));
    }
}

#[test]
fn ratio_trace_fires_at_seven() {
    let ratios = [0.5, 0.3, 0.1, 0.05, 0.01, 0.005, 0.002, 0.0009, 0.0001];
    let records = ratio_trace(40.0, &ratios);
    let rule = StoppingRule::RelativeObjective { theta: 0.001 };
    let d = evaluate_stopping(&rule, &records).unwrap();
    assert_eq!((d.k, d.record), (7, 8));
    // a threshold equal to the ratio does not fire on it
    let exact = StoppingRule::RelativeObjective { theta: 0.002 };
    assert_eq!(evaluate_stopping(&exact, &records).unwrap().k, 7);
}

fn quadratic_agent(rng: &mut ChaCha8Rng, d: usize, comps: Vec<Component>) -> AgentSpec {
    let h = random_spd(rng, d);
    let c = gaussian_vec(rng, d, 2.0);
    AgentSpec::new(Objective::quadratic(Quadratic::centered(h, &c).unwrap()), comps).unwrap()
}

#[test]
fn crp_matches_projected_gradient_on_a_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..5 {
        let ball = Component::ball(Point::dense(gaussian_vec(&mut rng, 3, 0.3)), 1.0).unwrap();
        let agent = quadratic_agent(&mut rng, 3, vec![ball.clone()]);
        let set = IntersectionSet::new(vec![ball]).unwrap();
        let obj = agent.objective().clone();
        let pg = projected_gradient_oracle(&obj, &set, &OracleOptions::for_objective(&obj)).unwrap();
        assert!(pg.converged);
        let mut settings = RunSettings::default();
        settings.stepsize = StepsizeSchedule::Harmonic { a0: 1.0 / 0.5 };
        settings.max_iters = 50_000;
        settings.cadence = 50_000;
        settings.track_infeasibility = false;
        let crp = crp_oracle(agent, &settings, &StoppingRule::MaxIters(50_000), None).unwrap();
        let err = crp.point.distance(&pg.point).unwrap();
        assert!(err < 1e-5, "{err}");
    }
}

#[test]
fn pg_oracle_matches_active_set_on_two_halfspace_qps() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut checked = 0;
    while checked < 50 {
        let d = rng.random_range(2..5);
        let h = random_spd(&mut rng, d);
        let g = gaussian_vec(&mut rng, d, 2.0);
        let a = gaussian_vec(&mut rng, d, 1.0);
        let b = rng.random_range(-0.5..1.0);
        let i = rng.random_range(0..d);
        let comp = Component::halfspace_with_nonneg(Point::dense(a.clone()), b, i).unwrap();
        let (am, bv) = two_halfspaces(&a, b, i);
        let Some(reference) = active_set_qp(&h, &DVector::from_vec(g.clone()), &am, &bv) else {
            continue;
        };
        let obj = Objective::quadratic(Quadratic::new(h, g, 0.0).unwrap());
        let set = IntersectionSet::new(vec![comp]).unwrap();
        let pg = projected_gradient_oracle(&obj, &set, &OracleOptions::for_objective(&obj)).unwrap();
        assert!(pg.converged);
        assert!(dist(&pg.point.to_dense(), reference.as_slice()) < 1e-5);
        checked += 1;
    }
}

#[test]
fn optimal_start_gives_a_constant_trace() {
    let m = 4;
    let center = [0.2, -0.1];
    let agents: Vec<AgentSpec> = (0..m)
        .map(|_| {
            AgentSpec::new(
                Objective::quadratic(Quadratic::centered(DMatrix::identity(2, 2) * 2.0, &center).unwrap()),
                vec![
                    Component::ball(Point::zeros(2), 1.0).unwrap(),
                    Component::halfspace(Point::dense(vec![1.0, 1.0]), 0.5).unwrap(),
                ],
            )
            .unwrap()
        })
        .collect();
    let mut settings = RunSettings::default();
    settings.max_iters = 200;
    settings.init = InitialPoints::Given(vec![Point::dense(center.to_vec()); m]);
    let schedule = TopologySchedule::new(m, Topology::Ring, 0).unwrap();
    let config = settings.apply(agents, schedule);
    let exec = execute(&config, &StoppingRule::MaxIters(200), None).unwrap();
    assert_eq!(exec.trace.verdict, Verdict::IterationCapped);
    for r in &exec.trace.records {
        assert!(r.objective.abs() <= 1e-12);
        assert!(r.max_disagreement <= 1e-12);
        assert!(r.max_infeasibility.unwrap() <= 1e-12);
    }
}

#[test]
fn seeded_runs_repeat_exactly() {
    let agents = QuadraticProblemSpec::new(4, 3, 5).generate().unwrap();
    let schedule = TopologySchedule::new(4, Topology::Ring, 5).unwrap();
    let mut settings = RunSettings::default();
    settings.max_iters = 500;
    settings.batch_size = 2;
    settings.seed = 77;
    let config = settings.apply(agents, schedule);
    let rule = StoppingRule::RelativeObjective { theta: 1e-6 };
    let a = execute(&config, &rule, None).unwrap();
    let b = execute(&config, &rule, None).unwrap();
    assert_eq!(a, b);
    settings.seed = 78;
    let other = execute(&settings.apply(config.agents.clone(), config.schedule.clone()), &rule, None).unwrap();
    assert_ne!(a.trace.records, other.trace.records);
}

#[test]
fn accuracy_rule_stops_on_the_evaluator() {
    let agent = AgentSpec::new(
        Objective::quadratic(Quadratic::centered(DMatrix::identity(1, 1), &[5.0]).unwrap()),
        vec![Component::halfspace(Point::dense(vec![1.0]), 10.0).unwrap()],
    )
    .unwrap();
    let mut settings = RunSettings::default();
    settings.init = InitialPoints::Zeros;
    settings.stepsize = StepsizeSchedule::Constant { alpha: 0.1 };
    settings.max_iters = 1000;
    // score = fraction of the way to 5
    let eval = |x: &Point| Ok(x.get(0) / 5.0);
    let res = crp_oracle(agent, &settings, &StoppingRule::TargetAccuracy { t_acc: 0.5 }, Some(&eval)).unwrap();
    let stop = res.execution.stop.unwrap();
    // x_k = 5 (1 - 0.9^k) first reaches 2.5 at k = 7
    assert_eq!(stop.k, 7);
    assert_eq!(res.execution.trace.verdict, Verdict::Converged);
}

#[test]
fn audit_names_the_uniform_weight_clause() {
    let ring = TopologySchedule::new(5, Topology::Ring, 0)
        .unwrap()
        .with_weights(vec![WeightMatrix::uniform(5)])
        .unwrap();
    let items = network_items(&ring, 50);
    let failed: Vec<&str> = items.iter().filter(|i| !i.passed).map(|i| i.clause).collect();
    assert_eq!(failed, vec![CLAUSE_TOPOLOGY]);
}

#[test]
fn audit_names_the_connectivity_clause() {
    let m = 4;
    let half = EdgeSet::from_undirected(m, [(0, 1), (2, 3)]).unwrap();
    let schedule = TopologySchedule::new_unchecked(m, Topology::PeriodicSequence { edge_sets: vec![half], q: 3 }, 0).unwrap();
    let items = network_items(&schedule, 50);
    let failed: Vec<&str> = items.iter().filter(|i| !i.passed).map(|i| i.clause).collect();
    assert_eq!(failed, vec![CLAUSE_CONNECTIVITY]);
}

#[test]
fn audit_names_the_stepsize_clauses() {
    let failed = |s: StepsizeSchedule| -> Vec<&'static str> {
        stepsize_items(&s).into_iter().filter(|i| !i.passed).map(|i| i.clause).collect()
    };
    assert_eq!(failed(StepsizeSchedule::Constant { alpha: 0.1 }), vec![CLAUSE_STEP_SQUARES]);
    assert_eq!(failed(StepsizeSchedule::PowerLaw { a0: 1.0, p: 1.5 }), vec![CLAUSE_STEP_SUM]);
    assert!(failed(StepsizeSchedule::Harmonic { a0: 2.0 }).is_empty());

    let agents = QuadraticProblemSpec::new(3, 2, 1).generate().unwrap();
    let mut config = RunConfig::new(agents, TopologySchedule::new(3, Topology::Clique, 0).unwrap());
    assert!(audit(&config, 100).passed());
    config.stepsize = StepsizeSchedule::Constant { alpha: 0.1 };
    let report = audit(&config, 100);
    assert!(!report.passed());
    assert!(report.to_string().contains(&format!("FAIL  {CLAUSE_STEP_SQUARES}")));
}
