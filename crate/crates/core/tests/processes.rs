use proptest::prelude::*;
use rand::Rng;

use ecfp_core::dynamics::{select_action, CENTROID_DRIFT_TOL};
use ecfp_core::game::payoff_vector;
use ecfp_core::rng::{derive_stream, PlayerStreams};
use ecfp_core::runner::{InitialAction, ProcessKind, ProcessSpec, Simulation};
use ecfp_core::schedule::{EpsilonSchedule, StepSizeSchedule};
use ecfp_core::summary::{summarize, Thresholds};
use ecfp_core::{generate_game, ne_gap, Game, GeneratorSpec, JointMixedStrategy, Selection};

fn mixed_eps_spec(iterations: u64) -> ProcessSpec {
    ProcessSpec {
        iterations,
        selection: Selection::MixedEps,
        epsilon: EpsilonSchedule::power(0.2, 0.5).unwrap(),
        initial: InitialAction::Random,
        seed: 11,
        ..Default::default()
    }
}

#[test]
fn classical_schedule_is_the_running_average() {
    const T: u64 = 100_000;
    let (g, part) = generate_game(&GeneratorSpec::symmetric(&[2, 1], 3, 21)).unwrap();
    let mut sim = Simulation::new(&g, &part, mixed_eps_spec(T)).unwrap();
    let mut sums: Vec<Vec<f64>> = sim.state().q.to_vecs();
    while sim.state().t < T {
        sim.step().unwrap();
        for (acc, a) in sums.iter_mut().zip(sim.state().last_action.iter()) {
            acc.iter_mut().zip(a.as_slice()).for_each(|(s, x)| *s += x);
        }
    }
    let average: Vec<Vec<f64>> = sums
        .iter()
        .map(|v| v.iter().map(|s| s / T as f64).collect())
        .collect();
    let average = JointMixedStrategy::from_vecs(average).unwrap();
    let diff = sim.state().q.max_abs_diff(&average);
    assert!(diff <= 1e-9, "running average differs by {diff}");
}

#[test]
fn fp_converges_on_a_random_three_player_game() {
    let (g, part) = generate_game(&GeneratorSpec::random_identical(vec![3, 2, 3], 5)).unwrap();
    let spec = ProcessSpec {
        kind: ProcessKind::Fp,
        iterations: 100_000,
        record_every: 1000,
        ..Default::default()
    };
    let sim = Simulation::new(&g, &part, spec).unwrap();
    let trace = sim.run();
    assert!(trace.error.is_none());
    let last = trace.records.last().unwrap();
    assert_eq!(last.t, 100_000);
    assert!(last.ne_gap <= 0.05, "ne_gap(q(T)) = {}", last.ne_gap);
}

#[test]
fn uniform_eps_reaches_every_action_across_seeds() {
    let g = Game::new(vec![3, 3], (0..9).map(|k| (k % 4) as f64 * 0.25).collect()).unwrap();
    let belief = JointMixedStrategy::from_vecs(vec![vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]]).unwrap();
    let eps = g.utility_range();
    let mut seen = [[false; 3]; 2];
    for seed in 0..1000u64 {
        let mut streams = PlayerStreams::new(seed, "select", 2);
        let a = select_action(&g, &belief, eps, Selection::UniformEps, &mut streams).unwrap();
        for i in 0..2 {
            let k = a[i].as_slice().iter().position(|&x| x == 1.0).expect("pure action");
            seen[i][k] = true;
            // independent membership check against the payoff vector
            let pv = payoff_vector(&g, i, &belief).unwrap();
            let best = pv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(pv[k] >= best - eps - 1e-10);
        }
    }
    assert_eq!(seen, [[true; 3]; 2]);
}

#[test]
fn pure_nash_is_absorbing_under_exact_fp() {
    let g = Game::new(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let part = ecfp_core::Partition::singletons(2);
    let spec = ProcessSpec {
        kind: ProcessKind::Fp,
        iterations: 500,
        ..Default::default()
    };
    let mut sim = Simulation::new(&g, &part, spec).unwrap();
    while sim.state().t < 500 {
        sim.step().unwrap();
        assert_eq!(sim.state().last_action, JointMixedStrategy::pure(&g, &[0, 0]));
    }
    assert_eq!(ne_gap(&g, &sim.state().q).unwrap(), 0.0);
}

#[test]
fn summary_reports_convergence_on_a_symmetric_game() {
    let (g, part) = generate_game(&GeneratorSpec::symmetric(&[3], 2, 8)).unwrap();
    let spec = ProcessSpec {
        iterations: 20_000,
        record_every: 100,
        initial: InitialAction::Random,
        gamma: StepSizeSchedule::power(0.8, 2.0).unwrap(),
        ..Default::default()
    };
    let trace = Simulation::new(&g, &part, spec).unwrap().run();
    let report = summarize(&trace, &Thresholds::default()).unwrap();
    assert!(report.ecfp_converged(), "{report:?}");
    assert_eq!(report.final_t, 20_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Simplex preservation, centroid tracking and action admissibility along
    // random ECFP runs with every selection mode and schedule family.
    #[test]
    fn ecfp_state_invariants_hold(seed in any::<u64>(), rho in 0.3f64..=1.0, t0 in 0.0f64..4.0) {
        let mut rng = derive_stream(seed, "process-prop", 0);
        let n = rng.random_range(2..=4usize);
        let split = rng.random_range(0..n);
        let sizes = if split == 0 { vec![n] } else { vec![split, n - split] };
        let (g, part) = generate_game(&GeneratorSpec::symmetric(&sizes, rng.random_range(2..=3), seed)).unwrap();
        let selection = [Selection::Exact, Selection::UniformEps, Selection::MixedEps][rng.random_range(0..3)];
        let spec = ProcessSpec {
            seed,
            iterations: 300,
            selection,
            gamma: StepSizeSchedule::power(rho, t0).unwrap(),
            epsilon: EpsilonSchedule::power(rng.random::<f64>(), 0.7).unwrap(),
            initial: InitialAction::Random,
            ..Default::default()
        };
        let mut sim = Simulation::new(&g, &part, spec).unwrap();
        while sim.state().t < 300 {
            let (_, eps) = sim.current_rates();
            let belief = sim.state().q_bar.clone();
            sim.step().unwrap();
            let s = sim.state();
            prop_assert!(s.q.iter().chain(s.q_bar.iter()).chain(s.last_action.iter()).all(|x| x.is_valid()));
            prop_assert!(s.centroid_drift(&part).unwrap() <= CENTROID_DRIFT_TOL);
            for i in 0..g.players() {
                let pv = payoff_vector(&g, i, &belief).unwrap();
                let best = pv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(s.last_action[i].dot(&pv) >= best - eps - 1e-10);
            }
        }
    }
}
