use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ecfp_core::equilibrium::{best_response_value, class_asymmetry, regrets};
use ecfp_core::game::{deviation_utility, mixed_utility, payoff_vector};
use ecfp_core::oracle::{brute_force_mixed_utility, brute_force_partition_valid};
use ecfp_core::partition::{check_permutation_br, check_rearrangement, is_eps_best_response_profile};
use ecfp_core::rng::derive_stream;
use ecfp_core::sample::{eps_best_response_member, random_class_symmetric, random_joint};
use ecfp_core::{
    centroid, epsilon_br_actions, generate_game, mce_gap, ne_gap, sne_gap, validate_partition,
    BestResponseQuery, Game, GeneratorSpec, JointMixedStrategy, MixedStrategy, Partition,
};

fn random_game(rng: &mut ChaCha8Rng, max_players: usize, max_actions: usize) -> Game {
    let n = rng.random_range(2..=max_players);
    let actions: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_actions)).collect();
    let total = actions.iter().product();
    let utility = (0..total).map(|_| rng.random_range(-2.0..2.0)).collect();
    Game::new(actions, utility).unwrap()
}

/// A generated symmetric game with a random class split.
fn random_symmetric(rng: &mut ChaCha8Rng, seed: u64) -> (Game, Partition) {
    let n = rng.random_range(2..=4usize);
    let m = rng.random_range(1..=3usize);
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.random_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    generate_game(&GeneratorSpec::symmetric(&sizes, m, seed)).unwrap()
}

fn lerp(a: &JointMixedStrategy, b: &JointMixedStrategy, lambda: f64) -> JointMixedStrategy {
    JointMixedStrategy::new(
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| {
                MixedStrategy::new(
                    x.as_slice()
                        .iter()
                        .zip(y.as_slice())
                        .map(|(p, q)| lambda * p + (1.0 - lambda) * q)
                        .collect(),
                )
                .unwrap()
            })
            .collect(),
    )
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mixed_utility_is_multilinear(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let mut rng = derive_stream(seed, "prop", 0);
        let g = random_game(&mut rng, 4, 3);
        let p = random_joint(&mut rng, &g);
        let other = random_joint(&mut rng, &g);
        let i = rng.random_range(0..g.players());
        let mixed = lerp(&p, &p.with_player(i, other[i].clone()), lambda);
        let lhs = mixed_utility(&g, &mixed).unwrap();
        let rhs = lambda * mixed_utility(&g, &p).unwrap()
            + (1.0 - lambda) * deviation_utility(&g, i, &other[i], &p).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn pure_profiles_read_the_tensor(seed in any::<u64>()) {
        let mut rng = derive_stream(seed, "prop", 1);
        let g = random_game(&mut rng, 4, 3);
        let k = rng.random_range(0..g.profile_count());
        let profile = g.profile_of(k);
        let v = mixed_utility(&g, &JointMixedStrategy::pure(&g, &profile)).unwrap();
        prop_assert_eq!(v.to_bits(), g.utility()[k].to_bits());
    }

    #[test]
    fn payoff_vector_inner_product_is_mixed_utility(seed in any::<u64>()) {
        let mut rng = derive_stream(seed, "prop", 2);
        let g = random_game(&mut rng, 4, 4);
        let p = random_joint(&mut rng, &g);
        let u = mixed_utility(&g, &p).unwrap();
        let oracle = brute_force_mixed_utility(&g, &p).unwrap();
        prop_assert!(close(u, oracle, 1e-12));
        for i in 0..g.players() {
            let pv = payoff_vector(&g, i, &p).unwrap();
            prop_assert!(close(p[i].dot(&pv), u, 1e-12));
        }
    }

    #[test]
    fn centroid_is_idempotent_linear_and_class_constant(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let mut rng = derive_stream(seed, "prop", 3);
        let (g, part) = random_symmetric(&mut rng, seed);
        let p = random_joint(&mut rng, &g);
        let p2 = random_joint(&mut rng, &g);
        let c = centroid(&part, &p).unwrap();
        prop_assert_eq!(&centroid(&part, &c).unwrap(), &c);
        for class in part.classes() {
            for &j in class {
                let same = c[class[0]].as_slice().iter().zip(c[j].as_slice())
                    .all(|(a, b)| a.to_bits() == b.to_bits());
                prop_assert!(same);
            }
        }
        let lhs = centroid(&part, &lerp(&p, &p2, lambda)).unwrap();
        let rhs = lerp(&c, &centroid(&part, &p2).unwrap(), lambda);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn validate_partition_agrees_with_brute_force(seed in any::<u64>(), perturb in any::<bool>()) {
        let mut rng = derive_stream(seed, "prop", 4);
        let (g, part) = random_symmetric(&mut rng, seed);
        let mut u = g.utility().to_vec();
        if perturb {
            let k = rng.random_range(0..u.len());
            u[k] += 0.5;
        }
        let g = Game::new(g.action_counts().to_vec(), u).unwrap();
        prop_assume!(g.profile_count() <= 256);
        let n = g.players();
        // the declared partition, the grand coalition, or a random regrouping
        let classes = match rng.random_range(0..3) {
            0 => part.classes().to_vec(),
            1 => vec![(0..n).collect()],
            _ => {
                let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                labels.sort_unstable();
                labels.dedup();
                labels.iter()
                    .map(|&l| (0..n).filter(|&i| i % labels.len() == l % labels.len()).collect())
                    .filter(|c: &Vec<usize>| !c.is_empty())
                    .collect()
            }
        };
        let candidate = Partition::new(classes.clone(), n).unwrap();
        let report = validate_partition(&g, &candidate).unwrap();
        prop_assert_eq!(report.valid, brute_force_partition_valid(&g, &classes));
        prop_assert_eq!(report.valid, report.violations.is_empty());
    }

    #[test]
    fn lemma_checks_hold_on_valid_partitions(seed in any::<u64>(), eps_frac in 0.0f64..1.0) {
        let mut rng = derive_stream(seed, "prop", 5);
        let (g, part) = random_symmetric(&mut rng, seed);
        let p = random_joint(&mut rng, &g);
        prop_assert!(check_rearrangement(&g, &part, &p).unwrap() <= 1e-10);

        let q = random_joint(&mut rng, &g);
        let q_bar = centroid(&part, &q).unwrap();
        let eps = eps_frac * g.utility_range();
        let members = (0..g.players())
            .map(|i| eps_best_response_member(&mut rng, &g, i, &q_bar, eps))
            .collect::<Result<Vec<_>, _>>()
            .unwrap();
        let br = JointMixedStrategy::new(members);
        prop_assert!(is_eps_best_response_profile(&g, &br, &q_bar, eps).unwrap());
        prop_assert!(check_permutation_br(&g, &part, &br, &q, eps).unwrap());
    }

    #[test]
    fn gaps_are_nonnegative_and_bound_deviations(seed in any::<u64>()) {
        let mut rng = derive_stream(seed, "prop", 6);
        let (g, part) = random_symmetric(&mut rng, seed);
        let p = random_joint(&mut rng, &g);
        prop_assert!(ne_gap(&g, &p).unwrap() >= -1e-10);
        prop_assert!(mce_gap(&g, &part, &p).unwrap() >= -1e-10);
        prop_assert!(sne_gap(&g, &part, &p).unwrap() >= -1e-10);
        let u = mixed_utility(&g, &p).unwrap();
        for i in 0..g.players() {
            prop_assert!(best_response_value(&g, i, &p).unwrap() - u >= -1e-10);
        }
    }

    #[test]
    fn epsilon_best_responses_grow_with_epsilon(seed in any::<u64>(), e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let mut rng = derive_stream(seed, "prop", 7);
        let g = random_game(&mut rng, 4, 4);
        let p = random_joint(&mut rng, &g);
        let i = rng.random_range(0..g.players());
        let small = epsilon_br_actions(&g, &BestResponseQuery::new(i, p.clone(), lo).unwrap()).unwrap();
        let large = epsilon_br_actions(&g, &BestResponseQuery::new(i, p, hi).unwrap()).unwrap();
        prop_assert!(!small.is_empty());
        prop_assert!(small.iter().all(|a| large.contains(a)));
    }

    #[test]
    fn symmetric_nash_profiles_are_mean_centric(seed in any::<u64>()) {
        let mut rng = derive_stream(seed, "prop", 8);
        let (g, part) = random_symmetric(&mut rng, seed);
        // class-symmetric pure profiles; some of them are Nash equilibria
        let p = random_class_symmetric(&mut rng, &g, &part);
        let p = if rng.random_bool(0.5) {
            let profile: Vec<usize> = (0..g.players())
                .map(|i| p[i].as_slice().iter().position(|&x| x > 0.0).unwrap())
                .collect();
            let pure = JointMixedStrategy::pure(&g, &profile);
            if class_asymmetry(&part, &pure) == 0.0 { pure } else { p }
        } else {
            p
        };
        if ne_gap(&g, &p).unwrap() <= 1e-10 {
            prop_assert!(mce_gap(&g, &part, &p).unwrap() <= 1e-10);
        }
        prop_assert!((mce_gap(&g, &part, &p).unwrap() - ne_gap(&g, &p).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn singleton_mce_gap_is_ne_gap(seed in any::<u64>()) {
        let mut rng = derive_stream(seed, "prop", 9);
        let g = random_game(&mut rng, 4, 3);
        let p = random_joint(&mut rng, &g);
        let part = Partition::singletons(g.players());
        let ne = ne_gap(&g, &p).unwrap();
        prop_assert!((mce_gap(&g, &part, &p).unwrap() - ne).abs() <= 1e-12);
        let r = regrets(&g, &p, &p).unwrap();
        prop_assert_eq!(r.iter().copied().fold(f64::NEG_INFINITY, f64::max).to_bits(), ne.to_bits());
    }
}

#[test]
fn generated_symmetric_games_always_validate() {
    for seed in 0..100u64 {
        let mut rng = derive_stream(seed, "generator-soundness", 0);
        let n = rng.random_range(2..=5usize);
        let m = rng.random_range(1..=4usize);
        let split = rng.random_range(0..n);
        let sizes = if split == 0 { vec![n] } else { vec![split, n - split] };
        let (g, part) = generate_game(&GeneratorSpec::symmetric(&sizes, m, seed)).unwrap();
        let report = validate_partition(&g, &part).unwrap();
        assert!(report.valid, "seed {seed}: {report}");
        assert!(brute_force_partition_valid(&g, part.classes()));
    }
}
