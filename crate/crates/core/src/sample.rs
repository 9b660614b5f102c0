//! Random mixed strategies for property checks.

use rand::Rng;

use crate::game::{payoff_vector, Game, JointMixedStrategy, MixedStrategy};
use crate::error::Result;

/// Uniform point of the `m`-simplex (normalized exponential spacings).
pub fn uniform_simplex(rng: &mut impl Rng, m: usize) -> MixedStrategy {
    let mut v: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    } else {
        v = vec![1.0 / m as f64; m];
    }
    MixedStrategy::from_vec_unchecked(v)
}

/// A mix of vertices, sparse-support points and interior points.
pub fn random_strategy(rng: &mut impl Rng, m: usize) -> MixedStrategy {
    match rng.random_range(0..5) {
        0 => MixedStrategy::pure(m, rng.random_range(0..m)),
        1 => {
            let mut v: Vec<f64> = (0..m)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        0.0
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect();
            let s: f64 = v.iter().sum();
            if s <= 0.0 {
                return MixedStrategy::pure(m, rng.random_range(0..m));
            }
            v.iter_mut().for_each(|x| *x /= s);
            MixedStrategy::from_vec_unchecked(v)
        }
        _ => uniform_simplex(rng, m),
    }
}

pub fn random_joint(rng: &mut impl Rng, game: &Game) -> JointMixedStrategy {
    JointMixedStrategy::new(
        game.action_counts()
            .iter()
            .map(|&m| random_strategy(rng, m))
            .collect(),
    )
}

/// Class-symmetric profile: one random strategy per class, shared by its members.
pub fn random_class_symmetric(
    rng: &mut impl Rng,
    game: &Game,
    part: &crate::partition::Partition,
) -> JointMixedStrategy {
    let per_class: Vec<MixedStrategy> = part
        .classes()
        .iter()
        .map(|c| random_strategy(rng, game.actions(c[0])))
        .collect();
    JointMixedStrategy::new(
        (0..game.players())
            .map(|i| per_class[part.class_of(i).expect("covered")].clone())
            .collect(),
    )
}

/// Draws a member of player `i`'s `eps`-best-response polytope against `belief`.
///
/// Tries rejection sampling first, then shrinks a random point toward the
/// best pure response just far enough to satisfy the bound.
pub fn eps_best_response_member(
    rng: &mut impl Rng,
    game: &Game,
    i: usize,
    belief: &JointMixedStrategy,
    eps: f64,
) -> Result<MixedStrategy> {
    let pv = payoff_vector(game, i, belief)?;
    let (best_a, best) = pv
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (a, v)| if v > acc.1 { (a, v) } else { acc });
    let m = pv.len();
    for _ in 0..16 {
        let s = random_strategy(rng, m);
        if s.dot(&pv) >= best - eps {
            return Ok(s);
        }
    }
    let r = uniform_simplex(rng, m);
    let loss = best - r.dot(&pv);
    let lambda = if loss > 0.0 { (eps / loss).min(1.0) } else { 1.0 };
    let v = r
        .as_slice()
        .iter()
        .enumerate()
        .map(|(a, &x)| lambda * x + if a == best_a { 1.0 - lambda } else { 0.0 })
        .collect();
    Ok(MixedStrategy::from_vec_unchecked(v))
}
