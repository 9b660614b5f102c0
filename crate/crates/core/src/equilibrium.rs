//! Best responses and equilibrium gaps.
//!
//! Each gap is the largest improvement any single player could obtain by
//! deviating, so it is zero exactly on the corresponding equilibrium set:
//! Nash (against `p`), mean-centric (against the centroid of `p`) and
//! symmetric Nash (Nash plus equal strategies within each class).

use crate::error::{Error, Result};
use crate::game::{payoff_vector, Game, JointMixedStrategy};
use crate::partition::{centroid, Partition};

pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct BestResponseQuery {
    pub player: usize,
    /// Only the opponents' entries are read.
    pub belief: JointMixedStrategy,
    pub epsilon: f64,
    pub tie_tolerance: f64,
}

impl BestResponseQuery {
    pub fn new(player: usize, belief: JointMixedStrategy, epsilon: f64) -> Result<Self> {
        Self::with_tie_tolerance(player, belief, epsilon, DEFAULT_TIE_TOLERANCE)
    }

    pub fn with_tie_tolerance(
        player: usize,
        belief: JointMixedStrategy,
        epsilon: f64,
        tie_tolerance: f64,
    ) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::invalid(format!("epsilon must be >= 0, got {epsilon}")));
        }
        if !(tie_tolerance > 0.0) {
            return Err(Error::invalid(format!(
                "tie tolerance must be > 0, got {tie_tolerance}"
            )));
        }
        Ok(Self {
            player,
            belief,
            epsilon,
            tie_tolerance,
        })
    }
}

fn max_entry(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `max_a U(e_a, belief_{-i})`, which by linearity is the best value over all of player i's simplex.
pub fn best_response_value(game: &Game, i: usize, belief: &JointMixedStrategy) -> Result<f64> {
    Ok(max_entry(&payoff_vector(game, i, belief)?))
}

/// Pure actions within `epsilon + tie_tolerance` of the best response value.
///
/// Never empty; ascending order.
pub fn epsilon_br_actions(game: &Game, query: &BestResponseQuery) -> Result<Vec<usize>> {
    let pv = payoff_vector(game, query.player, &query.belief)?;
    let threshold = max_entry(&pv) - query.epsilon - query.tie_tolerance;
    Ok(pv
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= threshold)
        .map(|(a, _)| a)
        .collect())
}

/// Per-player regret of `strategies` against `belief`: `max_a U(e_a, belief_{-i}) - U(s_i, belief_{-i})`.
pub fn regrets(
    game: &Game,
    strategies: &JointMixedStrategy,
    belief: &JointMixedStrategy,
) -> Result<Vec<f64>> {
    strategies.conforms(game)?;
    (0..game.players())
        .map(|i| {
            let pv = payoff_vector(game, i, belief)?;
            Ok(max_entry(&pv) - strategies[i].dot(&pv))
        })
        .collect()
}

fn max_or_zero(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Nash gap: largest unilateral improvement available at `p`.
pub fn ne_gap(game: &Game, p: &JointMixedStrategy) -> Result<f64> {
    Ok(max_or_zero(regrets(game, p, p)?))
}

/// Mean-centric gap: largest improvement of any `p_i` against the centroid of `p`.
pub fn mce_gap(game: &Game, part: &Partition, p: &JointMixedStrategy) -> Result<f64> {
    p.conforms(game)?;
    let p_bar = centroid(part, p)?;
    Ok(max_or_zero(regrets(game, p, &p_bar)?))
}

/// Largest sup-norm distance between strategies of players in the same class.
pub fn class_asymmetry(part: &Partition, p: &JointMixedStrategy) -> f64 {
    let mut worst: f64 = 0.0;
    for class in part.classes() {
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[a + 1..] {
                let d = p[i]
                    .as_slice()
                    .iter()
                    .zip(p[j].as_slice())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(d);
            }
        }
    }
    worst
}

/// Symmetric-Nash gap: `max(ne_gap(p), class asymmetry of p)`.
pub fn sne_gap(game: &Game, part: &Partition, p: &JointMixedStrategy) -> Result<f64> {
    let ne = ne_gap(game, p)?;
    Ok(ne.max(class_asymmetry(part, p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching() -> Game {
        Game::new(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn joint(v: Vec<Vec<f64>>) -> JointMixedStrategy {
        JointMixedStrategy::from_vecs(v).unwrap()
    }

    fn one_class() -> Partition {
        Partition::new(vec![vec![0, 1]], 2).unwrap()
    }

    #[test]
    fn best_response_values() {
        let g = matching();
        let b = joint(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(best_response_value(&g, 0, &b).unwrap(), 1.0);
        let b = joint(vec![vec![0.0, 1.0], vec![0.5, 0.5]]);
        assert_eq!(best_response_value(&g, 0, &b).unwrap(), 0.5);
        assert!(best_response_value(&g, 5, &b).is_err());
    }

    #[test]
    fn epsilon_best_response_sets() {
        let g = matching();
        let b = joint(vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        let q = |eps| BestResponseQuery::new(0, b.clone(), eps).unwrap();
        assert_eq!(epsilon_br_actions(&g, &q(0.0)).unwrap(), vec![0]);
        assert_eq!(epsilon_br_actions(&g, &q(1.0)).unwrap(), vec![0, 1]);
        let half = JointMixedStrategy::uniform(&g);
        let q = BestResponseQuery::new(0, half, 0.0).unwrap();
        assert_eq!(epsilon_br_actions(&g, &q).unwrap(), vec![0, 1]);
    }

    #[test]
    fn query_validation() {
        let b = JointMixedStrategy::uniform(&matching());
        assert!(BestResponseQuery::new(0, b.clone(), -0.1).is_err());
        assert!(BestResponseQuery::with_tie_tolerance(0, b, 0.0, 0.0).is_err());
    }

    #[test]
    fn ne_gap_examples() {
        let g = matching();
        assert_eq!(ne_gap(&g, &joint(vec![vec![1.0, 0.0], vec![1.0, 0.0]])).unwrap(), 0.0);
        assert_eq!(ne_gap(&g, &joint(vec![vec![1.0, 0.0], vec![0.0, 1.0]])).unwrap(), 1.0);
        assert_eq!(ne_gap(&g, &JointMixedStrategy::uniform(&g)).unwrap(), 0.0);
    }

    #[test]
    fn mce_gap_examples() {
        let g = matching();
        let part = one_class();
        assert_eq!(
            mce_gap(&g, &part, &joint(vec![vec![1.0, 0.0], vec![1.0, 0.0]])).unwrap(),
            0.0
        );
        // An MCE that is not a Nash equilibrium.
        let anti = joint(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(mce_gap(&g, &part, &anti).unwrap(), 0.0);
        assert_eq!(ne_gap(&g, &anti).unwrap(), 1.0);
        // pbar = (0.55, 0.45): action 0 worth 0.55; player 1 plays mostly action 1.
        let p = joint(vec![vec![0.9, 0.1], vec![0.2, 0.8]]);
        let gap = mce_gap(&g, &part, &p).unwrap();
        assert!((gap - (0.55 - (0.2 * 0.55 + 0.8 * 0.45))).abs() < 1e-15);
        assert!(gap > 0.0);
    }

    #[test]
    fn sne_gap_examples() {
        let g = matching();
        let part = one_class();
        assert_eq!(sne_gap(&g, &part, &JointMixedStrategy::uniform(&g)).unwrap(), 0.0);
        assert_eq!(
            sne_gap(&g, &part, &joint(vec![vec![1.0, 0.0], vec![0.0, 1.0]])).unwrap(),
            1.0
        );
        assert_eq!(
            sne_gap(&g, &part, &joint(vec![vec![1.0, 0.0], vec![1.0, 0.0]])).unwrap(),
            0.0
        );
    }
}
