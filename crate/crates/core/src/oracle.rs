//! Reference implementations used to cross-check the fast code paths.
//!
//! Everything here is written as plain nested enumeration over joint pure
//! profiles and shares no evaluation code with [`crate::game`],
//! [`crate::equilibrium`] or [`crate::partition`]. They are slow on purpose.

use crate::error::{Error, Result};
use crate::game::{Game, JointMixedStrategy};

fn flat_index(counts: &[usize], profile: &[usize]) -> usize {
    let mut idx = 0;
    for (m, a) in counts.iter().zip(profile) {
        idx = idx * m + a;
    }
    idx
}

fn next_profile(counts: &[usize], profile: &mut [usize]) -> bool {
    for k in (0..counts.len()).rev() {
        profile[k] += 1;
        if profile[k] < counts[k] {
            return true;
        }
        profile[k] = 0;
    }
    false
}

/// `sum_y u(y) prod_i p_i(y_i)` by visiting every joint profile.
pub fn brute_force_mixed_utility(game: &Game, p: &JointMixedStrategy) -> Result<f64> {
    let counts = game.action_counts();
    if p.strategies.len() != counts.len() {
        return Err(Error::invalid("player count mismatch"));
    }
    for (i, (s, &m)) in p.strategies.iter().zip(counts).enumerate() {
        if s.len() != m {
            return Err(Error::invalid(format!("player {i}: wrong strategy length")));
        }
    }
    let u = game.utility();
    let mut profile = vec![0usize; counts.len()];
    let mut total = 0.0;
    loop {
        let mut weight = 1.0;
        for (i, &a) in profile.iter().enumerate() {
            weight *= p.strategies[i].as_slice()[a];
        }
        total += u[flat_index(counts, &profile)] * weight;
        if !next_profile(counts, &mut profile) {
            break;
        }
    }
    Ok(total)
}

/// Best pure-deviation value for player `i`, by evaluating every vertex.
pub fn brute_force_best_response_value(
    game: &Game,
    i: usize,
    belief: &JointMixedStrategy,
) -> Result<f64> {
    let m = *game
        .action_counts()
        .get(i)
        .ok_or_else(|| Error::invalid("player out of range"))?;
    let mut best = f64::NEG_INFINITY;
    for a in 0..m {
        let mut dev = belief.clone();
        let mut v = vec![0.0; m];
        v[a] = 1.0;
        dev.strategies[i] = crate::game::MixedStrategy::new(v)?;
        best = best.max(brute_force_mixed_utility(game, &dev)?);
    }
    Ok(best)
}

/// Whether `classes` is a permutation-invariant partition of `game`'s players,
/// by re-enumerating every profile and every swap of two class members.
pub fn brute_force_partition_valid(game: &Game, classes: &[Vec<usize>]) -> bool {
    let counts = game.action_counts();
    let n = counts.len();
    let mut seen = vec![0usize; n];
    for class in classes {
        for &i in class {
            if i >= n {
                return false;
            }
            seen[i] += 1;
        }
    }
    if seen.iter().any(|&c| c != 1) {
        return false;
    }
    let u = game.utility();
    for class in classes {
        for &i in class {
            for &j in class {
                if i == j {
                    continue;
                }
                if counts[i] != counts[j] {
                    return false;
                }
                let mut y = vec![0usize; n];
                loop {
                    let mut z = y.clone();
                    z.swap(i, j);
                    if u[flat_index(counts, &y)] != u[flat_index(counts, &z)] {
                        return false;
                    }
                    if !next_profile(counts, &mut y) {
                        break;
                    }
                }
            }
        }
    }
    true
}
