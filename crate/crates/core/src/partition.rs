//! Permutation-invariant partitions of the player set and class centroids.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{payoff_vector, Game, JointMixedStrategy, MixedStrategy};

/// Budget on `profiles x within-class pairs` for the swap-invariance check.
pub const SWAP_CHECK_BUDGET: u128 = 100_000_000;

/// Slack used when comparing best-response inequalities.
pub const BR_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
    // First class listing each player; None if the player is uncovered.
    phi: Vec<Option<usize>>,
}

impl Partition {
    /// Builds a partition of players `0..n`.
    ///
    /// Only index range and non-emptiness are enforced here; overlap, cover
    /// and game-dependent conditions are reported by [`validate_partition`].
    pub fn new(classes: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::invalid("partition has no classes"));
        }
        let mut phi = vec![None; n];
        for (k, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::invalid(format!("class {k} is empty")));
            }
            for &i in class {
                if i >= n {
                    return Err(Error::invalid(format!(
                        "class {k} lists player {i}, but the game has {n} players"
                    )));
                }
                phi[i].get_or_insert(k);
            }
        }
        Ok(Self { classes, phi })
    }

    pub fn singletons(n: usize) -> Self {
        Self::new((0..n).map(|i| vec![i]).collect(), n).expect("singletons are valid")
    }

    /// Consecutive blocks of players with the given sizes.
    pub fn from_class_sizes(sizes: &[usize]) -> Result<Self> {
        let n = sizes.iter().sum();
        let mut start = 0;
        let classes = sizes
            .iter()
            .map(|&s| {
                let c: Vec<usize> = (start..start + s).collect();
                start += s;
                c
            })
            .collect();
        Self::new(classes, n)
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn players(&self) -> usize {
        self.phi.len()
    }

    /// Class index of player `i`.
    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.phi.get(i).copied().flatten()
    }

    pub fn is_singleton(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    pub fn to_file(&self) -> PartitionFile {
        PartitionFile {
            classes: self.classes.clone(),
        }
    }
}

/// On-disk partition schema: `{"classes": [[0, 1], [2]]}` with 0-based players.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub classes: Vec<Vec<usize>>,
}

impl PartitionFile {
    pub fn into_partition(self, n: usize) -> Result<Partition> {
        Partition::new(self.classes, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// (i) classes are pairwise disjoint
    Disjoint,
    /// (ii) classes cover every player
    Cover,
    /// (iii) players in a class have the same action set
    EqualActions,
    /// (iv) utility is invariant under swapping two class members' actions
    SwapInvariance,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::Disjoint => "i",
            Condition::Cover => "ii",
            Condition::EqualActions => "iii",
            Condition::SwapInvariance => "iv",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl PartitionValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn violates(&self, c: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }
}

impl fmt::Display for PartitionValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "partition is permutation-invariant");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "condition {}: {}", v.condition, v.witness)?;
        }
        Ok(())
    }
}

/// Checks conditions (i)-(iv) with exact utility comparison.
pub fn validate_partition(game: &Game, part: &Partition) -> Result<PartitionValidationReport> {
    validate_partition_with_tolerance(game, part, 0.0)
}

/// Like [`validate_partition`], but swapped utilities may differ by up to `tol`.
pub fn validate_partition_with_tolerance(
    game: &Game,
    part: &Partition,
    tol: f64,
) -> Result<PartitionValidationReport> {
    let n = game.players();
    if part.players() != n {
        return Err(Error::invalid(format!(
            "partition is over {} players, game has {n}",
            part.players()
        )));
    }
    let mut violations = Vec::new();

    let mut owner: Vec<Option<usize>> = vec![None; n];
    'disjoint: for (k, class) in part.classes().iter().enumerate() {
        for &i in class {
            if let Some(prev) = owner[i] {
                let witness = if prev == k {
                    format!("player {i} is listed twice in class {k}")
                } else {
                    format!("player {i} belongs to classes {prev} and {k}")
                };
                violations.push(Violation {
                    condition: Condition::Disjoint,
                    witness,
                });
                break 'disjoint;
            }
            owner[i] = Some(k);
        }
    }

    if let Some(i) = owner.iter().position(Option::is_none) {
        violations.push(Violation {
            condition: Condition::Cover,
            witness: format!("player {i} is in no class"),
        });
    }

    let mut pairs = Vec::new();
    let mut unequal = None;
    for (k, class) in part.classes().iter().enumerate() {
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[a + 1..] {
                if i == j {
                    continue;
                }
                if game.actions(i) == game.actions(j) {
                    pairs.push((i, j));
                } else if unequal.is_none() {
                    unequal = Some(format!(
                        "class {k}: player {i} has {} actions, player {j} has {}",
                        game.actions(i),
                        game.actions(j)
                    ));
                }
            }
        }
    }
    if let Some(witness) = unequal {
        violations.push(Violation {
            condition: Condition::EqualActions,
            witness,
        });
    }

    let work = game.profile_count() as u128 * pairs.len() as u128;
    if work > SWAP_CHECK_BUDGET {
        return Err(Error::Resource(format!(
            "swap-invariance check needs {work} comparisons (budget {SWAP_CHECK_BUDGET}); \
             use a smaller game or coarser classes"
        )));
    }
    if let Some(witness) = first_swap_violation(game, &pairs, tol) {
        violations.push(Violation {
            condition: Condition::SwapInvariance,
            witness,
        });
    }

    Ok(PartitionValidationReport::from_violations(violations))
}

fn first_swap_violation(game: &Game, pairs: &[(usize, usize)], tol: f64) -> Option<String> {
    let u = game.utility();
    let strides = game.strides();
    for &(i, j) in pairs {
        let (si, sj) = (strides[i], strides[j]);
        let m = game.actions(i);
        for (k, &uk) in u.iter().enumerate() {
            let yi = (k / si) % m;
            let yj = (k / sj) % m;
            if yi >= yj {
                continue;
            }
            let swapped = k + (yj - yi) * si - (yj - yi) * sj;
            let us = u[swapped];
            let differs = if tol == 0.0 {
                uk != us
            } else {
                (uk - us).abs() > tol
            };
            if differs {
                let y = game.profile_of(k);
                return Some(format!(
                    "swapping players {i} and {j} in profile {y:?} changes utility from {uk} to {us}"
                ));
            }
        }
    }
    None
}

/// Replaces each player's strategy by the average over their class.
///
/// Members are summed in ascending player order and divided once, so players
/// in the same class receive bitwise-identical vectors.
pub fn centroid(part: &Partition, p: &JointMixedStrategy) -> Result<JointMixedStrategy> {
    if p.players() != part.players() {
        return Err(Error::invalid(format!(
            "joint strategy has {} players, partition has {}",
            p.players(),
            part.players()
        )));
    }
    let mut out: Vec<Option<MixedStrategy>> = vec![None; p.players()];
    for (k, class) in part.classes().iter().enumerate() {
        let mut members = class.clone();
        members.sort_unstable();
        members.dedup();
        let m = p[members[0]].len();
        let mut sum = p[members[0]].as_slice().to_vec();
        for &j in &members[1..] {
            let pj = p[j].as_slice();
            if pj.len() != m {
                return Err(Error::invalid(format!(
                    "class {k}: player {j} has {} actions, player {} has {m}",
                    pj.len(),
                    members[0]
                )));
            }
            for (s, x) in sum.iter_mut().zip(pj) {
                *s += x;
            }
        }
        let size = members.len() as f64;
        let avg = MixedStrategy::from_vec_unchecked(sum.into_iter().map(|s| s / size).collect());
        for &j in &members {
            out[j].get_or_insert_with(|| avg.clone());
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::invalid(format!("player {i} is in no class"))))
        .collect::<Result<Vec<_>>>()
        .map(JointMixedStrategy::new)
}

/// `(1/n) sum_i U(p_i, pbar_{-i})`, the average utility against the centroid.
pub fn centroid_response_utility(
    game: &Game,
    p: &JointMixedStrategy,
    p_bar: &JointMixedStrategy,
) -> Result<f64> {
    p.conforms(game)?;
    let n = game.players();
    let mut total = 0.0;
    for i in 0..n {
        total += p[i].dot(&payoff_vector(game, i, p_bar)?);
    }
    Ok(total / n as f64)
}

/// Residual `|(1/n) sum_i U(p_i, pbar_{-i}) - U(pbar)|` of the rearrangement identity.
///
/// Vanishes (to rounding) whenever `part` is permutation-invariant.
pub fn check_rearrangement(game: &Game, part: &Partition, p: &JointMixedStrategy) -> Result<f64> {
    p.conforms(game)?;
    let p_bar = centroid(part, p)?;
    let lhs = centroid_response_utility(game, p, &p_bar)?;
    let rhs = crate::game::mixed_utility(game, &p_bar)?;
    Ok((lhs - rhs).abs())
}

/// Whether every `p_i` is an `eps`-best response to `qbar_{-i}`, where
/// `qbar` is the centroid of `q`.
pub fn is_eps_best_response_profile(
    game: &Game,
    p: &JointMixedStrategy,
    q_bar: &JointMixedStrategy,
    eps: f64,
) -> Result<bool> {
    p.conforms(game)?;
    for i in 0..game.players() {
        let pv = payoff_vector(game, i, q_bar)?;
        let best = pv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if p[i].dot(&pv) < best - eps - BR_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that averaging an `eps`-best response to `qbar` within classes
/// keeps it an `eps`-best response.
///
/// Returns `true` when the hypothesis (every `p_i` is an `eps`-best response
/// to `qbar_{-i}`) fails, since the implication then holds vacuously.
pub fn check_permutation_br(
    game: &Game,
    part: &Partition,
    p: &JointMixedStrategy,
    q: &JointMixedStrategy,
    eps: f64,
) -> Result<bool> {
    if eps < 0.0 || eps.is_nan() {
        return Err(Error::invalid(format!("eps must be >= 0, got {eps}")));
    }
    q.conforms(game)?;
    let q_bar = centroid(part, q)?;
    if !is_eps_best_response_profile(game, p, &q_bar, eps)? {
        return Ok(true);
    }
    let p_bar = centroid(part, p)?;
    is_eps_best_response_profile(game, &p_bar, &q_bar, eps)
}
