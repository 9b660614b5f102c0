//! Finite identical-interest normal-form games and their mixed extension.
//!
//! A [`Game`] stores one utility tensor shared by every player, laid out
//! row-major over players in index order (the last player's action varies
//! fastest). Mixed utilities are exact sums over every joint pure profile,
//! taken in that row-major order.

use std::ops::Index;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of joint pure profiles a game may have.
pub const DEFAULT_PROFILE_CAP: usize = 10_000_000;

/// Entries below zero by at most this much are accepted as rounding noise.
pub const SIMPLEX_NEG_TOL: f64 = 1e-12;
/// Allowed deviation of a strategy's total mass from one.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    action_counts: Vec<usize>,
    utility: Vec<f64>,
    // strides[i] = product of action counts of players after i
    strides: Vec<usize>,
}

impl Game {
    pub fn new(action_counts: Vec<usize>, utility: Vec<f64>) -> Result<Self> {
        Self::with_cap(action_counts, utility, DEFAULT_PROFILE_CAP)
    }

    pub fn with_cap(action_counts: Vec<usize>, utility: Vec<f64>, cap: usize) -> Result<Self> {
        let n = action_counts.len();
        if n < 2 {
            return Err(Error::invalid(format!(
                "a game needs at least 2 players, got {n}"
            )));
        }
        if let Some(i) = action_counts.iter().position(|&m| m == 0) {
            return Err(Error::invalid(format!("player {i} has no actions")));
        }
        let total = profile_count_checked(&action_counts, cap)?;
        if utility.len() != total {
            return Err(Error::invalid(format!(
                "utility tensor has {} entries, expected {total}",
                utility.len()
            )));
        }
        if let Some(k) = utility.iter().position(|u| !u.is_finite()) {
            return Err(Error::invalid(format!("utility entry {k} is not finite")));
        }
        let mut strides = vec![1; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * action_counts[i + 1];
        }
        Ok(Self {
            action_counts,
            utility,
            strides,
        })
    }

    pub fn players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn actions(&self, player: usize) -> usize {
        self.action_counts[player]
    }

    pub fn utility(&self) -> &[f64] {
        &self.utility
    }

    pub fn profile_count(&self) -> usize {
        self.utility.len()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Flat tensor index of a joint pure profile.
    pub fn index_of(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.players());
        profile
            .iter()
            .zip(&self.strides)
            .map(|(&a, &s)| a * s)
            .sum()
    }

    /// Inverse of [`Game::index_of`].
    pub fn profile_of(&self, mut index: usize) -> Vec<usize> {
        let mut profile = vec![0; self.players()];
        for (slot, &s) in profile.iter_mut().zip(&self.strides) {
            *slot = index / s;
            index %= s;
        }
        profile
    }

    pub fn utility_at(&self, profile: &[usize]) -> f64 {
        self.utility[self.index_of(profile)]
    }

    /// `(min u, max u)` over all joint profiles.
    pub fn utility_bounds(&self) -> (f64, f64) {
        self.utility
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| {
                (lo.min(u), hi.max(u))
            })
    }

    /// `max u - min u`.
    pub fn utility_range(&self) -> f64 {
        let (lo, hi) = self.utility_bounds();
        hi - lo
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: GameFile = crate::json::from_str(s)?;
        file.into_game()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_file(&self) -> GameFile {
        GameFile {
            players: self.players(),
            actions: self.action_counts.clone(),
            utility: self.utility.clone(),
        }
    }
}

fn profile_count_checked(action_counts: &[usize], cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for &m in action_counts {
        total = total
            .checked_mul(m)
            .filter(|&t| t <= cap)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "joint profile count of {action_counts:?} exceeds the cap of {cap}"
                ))
            })?;
    }
    Ok(total)
}

/// On-disk game schema: `{"players": n, "actions": [m_1, ...], "utility": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub actions: Vec<usize>,
    pub utility: Vec<f64>,
}

impl GameFile {
    pub fn into_game(self) -> Result<Game> {
        if self.players != self.actions.len() {
            return Err(Error::invalid(format!(
                "\"players\" is {} but \"actions\" lists {} players",
                self.players,
                self.actions.len()
            )));
        }
        Game::new(self.actions, self.utility)
    }
}

/// A point of one player's probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        check_simplex(&probabilities)?;
        Ok(Self(probabilities))
    }

    /// Wraps a vector produced by a convex update of valid strategies.
    pub(crate) fn from_vec_unchecked(probabilities: Vec<f64>) -> Self {
        Self(probabilities)
    }

    pub fn pure(actions: usize, action: usize) -> Self {
        let mut v = vec![0.0; actions];
        v[action] = 1.0;
        Self(v)
    }

    pub fn uniform(actions: usize) -> Self {
        Self(vec![1.0 / actions as f64; actions])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        check_simplex(&self.0).is_ok()
    }

    pub fn dot(&self, values: &[f64]) -> f64 {
        self.0.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.0
    }
}

impl Index<usize> for MixedStrategy {
    type Output = f64;

    fn index(&self, a: usize) -> &f64 {
        &self.0[a]
    }
}

fn check_simplex(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::invalid("mixed strategy is empty"));
    }
    if let Some(k) = p.iter().position(|x| !x.is_finite() || *x < -SIMPLEX_NEG_TOL) {
        return Err(Error::invalid(format!(
            "mixed strategy entry {k} = {} is negative or not finite",
            p[k]
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
        return Err(Error::invalid(format!(
            "mixed strategy sums to {sum}, not 1"
        )));
    }
    Ok(())
}

/// One mixed strategy per player, indexed by player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointMixedStrategy {
    pub strategies: Vec<MixedStrategy>,
}

impl JointMixedStrategy {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        Self { strategies }
    }

    pub fn from_vecs(vecs: Vec<Vec<f64>>) -> Result<Self> {
        let strategies = vecs
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                MixedStrategy::new(v).map_err(|e| Error::invalid(format!("player {i}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { strategies })
    }

    /// Every player plays the given pure action.
    pub fn pure(game: &Game, profile: &[usize]) -> Self {
        Self::new(
            game.action_counts()
                .iter()
                .zip(profile)
                .map(|(&m, &a)| MixedStrategy::pure(m, a))
                .collect(),
        )
    }

    pub fn uniform(game: &Game) -> Self {
        Self::new(
            game.action_counts()
                .iter()
                .map(|&m| MixedStrategy::uniform(m))
                .collect(),
        )
    }

    pub fn players(&self) -> usize {
        self.strategies.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MixedStrategy> {
        self.strategies.iter()
    }

    /// Checks that the profile has one strategy of the right length per player.
    pub fn conforms(&self, game: &Game) -> Result<()> {
        if self.players() != game.players() {
            return Err(Error::invalid(format!(
                "joint strategy has {} players, game has {}",
                self.players(),
                game.players()
            )));
        }
        for (i, (s, &m)) in self.strategies.iter().zip(game.action_counts()).enumerate() {
            if s.len() != m {
                return Err(Error::invalid(format!(
                    "player {i}: strategy has {} entries, game has {m} actions",
                    s.len()
                )));
            }
        }
        Ok(())
    }

    /// Entrywise `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Self {
        Self::new(
            self.strategies
                .iter()
                .zip(&other.strategies)
                .map(|(a, b)| {
                    MixedStrategy::from_vec_unchecked(
                        a.0.iter()
                            .zip(&b.0)
                            .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Copy of `self` with player `i`'s strategy replaced.
    pub fn with_player(&self, i: usize, s: MixedStrategy) -> Self {
        let mut out = self.clone();
        out.strategies[i] = s;
        out
    }

    /// Largest absolute entrywise difference between two profiles.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.strategies
            .iter()
            .zip(&other.strategies)
            .flat_map(|(a, b)| a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.strategies.iter().map(|s| s.0.clone()).collect()
    }
}

impl Index<usize> for JointMixedStrategy {
    type Output = MixedStrategy;

    fn index(&self, i: usize) -> &MixedStrategy {
        &self.strategies[i]
    }
}

/// Visits the joint pure profiles in row-major order, one block per setting
/// of the leading players (all but the last). The callback gets the flat
/// index of the block's first profile, the leading players' actions and
/// their weight `prod_j p_j(y_j)` over leading players `j != skip`.
///
/// Weights are left-to-right products in player order; prefix products are
/// cached so only the factors after the changed digit are recomputed.
fn for_each_block(
    game: &Game,
    p: &JointMixedStrategy,
    skip: Option<usize>,
    mut visit: impl FnMut(usize, &[usize], f64),
) {
    let counts = game.action_counts();
    let head = counts.len() - 1;
    let block = counts[head];
    let mut profile = vec![0usize; head];
    let mut prefix = vec![0.0; head];
    let mut from = 0;
    for base in (0..game.profile_count()).step_by(block) {
        for j in from..head {
            let before = if j == 0 { 1.0 } else { prefix[j - 1] };
            prefix[j] = if Some(j) == skip {
                before
            } else {
                before * p[j].as_slice()[profile[j]]
            };
        }
        visit(base, &profile, prefix[head - 1]);
        let mut j = head;
        while j > 0 {
            j -= 1;
            profile[j] += 1;
            if profile[j] < counts[j] {
                break;
            }
            profile[j] = 0;
        }
        from = j;
    }
}

/// Expected utility `U(p) = sum_y u(y) prod_i p_i(y_i)` under independent play,
/// by enumeration of every joint pure profile.
pub fn mixed_utility(game: &Game, p: &JointMixedStrategy) -> Result<f64> {
    p.conforms(game)?;
    let u = game.utility();
    let last = p[game.players() - 1].as_slice();
    let mut total = 0.0;
    for_each_block(game, p, None, |base, _, w| {
        for (a, &x) in last.iter().enumerate() {
            total += u[base + a] * (w * x);
        }
    });
    Ok(total)
}

/// Utility of each pure action of player `i` against the others' strategies in `p`.
///
/// Entry `a` is `U(e_a, p_{-i})`; player `i`'s own entry of `p` is ignored.
pub fn payoff_vector(game: &Game, i: usize, p: &JointMixedStrategy) -> Result<Vec<f64>> {
    let n = game.players();
    if i >= n {
        return Err(Error::invalid(format!(
            "player index {i} out of range for a {n}-player game"
        )));
    }
    p.conforms(game)?;
    let u = game.utility();
    let mut out = vec![0.0; game.actions(i)];
    if i == n - 1 {
        for_each_block(game, p, None, |base, _, w| {
            for (a, slot) in out.iter_mut().enumerate() {
                *slot += u[base + a] * w;
            }
        });
    } else {
        let last = p[n - 1].as_slice();
        for_each_block(game, p, Some(i), |base, y, w| {
            let slot = &mut out[y[i]];
            for (a, &x) in last.iter().enumerate() {
                *slot += u[base + a] * (w * x);
            }
        });
    }
    Ok(out)
}

/// `U(s, p_{-i})`: player `i` plays `s`, everyone else follows `p`.
pub fn deviation_utility(
    game: &Game,
    i: usize,
    s: &MixedStrategy,
    p: &JointMixedStrategy,
) -> Result<f64> {
    let pv = payoff_vector(game, i, p)?;
    if s.len() != pv.len() {
        return Err(Error::invalid(format!(
            "player {i}: strategy has {} entries, game has {} actions",
            s.len(),
            pv.len()
        )));
    }
    Ok(s.dot(&pv))
}
