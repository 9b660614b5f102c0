//! Fictitious play, empirical centroid fictitious play and their continuous-time flow.
//!
//! Both discrete processes update the empirical distribution as
//! `q(t+1) = q(t) + gamma_t (a(t+1) - q(t))`. In FP each player best-responds
//! to the others' empirical distributions; in ECFP each player best-responds
//! to the class centroids `qbar(t)`. The centroid is carried along by the same
//! recursion applied to the class-averaged action, and every step checks it
//! against a fresh centroid of `q(t+1)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{payoff_vector, Game, JointMixedStrategy, MixedStrategy};
use crate::partition::{centroid, Partition, BR_SLACK};
use crate::rng::PlayerStreams;
use crate::schedule::{EpsilonSchedule, StepSizeSchedule};

/// Allowed drift between the incrementally updated and recomputed centroid.
pub const CENTROID_DRIFT_TOL: f64 = 1e-9;

/// How a player picks among epsilon-best responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Lowest-index exact maximizer; ignores epsilon.
    #[default]
    Exact,
    /// A pure action drawn uniformly from the epsilon-best responses.
    UniformEps,
    /// Equal-weight mixture of all epsilon-best pure responses.
    MixedEps,
}

/// Empirical distribution, its centroid and the last joint action at iteration `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessState {
    pub t: u64,
    pub q: JointMixedStrategy,
    pub q_bar: JointMixedStrategy,
    pub last_action: JointMixedStrategy,
}

impl ProcessState {
    /// State at `t = 1`, where `q(1) = a(1)`.
    pub fn initial(part: &Partition, a1: JointMixedStrategy) -> Result<Self> {
        let q_bar = centroid(part, &a1)?;
        Ok(Self {
            t: 1,
            q: a1.clone(),
            q_bar,
            last_action: a1,
        })
    }

    /// Largest entrywise gap between the carried centroid and a fresh one.
    pub fn centroid_drift(&self, part: &Partition) -> Result<f64> {
        Ok(centroid(part, &self.q)?.max_abs_diff(&self.q_bar))
    }
}

fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (a, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = a;
        }
    }
    best
}

fn select_for_player(
    pv: &[f64],
    eps: f64,
    selection: Selection,
    rng: &mut impl Rng,
) -> MixedStrategy {
    let m = pv.len();
    let best_action = argmax_first(pv);
    if selection == Selection::Exact {
        return MixedStrategy::pure(m, best_action);
    }
    let threshold = pv[best_action] - eps;
    let candidates: Vec<usize> = (0..m).filter(|&a| pv[a] >= threshold).collect();
    match selection {
        Selection::UniformEps => {
            let pick = candidates[rng.random_range(0..candidates.len())];
            MixedStrategy::pure(m, pick)
        }
        Selection::MixedEps => {
            let w = 1.0 / candidates.len() as f64;
            let mut v = vec![0.0; m];
            for a in candidates {
                v[a] = w;
            }
            MixedStrategy::from_vec_unchecked(v)
        }
        Selection::Exact => unreachable!(),
    }
}

/// Picks `a_i` in player i's `eps`-best responses to `belief_{-i}` for every player.
///
/// Each choice is re-verified against the payoff vector before returning.
pub fn select_action(
    game: &Game,
    belief: &JointMixedStrategy,
    eps: f64,
    selection: Selection,
    rngs: &mut PlayerStreams,
) -> Result<JointMixedStrategy> {
    if !(eps >= 0.0) {
        return Err(Error::invalid(format!("eps must be >= 0, got {eps}")));
    }
    let mut actions = Vec::with_capacity(game.players());
    for i in 0..game.players() {
        let pv = payoff_vector(game, i, belief)?;
        let a = select_for_player(&pv, eps, selection, rngs.player(i));
        let best = pv[argmax_first(&pv)];
        let got = a.dot(&pv);
        if got < best - eps - BR_SLACK {
            return Err(Error::InternalConsistency(format!(
                "player {i}: selected action earns {got}, below best {best} - eps {eps}"
            )));
        }
        actions.push(a);
    }
    Ok(JointMixedStrategy::new(actions))
}

fn convex_step(q: &JointMixedStrategy, target: &JointMixedStrategy, gamma: f64) -> JointMixedStrategy {
    JointMixedStrategy::new(
        q.iter()
            .zip(target.iter())
            .map(|(qi, ai)| {
                MixedStrategy::from_vec_unchecked(
                    qi.as_slice()
                        .iter()
                        .zip(ai.as_slice())
                        .map(|(x, a)| x + gamma * (a - x))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn check_simplex(label: &str, p: &JointMixedStrategy, t: u64) -> Result<()> {
    for (i, s) in p.iter().enumerate() {
        if !s.is_valid() {
            return Err(Error::InternalConsistency(format!(
                "{label} of player {i} left the simplex at t = {t}: {:?}",
                s.as_slice()
            )));
        }
    }
    Ok(())
}

/// Moves `state` toward `action` (and `qbar` toward its centroid) with step `gamma`.
fn advance_with(
    part: &Partition,
    state: &ProcessState,
    action: JointMixedStrategy,
    gamma: f64,
) -> Result<ProcessState> {
    let q = convex_step(&state.q, &action, gamma);
    let a_bar = centroid(part, &action)?;
    let q_bar = convex_step(&state.q_bar, &a_bar, gamma);
    let next = ProcessState {
        t: state.t + 1,
        q,
        q_bar,
        last_action: action,
    };
    check_simplex("empirical distribution", &next.q, next.t)?;
    let drift = next.centroid_drift(part)?;
    if drift > CENTROID_DRIFT_TOL {
        return Err(Error::InternalConsistency(format!(
            "centroid recursion drifted by {drift} at t = {}",
            next.t
        )));
    }
    Ok(next)
}

/// One ECFP iteration: `a(t+1)` is an `eps_t`-best response to `qbar(t)`.
pub fn ecfp_step(
    game: &Game,
    part: &Partition,
    state: &ProcessState,
    gamma_s: &StepSizeSchedule,
    eps_s: &EpsilonSchedule,
    selection: Selection,
    rngs: &mut PlayerStreams,
) -> Result<ProcessState> {
    let t = state.t;
    let action = select_action(game, &state.q_bar, eps_s.epsilon_at(t), selection, rngs)?;
    advance_with(part, state, action, gamma_s.gamma_at(t))
}

/// One FP iteration: `a(t+1)` is an `eps_t`-best response to `q(t)` itself.
///
/// The state's centroid field mirrors `q`.
pub fn fp_step(
    game: &Game,
    state: &ProcessState,
    gamma_s: &StepSizeSchedule,
    eps_s: &EpsilonSchedule,
    selection: Selection,
    rngs: &mut PlayerStreams,
) -> Result<ProcessState> {
    let t = state.t;
    let action = select_action(game, &state.q, eps_s.epsilon_at(t), selection, rngs)?;
    let q = convex_step(&state.q, &action, gamma_s.gamma_at(t));
    let next = ProcessState {
        t: t + 1,
        q_bar: q.clone(),
        q,
        last_action: action,
    };
    check_simplex("empirical distribution", &next.q, next.t)?;
    Ok(next)
}

/// Default constant `K` in the per-step Lyapunov bound `w(t+h) >= w(t) - K h^2`:
/// `n^2 (max u - min u)`.
pub fn default_lyapunov_constant(game: &Game) -> f64 {
    let n = game.players() as f64;
    n * n * game.utility_range()
}

/// Explicit Euler step of `dq/dt in BR(qbar) - q` with exact best responses.
pub fn euler_flow_step(
    game: &Game,
    part: &Partition,
    state: &ProcessState,
    h: f64,
) -> Result<ProcessState> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::invalid(format!("Euler step h must lie in (0, 1], got {h}")));
    }
    let mut action = Vec::with_capacity(game.players());
    for i in 0..game.players() {
        let pv = payoff_vector(game, i, &state.q_bar)?;
        action.push(MixedStrategy::pure(pv.len(), argmax_first(&pv)));
    }
    advance_with(part, state, JointMixedStrategy::new(action), h)
}
