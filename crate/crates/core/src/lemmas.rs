//! Randomized checks of the three centroid identities ECFP relies on.
//!
//! 1. Rearrangement: `(1/n) sum_i U(p_i, pbar_{-i}) = U(pbar)`.
//! 2. Averaging within classes preserves epsilon-best responses to a centroid.
//! 3. The centroid of the empirical distribution obeys the same recursion as
//!    the distribution itself, driven by the class-averaged action.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ecfp_step, ProcessState, Selection, CENTROID_DRIFT_TOL};
use crate::error::Result;
use crate::game::{Game, JointMixedStrategy};
use crate::partition::{
    centroid, check_permutation_br, check_rearrangement, is_eps_best_response_profile, Partition,
};
use crate::rng::{derive_stream, PlayerStreams};
use crate::sample::{eps_best_response_member, random_joint};
use crate::schedule::{EpsilonSchedule, StepSizeSchedule};

pub const REARRANGEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteOptions {
    /// Random strategy profiles for the rearrangement and best-response checks.
    pub trials: usize,
    /// Number of ECFP trajectories for the centroid-recursion check.
    pub trajectories: usize,
    pub trajectory_steps: u64,
    pub seed: u64,
}

impl Default for LemmaSuiteOptions {
    fn default() -> Self {
        Self {
            trials: 1000,
            trajectories: 1,
            trajectory_steps: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub trials: usize,
    pub rearrangement_max_residual: f64,
    pub rearrangement_failures: usize,
    /// Trials whose best-response hypothesis held after construction.
    pub br_hypothesis_established: usize,
    pub br_failures: usize,
    pub trajectories: usize,
    pub trajectory_steps: u64,
    pub centroid_max_drift: f64,
    pub centroid_failures: usize,
    /// Steps whose class-averaged action was not an epsilon-best response.
    pub averaged_action_failures: usize,
    pub errors: Vec<String>,
}

impl LemmaReport {
    pub fn rearrangement_passed(&self) -> bool {
        self.rearrangement_failures == 0
    }

    pub fn permutation_br_passed(&self) -> bool {
        self.br_failures == 0 && self.br_hypothesis_established == self.trials
    }

    pub fn centroid_recursion_passed(&self) -> bool {
        self.centroid_failures == 0 && self.averaged_action_failures == 0
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty()
            && self.rearrangement_passed()
            && self.permutation_br_passed()
            && self.centroid_recursion_passed()
    }

    /// Folds another report into this one.
    pub fn merge(&mut self, other: LemmaReport) {
        self.trials += other.trials;
        self.rearrangement_max_residual = self
            .rearrangement_max_residual
            .max(other.rearrangement_max_residual);
        self.rearrangement_failures += other.rearrangement_failures;
        self.br_hypothesis_established += other.br_hypothesis_established;
        self.br_failures += other.br_failures;
        self.trajectories += other.trajectories;
        self.trajectory_steps = self.trajectory_steps.max(other.trajectory_steps);
        self.centroid_max_drift = self.centroid_max_drift.max(other.centroid_max_drift);
        self.centroid_failures += other.centroid_failures;
        self.averaged_action_failures += other.averaged_action_failures;
        self.errors.extend(other.errors);
    }
}

/// Runs all three checks on one game and partition.
pub fn run_lemma_suite(game: &Game, part: &Partition, opts: &LemmaSuiteOptions) -> Result<LemmaReport> {
    let mut report = LemmaReport {
        trials: opts.trials,
        trajectories: opts.trajectories,
        trajectory_steps: opts.trajectory_steps,
        ..Default::default()
    };
    let range = game.utility_range();
    for trial in 0..opts.trials {
        let mut rng = derive_stream(opts.seed, "lemma-trial", trial as u64);

        let p = random_joint(&mut rng, game);
        let residual = check_rearrangement(game, part, &p)?;
        report.rearrangement_max_residual = report.rearrangement_max_residual.max(residual);
        if !(residual <= REARRANGEMENT_TOL) {
            report.rearrangement_failures += 1;
        }

        let q = random_joint(&mut rng, game);
        let q_bar = centroid(part, &q)?;
        let eps = match rng.random_range(0..3) {
            0 => 0.0,
            _ => rng.random::<f64>() * range,
        };
        let p = JointMixedStrategy::new(
            (0..game.players())
                .map(|i| eps_best_response_member(&mut rng, game, i, &q_bar, eps))
                .collect::<Result<_>>()?,
        );
        if is_eps_best_response_profile(game, &p, &q_bar, eps)? {
            report.br_hypothesis_established += 1;
            if !check_permutation_br(game, part, &p, &q, eps)? {
                report.br_failures += 1;
            }
        }
    }

    for k in 0..opts.trajectories {
        if let Err(e) = centroid_trajectory(game, part, opts, k as u64, &mut report) {
            report.errors.push(format!("trajectory {k}: {e}"));
        }
    }
    Ok(report)
}

fn centroid_trajectory(
    game: &Game,
    part: &Partition,
    opts: &LemmaSuiteOptions,
    k: u64,
    report: &mut LemmaReport,
) -> Result<()> {
    let mut rng = derive_stream(opts.seed, "lemma-trajectory", k);
    let gamma = StepSizeSchedule::power(0.5 + 0.5 * rng.random::<f64>(), rng.random::<f64>() * 3.0)?;
    let eps_s = EpsilonSchedule::power(rng.random::<f64>() * game.utility_range(), 0.5)?;
    let selection = [Selection::Exact, Selection::UniformEps, Selection::MixedEps][(k % 3) as usize];
    let mut streams = PlayerStreams::new(opts.seed ^ k, "lemma-select", game.players());

    let a1 = JointMixedStrategy::pure(
        game,
        &(0..game.players())
            .map(|i| rng.random_range(0..game.actions(i)))
            .collect::<Vec<_>>(),
    );
    let mut state = ProcessState::initial(part, a1)?;
    for _ in 1..opts.trajectory_steps {
        let eps = eps_s.epsilon_at(state.t);
        let q_bar = state.q_bar.clone();
        state = match ecfp_step(game, part, &state, &gamma, &eps_s, selection, &mut streams) {
            Ok(s) => s,
            Err(e) => {
                report.centroid_failures += 1;
                return Err(e);
            }
        };
        let drift = state.centroid_drift(part)?;
        report.centroid_max_drift = report.centroid_max_drift.max(drift);
        if !(drift <= CENTROID_DRIFT_TOL) {
            report.centroid_failures += 1;
        }
        let a_bar = centroid(part, &state.last_action)?;
        if !is_eps_best_response_profile(game, &a_bar, &q_bar, eps)? {
            report.averaged_action_failures += 1;
        }
    }
    Ok(())
}
