//! Drives a learning process for a fixed number of iterations and records gaps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    default_lyapunov_constant, ecfp_step, euler_flow_step, fp_step, ProcessState, Selection,
};
use crate::equilibrium::{mce_gap, ne_gap, sne_gap};
use crate::error::{Error, Result};
use crate::game::{mixed_utility, Game, JointMixedStrategy};
use crate::partition::{centroid, centroid_response_utility, Partition};
use crate::rng::{derive_stream, PlayerStreams};
use crate::schedule::{EpsilonSchedule, StepSizeSchedule};
use crate::trace::{Trace, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Fp,
    #[default]
    Ecfp,
    Euler,
}

/// How `a(1)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialAction {
    /// Every player starts with action 0.
    #[default]
    Zero,
    /// Each player draws a uniform pure action from the seeded stream.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub gamma: StepSizeSchedule,
    pub epsilon: EpsilonSchedule,
    pub selection: Selection,
    pub seed: u64,
    /// Number of iterates `t = 1..=iterations`; `iterations - 1` steps are taken.
    pub iterations: u64,
    pub record_every: u64,
    pub initial: InitialAction,
    pub euler_h: f64,
    /// Overrides the default `n^2 (max u - min u)` Lyapunov slack constant.
    pub euler_slack: Option<f64>,
}

impl Default for ProcessSpec {
    fn default() -> Self {
        Self {
            kind: ProcessKind::Ecfp,
            gamma: StepSizeSchedule::Classical,
            epsilon: EpsilonSchedule::Zero,
            selection: Selection::Exact,
            seed: 0,
            iterations: 1000,
            record_every: 1,
            initial: InitialAction::Zero,
            euler_h: 1e-3,
            euler_slack: None,
        }
    }
}

pub fn initial_action(game: &Game, initial: InitialAction, seed: u64) -> JointMixedStrategy {
    let profile: Vec<usize> = match initial {
        InitialAction::Zero => vec![0; game.players()],
        InitialAction::Random => (0..game.players())
            .map(|i| derive_stream(seed, "initial", i as u64).random_range(0..game.actions(i)))
            .collect(),
    };
    JointMixedStrategy::pure(game, &profile)
}

/// Gap and Lyapunov metrics of a state.
pub fn record_for(
    game: &Game,
    part: &Partition,
    state: &ProcessState,
    gamma: f64,
    epsilon: f64,
) -> Result<TraceRecord> {
    let q_bar = centroid(part, &state.q)?;
    Ok(TraceRecord {
        t: state.t,
        gamma,
        epsilon,
        ne_gap: ne_gap(game, &state.q)?,
        mce_gap: mce_gap(game, part, &state.q)?,
        sne_gap: sne_gap(game, part, &q_bar)?,
        lyapunov_w: mixed_utility(game, &q_bar)?,
        lyapunov_v: centroid_response_utility(game, &state.q, &q_bar)?,
    })
}

/// A running process that can be stepped and inspected.
pub struct Simulation<'a> {
    game: &'a Game,
    part: &'a Partition,
    spec: ProcessSpec,
    state: ProcessState,
    rngs: PlayerStreams,
    lyapunov_k: f64,
}

impl<'a> Simulation<'a> {
    pub fn new(game: &'a Game, part: &'a Partition, spec: ProcessSpec) -> Result<Self> {
        let a1 = initial_action(game, spec.initial, spec.seed);
        Self::with_initial_action(game, part, spec, a1)
    }

    pub fn with_initial_action(
        game: &'a Game,
        part: &'a Partition,
        spec: ProcessSpec,
        a1: JointMixedStrategy,
    ) -> Result<Self> {
        a1.conforms(game)?;
        if part.players() != game.players() {
            return Err(Error::invalid("partition and game disagree on the player count"));
        }
        let state = match spec.kind {
            ProcessKind::Fp => ProcessState::initial(&Partition::singletons(game.players()), a1)?,
            _ => ProcessState::initial(part, a1)?,
        };
        Ok(Self {
            game,
            part,
            rngs: PlayerStreams::new(spec.seed, "select", game.players()),
            lyapunov_k: spec.euler_slack.unwrap_or_else(|| default_lyapunov_constant(game)),
            spec,
            state,
        })
    }

    pub fn state(&self) -> &ProcessState {
        &self.state
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    /// `(gamma, epsilon)` that the next step will use.
    pub fn current_rates(&self) -> (f64, f64) {
        match self.spec.kind {
            ProcessKind::Euler => (self.spec.euler_h, 0.0),
            _ => (
                self.spec.gamma.gamma_at(self.state.t),
                self.spec.epsilon.epsilon_at(self.state.t),
            ),
        }
    }

    pub fn record(&self) -> Result<TraceRecord> {
        let (g, e) = self.current_rates();
        record_for(self.game, self.part, &self.state, g, e)
    }

    pub fn step(&mut self) -> Result<()> {
        let (game, part, s) = (self.game, self.part, &self.spec);
        let next = match s.kind {
            ProcessKind::Fp => fp_step(
                game,
                &self.state,
                &s.gamma,
                &s.epsilon,
                s.selection,
                &mut self.rngs,
            )?,
            ProcessKind::Ecfp => ecfp_step(
                game,
                part,
                &self.state,
                &s.gamma,
                &s.epsilon,
                s.selection,
                &mut self.rngs,
            )?,
            ProcessKind::Euler => {
                let next = euler_flow_step(game, part, &self.state, s.euler_h)?;
                let w0 = mixed_utility(game, &self.state.q_bar)?;
                let w1 = mixed_utility(game, &next.q_bar)?;
                let allowed = self.lyapunov_k * s.euler_h * s.euler_h;
                if w0 - w1 > allowed {
                    return Err(Error::InternalConsistency(format!(
                        "U(qbar) fell by {} at t = {}, more than K h^2 = {allowed}",
                        w0 - w1,
                        next.t
                    )));
                }
                next
            }
        };
        self.state = next;
        Ok(())
    }

    fn due(&self) -> bool {
        let t = self.state.t;
        (t - 1).is_multiple_of(self.spec.record_every) || t == self.spec.iterations
    }

    /// Runs to `spec.iterations`, recording every `record_every` iterates and the last one.
    ///
    /// A failing step ends the run; the trace keeps what was recorded and
    /// carries the error message.
    pub fn run(mut self) -> Trace {
        let mut trace = Trace::default();
        if self.spec.iterations == 0 || self.spec.record_every == 0 {
            trace.error = Some("iterations and record_every must be >= 1".into());
            return trace;
        }
        loop {
            if self.due() {
                match self.record() {
                    Ok(r) => trace.records.push(r),
                    Err(e) => {
                        trace.error = Some(e.to_string());
                        return trace;
                    }
                }
            }
            if self.state.t >= self.spec.iterations {
                return trace;
            }
            if let Err(e) = self.step() {
                trace.error = Some(e.to_string());
                return trace;
            }
        }
    }
}

/// Convenience wrapper around [`Simulation::run`].
pub fn simulate(game: &Game, part: &Partition, spec: &ProcessSpec) -> Result<Trace> {
    Ok(Simulation::new(game, part, spec.clone())?.run())
}
