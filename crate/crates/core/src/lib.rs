//! Empirical centroid fictitious play (ECFP) and classical fictitious play
//! in finite identical-interest games.
//!
//! Players are grouped into permutation-invariant classes; in ECFP each
//! player best-responds to the class averages (centroids) of the empirical
//! distributions rather than to every opponent individually. The crate
//! provides exact utility evaluation, partition validation, equilibrium
//! gaps, the discrete-time processes with general step sizes and
//! epsilon-perturbed best responses, an Euler discretization of the
//! continuous-time flow, and an experiment harness that writes gap traces.

pub mod config;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod generate;
pub mod json;
pub mod lemmas;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod runner;
pub mod sample;
pub mod schedule;
pub mod summary;
pub mod trace;

pub use config::{load_config, run_process, Experiment, ExperimentConfig};
pub use dynamics::{ecfp_step, euler_flow_step, fp_step, select_action, ProcessState, Selection};
pub use equilibrium::{
    best_response_value, epsilon_br_actions, mce_gap, ne_gap, sne_gap, BestResponseQuery,
};
pub use error::{Error, Result};
pub use game::{mixed_utility, payoff_vector, Game, JointMixedStrategy, MixedStrategy};
pub use generate::{generate_game, GeneratorKind, GeneratorSpec};
pub use partition::{
    centroid, check_permutation_br, check_rearrangement, validate_partition, Partition,
    PartitionValidationReport,
};
pub use runner::{simulate, ProcessKind, ProcessSpec, Simulation};
pub use schedule::{EpsilonSchedule, StepSizeSchedule};
pub use summary::{summarize, ConvergenceReport, Thresholds};
pub use trace::{emit_trace, Trace, TraceFormat, TraceRecord};
