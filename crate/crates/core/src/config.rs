//! Experiment configuration: strict JSON schema, validation and resolution.
//!
//! A minimal config only needs a game source and an iteration budget:
//!
//! ```json
//! { "game": { "generator": { "kind": "symmetric_classes", "players": 3,
//!                            "actions": [2, 2, 2], "seed": 1 } },
//!   "iterations": 10000 }
//! ```
//!
//! Defaults: process `ecfp`, classical step sizes, zero epsilon, exact
//! selection with seed 0, `record_every` 1, initial action 0 for everyone,
//! Euler step `1e-3`, partition tolerance 0, gap thresholds 0.05. When no
//! partition is given, generated games use the generator's classes and all
//! other games use singletons.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::Selection;
use crate::error::{ConfigIssue, Error, Result};
use crate::game::{Game, GameFile};
use crate::generate::{generate_game, GeneratorSpec};
use crate::partition::{validate_partition_with_tolerance, Partition, PartitionFile};
use crate::runner::{simulate, InitialAction, ProcessKind, ProcessSpec};
use crate::schedule::{EpsilonSchedule, StepSizeSchedule};
use crate::summary::Thresholds;
use crate::trace::{Trace, TraceFormat};

/// Environment variable that overrides `selection.seed`.
pub const SEED_ENV: &str = "ECFP_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSource {
    Inline(GameFile),
    /// Path to a game JSON file, relative to the config file.
    File(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedules {
    #[serde(default)]
    pub gamma: StepSizeSchedule,
    #[serde(default)]
    pub epsilon: EpsilonSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    #[serde(default)]
    pub mode: Selection,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerConfig {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack_constant: Option<f64>,
}

fn default_h() -> f64 {
    1e-3
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self {
            h: default_h(),
            slack_constant: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    /// Inferred from the extension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<TraceFormat>,
}

impl OutputConfig {
    pub fn resolved_format(&self) -> TraceFormat {
        self.format
            .unwrap_or_else(|| TraceFormat::from_path(&self.path))
    }
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionFile>,
    #[serde(default)]
    pub process: ProcessKind,
    #[serde(default)]
    pub schedules: Schedules,
    #[serde(default)]
    pub selection: SelectionConfig,
    pub iterations: u64,
    #[serde(default = "one")]
    pub record_every: u64,
    #[serde(default)]
    pub initial_action: InitialAction,
    #[serde(default)]
    pub euler: EulerConfig,
    /// Allowed utility difference in the swap-invariance check for loaded games.
    #[serde(default)]
    pub partition_tolerance: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        crate::json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn process_spec(&self) -> ProcessSpec {
        ProcessSpec {
            kind: self.process,
            gamma: self.schedules.gamma,
            epsilon: self.schedules.epsilon,
            selection: self.selection.mode,
            seed: self.selection.seed,
            iterations: self.iterations,
            record_every: self.record_every,
            initial: self.initial_action,
            euler_h: self.euler.h,
            euler_slack: self.euler.slack_constant,
        }
    }

    /// Range checks that do not need the game.
    fn scalar_issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        if self.iterations < 1 {
            out.push(ConfigIssue::new("iterations", "must be >= 1"));
        }
        if self.record_every < 1 {
            out.push(ConfigIssue::new("record_every", "must be >= 1"));
        }
        if let Err((field, msg)) = self.schedules.gamma.check() {
            out.push(ConfigIssue::new(format!("schedules.gamma.{field}"), msg));
        }
        if let Err((field, msg)) = self.schedules.epsilon.check() {
            out.push(ConfigIssue::new(format!("schedules.epsilon.{field}"), msg));
        }
        if !(self.euler.h > 0.0 && self.euler.h <= 1.0) {
            out.push(ConfigIssue::new(
                "euler.h",
                format!("must lie in (0, 1], got {}", self.euler.h),
            ));
        }
        if let Some(k) = self.euler.slack_constant {
            if !(k >= 0.0 && k.is_finite()) {
                out.push(ConfigIssue::new(
                    "euler.slack_constant",
                    format!("must be finite and >= 0, got {k}"),
                ));
            }
        }
        if !(self.partition_tolerance >= 0.0 && self.partition_tolerance.is_finite()) {
            out.push(ConfigIssue::new(
                "partition_tolerance",
                format!("must be finite and >= 0, got {}", self.partition_tolerance),
            ));
        }
        for (name, v) in [
            ("ne", self.thresholds.ne),
            ("mce", self.thresholds.mce),
            ("sne", self.thresholds.sne),
        ] {
            if !(v >= 0.0) {
                out.push(ConfigIssue::new(format!("thresholds.{name}"), "must be >= 0"));
            }
        }
        out
    }

    /// Validates everything and loads or generates the game.
    ///
    /// Relative game paths are resolved against `base_dir`. All problems
    /// found are returned together.
    pub fn resolve(&self, base_dir: &Path) -> Result<Experiment> {
        let mut issues = self.scalar_issues();

        let resolved = match &self.game {
            GameSource::Inline(file) => file
                .clone()
                .into_game()
                .map(|g| (g, None, false))
                .map_err(|e| vec![ConfigIssue::new("game.inline", e.to_string())]),
            GameSource::File(p) => {
                let path = base_dir.join(p);
                if !path.is_file() {
                    Err(vec![ConfigIssue::new(
                        "game.file",
                        format!("{} does not exist", path.display()),
                    )])
                } else {
                    Game::load(&path)
                        .map(|g| (g, None, false))
                        .map_err(|e| vec![ConfigIssue::new("game.file", e.to_string())])
                }
            }
            GameSource::Generator(spec) => {
                let gi = spec.issues("game.generator");
                if gi.is_empty() {
                    generate_game(spec)
                        .map(|(g, p)| (g, Some(p), true))
                        .map_err(|e| vec![ConfigIssue::new("game.generator", e.to_string())])
                } else {
                    Err(gi)
                }
            }
        };

        let (game, generated_part, generated) = match resolved {
            Ok(r) => r,
            Err(mut e) => {
                issues.append(&mut e);
                return Err(Error::Config(issues));
            }
        };

        let part = match (&self.partition, generated_part) {
            (Some(pf), _) => match pf.clone().into_partition(game.players()) {
                Ok(p) => Some(p),
                Err(e) => {
                    issues.push(ConfigIssue::new("partition.classes", e.to_string()));
                    None
                }
            },
            (None, Some(p)) => Some(p),
            (None, None) => Some(Partition::singletons(game.players())),
        };

        if let Some(part) = &part {
            let tol = if generated && self.partition.is_none() {
                0.0
            } else {
                self.partition_tolerance
            };
            match validate_partition_with_tolerance(&game, part, tol) {
                Ok(report) => {
                    for v in report.violations {
                        issues.push(ConfigIssue::new(
                            "partition.classes",
                            format!("violates condition {}: {}", v.condition, v.witness),
                        ));
                    }
                }
                Err(e) => issues.push(ConfigIssue::new("partition", e.to_string())),
            }
        }

        match part {
            Some(partition) if issues.is_empty() => Ok(Experiment {
                config: self.clone(),
                game,
                partition,
            }),
            _ => Err(Error::Config(issues)),
        }
    }
}

/// A validated config together with its game and partition.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub game: Game,
    pub partition: Partition,
}

impl Experiment {
    pub fn process_spec(&self) -> ProcessSpec {
        self.config.process_spec()
    }
}

/// Reads, parses and fully validates an experiment config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Experiment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = ExperimentConfig::from_json_str(&text)?;
    config.resolve(path.parent().unwrap_or(Path::new(".")))
}

/// Parses an `ECFP_SEED` value.
pub fn parse_seed_override(value: Option<&str>) -> Result<Option<u64>> {
    value
        .map(|v| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| Error::invalid(format!("{SEED_ENV}={v:?} is not an unsigned integer")))
        })
        .transpose()
}

/// Runs the configured process to completion.
pub fn run_process(exp: &Experiment) -> Result<Trace> {
    simulate(&exp.game, &exp.partition, &exp.process_spec())
}
