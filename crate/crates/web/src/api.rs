//! JSON-in, JSON-out operations behind the browser bindings.

use std::path::Path;

use serde::Serialize;

use ecfp_core::config::ExperimentConfig;
use ecfp_core::equilibrium::{class_asymmetry, mce_gap, ne_gap, sne_gap};
use ecfp_core::game::{mixed_utility, Game, GameFile, JointMixedStrategy};
use ecfp_core::lemmas::{run_lemma_suite, LemmaReport, LemmaSuiteOptions};
use ecfp_core::partition::{
    centroid, centroid_response_utility, validate_partition_with_tolerance, Partition,
    PartitionFile,
};
use ecfp_core::trace::TraceRecord;
use ecfp_core::{json, run_process, summarize, ConvergenceReport};

/// Largest iteration count the page will run; keeps the tab responsive.
pub const MAX_ITERATIONS: u64 = 2_000_000;
/// Upper bound on returned rows; `record_every` is raised to stay under it.
pub const MAX_ROWS: u64 = 4000;

#[derive(Debug, Serialize)]
pub struct RunResult {
    pub game: GameFile,
    pub classes: Vec<Vec<usize>>,
    pub records: Vec<TraceRecord>,
    pub summary: ConvergenceReport,
}

/// Runs an experiment config (same schema as the CLI, without file paths).
pub fn run_experiment(config_json: &str) -> Result<RunResult, String> {
    let mut config = ExperimentConfig::from_json_str(config_json).map_err(|e| e.to_string())?;
    if config.iterations > MAX_ITERATIONS {
        return Err(format!(
            "iterations: at most {MAX_ITERATIONS} in the browser, got {}",
            config.iterations
        ));
    }
    config.output = None;
    config.record_every = config
        .record_every
        .max(config.iterations.div_ceil(MAX_ROWS));
    let exp = config.resolve(Path::new("")).map_err(|e| e.to_string())?;
    let trace = run_process(&exp).map_err(|e| e.to_string())?;
    let summary = summarize(&trace, &exp.config.thresholds).map_err(|e| e.to_string())?;
    Ok(RunResult {
        game: exp.game.to_file(),
        classes: exp.partition.classes().to_vec(),
        records: trace.records,
        summary,
    })
}

#[derive(Debug, Serialize)]
pub struct GapResult {
    pub ne_gap: f64,
    pub mce_gap: f64,
    pub sne_gap: f64,
    pub class_asymmetry: f64,
    pub centroid: Vec<Vec<f64>>,
    pub lyapunov_w: f64,
    pub lyapunov_v: f64,
}

fn load_pair(game_json: &str, partition_json: &str) -> Result<(Game, Partition), String> {
    let game = json::from_str::<GameFile>(game_json)
        .and_then(GameFile::into_game)
        .map_err(|e| format!("game: {e}"))?;
    let part = json::from_str::<PartitionFile>(partition_json)
        .and_then(|p| p.into_partition(game.players()))
        .map_err(|e| format!("partition: {e}"))?;
    Ok((game, part))
}

fn check_invariance(game: &Game, part: &Partition, tolerance: f64) -> Result<(), String> {
    let report = validate_partition_with_tolerance(game, part, tolerance).map_err(|e| e.to_string())?;
    if report.valid {
        Ok(())
    } else {
        Err(format!("partition is not permutation-invariant: {report}"))
    }
}

/// Equilibrium gaps of a joint strategy `{"strategies": [[...], ...]}`.
pub fn evaluate_gaps(
    game_json: &str,
    partition_json: &str,
    strategy_json: &str,
) -> Result<GapResult, String> {
    let (game, part) = load_pair(game_json, partition_json)?;
    check_invariance(&game, &part, 0.0)?;
    let p: JointMixedStrategy =
        json::from_str(strategy_json).map_err(|e| format!("strategy: {e}"))?;
    let run = || -> ecfp_core::Result<GapResult> {
        p.conforms(&game)?;
        let p_bar = centroid(&part, &p)?;
        Ok(GapResult {
            ne_gap: ne_gap(&game, &p)?,
            mce_gap: mce_gap(&game, &part, &p)?,
            sne_gap: sne_gap(&game, &part, &p)?,
            class_asymmetry: class_asymmetry(&part, &p),
            lyapunov_w: mixed_utility(&game, &p_bar)?,
            lyapunov_v: centroid_response_utility(&game, &p, &p_bar)?,
            centroid: p_bar.to_vecs(),
        })
    };
    run().map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct LemmaResult {
    pub passed: bool,
    pub report: LemmaReport,
}

/// Randomized centroid-identity checks; an invalid partition is reported
/// rather than rejected so the page can show which identity breaks.
pub fn check_lemmas(
    game_json: &str,
    partition_json: &str,
    trials: usize,
    steps: u64,
    seed: u64,
) -> Result<LemmaResult, String> {
    let (game, part) = load_pair(game_json, partition_json)?;
    let opts = LemmaSuiteOptions {
        trials: trials.min(20_000),
        trajectories: 1,
        trajectory_steps: steps.clamp(1, 100_000),
        seed,
    };
    let report = run_lemma_suite(&game, &part, &opts).map_err(|e| e.to_string())?;
    Ok(LemmaResult {
        passed: report.passed(),
        report,
    })
}
