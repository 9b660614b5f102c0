use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use ecfp_core::config::{parse_seed_override, SEED_ENV};
use ecfp_core::equilibrium::{mce_gap, ne_gap, sne_gap};
use ecfp_core::game::{mixed_utility, Game, JointMixedStrategy};
use ecfp_core::json;
use ecfp_core::lemmas::{run_lemma_suite, LemmaSuiteOptions};
use ecfp_core::partition::{
    centroid, centroid_response_utility, validate_partition_with_tolerance, Partition,
    PartitionFile,
};
use ecfp_core::trace::{write_csv, write_json};
use ecfp_core::{
    emit_trace, generate_game, load_config, run_process, summarize, Error, GeneratorSpec,
    TraceFormat,
};

#[derive(Parser)]
#[command(name = "ecfp", version, about = "Empirical centroid fictitious play experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config file and report every problem found.
    Validate { config: PathBuf },
    /// Run the configured process and write its trace.
    Run {
        config: PathBuf,
        /// Trace destination; overrides the config's output path. Without
        /// either, CSV goes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Print NE, MCE and SNE gaps of a joint strategy.
    Gaps {
        game: PathBuf,
        partition: PathBuf,
        strategy: PathBuf,
        /// Allowed utility difference in the swap-invariance check.
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
    },
    /// Randomized checks of the centroid identities on a game and partition.
    Lemmas {
        game: PathBuf,
        partition: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Length of each centroid-recursion trajectory.
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        trajectories: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
    },
    /// Generate a game (and its partition) from a generator spec.
    Generate {
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Where to write the partition; defaults to `<output stem>.partition.json`.
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for TraceFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => TraceFormat::Csv,
            FormatArg::Json => TraceFormat::Json,
        }
    }
}

/// Exit status: 0 success, 1 validation failure, 2 runtime error.
enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { config } => validate(&config),
        Command::Run {
            config,
            output,
            format,
        } => run(&config, output, format.map(Into::into)),
        Command::Gaps {
            game,
            partition,
            strategy,
            tolerance,
        } => gaps(&game, &partition, &strategy, tolerance),
        Command::Lemmas {
            game,
            partition,
            trials,
            steps,
            trajectories,
            seed,
            tolerance,
        } => lemmas(
            &game,
            &partition,
            LemmaSuiteOptions {
                trials,
                trajectories,
                trajectory_steps: steps,
                seed,
            },
            tolerance,
        ),
        Command::Generate {
            spec,
            output,
            partition_out,
        } => generate(&spec, &output, partition_out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn print_json(v: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("report types serialize")
    );
}

fn validate(path: &Path) -> CmdResult {
    let exp = load_config(path)?;
    println!(
        "ok: {} players, actions {:?}, {} class(es), process {:?}, {} iterations",
        exp.game.players(),
        exp.game.action_counts(),
        exp.partition.class_count(),
        exp.config.process,
        exp.config.iterations
    );
    Ok(())
}

fn run(path: &Path, output: Option<PathBuf>, format: Option<TraceFormat>) -> CmdResult {
    let mut exp = load_config(path)?;
    let env = std::env::var(SEED_ENV).ok();
    if let Some(seed) = parse_seed_override(env.as_deref())? {
        exp.config.selection.seed = seed;
    }
    let trace = run_process(&exp)?;

    let destination = output.or_else(|| {
        exp.config.output.as_ref().map(|o| {
            path.parent()
                .unwrap_or(Path::new("."))
                .join(&o.path)
        })
    });
    let format = format
        .or_else(|| exp.config.output.as_ref().and_then(|o| o.format))
        .or_else(|| destination.as_deref().map(TraceFormat::from_path))
        .unwrap_or_default();
    match &destination {
        Some(p) => emit_trace(&trace, p, format)?,
        None => {
            let stdout = std::io::stdout().lock();
            match format {
                TraceFormat::Csv => write_csv(&trace, stdout),
                TraceFormat::Json => write_json(&trace, stdout),
            }
            .map_err(|e| Failure::Runtime(format!("writing trace to stdout: {e}")))?;
        }
    }

    if let Some(err) = &trace.error {
        return Err(Failure::Runtime(format!(
            "run aborted after {} records: {err}",
            trace.records.len()
        )));
    }
    let report = summarize(&trace, &exp.config.thresholds)?;
    if destination.is_some() {
        print_json(&report);
    } else {
        eprintln!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    }
    Ok(())
}

fn load_game_and_partition(game: &Path, partition: &Path, tol: f64) -> Result<(Game, Partition), Failure> {
    let game = Game::load(game)?;
    let pf: PartitionFile = json::read_file(partition)?;
    let part = pf.into_partition(game.players())?;
    let report = validate_partition_with_tolerance(&game, &part, tol)?;
    if !report.valid {
        return Err(Failure::Validation(format!(
            "partition is not permutation-invariant:\n{report}"
        )));
    }
    Ok((game, part))
}

#[derive(Serialize)]
struct GapReport {
    ne_gap: f64,
    mce_gap: f64,
    sne_gap: f64,
    sne_gap_centroid: f64,
    lyapunov_w: f64,
    lyapunov_v: f64,
}

fn gaps(game: &Path, partition: &Path, strategy: &Path, tol: f64) -> CmdResult {
    let (game, part) = load_game_and_partition(game, partition, tol)?;
    let p: JointMixedStrategy = json::read_file(strategy)?;
    p.conforms(&game)?;
    let p_bar = centroid(&part, &p)?;
    print_json(&GapReport {
        ne_gap: ne_gap(&game, &p)?,
        mce_gap: mce_gap(&game, &part, &p)?,
        sne_gap: sne_gap(&game, &part, &p)?,
        sne_gap_centroid: sne_gap(&game, &part, &p_bar)?,
        lyapunov_w: mixed_utility(&game, &p_bar)?,
        lyapunov_v: centroid_response_utility(&game, &p, &p_bar)?,
    });
    Ok(())
}

fn lemmas(game: &Path, partition: &Path, opts: LemmaSuiteOptions, tol: f64) -> CmdResult {
    let (game, part) = load_game_and_partition(game, partition, tol)?;
    let r = run_lemma_suite(&game, &part, &opts)?;
    let line = |ok: bool, name: &str, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    };
    line(
        r.rearrangement_passed(),
        "rearrangement identity",
        format!(
            "{} trials, max residual {:e}, {} failures",
            r.trials, r.rearrangement_max_residual, r.rearrangement_failures
        ),
    );
    line(
        r.permutation_br_passed(),
        "averaged best responses",
        format!(
            "{}/{} hypotheses established, {} failures",
            r.br_hypothesis_established, r.trials, r.br_failures
        ),
    );
    line(
        r.centroid_recursion_passed() && r.errors.is_empty(),
        "centroid recursion",
        format!(
            "{} x {}-step trajectories, max drift {:e}, {} drift failures, {} action failures",
            r.trajectories,
            r.trajectory_steps,
            r.centroid_max_drift,
            r.centroid_failures,
            r.averaged_action_failures
        ),
    );
    for e in &r.errors {
        eprintln!("  {e}");
    }
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Validation("lemma suite failed".into()))
    }
}

fn generate(spec: &Path, output: &Path, partition_out: Option<PathBuf>) -> CmdResult {
    let spec: GeneratorSpec = json::read_file(spec)?;
    let (game, part) = generate_game(&spec)?;
    let partition_out = partition_out.unwrap_or_else(|| {
        let stem = output
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "game".into());
        output.with_file_name(format!("{stem}.partition.json"))
    });
    write_json_file(output, &game.to_file())?;
    write_json_file(&partition_out, &part.to_file())?;
    println!(
        "wrote {} ({} profiles) and {}",
        output.display(),
        game.profile_count(),
        partition_out.display()
    );
    Ok(())
}

fn write_json_file(path: &Path, v: &impl Serialize) -> CmdResult {
    let text = serde_json::to_string(v).expect("serializable") + "\n";
    std::fs::write(path, text)
        .map_err(|e| Failure::Runtime(format!("I/O error on {}: {e}", path.display())))
}

