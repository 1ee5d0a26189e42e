//! Command-line front end.
//!
//! Exit-code contract: 0 on success, 1 on domain errors (load/validation
//! failures, unreached targets), 2 on usage errors. Diagnostics go to
//! stderr; data goes to stdout or `--out`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytics::{collect_corpus_paths, corpus_stats, dataset_report, ReportTolerances};
use crate::config::load_run_config;
use crate::eval::{evaluate, load_items, EvalSummary, GraderRegistry};
use crate::pipeline::{
    build_manifest, init_state, read_dataset, resume, run_to_target, write_checkpoint,
    write_dataset, write_manifest, RunStatus,
};
use crate::seedpool::{load_seeds, validate_distribution, ComplexityTargets};
use crate::teacher::{BackendKind, Role, TeacherConfig, TeacherHandle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "instructgen",
    version,
    about = "Bootstrap Bengali instruction datasets: validate seeds, run generation, inspect stats, evaluate models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Seed-pool operations.
    Seeds {
        #[command(subcommand)]
        command: SeedsCommand,
    },
    /// Run (or resume) dataset generation from a config file.
    Generate(GenerateArgs),
    /// Corpus and dataset statistics.
    Stats {
        #[command(subcommand)]
        command: StatsCommand,
    },
    /// Pass@1 evaluation of a model endpoint over a benchmark file.
    Eval(EvalArgs),
}

#[derive(Debug, Subcommand)]
enum SeedsCommand {
    /// Load a seed JSONL file and check category/complexity balance.
    Validate {
        file: PathBuf,
        /// Write the distribution report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Run configuration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Resume from a checkpoint written by an earlier run.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Token and sentence counts over UTF-8 text files.
    Corpus {
        /// A directory of text files, or a single file.
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distribution report over a dataset JSONL file.
    Dataset {
        file: PathBuf,
        /// Manifest JSON to echo the acceptance rate from.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Benchmark items JSONL.
    #[arg(long)]
    items: PathBuf,
    /// Chat-completion endpoint URL.
    #[arg(long)]
    endpoint: String,
    #[arg(long, default_value = "default-model")]
    model: String,
    /// Environment variable holding the API key (empty: no auth header).
    #[arg(long, default_value = "")]
    api_key_env: String,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Write per-item results JSONL here; the aggregate summary then goes to
    /// stdout. Without --out, both go to stdout (summary last).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(payload: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .map_err(|e| format!("io_error: {}: {e}", parent.display()))?;
                }
            }
            std::fs::write(path, payload.as_bytes())
                .map_err(|e| format!("io_error: {}: {e}", path.display()))
        }
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

/// Parse argv and run; returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();

    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            // clap routes help to stdout and errors to stderr itself.
            let _ = e.print();
            return code;
        }
    };

    match run_command(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_DOMAIN
        }
    }
}

fn run_command(command: Command) -> Result<i32, String> {
    match command {
        Command::Seeds { command } => match command {
            SeedsCommand::Validate { file, out } => seeds_validate(&file, out.as_deref()),
        },
        Command::Generate(args) => generate(args),
        Command::Stats { command } => match command {
            StatsCommand::Corpus { path, out } => stats_corpus(&path, out.as_deref()),
            StatsCommand::Dataset { file, manifest, out } => {
                stats_dataset(&file, manifest.as_deref(), out.as_deref())
            }
        },
        Command::Eval(args) => eval_command(args),
    }
}

fn seeds_validate(file: &Path, out: Option<&Path>) -> Result<i32, String> {
    let pool = load_seeds(file).map_err(|e| e.to_string())?;
    let report =
        validate_distribution(&pool, &ComplexityTargets::default()).map_err(|e| e.to_string())?;
    let payload = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(&payload, out)?;
    if report.violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "error: seed pool has {} distribution violation(s)",
            report.violations.len()
        );
        Ok(EXIT_DOMAIN)
    }
}

fn generate(args: GenerateArgs) -> Result<i32, String> {
    let config = load_run_config(&args.config).map_err(|e| e.to_string())?;
    config.pipeline.validate().map_err(|e| e.to_string())?;
    let generator = TeacherHandle::from_config(&config.generator, Role::Generator)
        .map_err(|e| e.to_string())?;
    let judge =
        TeacherHandle::from_config(&config.judge, Role::Judge).map_err(|e| e.to_string())?;

    let mut state = match &args.resume {
        Some(checkpoint) => resume(checkpoint).map_err(|e| e.to_string())?,
        None => {
            let pool = load_seeds(&config.seed_file).map_err(|e| e.to_string())?;
            init_state(&config.pipeline, pool).map_err(|e| e.to_string())?
        }
    };

    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let checkpoint_to = config
        .checkpoint_path
        .as_deref()
        .map(|path| (path, config.checkpoint_every_rounds));
    let status = runtime
        .block_on(run_to_target(
            &mut state,
            &config.pipeline,
            &generator,
            &judge,
            checkpoint_to,
        ))
        .map_err(|e| e.to_string())?;

    write_dataset(&state, &config.dataset_out).map_err(|e| e.to_string())?;
    let manifest = build_manifest(&state, &config.pipeline, status);
    write_manifest(&manifest, &config.manifest_out).map_err(|e| e.to_string())?;
    if let Some(path) = &config.checkpoint_path {
        write_checkpoint(&state, path).map_err(|e| e.to_string())?;
    }

    eprintln!(
        "{} pairs over {} round(s) → {} (manifest: {})",
        manifest.accepted,
        manifest.rounds,
        config.dataset_out.display(),
        config.manifest_out.display()
    );
    match status {
        RunStatus::Completed => Ok(EXIT_OK),
        RunStatus::MaxRoundsExhausted => {
            eprintln!(
                "error: max_rounds_exhausted: {} of {} pairs; partial dataset written",
                manifest.accepted, manifest.target_pairs
            );
            Ok(EXIT_DOMAIN)
        }
    }
}

fn stats_corpus(path: &Path, out: Option<&Path>) -> Result<i32, String> {
    let paths = collect_corpus_paths(path).map_err(|e| e.to_string())?;
    let stats = corpus_stats(&paths).map_err(|e| e.to_string())?;
    let payload = serde_json::to_string_pretty(&stats).expect("stats serialize");
    emit(&payload, out)?;
    Ok(EXIT_OK)
}

fn stats_dataset(
    file: &Path,
    manifest: Option<&Path>,
    out: Option<&Path>,
) -> Result<i32, String> {
    let pairs = read_dataset(file).map_err(|e| e.to_string())?;
    let acceptance_rate = match manifest {
        Some(path) => {
            let content = std::fs::read_to_string(path)
                .map_err(|e| format!("io_error: {}: {e}", path.display()))?;
            let manifest: crate::pipeline::DatasetManifest = serde_json::from_str(&content)
                .map_err(|e| format!("config_error: {}: {e}", path.display()))?;
            Some(manifest.acceptance_rate)
        }
        None => None,
    };
    let report = dataset_report(&pairs, &ReportTolerances::default(), acceptance_rate);
    let payload = serde_json::to_string_pretty(&report).expect("report serializes");
    emit(&payload, out)?;
    if report.flags.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: dataset report raised {} flag(s)", report.flags.len());
        Ok(EXIT_DOMAIN)
    }
}

fn eval_command(args: EvalArgs) -> Result<i32, String> {
    let items = load_items(&args.items).map_err(|e| e.to_string())?;
    let teacher_config = TeacherConfig {
        backend: BackendKind::Http,
        endpoint: args.endpoint.clone(),
        model_name: args.model.clone(),
        api_key_env: args.api_key_env.clone(),
        max_in_flight: args.concurrency.max(1),
        timeout_secs: 60.0,
        max_retries: 2,
        temperature: Some(0.0),
        retry_base_ms: 200,
        mock_seed: 0,
    };
    let client =
        TeacherHandle::from_config(&teacher_config, Role::Judge).map_err(|e| e.to_string())?;

    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let registry = GraderRegistry::new();
    let (results, score) = runtime
        .block_on(evaluate(&client, &items, args.concurrency, &registry))
        .map_err(|e| e.to_string())?;

    let mut lines = String::new();
    for result in &results {
        lines.push_str(&serde_json::to_string(result).expect("result serializes"));
        lines.push('\n');
    }
    let summary = EvalSummary {
        benchmark: args
            .items
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "benchmark".to_string()),
        n: results.len(),
        pass_at_1: score,
    };
    let summary_json = serde_json::to_string(&summary).expect("summary serializes");
    match &args.out {
        Some(path) => {
            emit(&lines, Some(path))?;
            println!("{summary_json}");
        }
        None => {
            print!("{lines}");
            println!("{summary_json}");
        }
    }
    Ok(EXIT_OK)
}
