use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spanclf::experiment::{cmd_eval, cmd_experiment, cmd_ingest, cmd_stats, cmd_train, ExperimentConfig, Overrides, Strategy};
use spanclf::stats::OutputFormat;
use spanclf::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "spanclf", version, about = "Propaganda technique span classification experiments")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true, default_value = "experiment.json")]
    config: PathBuf,
    /// Overrides the training and undersampling seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and validate the corpus, write ingest_summary.json.
    Ingest,
    /// Class distribution and span-length statistics of the training split.
    Stats {
        #[arg(long, value_parser = parse_format, default_value = "csv")]
        format: OutputFormat,
    },
    /// Train a single strategy and save the model.
    Train {
        /// Defaults to the first strategy in the config.
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Evaluate a saved model on a labeled split.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Label file; defaults to the config's dev split.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Strategy the model was trained with (selects context expansion).
        #[arg(long)]
        strategy: Option<Strategy>,
    },
    /// Run every configured strategy and write the comparison table.
    Experiment,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format {other:?}, expected csv or json")),
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_validation() { EXIT_VALIDATION } else { EXIT_RUNTIME })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        output_dir: cli.out.clone(),
    };
    let mut config = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => return fail(&e.into()),
    };
    overrides.apply(&mut config);
    let first_strategy = config.strategies.first().copied().unwrap_or(Strategy::BASELINE);

    match cli.command {
        Command::Ingest => match cmd_ingest(&config) {
            Ok(summary) => {
                println!("articles: {}", summary.articles);
                for (name, split) in &summary.splits {
                    println!(
                        "{name}: {} annotations ({} duplicates)",
                        split.annotations, split.duplicates
                    );
                }
                for w in &summary.load_warnings {
                    eprintln!("warning: {w}");
                }
                for e in &summary.errors {
                    eprintln!("error: {e}");
                }
                if summary.valid {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_VALIDATION)
                }
            }
            Err(e) => fail(&e),
        },
        Command::Stats { format } => match cmd_stats(&config, format) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Train { strategy, model } => {
            let model = model.unwrap_or_else(|| config.output_dir.join("model.bin"));
            match cmd_train(&config, strategy.unwrap_or(first_strategy), &model, &overrides) {
                Ok(()) => {
                    println!("wrote {}", model.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Eval {
            model,
            labels,
            strategy,
        } => match cmd_eval(
            &config,
            &model,
            labels.as_deref(),
            strategy.unwrap_or(first_strategy),
            &overrides,
        ) {
            Ok(report) => {
                println!("micro_f1 {:.5}  macro_f1 {:.5}", report.micro_f1, report.macro_f1);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Experiment => match cmd_experiment(&config, &overrides) {
            Ok(summary) => {
                print!("{}", summary.comparison);
                if summary.failed == 0 {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_RUNTIME)
                }
            }
            Err(e) => fail(&e),
        },
    }
}
