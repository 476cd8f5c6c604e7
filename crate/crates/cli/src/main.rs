use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use docbin_cli::commands::{self, Format};
use docbin_cli::{CliError, Method};

#[derive(Parser)]
#[command(name = "docbin", version, about = "Document image binarization and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set k_smear=4` or `--set sauvola.k=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Binarize one image.
    Binarize {
        input: PathBuf,
        #[arg(long, default_value = "hybrid")]
        method: Method,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write `<out>.trace.json`.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score a binarized image against ground truth.
    Evaluate {
        pred: PathBuf,
        gt: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run methods over a dataset and rank them.
    Bench {
        dataset: PathBuf,
        #[arg(long, default_value = "_GT")]
        gt_suffix: String,
        #[arg(long, value_delimiter = ',', default_value = "otsu,niblack,sauvola,nick,bernsen,hybrid")]
        methods: Vec<Method>,
        /// Report file; `.json` or `.csv` picks the format. Printed to stdout otherwise.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Bench one method for each value of a parameter.
    Sweep {
        dataset: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long, default_value = "hybrid")]
        method: Method,
        #[arg(long, default_value = "_GT")]
        gt_suffix: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BINARIZE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("BINARIZE_THREADS must be a number, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Processing(e.to_string()))
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Binarize {
            input,
            method,
            out,
            trace,
            config,
        } => {
            let cfg = commands::load_config(config.config.as_deref(), &config.overrides)?;
            commands::binarize(&input, method, &cfg, &out, trace)
        }
        Command::Evaluate { pred, gt, format, config } => {
            let cfg = commands::load_config(config.config.as_deref(), &config.overrides)?;
            print!("{}", commands::evaluate(&pred, &gt, &cfg, format)?);
            Ok(())
        }
        Command::Bench {
            dataset,
            gt_suffix,
            methods,
            report,
            format,
            config,
        } => {
            let cfg = commands::load_config(config.config.as_deref(), &config.overrides)?;
            let (result, text) = commands::bench(&dataset, &gt_suffix, &methods, &cfg, report.as_deref(), format)?;
            if report.is_none() {
                print!("{text}");
            }
            match result.failures.len() {
                0 => Ok(()),
                n => Err(CliError::PartialFailure(n)),
            }
        }
        Command::Sweep {
            dataset,
            param,
            values,
            method,
            gt_suffix,
            report,
            config,
        } => {
            let cfg = commands::load_config(config.config.as_deref(), &config.overrides)?;
            let (rows, failures) = commands::sweep(&dataset, &gt_suffix, method, &cfg, &param, &values)?;
            emit(report.as_ref(), &commands::sweep_csv(&rows))?;
            match failures {
                0 => Ok(()),
                n => Err(CliError::PartialFailure(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
