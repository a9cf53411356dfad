use std::path::{Path, PathBuf};
use std::process::ExitCode;

use attrest::sampling::{SyntheticSpec, XModel, DEFAULT_ENUMERATION_LIMIT};
use attrest_cli::commands::{
    cmd_enumerate, cmd_generate, cmd_simulate, cmd_table1, cmd_theory, EnumerateOptions,
    SimulateOptions, T2Choice, T3Shape,
};
use attrest_cli::error::{CliError, Result};
use attrest_cli::io::load_summary_json;
use attrest_cli::report::Report;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Estimating a population proportion with the help of a quantitative auxiliary variable.
#[derive(Debug, Parser)]
#[command(name = "attrest", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format for the report.
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce the home-ownership efficiency table.
    Table1 {
        #[command(flatten)]
        output: Output,
    },
    /// First-order bias, MSE and PRE from summary statistics in a JSON file.
    Theory {
        #[arg(long)]
        summary: PathBuf,
        /// t3 shape, e.g. `alpha=1,beta=0,a=1,b=0`; repeatable.
        #[arg(long = "t3")]
        t3: Vec<T3Shape>,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo study under simple random sampling without replacement.
    Simulate {
        /// CSV with header `phi,x`.
        #[arg(long)]
        population: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long = "t3")]
        t3: Vec<T3Shape>,
        /// t2 member: `linear=D`, `power=G` or `exp=DELTA`; repeatable.
        #[arg(long = "t2")]
        t2: Vec<T2Choice>,
        #[command(flatten)]
        output: Output,
    },
    /// Exact design moments by enumerating every sample of size n.
    Enumerate {
        #[arg(long)]
        population: PathBuf,
        #[arg(long)]
        n: usize,
        /// Refuse to enumerate more than this many samples.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: u64,
        #[arg(long = "t3")]
        t3: Vec<T3Shape>,
        #[arg(long = "t2")]
        t2: Vec<T2Choice>,
        #[command(flatten)]
        output: Output,
    },
    /// Write a synthetic population CSV with target P and point-biserial correlation.
    Generate {
        #[arg(long = "N")]
        size: usize,
        #[arg(long = "P")]
        p: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        mean0: f64,
        #[arg(long, default_value_t = 2.0)]
        sd0: f64,
        #[arg(long, default_value_t = 2.0)]
        sd1: f64,
    },
}

fn shapes_or_default(shapes: Vec<T3Shape>) -> Vec<T3Shape> {
    if shapes.is_empty() {
        T3Shape::TABLE1.to_vec()
    } else {
        shapes
    }
}

fn emit(report: &Report, output: &Output) -> Result<()> {
    let text = match output.format {
        Format::Markdown => report.to_markdown(),
        Format::Csv => report.to_csv(),
    };
    write_text(&text, output.out.as_deref())
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Table1 { output } => emit(&cmd_table1()?, &output),
        Command::Theory {
            summary,
            t3,
            output,
        } => {
            let input = load_summary_json(&summary)?;
            emit(&cmd_theory(&input, &shapes_or_default(t3))?, &output)
        }
        Command::Simulate {
            population,
            n,
            reps,
            seed,
            threads,
            t3,
            t2,
            output,
        } => {
            let opts = SimulateOptions {
                n,
                reps,
                seed,
                threads,
                t2,
                shapes: shapes_or_default(t3),
            };
            emit(&cmd_simulate(&population, &opts)?, &output)
        }
        Command::Enumerate {
            population,
            n,
            limit,
            t3,
            t2,
            output,
        } => {
            let opts = EnumerateOptions {
                n,
                limit,
                t2,
                shapes: shapes_or_default(t3),
            };
            emit(&cmd_enumerate(&population, &opts)?, &output)
        }
        Command::Generate {
            size,
            p,
            rho,
            seed,
            out,
            mean0,
            sd0,
            sd1,
        } => {
            let mut spec = SyntheticSpec::new(size, p, rho, seed);
            spec.x_model = XModel::GaussianMixture { mean0, sd0, sd1 };
            let outcome = cmd_generate(&spec, &out)?;
            println!("{}", outcome.describe());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
