use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mislab::experiment::run_cells;
use mislab::report::{print_table, write_csv, write_runs_csv};
use mislab::{builtin_example, validate, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "mislab", version, about = "Multiple importance sampling weighting laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and report MSE per (scheme, P, k) cell.
    Run(RunArgs),
    /// Run the invariant and acceptance checks for a built-in example.
    Validate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
    },
    /// Print a built-in example as a TOML config file.
    ShowConfig {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Built-in example (1 or 2).
    #[arg(long, conflicts_with = "config", required_unless_present = "config",
          value_parser = clap::value_parser!(u8).range(1..=2))]
    example: Option<u8>,
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replications per cell.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Summary CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of s-mis,dm,p-dm,h-dm.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated numbers of subsets for p-dm and h-dm.
    #[arg(long = "p", value_delimiter = ',')]
    p_values: Option<Vec<usize>>,
    /// Per-run CSV destination.
    #[arg(long)]
    dump_runs: Option<PathBuf>,
}

fn load(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match (&args.config, args.example) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        (None, Some(n)) => builtin_example(n)?,
        (None, None) => bail!("one of --example or --config is required"),
    };
    if let Some(r) = args.runs {
        cfg.n_runs = r;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(s) = &args.schemes {
        cfg.schemes = s.clone();
    }
    if let Some(a) = args.alpha {
        cfg.alpha = a;
    }
    if let Some(p) = &args.p_values {
        cfg.p_values = p.clone();
    }
    Ok(cfg)
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let cfg = load(&args)?;
    let exp = Experiment::from_config(&cfg)?;
    let cells = run_cells(&exp)?;
    let rows: Vec<_> = cells.iter().map(|c| c.summary.clone()).collect();
    print_table(&rows);
    if let Some(path) = &args.out {
        write_csv(&rows, path).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.dump_runs {
        let runs: Vec<_> = cells.into_iter().flat_map(|c| c.runs).collect();
        write_runs_csv(&runs, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args).map(|()| true),
        Command::Validate { example } => validate::run_example_suite(example).map(|reports| {
            for r in &reports {
                println!("{r}");
            }
            reports.iter().all(|r| r.passed)
        }).map_err(Into::into),
        Command::ShowConfig { example } => builtin_example(example)
            .and_then(|c| c.to_toml())
            .map(|t| {
                print!("{t}");
                true
            })
            .map_err(Into::into),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
