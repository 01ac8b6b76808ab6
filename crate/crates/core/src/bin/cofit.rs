use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cofit::harness::compare::{compare_curve_files, CurveSide};
use cofit::harness::config::ConfigFile;
use cofit::harness::csvio::{format_verdicts, VerdictRow};
use cofit::harness::table1::{run_table1, GridSettings, DESK_REPEATS, FULL_REPEATS};
use cofit::harness::{dump_datasets, run_experiment, write_outputs, ExperimentResult};
use cofit::stats::DEFAULT_EPSILON;
use cofit::Result;

#[derive(Parser)]
#[command(
    name = "cofit",
    version,
    about = "Complementary-fitness mate selection for evolutionary decision trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// Master seed; overrides `master_seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Also write every run's dataset as CSV.
        #[arg(long)]
        dump_datasets: bool,
    },
    /// Run the eight-configuration grid and write the summary table.
    Table1 {
        #[arg(long)]
        out: PathBuf,
        /// Repeats per configuration (default 400, or 100 with --desk).
        #[arg(long)]
        repeats: Option<usize>,
        /// Desk-scale preset: 100 repeats.
        #[arg(long)]
        desk: bool,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = cofit::engine::DEFAULT_ITERATIONS)]
        iterations: usize,
    },
    /// Compare the final iteration of two curve files with Welch's test.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Strategy to read from `a` when it holds several.
        #[arg(long)]
        strategy_a: Option<String>,
        #[arg(long)]
        strategy_b: Option<String>,
        /// Repeat count behind both curves; defaults to the sibling experiment.toml.
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn report(result: &ExperimentResult) {
    eprintln!("{} ({} repeats)", result.spec.label(), result.spec.repeats);
    for o in &result.outcomes {
        let last = o.curve.len() - 1;
        eprintln!(
            "  {:<18} final mean {:.4}  [{:.4}, {:.4}]",
            o.strategy.name(),
            o.curve.mean[last],
            o.curve.ci_low[last],
            o.curve.ci_high[last]
        );
    }
    for (s, v) in &result.verdicts {
        eprintln!(
            "  {s} vs standard: {} (delta {:+.4}, p {:.3e})",
            v.label, v.mean_delta, v.p_value
        );
    }
}

fn run_cmd(
    config: &Path,
    repeats: Option<usize>,
    workers: Option<usize>,
    seed: Option<u64>,
    out: &Path,
    dump: bool,
) -> Result<()> {
    let mut file = ConfigFile::load(config)?;
    if let Some(r) = repeats {
        file.repeats = r;
    }
    if let Some(s) = seed {
        file.master_seed = s;
    }
    let spec = file.to_spec()?;
    let result = run_experiment(&spec, workers.unwrap_or_else(default_workers))?;
    write_outputs(&result, out)?;
    if dump {
        dump_datasets(&spec, out)?;
    }
    report(&result);
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            repeats,
            workers,
            seed,
            out,
            dump_datasets,
        } => run_cmd(&config, repeats, workers, seed, &out, dump_datasets),
        Command::Table1 {
            out,
            repeats,
            desk,
            workers,
            seed,
            iterations,
        } => {
            let settings = GridSettings {
                repeats: repeats.unwrap_or(if desk { DESK_REPEATS } else { FULL_REPEATS }),
                iterations,
                master_seed: seed,
                workers: workers.unwrap_or_else(default_workers),
                ..GridSettings::default()
            };
            let table = run_table1(&settings, &out, report)?;
            print!("{table}");
            Ok(())
        }
        Command::Compare {
            a,
            b,
            strategy_a,
            strategy_b,
            repeats,
            epsilon,
        } => {
            let side_a = CurveSide {
                path: &a,
                strategy: strategy_a.as_deref(),
                repeats,
            };
            let side_b = CurveSide {
                path: &b,
                strategy: strategy_b.as_deref(),
                repeats,
            };
            let (name_a, name_b, verdict) = compare_curve_files(&side_a, &side_b, epsilon)?;
            print!(
                "{}",
                format_verdicts(&[VerdictRow::new("cli", &name_a, &name_b, &verdict)])
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
