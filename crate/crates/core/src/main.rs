use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use adelic_walks::experiments::{emit_results, parse_config, run_experiment, Experiment};

#[derive(Parser)]
#[command(version, about = "Monte Carlo checks for p-adic and adelic random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jump radius tails and sphere uniformity.
    JumpLaw(RunArgs),
    /// Sup-event frequencies against the finite-m closed form.
    Survival(RunArgs),
    /// Marginal ball probabilities against the limit series.
    Marginal(RunArgs),
    /// Moment scaling in t.
    Moments(RunArgs),
    /// Adelic survival events against products and bounds.
    Adelic(RunArgs),
    /// Modified-modulus and sup-norm diagnostics.
    Tightness(RunArgs),
    /// Evaluate the closed forms without sampling.
    Oracle(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for results.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::JumpLaw(a) => (Experiment::JumpLaw, a),
            Command::Survival(a) => (Experiment::Survival, a),
            Command::Marginal(a) => (Experiment::Marginal, a),
            Command::Moments(a) => (Experiment::Moments, a),
            Command::Adelic(a) => (Experiment::Adelic, a),
            Command::Tightness(a) => (Experiment::Tightness, a),
            Command::Oracle(a) => (Experiment::Oracle, a),
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (experiment, args) = cli.command.split();
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("parsing {}", args.config.display()))?;
    if cfg.experiment != experiment {
        bail!("config is for `{}`, not `{}`", cfg.experiment, experiment);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = args.workers {
        if workers == 0 {
            bail!("--workers must be at least 1");
        }
        cfg.workers = workers;
    }
    let out = args
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("results").join(experiment.name()));
    let table = run_experiment(&cfg)?;
    let (csv, json) = emit_results(&table, &out)?;
    for row in &table.rows {
        let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        println!(
            "{:<5} {:<48} {:<44} emp={} ana={} band={}",
            row.status,
            row.params,
            row.metric,
            show(row.empirical),
            show(row.analytic),
            show(row.band)
        );
    }
    println!(
        "{}: {} pass, {} fail, {} rows in {:.2}s -> {}, {}",
        experiment,
        table.passes(),
        table.failures(),
        table.rows.len(),
        table.wall_time_s,
        csv.display(),
        json.display()
    );
    Ok(table.all_pass())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
