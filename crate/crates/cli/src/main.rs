use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use collegeapp::bench::{
    experiment1, experiment2, experiment3, ratios_to_csv, BenchConfig, Environment,
    Experiment3Config,
};
use collegeapp::heterogeneous::SaParams;
use collegeapp::instances::{
    generate_market, knapsack_to_market, read_knapsack, CostMode, GeneratorConfig,
};
use collegeapp::{
    read_market, solve, solve_frontier, write_market, Algorithm, FrontierView, Market, ReportView,
    SolveOptions,
};

mod output;

/// Optimal college application portfolios.
#[derive(Parser, Debug)]
#[command(name = "collegeapp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Choose the portfolio that maximises expected utility.
    ///
    /// `auto` uses greedy when every cost is 1, the cost DP when costs and
    /// budget are integers, and the FPTAS otherwise.
    Solve(SolveArgs),
    /// Optimal value for every application limit of a unit-cost market.
    Frontier(FrontierArgs),
    /// Draw a random market.
    Generate(GenerateArgs),
    /// Turn a 0/1 knapsack instance into an equivalent market.
    ReduceKnapsack(ReduceArgs),
    /// Run one of the timing or quality experiments and write CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Market JSON file, or `-` for stdin.
    market: String,
    #[arg(long, default_value = "auto")]
    algorithm: Algorithm,
    /// FPTAS tolerance.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Override the market's budget (the application limit for unit costs).
    #[arg(long)]
    h: Option<f64>,
    /// Annealing seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "sa-T", default_value_t = 0.25)]
    sa_temperature: f64,
    #[arg(long = "sa-r", default_value_t = 0.0625)]
    sa_reduction: f64,
    #[arg(long = "sa-N", default_value_t = 500)]
    sa_iterations: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct FrontierArgs {
    /// Market JSON file, or `-` for stdin.
    market: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Homogeneous,
    Heterogeneous,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value_t = Mode::Heterogeneous)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mean of the exponential utility draw.
    #[arg(long, default_value_t = 10.0)]
    scale: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// Knapsack JSON (`u`, `w`, `W`), or `-` for stdin.
    instance: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    experiment: u8,
    /// Comma-separated market sizes (experiments 1 and 2).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Markets per size.
    #[arg(long, default_value_t = 50)]
    instances: usize,
    /// Timed repetitions per market; the minimum is kept.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Markets in experiment 3.
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status for a failed run: 2 when a solver declined valid input,
/// 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<collegeapp::Error>() {
        Some(e) if e.refusal().is_some() => 2,
        _ => 1,
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_market(path: &str) -> Result<Market> {
    Ok(read_market(&read_input(path)?)?)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let mut market = load_market(&args.market)?;
    if let Some(h) = args.h {
        market.budget = h;
    }
    let options = SolveOptions {
        algorithm: args.algorithm,
        epsilon: args.epsilon,
        sa: SaParams {
            temperature: args.sa_temperature,
            reduction: args.sa_reduction,
            iterations: args.sa_iterations,
            seed: args.seed,
        },
    };
    let solution = solve(&market, &options)?;
    let view = ReportView::from_solution(&market, &solution, true)?;
    let text = match args.output.format {
        Format::Human => output::report(&view),
        Format::Json => serde_json::to_string_pretty(&view)? + "\n",
        Format::Csv => output::report_csv(&view)?,
    };
    emit(args.output.out.as_ref(), &text)
}

fn cmd_frontier(args: &FrontierArgs) -> Result<()> {
    let market = load_market(&args.market)?;
    let (canonical, front) = solve_frontier(&market)?;
    let view = FrontierView::new(&market, &canonical, &front);
    let text = match args.output.format {
        Format::Human => output::frontier(&view),
        Format::Json => serde_json::to_string_pretty(&view)? + "\n",
        Format::Csv => output::frontier_csv(&view)?,
    };
    emit(args.output.out.as_ref(), &text)
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let mode = match args.mode {
        Mode::Homogeneous => CostMode::Homogeneous,
        Mode::Heterogeneous => CostMode::Heterogeneous,
    };
    let mut cfg = GeneratorConfig::new(args.m, mode, args.seed);
    cfg.utility_scale = args.scale;
    emit(args.out.as_ref(), &write_market(&generate_market(&cfg)?))
}

fn cmd_reduce(args: &ReduceArgs) -> Result<()> {
    let kp = read_knapsack(&read_input(&args.instance)?)?;
    let reduction = knapsack_to_market(&kp)?;
    eprintln!("denominator D = {}", reduction.denominator);
    emit(args.out.as_ref(), &write_market(&reduction.market))
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let env = Environment::current();
    eprintln!(
        "host {} / {} {} / {} build / collegeapp {}",
        env.host, env.os, env.arch, env.profile, env.version
    );
    let text = if args.experiment == 3 {
        let cfg = Experiment3Config {
            count: args.count,
            seed: args.seed,
            ..Experiment3Config::default()
        };
        ratios_to_csv(&experiment3(&cfg)?)
    } else {
        let default_sizes = if args.experiment == 1 {
            vec![16, 64, 256, 1024]
        } else {
            vec![8, 16, 32, 64, 128, 256]
        };
        let mut cfg = BenchConfig::new(args.sizes.clone().unwrap_or(default_sizes));
        cfg.instances = args.instances;
        cfg.reps = args.reps;
        cfg.seed = args.seed;
        let report = if args.experiment == 1 {
            experiment1(&cfg)?
        } else {
            experiment2(&cfg)?
        };
        report.to_csv()
    };
    emit(args.out.as_ref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Frontier(a) => cmd_frontier(a),
        Command::Generate(a) => cmd_generate(a),
        Command::ReduceKnapsack(a) => cmd_reduce(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
