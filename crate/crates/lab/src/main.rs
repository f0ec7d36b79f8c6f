use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use stablab::emit::emit;
use stablab::{run, Experiment, ExperimentConfig, Family, Report, Unit};

#[derive(Parser)]
#[command(name = "stablab", version, about = "Seeded phase-space and stabilizer experiments with checked reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank-support uncertainty relations and their equality cases
    Uncertainty(Common),
    /// Measures on states against their mean states
    Extremality(Common),
    /// Monotonicity of entropic quantities along convolution trajectories
    Monotonicity(Common),
    /// Convergence of repeated self-convolution to the mean state
    Clt(Common),
    /// Analysis of one state read from a matrix file
    State {
        /// Matrix file: header `dim d n`, then `row col re im` lines
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Local dimension (prime)
    #[arg(long)]
    d: Option<u32>,
    /// Number of qudits
    #[arg(long)]
    n: Option<usize>,
    /// Number of generated cases
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Renyi orders, comma separated
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Convolution parameter s (with --t)
    #[arg(long)]
    s: Option<u32>,
    /// Convolution parameter t (with --s)
    #[arg(long)]
    t: Option<u32>,
    /// Trajectory length
    #[arg(long = "L")]
    steps: Option<usize>,
    /// Output directory; nothing is written without it
    #[arg(long)]
    out: Option<PathBuf>,
    /// nats or dits
    #[arg(long)]
    unit: Option<Unit>,
    /// mixed, random or stabilizer
    #[arg(long)]
    family: Option<Family>,
}

impl Common {
    fn into_config(self, experiment: Experiment, input: Option<PathBuf>) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(experiment);
        c.d = self.d.unwrap_or(c.d);
        c.n = self.n.unwrap_or(c.n);
        c.count = self.count.unwrap_or(c.count);
        c.seed = self.seed.unwrap_or(c.seed);
        c.alphas = self.alpha.unwrap_or(c.alphas);
        c.s = self.s;
        c.t = self.t;
        c.steps = self.steps;
        c.out = self.out;
        c.unit = self.unit.unwrap_or(c.unit);
        c.family = self.family.unwrap_or(c.family);
        c.input = input;
        c
    }
}

fn print_summary(report: &Report) {
    let h = &report.header;
    let c = &h.config;
    println!(
        "{} {} {} d={} n={} count={} seed={} unit={}",
        h.tool, h.version, h.experiment, c.d, c.n, c.count, h.seed, h.unit
    );
    let aggs = report.aggregates();
    let width = aggs.iter().map(|a| a.inequality.len()).max().unwrap_or(0);
    for a in &aggs {
        println!("  {:<width$}  {:>6} checks  {:>4} violations", a.inequality, a.checks, a.violations);
    }
    for (k, v) in &report.extras {
        println!("  {k}: {v}");
    }
    println!("violations: {}", report.violations());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match cli.command {
        Command::Uncertainty(c) => c.into_config(Experiment::Uncertainty, None),
        Command::Extremality(c) => c.into_config(Experiment::Extremality, None),
        Command::Monotonicity(c) => c.into_config(Experiment::Monotonicity, None),
        Command::Clt(c) => c.into_config(Experiment::Clt, None),
        Command::State { input, common } => common.into_config(Experiment::State, Some(input)),
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("stablab: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Some(dir) = &config.out {
        if let Err(e) = emit(&report, dir) {
            eprintln!("stablab: {e}");
            return ExitCode::from(e.exit_code());
        }
    }
    print_summary(&report);
    if report.violations() > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
