use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mtla::report::{pairwise, summary_text, write_outputs};
use mtla::scenario::KMH;
use mtla::{DriverKind, Scenario, ScenarioError, SimTrace};

/// Exit codes: 0 success, 1 usage, 2 scenario, 3 runtime.
const EXIT_USAGE: u8 = 1;
const EXIT_SCENARIO: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mtla",
    version,
    about = "Multi-light speed advisory corridor simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one or more drivers and write their traces.
    Run(RunArgs),
    /// Simulate at least two drivers and report pairwise energy reductions.
    Compare(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long, default_value = "milan_corridor")]
    scenario: String,
    /// Comma-separated driver kinds (baseline, advised_nonoptimal, advised_optimal).
    #[arg(long, value_delimiter = ',')]
    driver: Vec<DriverKind>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Override the scenario's initial speed, km/h
    #[arg(long)]
    initial_speed_kmh: Option<f64>,
    /// Tracking weights w_v,w_a,w_j of the optimal advisor.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    mpc_weights: Option<Vec<f64>>,
    /// Also write per-figure CSVs under <out>/plots.
    #[arg(long)]
    emit_plot_data: bool,
    /// Accepted for reproducibility records; runs are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Raise log verbosity (repeatable). GLOSA_LOG overrides it.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Scenario(ScenarioError),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Scenario(_) => EXIT_SCENARIO,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let env = env_logger::Env::new().filter_or("GLOSA_LOG", level);
    let _ = env_logger::Builder::from_env(env).try_init();
}

fn load(args: &RunArgs) -> Result<Scenario, Failure> {
    let mut scenario = Scenario::resolve(&args.scenario).map_err(Failure::Scenario)?;
    if let Some(kmh) = args.initial_speed_kmh {
        scenario.sim.initial_speed = kmh * KMH;
    }
    if let Some(w) = &args.mpc_weights {
        let [w_v, w_a, w_j] = w[..] else {
            return Err(Failure::Usage(format!(
                "--mpc-weights expects three values w_v,w_a,w_j, got {}",
                w.len()
            )));
        };
        scenario.mpc.w_v = w_v;
        scenario.mpc.w_a = w_a;
        scenario.mpc.w_j = w_j;
    }
    scenario.validate().map_err(Failure::Scenario)?;
    Ok(scenario)
}

fn simulate(scenario: &Scenario, drivers: &[DriverKind]) -> Result<Vec<SimTrace>, Failure> {
    thread::scope(|scope| {
        let handles: Vec<_> = drivers
            .iter()
            .map(|&kind| scope.spawn(move || mtla::run(scenario, kind)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .expect("simulation thread panicked")
                    .map_err(|e| Failure::Runtime(e.into()))
            })
            .collect()
    })
}

fn execute(args: RunArgs, compare: bool) -> Result<(), Failure> {
    init_logging(args.verbose);
    let mut drivers = args.driver.clone();
    if drivers.is_empty() {
        drivers = if compare {
            DriverKind::ALL.to_vec()
        } else {
            vec![DriverKind::Baseline]
        };
    }
    let mut seen = Vec::new();
    drivers.retain(|d| {
        let fresh = !seen.contains(d);
        seen.push(*d);
        fresh
    });
    if compare && drivers.len() < 2 {
        return Err(Failure::Usage(
            "compare needs at least two distinct driver kinds".into(),
        ));
    }
    let scenario = load(&args)?;
    log::info!(
        "scenario '{}', drivers {:?}, seed {}",
        scenario.name,
        drivers,
        args.seed
    );
    let traces = simulate(&scenario, &drivers)?;
    let comparisons = pairwise(&traces).map_err(|e| Failure::Runtime(e.into()))?;
    let written = write_outputs(
        &args.out,
        &scenario,
        &traces,
        &comparisons,
        args.emit_plot_data,
    )
    .with_context(|| format!("writing results to {}", args.out.display()))
    .map_err(Failure::Runtime)?;
    print!("{}", summary_text(&traces, &comparisons));
    for f in written.files {
        log::info!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => execute(args, false),
        Command::Compare(args) => execute(args, true),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Scenario(e) => eprintln!("scenario error: {e}"),
                Failure::Runtime(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
