use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainform::acceptance;
use chainform::continuous::{self, integrate, outer_angle_watch, MobParams, Sampling};
use chainform::discrete::{self, run_discrete_with, TraceMode};
use chainform::generators::{generate, Family, GeneratorSpec};
use chainform::harness::{run_sweep_to_dir, Engine, ExperimentSpec, Strategy};
use chainform::spectral::{self, eigenvalues, rayleigh_bound, MatrixSpec};
use chainform::{Configuration, Error};

#[derive(Parser)]
#[command(name = "chainform", version, about = "Max-chain formation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a start configuration as `i,x,y` CSV.
    Gen {
        #[command(flatten)]
        start: StartArgs,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one simulation.
    Simulate(SimulateArgs),
    /// Run a parameter grid and write results.csv and metadata.json.
    Sweep(SweepArgs),
    /// Eigenvalues of one of the analysis matrices.
    Spectrum(SpectrumArgs),
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value = "acceptance")]
        suite: String,
        /// Criterion ids to run; all when absent.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Args)]
struct StartArgs {
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target accuracy, also used by the lower-bound family.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceArg {
    None,
    EveryK,
    Full,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_engine)]
    engine: Engine,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// Start configuration CSV; otherwise generated from --family.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    start: StartArgs,
    #[arg(long)]
    eps_collapse: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0.01)]
    sample_dt: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_rounds: usize,
    #[arg(long, default_value_t = 1e4)]
    t_max: f64,
    #[arg(long, value_enum, default_value_t = TraceArg::None)]
    trace: TraceArg,
    /// Round stride for `--trace every-k`.
    #[arg(long, default_value_t = 10)]
    every: usize,
    /// `random(SEED)`: give a zero outer edge a seeded direction.
    #[arg(long, value_parser = parse_symmetry_break)]
    symmetry_break: Option<u64>,
    /// Directory for final.csv, trace.csv and metrics.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_engine)]
    engine: Engine,
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    delta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.25")]
    tau: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seed: Vec<u64>,
    #[arg(long)]
    eps_collapse: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_rounds: usize,
    #[arg(long, default_value_t = 1e4)]
    t_max: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixArg {
    A1,
    A2,
    A3,
    JacobianMarching,
    JacobianAt,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    matrix: MatrixArg,
    #[arg(long)]
    n: Option<usize>,
    /// Configuration CSV for `jacobian-at`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::TooFewRobots { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::from_cli_name(s).ok_or_else(|| {
        let names: Vec<_> = Family::ALL.iter().map(|f| f.cli_name()).collect();
        format!("unknown family {s:?}, expected one of {}", names.join(", "))
    })
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    Engine::from_cli_name(s).ok_or_else(|| format!("unknown engine {s:?}, expected discrete or continuous"))
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    Strategy::from_cli_name(s).ok_or_else(|| {
        let names: Vec<_> = Strategy::ALL.iter().map(|s| s.cli_name()).collect();
        format!("unknown strategy {s:?}, expected one of {}", names.join(", "))
    })
}

fn parse_symmetry_break(s: &str) -> Result<u64, String> {
    s.strip_prefix("random(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|seed| seed.trim().parse().ok())
        .ok_or_else(|| format!("expected random(SEED), got {s:?}"))
}

fn read_config(path: &Path) -> Result<Configuration, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Configuration::read_csv(file)?)
}

fn start_config(config: Option<&Path>, start: &StartArgs) -> Result<Configuration, Failure> {
    if let Some(path) = config {
        return read_config(path);
    }
    let (Some(family), Some(n)) = (start.family, start.n) else {
        return Err(Failure::Usage("give --config, or --family with --n".into()));
    };
    Ok(generate(&GeneratorSpec {
        family,
        n,
        delta: start.delta,
        tau: start.tau,
        seed: start.seed,
        epsilon: start.eps,
    })?)
}

fn create(dir: &Path, name: &str) -> Result<fs::File, Failure> {
    Ok(fs::File::create(dir.join(name))?)
}

fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    if a.strategy.engine() != a.engine {
        return Err(Failure::Usage(format!(
            "strategy {} runs on the {} engine",
            a.strategy.cli_name(),
            a.strategy.engine().cli_name()
        )));
    }
    let start = start_config(a.config.as_deref(), &a.start)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
    }
    match a.engine {
        Engine::Discrete => {
            let strategy = a.strategy.discrete(a.start.tau).expect("discrete strategy");
            let mode = match a.trace {
                TraceArg::None => TraceMode::None,
                TraceArg::EveryK => TraceMode::EveryK(a.every),
                TraceArg::Full => TraceMode::Full,
            };
            let r = run_discrete_with(strategy, &start, a.start.eps, a.max_rounds, mode, a.symmetry_break)?;
            println!("outcome {:?} rounds {}", r.outcome, r.rounds);
            if let Some(dir) = &a.out {
                r.final_config.write_csv(create(dir, "final.csv")?)?;
                discrete::write_position_trace(&r.trace, create(dir, "trace.csv")?)?;
                discrete::write_metrics_trace(&r.trace, create(dir, "metrics.csv")?)?;
            }
        }
        Engine::Continuous => {
            let naive = a.strategy == Strategy::NaiveMaxMob;
            let params = MobParams::new(a.start.tau, naive)?.with_dt(a.dt)?;
            let sampling = match a.trace {
                TraceArg::None => Sampling::None,
                TraceArg::EveryK => Sampling::Interval(a.sample_dt),
                TraceArg::Full => Sampling::EveryStep,
            };
            let collapse = a.eps_collapse.unwrap_or(a.start.eps);
            let r = integrate(&start, &params, a.start.eps, collapse, a.t_max, sampling)?;
            println!(
                "outcome {:?} time {:.6} steps {} fallbacks {}",
                r.outcome, r.elapsed, r.steps, r.projection_fallbacks
            );
            if let Some(dir) = &a.out {
                r.final_config.write_csv(create(dir, "final.csv")?)?;
                continuous::write_position_trace(&r.trace, create(dir, "trace.csv")?)?;
                continuous::write_metrics_trace(&outer_angle_watch(&r.trace), create(dir, "metrics.csv")?)?;
            }
        }
    }
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let spec = ExperimentSpec {
        engine: a.engine,
        strategy: a.strategy,
        family: a.family,
        n: a.n.clone(),
        delta: a.delta.clone(),
        tau: a.tau.clone(),
        eps: a.eps.clone(),
        seeds: a.seed.clone(),
        max_rounds: a.max_rounds,
        t_max: a.t_max,
        dt: a.dt,
        eps_collapse: a.eps_collapse,
    };
    spec.validate()?;
    let result = run_sweep_to_dir(&spec, &a.out)?;
    let errors = result.rows.iter().filter(|r| r.error.is_some()).count();
    println!("rows {} errors {}", result.rows.len(), errors);
    if let Some(fit) = result.fit {
        println!("fit slope {:.4} intercept {:.4} r2 {:.4}", fit.slope, fit.intercept, fit.r_squared);
    }
    Ok(())
}

fn matrix(a: &SpectrumArgs) -> Result<MatrixSpec, Failure> {
    if let MatrixArg::JacobianAt = a.matrix {
        let path = a.config.as_deref().ok_or_else(|| Failure::Usage("jacobian-at needs --config".into()))?;
        return Ok(spectral::jacobian_at(&read_config(path)?)?);
    }
    let n = a.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
    Ok(match a.matrix {
        MatrixArg::A1 => spectral::a1(n)?,
        MatrixArg::A2 => spectral::a2(n)?,
        MatrixArg::A3 => spectral::a3(n)?,
        MatrixArg::JacobianMarching => spectral::jacobian_marching(n)?,
        MatrixArg::JacobianAt => unreachable!(),
    })
}

fn spectrum(a: &SpectrumArgs) -> Result<(), Failure> {
    let m = matrix(a)?;
    let s = eigenvalues(&m, a.tol)?;
    let out: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(io::stdout()),
    };
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["k", "lambda", "residual"]).map_err(Error::from)?;
    for (k, lambda) in s.eigenvalues.iter().enumerate() {
        let residual = s.residuals.get(k).copied().unwrap_or(f64::NAN);
        wtr.write_record([(k + 1).to_string(), lambda.to_string(), residual.to_string()])
            .map_err(Error::from)?;
    }
    wtr.flush()?;
    drop(wtr);
    let radius = s.moduli().into_iter().fold(0.0, f64::max);
    let bound = rayleigh_bound(&m).map_or("n/a".to_string(), |b| b.to_string());
    let mut summary = format!("spectral_radius {radius} rayleigh_bound {bound}");
    if let (MatrixArg::JacobianMarching, Some(n)) = (a.matrix, a.n) {
        let n = n as f64;
        summary += &format!(" instability_bound {}", 1.0 + 1.0 / ((n - 1.0) * (n - 2.0)));
    }
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn verify(suite: &str, only: &[u8]) -> Result<bool, Failure> {
    if suite != "acceptance" {
        return Err(Failure::Usage(format!("unknown suite {suite:?}, expected acceptance")));
    }
    let ids: Vec<u8> =
        if only.is_empty() { acceptance::CRITERIA.iter().map(|c| c.0).collect() } else { only.to_vec() };
    let mut all = true;
    for id in ids {
        let report =
            acceptance::run_criterion(id).ok_or_else(|| Failure::Usage(format!("no criterion {id}")))?;
        println!("{report}");
        all &= report.passed;
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Gen { start, out } => start_config(None, start).and_then(|c| {
            match out {
                Some(path) => c.write_csv(fs::File::create(path)?)?,
                None => c.write_csv(io::stdout())?,
            }
            Ok(())
        }),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Verify { suite, only } => verify(suite, only).and_then(|ok| {
            if ok {
                Ok(())
            } else {
                Err(Failure::Run("acceptance suite has failing criteria".into()))
            }
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: chainform <gen|simulate|sweep|spectrum|verify> [options]; see --help");
            ExitCode::from(1)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
