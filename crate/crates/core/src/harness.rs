//! Parameter sweeps over either engine.

use std::cmp::Ordering;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{phi1, Configuration};
use crate::continuous::{integrate, MobParams, Sampling};
use crate::discrete::{run_discrete, DiscreteStrategy, TraceMode};
use crate::error::{invalid, End, Result};
use crate::fit::{fit_power_law, median, Fit};
use crate::generators::{generate, Family, GeneratorSpec};

/// Environment variable capping sweep parallelism.
pub const WORKERS_ENV: &str = "CHAINFORM_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    Discrete,
    Continuous,
}

impl Engine {
    pub fn cli_name(self) -> &'static str {
        match self {
            Engine::Discrete => "discrete",
            Engine::Continuous => "continuous",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Self> {
        [Engine::Discrete, Engine::Continuous].into_iter().find(|e| e.cli_name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    MaxGtm,
    OneFixedGtm,
    TauGtm,
    MaxMob,
    NaiveMaxMob,
}

impl Strategy {
    pub const ALL: [Strategy; 5] =
        [Strategy::MaxGtm, Strategy::OneFixedGtm, Strategy::TauGtm, Strategy::MaxMob, Strategy::NaiveMaxMob];

    pub fn cli_name(self) -> &'static str {
        match self {
            Strategy::MaxGtm => "max-gtm",
            Strategy::OneFixedGtm => "one-fixed-gtm",
            Strategy::TauGtm => "tau-gtm",
            Strategy::MaxMob => "max-mob",
            Strategy::NaiveMaxMob => "naive-max-mob",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Self> {
        Strategy::ALL.into_iter().find(|s| s.cli_name() == name)
    }

    pub fn engine(self) -> Engine {
        match self {
            Strategy::MaxGtm | Strategy::OneFixedGtm | Strategy::TauGtm => Engine::Discrete,
            Strategy::MaxMob | Strategy::NaiveMaxMob => Engine::Continuous,
        }
    }

    /// The discrete rule for `tau`; the one-fixed variant freezes robot 1.
    pub fn discrete(self, tau: f64) -> Option<DiscreteStrategy> {
        match self {
            Strategy::MaxGtm => Some(DiscreteStrategy::MaxGtM),
            Strategy::OneFixedGtm => Some(DiscreteStrategy::OneFixedMaxGtM(End::First)),
            Strategy::TauGtm => Some(DiscreteStrategy::TauMaxGtM(tau)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub engine: Engine,
    pub strategy: Strategy,
    pub family: Family,
    pub n: Vec<usize>,
    pub delta: Vec<f64>,
    pub tau: Vec<f64>,
    pub eps: Vec<f64>,
    pub seeds: Vec<u64>,
    pub max_rounds: usize,
    pub t_max: f64,
    pub dt: f64,
    /// Defaults to the run's `eps` when absent.
    pub eps_collapse: Option<f64>,
}

impl ExperimentSpec {
    pub fn new(strategy: Strategy, family: Family, n: Vec<usize>) -> Self {
        Self {
            engine: strategy.engine(),
            strategy,
            family,
            n,
            delta: vec![0.0],
            tau: vec![0.25],
            eps: vec![1e-3],
            seeds: vec![0],
            max_rounds: 1_000_000,
            t_max: 1e4,
            dt: 1e-3,
            eps_collapse: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategy.engine() != self.engine {
            return Err(invalid(format!(
                "strategy {} does not run on the {} engine",
                self.strategy.cli_name(),
                self.engine.cli_name()
            )));
        }
        if self.n.is_empty()
            || self.delta.is_empty()
            || self.tau.is_empty()
            || self.eps.is_empty()
            || self.seeds.is_empty()
        {
            return Err(invalid("every grid axis needs at least one value"));
        }
        if self.max_rounds == 0 || !(self.t_max > 0.0) || !(self.dt > 0.0) {
            return Err(invalid("budgets and dt must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<GridPoint> {
        let mut points = Vec::new();
        for &n in &self.n {
            for &delta in &self.delta {
                for &tau in &self.tau {
                    for &eps in &self.eps {
                        for &seed in &self.seeds {
                            points.push(GridPoint { n, delta, tau, eps, seed });
                        }
                    }
                }
            }
        }
        points.sort_by(GridPoint::cmp_key);
        points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub delta: f64,
    pub tau: f64,
    pub eps: f64,
    pub seed: u64,
}

impl GridPoint {
    fn cmp_key(a: &Self, b: &Self) -> Ordering {
        a.n.cmp(&b.n)
            .then(a.delta.total_cmp(&b.delta))
            .then(a.tau.total_cmp(&b.tau))
            .then(a.eps.total_cmp(&b.eps))
            .then(a.seed.cmp(&b.seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: GridPoint,
    pub outcome: String,
    /// Rounds for the discrete engine, simulated time for the continuous one.
    pub cost: f64,
    pub phi1: f64,
    pub delta_1n: f64,
    pub length: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fit: Option<Fit>,
}

fn finished(point: GridPoint, outcome: String, cost: f64, c: &Configuration) -> SweepRow {
    SweepRow {
        point,
        outcome,
        cost,
        phi1: phi1(c),
        delta_1n: (c.p(c.n()) - c.p(1)).norm(),
        length: c.vectors().lengths().iter().sum(),
        error: None,
    }
}

pub fn run_point(spec: &ExperimentSpec, point: GridPoint) -> SweepRow {
    let attempt = || -> Result<SweepRow> {
        let start = generate(&GeneratorSpec {
            family: spec.family,
            n: point.n,
            delta: point.delta,
            tau: point.tau,
            seed: point.seed,
            epsilon: point.eps,
        })?;
        match spec.engine {
            Engine::Discrete => {
                let strategy = spec.strategy.discrete(point.tau).expect("validated engine");
                let r = run_discrete(strategy, &start, point.eps, spec.max_rounds, TraceMode::None)?;
                Ok(finished(point, format!("{:?}", r.outcome), r.rounds as f64, &r.final_config))
            }
            Engine::Continuous => {
                let naive = spec.strategy == Strategy::NaiveMaxMob;
                let params = MobParams::new(point.tau, naive)?.with_dt(spec.dt)?;
                let collapse = spec.eps_collapse.unwrap_or(point.eps);
                let r = integrate(&start, &params, point.eps, collapse, spec.t_max, Sampling::None)?;
                Ok(finished(point, format!("{:?}", r.outcome), r.elapsed, &r.final_config))
            }
        }
    };
    attempt().unwrap_or_else(|e| SweepRow {
        point,
        outcome: "Error".into(),
        cost: f64::NAN,
        phi1: f64::NAN,
        delta_1n: f64::NAN,
        length: f64::NAN,
        error: Some(e.to_string()),
    })
}

/// Worker count from `CHAINFORM_WORKERS`, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

/// Runs every grid point; per-run failures land in the row, not the result.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| invalid(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| grid.par_iter().map(|&p| run_point(spec, p)).collect());
    let fit = scaling_fit(&rows);
    Ok(SweepResult { rows, fit })
}

/// Power-law fit of median cost against n over the largest (up to) four n.
pub fn scaling_fit(rows: &[SweepRow]) -> Option<Fit> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.point.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return None;
    }
    let keep = &ns[ns.len().saturating_sub(4)..];
    let points: Vec<(f64, f64)> = keep
        .iter()
        .map(|&n| {
            let costs: Vec<f64> =
                rows.iter().filter(|r| r.point.n == n && r.error.is_none()).map(|r| r.cost).collect();
            (n as f64, median(&costs))
        })
        .collect();
    fit_power_law(&points).ok()
}

pub const RESULTS_HEADER: [&str; 11] =
    ["n", "delta", "tau", "eps", "seed", "outcome", "cost", "phi1", "delta_1n", "L", "error"];

pub fn write_results_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(RESULTS_HEADER)?;
    for r in &result.rows {
        let p = &r.point;
        wtr.write_record([
            p.n.to_string(),
            p.delta.to_string(),
            p.tau.to_string(),
            p.eps.to_string(),
            p.seed.to_string(),
            r.outcome.clone(),
            r.cost.to_string(),
            r.phi1.to_string(),
            r.delta_1n.to_string(),
            r.length.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Runs the sweep and writes `results.csv` and `metadata.json` into `dir`.
pub fn run_sweep_to_dir(spec: &ExperimentSpec, dir: &Path) -> Result<SweepResult> {
    let started = Instant::now();
    let result = run_sweep(spec)?;
    fs::create_dir_all(dir)?;
    write_results_csv(&result, fs::File::create(dir.join("results.csv"))?)?;
    let meta = serde_json::json!({
        "spec": spec,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "workers": worker_count(),
        "rows": result.rows.len(),
        "errors": result.rows.iter().filter(|r| r.error.is_some()).count(),
        "fit": result.fit,
        "wall_seconds": started.elapsed().as_secs_f64(),
    });
    fs::write(dir.join("metadata.json"), serde_json::to_vec_pretty(&meta)?)?;
    Ok(result)
}
