//! Synchronous round engine for the go-to-the-middle strategy family.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{is_eps_marching, is_eps_maxchain, phi1, phi2, Configuration, Point, ETA_ZERO};
use crate::error::{invalid, End, Error, Result};
use crate::generators::Uniform;
use crate::spectral::{MatrixKind, MatrixSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DiscreteStrategy {
    MaxGtM,
    OneFixedMaxGtM(End),
    TauMaxGtM(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceMode {
    None,
    EveryK(usize),
    Full,
}

impl TraceMode {
    pub(crate) fn records(self, t: usize) -> bool {
        match self {
            TraceMode::None => false,
            TraceMode::Full => true,
            TraceMode::EveryK(k) => k > 0 && t % k == 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiscreteOutcome {
    EpsMaxChain,
    EpsMarching,
    MaxRoundsExceeded,
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub round: usize,
    pub config: Configuration,
    pub phi1: f64,
    /// Squared displacement of the round starting here; NaN if no successor exists.
    pub phi2: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteRunResult {
    pub final_config: Configuration,
    pub rounds: usize,
    pub outcome: DiscreteOutcome,
    pub trace: Vec<TraceEntry>,
}

#[derive(Clone, Copy)]
enum OuterRule {
    Fixed,
    Move(f64),
}

fn unit_or(w: Point, end: End, fallback: &mut Option<Uniform>) -> Result<Point> {
    let len = w.norm();
    if len > ETA_ZERO {
        return Ok(w / len);
    }
    match fallback {
        Some(rng) => {
            let a = 2.0 * std::f64::consts::PI * rng.next();
            Ok(Point::new(a.cos(), a.sin()))
        }
        None => Err(Error::ZeroOuterEdge { end, round: None }),
    }
}

fn step_with(
    config: &Configuration,
    first: OuterRule,
    last: OuterRule,
    symmetry: &mut Option<Uniform>,
) -> Result<Configuration> {
    let p = config.positions();
    let n = p.len();
    let mut next = Vec::with_capacity(n);
    next.push(match first {
        OuterRule::Fixed => p[0],
        OuterRule::Move(f) => {
            let w = p[1] - p[0];
            p[0] + (w - unit_or(w, End::First, symmetry)?) * (0.5 * f)
        }
    });
    for i in 1..n - 1 {
        next.push((p[i - 1] + p[i + 1]) * 0.5);
    }
    next.push(match last {
        OuterRule::Fixed => p[n - 1],
        OuterRule::Move(f) => {
            let w = p[n - 1] - p[n - 2];
            p[n - 1] - (w - unit_or(w, End::Last, symmetry)?) * (0.5 * f)
        }
    });
    Ok(Configuration::from_raw(next))
}

fn rules(strategy: DiscreteStrategy) -> Result<(OuterRule, OuterRule)> {
    Ok(match strategy {
        DiscreteStrategy::MaxGtM => (OuterRule::Move(1.0), OuterRule::Move(1.0)),
        DiscreteStrategy::OneFixedMaxGtM(End::First) => (OuterRule::Fixed, OuterRule::Move(1.0)),
        DiscreteStrategy::OneFixedMaxGtM(End::Last) => (OuterRule::Move(1.0), OuterRule::Fixed),
        DiscreteStrategy::TauMaxGtM(tau) => {
            if !(0.0..=0.5).contains(&tau) {
                return Err(invalid("tau must lie in [0, 1/2]"));
            }
            (OuterRule::Move(1.0 - tau), OuterRule::Move(1.0 - tau))
        }
    })
}

pub fn step(config: &Configuration, strategy: DiscreteStrategy) -> Result<Configuration> {
    let (first, last) = rules(strategy)?;
    step_with(config, first, last, &mut None)
}

/// Inner robots jump to the neighbour midpoint; each outer robot jumps to
/// the midpoint of its neighbour and a virtual robot one unit further out.
pub fn step_max_gtm(config: &Configuration) -> Result<Configuration> {
    step(config, DiscreteStrategy::MaxGtM)
}

pub fn step_one_fixed(config: &Configuration, fixed_end: End) -> Result<Configuration> {
    step(config, DiscreteStrategy::OneFixedMaxGtM(fixed_end))
}

pub fn step_tau_gtm(config: &Configuration, tau: f64) -> Result<Configuration> {
    step(config, DiscreteStrategy::TauMaxGtM(tau))
}

/// Round matrix acting on each coordinate of the stacked edge vectors.
pub fn strategy_matrix(config: &Configuration) -> Result<MatrixSpec> {
    let w = config.vectors();
    let dim = w.len();
    let first = w.w()[0].norm();
    let last = w.w()[dim - 1].norm();
    if first <= ETA_ZERO {
        return Err(Error::ZeroOuterEdge { end: End::First, round: None });
    }
    if last <= ETA_ZERO {
        return Err(Error::ZeroOuterEdge { end: End::Last, round: None });
    }
    let mut s = DMatrix::zeros(dim, dim);
    for k in 0..dim.saturating_sub(1) {
        s[(k, k + 1)] = 0.5;
        s[(k + 1, k)] = 0.5;
    }
    s[(0, 0)] = 0.5 / first;
    s[(dim - 1, dim - 1)] += 0.5 / last;
    Ok(MatrixSpec::new(MatrixKind::Strategy, s))
}

pub fn run_discrete(
    strategy: DiscreteStrategy,
    start: &Configuration,
    eps: f64,
    max_rounds: usize,
    record: TraceMode,
) -> Result<DiscreteRunResult> {
    run_discrete_with(strategy, start, eps, max_rounds, record, None)
}

/// As [`run_discrete`]; with `symmetry_break = Some(seed)` a zero outer
/// edge gets a seeded random direction instead of halting the run.
pub fn run_discrete_with(
    strategy: DiscreteStrategy,
    start: &Configuration,
    eps: f64,
    max_rounds: usize,
    record: TraceMode,
    symmetry_break: Option<u64>,
) -> Result<DiscreteRunResult> {
    if max_rounds == 0 {
        return Err(invalid("max_rounds must be at least 1"));
    }
    let (first, last) = rules(strategy)?;
    let mut rng = symmetry_break.map(Uniform::new);
    let mut trace = Vec::new();
    let mut config = start.clone();
    let mut round = 0;
    let outcome = loop {
        if is_eps_maxchain(&config, eps) {
            break DiscreteOutcome::EpsMaxChain;
        }
        if is_eps_marching(&config, eps) {
            break DiscreteOutcome::EpsMarching;
        }
        if round >= max_rounds {
            break DiscreteOutcome::MaxRoundsExceeded;
        }
        let next = step_with(&config, first, last, &mut rng).map_err(|e| match e {
            Error::ZeroOuterEdge { end, .. } => Error::ZeroOuterEdge { end, round: Some(round) },
            other => other,
        })?;
        if record.records(round) {
            trace.push(TraceEntry {
                round,
                phi1: phi1(&config),
                phi2: phi2(&config, &next)?,
                config: config.clone(),
            });
        }
        config = next;
        round += 1;
    };
    if record != TraceMode::None {
        let phi2_next = step_with(&config, first, last, &mut rng)
            .ok()
            .map_or(f64::NAN, |next| phi2(&config, &next).unwrap_or(f64::NAN));
        trace.push(TraceEntry { round, phi1: phi1(&config), phi2: phi2_next, config: config.clone() });
    }
    Ok(DiscreteRunResult { final_config: config, rounds: round, outcome, trace })
}

/// Long-format positions: `t,i,x,y`.
pub fn write_position_trace<W: Write>(trace: &[TraceEntry], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["t", "i", "x", "y"])?;
    for entry in trace {
        for (k, p) in entry.config.positions().iter().enumerate() {
            wtr.write_record([
                entry.round.to_string(),
                (k + 1).to_string(),
                p.x.to_string(),
                p.y.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Per-round metrics: `t,phi1,phi2,L,delta_1n`.
pub fn write_metrics_trace<W: Write>(trace: &[TraceEntry], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["t", "phi1", "phi2", "L", "delta_1n"])?;
    for entry in trace {
        let c = &entry.config;
        let length: f64 = c.vectors().lengths().iter().sum();
        let span = (c.p(c.n()) - c.p(1)).norm();
        wtr.write_record([
            entry.round.to_string(),
            entry.phi1.to_string(),
            entry.phi2.to_string(),
            length.to_string(),
            span.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_marching_chain, gen_random, Family};
    use nalgebra::DVector;

    fn line(xs: &[f64]) -> Configuration {
        Configuration::new(xs.iter().map(|&x| Point::new(x, 0.0)).collect()).unwrap()
    }

    fn xs(c: &Configuration) -> Vec<f64> {
        c.positions().iter().map(|p| p.x).collect()
    }

    #[test]
    fn three_robot_step() {
        let next = step_max_gtm(&line(&[0.0, 0.5, 1.0])).unwrap();
        assert_eq!(xs(&next), vec![-0.25, 0.5, 1.25]);
        assert!(next.positions().iter().all(|p| p.y == 0.0));
    }

    #[test]
    fn one_fixed_and_tau_steps() {
        let c = line(&[0.0, 0.5, 1.0]);
        assert_eq!(xs(&step_one_fixed(&c, End::First).unwrap()), vec![0.0, 0.5, 1.25]);
        assert_eq!(xs(&step_one_fixed(&c, End::Last).unwrap()), vec![-0.25, 0.5, 1.0]);
        let t = step_tau_gtm(&c, 0.5).unwrap();
        assert!((t.p(1).x + 0.125).abs() < 1e-15);
        assert_eq!(step_tau_gtm(&c, 0.0).unwrap(), step_max_gtm(&c).unwrap());
        assert!(step_tau_gtm(&c, 0.7).is_err());
    }

    #[test]
    fn max_chain_is_fixed_for_every_strategy() {
        let c = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        for s in [
            DiscreteStrategy::MaxGtM,
            DiscreteStrategy::OneFixedMaxGtM(End::First),
            DiscreteStrategy::OneFixedMaxGtM(End::Last),
            DiscreteStrategy::TauMaxGtM(0.3),
        ] {
            assert_eq!(step(&c, s).unwrap(), c);
        }
    }

    #[test]
    fn marching_chain_translates() {
        let c = gen_marching_chain(10).unwrap();
        let next = step_max_gtm(&c).unwrap();
        for (a, b) in c.positions().iter().zip(next.positions()) {
            assert!(((b - a) - Point::new(-0.1, 0.0)).norm() < 1e-12);
        }
        assert!((phi2(&c, &next).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_outer_edge_halts() {
        let c = line(&[0.0, 0.0, 1.0]);
        assert!(matches!(step_max_gtm(&c), Err(Error::ZeroOuterEdge { end: End::First, .. })));
        assert!(step_one_fixed(&c, End::First).is_ok());
        let r = run_discrete(DiscreteStrategy::MaxGtM, &c, 1e-3, 10, TraceMode::None);
        assert!(matches!(r, Err(Error::ZeroOuterEdge { round: Some(0), .. })));
        let broken = run_discrete_with(DiscreteStrategy::MaxGtM, &c, 1e-3, 10, TraceMode::None, Some(7));
        assert!(broken.is_ok());
    }

    #[test]
    fn strategy_matrix_matches_step() {
        let c = line(&[0.0, 0.5, 1.0]);
        let s = strategy_matrix(&c).unwrap();
        assert_eq!(s.entries[(0, 0)], 1.0);
        let out = &s.entries * DVector::from_vec(vec![0.5, 0.5]);
        assert_eq!(out.as_slice(), &[0.75, 0.75]);

        let unit = line(&[0.0, 1.0, 2.0, 3.0]);
        let s = strategy_matrix(&unit).unwrap().entries;
        assert_eq!(s, s.transpose());
        assert_eq!(s[(0, 0)], 0.5);

        for seed in 0..20 {
            let c = gen_random(Family::Random2D, 9, seed).unwrap();
            let s = strategy_matrix(&c).unwrap().entries;
            let w = c.vectors();
            let xs = DVector::from_iterator(w.len(), w.w().iter().map(|v| v.x));
            let ys = DVector::from_iterator(w.len(), w.w().iter().map(|v| v.y));
            let next = step_max_gtm(&c).unwrap().vectors();
            let (nx, ny) = (&s * xs, &s * ys);
            for (k, v) in next.w().iter().enumerate() {
                assert!((v.x - nx[k]).abs() < 1e-12 && (v.y - ny[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn run_stops_immediately_on_targets() {
        let max = line(&[0.0, 1.0, 2.0]);
        let r = run_discrete(DiscreteStrategy::MaxGtM, &max, 1e-6, 5, TraceMode::None).unwrap();
        assert_eq!((r.outcome, r.rounds), (DiscreteOutcome::EpsMaxChain, 0));
        let m = gen_marching_chain(10).unwrap();
        let r = run_discrete(DiscreteStrategy::MaxGtM, &m, 1e-6, 5, TraceMode::None).unwrap();
        assert_eq!((r.outcome, r.rounds), (DiscreteOutcome::EpsMarching, 0));
    }

    #[test]
    fn trace_modes() {
        let c = line(&[0.0, 0.3, 0.6, 0.9]);
        let full = run_discrete(DiscreteStrategy::MaxGtM, &c, 1e-3, 1000, TraceMode::Full).unwrap();
        assert_eq!(full.outcome, DiscreteOutcome::EpsMaxChain);
        assert_eq!(full.trace.len(), full.rounds + 1);
        let sparse =
            run_discrete(DiscreteStrategy::MaxGtM, &c, 1e-3, 1000, TraceMode::EveryK(5)).unwrap();
        assert!(sparse.trace.iter().rev().skip(1).all(|e| e.round % 5 == 0));
        let mut buf = Vec::new();
        write_metrics_trace(&full.trace, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,phi1,phi2,L,delta_1n\n0,"));
        let mut buf = Vec::new();
        write_position_trace(&full.trace[..1], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
