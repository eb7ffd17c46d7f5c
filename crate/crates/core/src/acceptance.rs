//! The acceptance suite. Every criterion is a plain function returning a
//! verdict and a one-line detail; all tolerances are pinned here.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{angle_at, phi2, phi2_diff_lower_bound, Configuration};
use crate::continuous::{
    integrate, main_time_bound, outer_angle_watch, WATCH_MERGE, v_time_bound, ContinuousOutcome, MobParams,
    Sampling, WatchSample,
};
use crate::discrete::{run_discrete, step_max_gtm, DiscreteOutcome, DiscreteStrategy, TraceMode};
use crate::error::{End, Result};
use crate::fit::{fit_affine, fit_power_law, median};
use crate::generators::{
    gen_continuous_delta_v, gen_discrete_delta_v, gen_lower_bound_opposed,
    gen_marching_chain, gen_random, gen_tau_delta_v, Family,
};
use crate::spectral::{a1, a3, closed_form, eigenvalues, jacobian_marching, spectral_radius};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "AC{:<2} {} {:<34} {:>7.2}s  {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(u8, &str, Check); 12] = [
    (1, "marching-chain fixed point", ac1_marching_fixed_point),
    (2, "discrete upper-bound shape", ac2_upper_bound_shape),
    (3, "discrete lower-bound start", ac3_lower_bound_start),
    (4, "discrete V dependence on delta", ac4_delta_dependence),
    (5, "one stationary endpoint", ac5_one_stationary),
    (6, "spectral closed forms", ac6_spectral_closed_forms),
    (7, "potential laws", ac7_potential_laws),
    (8, "convergence dichotomy", ac8_dichotomy),
    (9, "continuous main bound", ac9_continuous_main_bound),
    (10, "continuous V contrast", ac10_continuous_v_contrast),
    (11, "slowed outer robots, discrete", ac11_tau_gtm_negative),
    (12, "continuous invariant suite", ac12_invariant_suite),
];

pub fn run_criterion(id: u8) -> Option<CriterionReport> {
    let &(id, title, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let started = Instant::now();
    let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
    Some(CriterionReport { id, title, passed, detail, seconds: started.elapsed().as_secs_f64() })
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0)).collect()
}

fn random_2d(n: usize, seed: u64) -> Result<Configuration> {
    gen_random(Family::Random2D, n, seed)
}

pub fn ac1_marching_fixed_point() -> Result<(bool, String)> {
    const TOL: f64 = 1e-12;
    let mut worst: f64 = 0.0;
    for n in [4, 10, 50] {
        let c = gen_marching_chain(n)?;
        let next = step_max_gtm(&c)?;
        for (a, b) in c.vectors().w().iter().zip(next.vectors().w()) {
            worst = worst.max((a - b).norm());
        }
        for (p, q) in c.positions().iter().zip(next.positions()) {
            worst = worst.max(((q - p).norm() - 1.0 / n as f64).abs());
        }
    }
    Ok((worst <= TOL, format!("max deviation {worst:.2e} (tol {TOL:.0e})")))
}

pub fn ac2_upper_bound_shape() -> Result<(bool, String)> {
    const EPS: f64 = 1e-4;
    const SEEDS: u64 = 20;
    const SLOPE: (f64, f64) = (1.8, 2.3);
    let ns = [8usize, 16, 32, 64];
    let jobs: Vec<(usize, u64)> = ns.iter().flat_map(|&n| (0..SEEDS).map(move |s| (n, s))).collect();
    let runs: Vec<(usize, bool, f64)> = jobs
        .par_iter()
        .map(|&(n, seed)| -> Result<(usize, bool, f64)> {
            let budget = (20.0 * (n * n) as f64 * (n as f64 / EPS).ln()).ceil() as usize;
            let start = gen_random(Family::OpposedRandom, n, seed)?;
            let r = run_discrete(DiscreteStrategy::MaxGtM, &start, EPS, budget, TraceMode::None)?;
            Ok((n, r.outcome == DiscreteOutcome::EpsMaxChain, r.rounds as f64))
        })
        .collect::<Result<_>>()?;
    let all_within = runs.iter().all(|r| r.1);
    let medians: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let v: Vec<f64> = runs.iter().filter(|r| r.0 == n).map(|r| r.2).collect();
            (n as f64, median(&v))
        })
        .collect();
    let fit = fit_power_law(&medians)?;
    let ok = all_within && fit.slope >= SLOPE.0 && fit.slope <= SLOPE.1;
    Ok((
        ok,
        format!(
            "medians {:?}, slope {:.3} in [{}, {}], all within budget: {all_within}",
            medians.iter().map(|m| m.1).collect::<Vec<_>>(),
            fit.slope,
            SLOPE.0,
            SLOPE.1
        ),
    ))
}

pub fn ac3_lower_bound_start() -> Result<(bool, String)> {
    const N: usize = 32;
    const R2: f64 = 0.98;
    let mut pts = Vec::new();
    for eps in [1e-2, 1e-4, 1e-6] {
        let start = gen_lower_bound_opposed(N, eps)?;
        let r = run_discrete(DiscreteStrategy::MaxGtM, &start, eps, 10_000_000, TraceMode::None)?;
        if r.outcome != DiscreteOutcome::EpsMaxChain {
            return Ok((false, format!("eps {eps}: ended {:?}", r.outcome)));
        }
        pts.push(((1.0 / eps).ln(), r.rounds as f64));
    }
    let fit = fit_affine(&pts)?;
    Ok((
        fit.slope > 0.0 && fit.r_squared >= R2,
        format!(
            "rounds {:?}, slope {:.2} per e-fold, r2 {:.5} (min {R2})",
            pts.iter().map(|p| p.1).collect::<Vec<_>>(),
            fit.slope,
            fit.r_squared
        ),
    ))
}

pub fn ac4_delta_dependence() -> Result<(bool, String)> {
    const N: usize = 16;
    const EPS: f64 = 1e-3;
    const R2: f64 = 0.95;
    const SLACK: f64 = 1e-12;
    let growth = 1.0 + 1.0 / (N - 2) as f64;
    let mut pts = Vec::new();
    let mut cap_ok = true;
    for delta in [1e-1, 1e-2, 1e-3, 1e-4] {
        let start = gen_discrete_delta_v(N, delta)?;
        let r = run_discrete(DiscreteStrategy::MaxGtM, &start, EPS, 10_000_000, TraceMode::Full)?;
        if r.outcome != DiscreteOutcome::EpsMaxChain {
            return Ok((false, format!("delta {delta}: ended {:?}", r.outcome)));
        }
        let x2: Vec<f64> = r.trace.iter().map(|e| e.config.vectors().edge(2).x).collect();
        cap_ok &= x2.windows(2).all(|s| s[1] <= growth * s[0] + SLACK);
        pts.push(((1.0 / delta).ln(), r.rounds as f64));
    }
    let increasing = pts.windows(2).all(|s| s[1].1 > s[0].1);
    let fit = fit_affine(&pts)?;
    Ok((
        increasing && fit.r_squared >= R2 && cap_ok,
        format!(
            "rounds {:?}, r2 {:.5} (min {R2}), strictly increasing: {increasing}, x2 growth cap held: {cap_ok}",
            pts.iter().map(|p| p.1).collect::<Vec<_>>(),
            fit.r_squared
        ),
    ))
}

pub fn ac5_one_stationary() -> Result<(bool, String)> {
    const EPS: f64 = 1e-3;
    const SEEDS: u64 = 10;
    const SPEC_TOL: f64 = 1e-8;
    let ns = [8usize, 16, 32];
    let jobs: Vec<(usize, u64)> = ns.iter().flat_map(|&n| (0..SEEDS).map(move |s| (n, s))).collect();
    let runs: Vec<(usize, bool, usize)> = jobs
        .par_iter()
        .map(|&(n, seed)| -> Result<(usize, bool, usize)> {
            let m = (2 * n - 1) as f64;
            let budget = (20.0 * m * m * ((n * n) as f64 / EPS).ln()).ceil() as usize;
            let start = random_2d(n, 500 + seed)?;
            let strategy = DiscreteStrategy::OneFixedMaxGtM(End::First);
            let r = run_discrete(strategy, &start, EPS, budget, TraceMode::None)?;
            Ok((n, r.outcome == DiscreteOutcome::EpsMaxChain, r.rounds))
        })
        .collect::<Result<_>>()?;
    let converged = runs.iter().all(|r| r.1);
    let mut worst: f64 = 0.0;
    for n in ns {
        let rho = spectral_radius(&a3(n)?)?;
        worst = worst.max((rho - (PI / (2 * n - 1) as f64).cos()).abs());
    }
    let max_rounds: Vec<usize> =
        ns.iter().map(|&n| runs.iter().filter(|r| r.0 == n).map(|r| r.2).max().unwrap_or(0)).collect();
    Ok((
        converged && worst <= SPEC_TOL,
        format!("all converged: {converged}, worst rounds per n {max_rounds:?}, A3 radius error {worst:.2e}"),
    ))
}

pub fn ac6_spectral_closed_forms() -> Result<(bool, String)> {
    const TOL: f64 = 1e-8;
    const BOUND_SLACK: f64 = 1e-10;
    let mut worst: f64 = 0.0;
    for n in [4, 8, 16, 32] {
        for (m, mut want) in [(a1(n)?, closed_form::a1_eigenvalues(n)), (a3(n)?, closed_form::a3_eigenvalues(n))] {
            let got = eigenvalues(&m, 1e-12)?.eigenvalues;
            want.sort_by(|a, b| b.total_cmp(a));
            for (g, w) in got.iter().zip(&want) {
                worst = worst.max((g - w).abs());
            }
        }
    }
    let mut unstable = true;
    let mut radii = Vec::new();
    for n in [6, 10, 20] {
        let rho = spectral_radius(&jacobian_marching(n)?)?;
        let bound = 1.0 + 1.0 / ((n - 1) * (n - 2)) as f64;
        unstable &= rho > 1.0 && rho >= bound - BOUND_SLACK;
        radii.push(rho);
    }
    Ok((
        worst <= TOL && unstable,
        format!("eigenvalue error {worst:.2e} (tol {TOL:.0e}), marching Jacobian radii {radii:.6?}"),
    ))
}

/// Starts shared by the potential and dichotomy criteria.
fn planar_corpus() -> Vec<(usize, u64)> {
    (0..200u64).map(|k| (3 + (k as usize % 30), 1000 + k)).collect()
}

pub fn ac7_potential_laws() -> Result<(bool, String)> {
    const ROUNDS: usize = 500;
    const SLACK: f64 = 1e-9;
    let worst: Vec<(f64, f64)> = planar_corpus()
        .par_iter()
        .map(|&(n, seed)| -> Result<(f64, f64)> {
            let mut states = vec![random_2d(n, seed)?];
            for _ in 0..ROUNDS + 1 {
                let next = step_max_gtm(states.last().expect("non-empty"))?;
                states.push(next);
            }
            let mut monotone: f64 = f64::NEG_INFINITY;
            let mut margin: f64 = f64::INFINITY;
            for t in 0..ROUNDS {
                let now = phi2(&states[t], &states[t + 1])?;
                let after = phi2(&states[t + 1], &states[t + 2])?;
                monotone = monotone.max(after - now);
                let (diff, bound) = phi2_diff_lower_bound(&states[t], &states[t + 1], &states[t + 2])?;
                margin = margin.min(diff - bound);
            }
            Ok((monotone, margin))
        })
        .collect::<Result<_>>()?;
    let rise = worst.iter().map(|w| w.0).fold(f64::NEG_INFINITY, f64::max);
    let margin = worst.iter().map(|w| w.1).fold(f64::INFINITY, f64::min);
    Ok((
        rise <= SLACK && margin >= -SLACK,
        format!("largest one-round increase {rise:.2e}, smallest decrease margin {margin:.2e} (slack {SLACK:.0e})"),
    ))
}

pub fn ac8_dichotomy() -> Result<(bool, String)> {
    const EPS: f64 = 1e-3;
    let outcomes: Vec<DiscreteOutcome> = planar_corpus()
        .par_iter()
        .map(|&(n, seed)| -> Result<DiscreteOutcome> {
            let r = run_discrete(DiscreteStrategy::MaxGtM, &random_2d(n, seed)?, EPS, 50 * n * n, TraceMode::None)?;
            Ok(r.outcome)
        })
        .collect::<Result<_>>()?;
    let count = |o| outcomes.iter().filter(|&&x| x == o).count();
    let (maxc, march) = (count(DiscreteOutcome::EpsMaxChain), count(DiscreteOutcome::EpsMarching));
    Ok((maxc + march == outcomes.len(), format!("{maxc} max-chain, {march} marching, of {}", outcomes.len())))
}

pub fn ac9_continuous_main_bound() -> Result<(bool, String)> {
    const TAU: f64 = 0.25;
    const DT: f64 = 1e-3;
    const EPS: f64 = 1e-3;
    const SEEDS: u64 = 10;
    const SLACK: f64 = 1.05;
    const SLOPE: (f64, f64) = (0.8, 1.2);
    let ns = [9usize, 17, 33];
    let params = MobParams::new(TAU, false)?.with_dt(DT)?;
    let jobs: Vec<(usize, u64)> = ns.iter().flat_map(|&n| (0..SEEDS).map(move |s| (n, s))).collect();
    let runs: Vec<(usize, bool, f64)> = jobs
        .par_iter()
        .map(|&(n, seed)| -> Result<(usize, bool, f64)> {
            let limit = main_time_bound(n, TAU) * SLACK;
            let r = integrate(&random_2d(n, seed)?, &params, EPS, EPS, limit, Sampling::None)?;
            Ok((n, r.outcome != ContinuousOutcome::TimeBudgetExceeded, r.elapsed))
        })
        .collect::<Result<_>>()?;
    let within = runs.iter().all(|r| r.1);
    let medians: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| (n as f64, median(&runs.iter().filter(|r| r.0 == n).map(|r| r.2).collect::<Vec<_>>())))
        .collect();
    let fit = fit_power_law(&medians)?;
    Ok((
        within && fit.slope >= SLOPE.0 && fit.slope <= SLOPE.1,
        format!(
            "all within bound: {within}, medians {:.2?}, slope {:.3} in [{}, {}]",
            medians.iter().map(|m| m.1).collect::<Vec<_>>(),
            fit.slope,
            SLOPE.0,
            SLOPE.1
        ),
    ))
}

pub fn ac10_continuous_v_contrast() -> Result<(bool, String)> {
    const N: usize = 9;
    const TAU: f64 = 0.5;
    const EPS: f64 = 1e-3;
    const SPREAD: f64 = 0.25;
    const SLACK: f64 = 1.05;
    const R2: f64 = 0.95;
    const RATE_TOL: f64 = 0.02;
    const SAMPLE: f64 = 0.01;
    let deltas = [1e-1, 1e-2, 1e-3];
    let mob = MobParams::new(TAU, false)?;
    let naive = MobParams::new(TAU, true)?;
    let mut mob_t = Vec::new();
    let mut naive_pts = Vec::new();
    let mut rate_err: f64 = 0.0;
    let mut rate_samples = 0;
    for delta in deltas {
        let start = gen_continuous_delta_v(N, delta)?;
        let r = integrate(&start, &mob, EPS, EPS, 1e3, Sampling::None)?;
        if r.outcome != ContinuousOutcome::EpsMaxChain {
            return Ok((false, format!("delta {delta}: move-on-bisector ended {:?}", r.outcome)));
        }
        mob_t.push(r.elapsed);
        let r = integrate(&start, &naive, EPS, EPS, 1e3, Sampling::Interval(SAMPLE))?;
        if r.outcome != ContinuousOutcome::EpsMaxChain {
            return Ok((false, format!("delta {delta}: naive ended {:?}", r.outcome)));
        }
        naive_pts.push(((1.0 / delta).ln(), r.elapsed));
        let (err, count) = naive_rate_law(&r.trace.iter().map(|s| (s.t, &s.config)).collect::<Vec<_>>());
        rate_err = rate_err.max(err);
        rate_samples += count;
    }
    let lo = mob_t.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = mob_t.iter().cloned().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    let bound = v_time_bound(N, TAU) * SLACK;
    let fit = fit_affine(&naive_pts)?;
    let ok = spread < SPREAD
        && hi <= bound
        && fit.slope > 0.0
        && fit.r_squared >= R2
        && rate_samples > 0
        && rate_err <= RATE_TOL;
    Ok((
        ok,
        format!(
            "tau {TAU}: bisector times {mob_t:.3?} spread {:.1}% (max {:.0}%), bound {bound:.1}; naive times {:.3?} slope {:.3} r2 {:.4}; rate law error {:.2}% over {rate_samples} samples",
            100.0 * spread,
            100.0 * SPREAD,
            naive_pts.iter().map(|p| p.1).collect::<Vec<_>>(),
            fit.slope,
            fit.r_squared,
            100.0 * rate_err
        ),
    ))
}

/// Largest relative error between the measured spread rate of the outer
/// robots and `delta cos(theta/2) / floor(n/2)` over samples where the
/// chain is still a taut isosceles triangle.
pub fn naive_rate_law(samples: &[(f64, &Configuration)]) -> (f64, usize) {
    const TAUT: f64 = 1e-6;
    const OPEN_LIMIT: f64 = 0.75 * PI;
    let triangle = |c: &Configuration| -> Option<f64> {
        let n = c.n();
        let apex = n.div_ceil(2);
        let lengths = c.vectors().lengths();
        if lengths.iter().any(|&l| l < 1.0 - TAUT) {
            return None;
        }
        let straight = (2..n).filter(|&i| i != apex).all(|i| angle_at(c, i) >= PI - 1e-6);
        let theta = angle_at(c, apex);
        (straight && theta < OPEN_LIMIT).then_some(theta)
    };
    let span = |c: &Configuration| (c.p(c.n()) - c.p(1)).norm();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for w in samples.windows(3) {
        let (Some(_), Some(theta), Some(_)) = (triangle(w[0].1), triangle(w[1].1), triangle(w[2].1)) else {
            continue;
        };
        let c = w[1].1;
        let measured = (span(w[2].1) - span(w[0].1)) / (w[2].0 - w[0].0);
        let legs = (c.n() / 2) as f64;
        let predicted = span(c) * (theta / 2.0).cos() / legs;
        worst = worst.max((measured - predicted).abs() / predicted);
        count += 1;
    }
    (worst, count)
}

pub fn ac11_tau_gtm_negative() -> Result<(bool, String)> {
    const N: usize = 16;
    const TAU: f64 = 0.2;
    const EPS: f64 = 1e-3;
    const R2: f64 = 0.95;
    let mut pts = Vec::new();
    for delta in [1e-1, 1e-2, 1e-3] {
        let start = gen_tau_delta_v(N, delta, TAU)?;
        let r = run_discrete(DiscreteStrategy::TauMaxGtM(TAU), &start, EPS, 10_000_000, TraceMode::None)?;
        if r.outcome != DiscreteOutcome::EpsMaxChain {
            return Ok((false, format!("delta {delta}: ended {:?}", r.outcome)));
        }
        pts.push(((1.0 / delta).ln(), r.rounds as f64));
    }
    let fit = fit_affine(&pts)?;
    Ok((
        fit.slope > 0.0 && fit.r_squared >= R2,
        format!(
            "rounds {:?}, slope {:.2} per e-fold, r2 {:.5}",
            pts.iter().map(|p| p.1).collect::<Vec<_>>(),
            fit.slope,
            fit.r_squared
        ),
    ))
}

/// Tallies of the structural and rate-law checks over sampled traces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LemmaAudit {
    pub pairs: usize,
    pub index_violations: usize,
    pub inner_increases: usize,
    pub sharp_regimes: usize,
    pub sharp_violations: usize,
    pub slack_regimes: usize,
    pub slack_violations: usize,
    /// Slack regimes skipped because the edge beyond the outer angle was taut.
    pub slack_driven: usize,
    pub medium_regimes: usize,
    pub medium_violations: usize,
    pub wide_regimes: usize,
    pub wide_violations: usize,
}

impl LemmaAudit {
    fn absorb(&mut self, o: &LemmaAudit) {
        self.pairs += o.pairs;
        self.index_violations += o.index_violations;
        self.inner_increases += o.inner_increases;
        self.sharp_regimes += o.sharp_regimes;
        self.sharp_violations += o.sharp_violations;
        self.slack_regimes += o.slack_regimes;
        self.slack_violations += o.slack_violations;
        self.slack_driven += o.slack_driven;
        self.medium_regimes += o.medium_regimes;
        self.medium_violations += o.medium_violations;
        self.wide_regimes += o.wide_regimes;
        self.wide_violations += o.wide_violations;
    }

    pub fn violations(&self) -> usize {
        self.index_violations
            + self.inner_increases
            + self.sharp_violations
            + self.slack_violations
            + self.medium_violations
            + self.wide_violations
    }
}

/// Slack on every rate law, relative to the lemma's constant.
pub const RATE_SLACK: f64 = 0.02;
/// Shortest regime, in simulated time, on which a rate is measured.
pub const MIN_REGIME: f64 = 0.1;
/// Absolute slack on monotone quantities between samples.
pub const MONOTONE_SLACK: f64 = 1e-4;
/// An outer run counts as fully stretched when its length is this close to its edge count.
pub const FULL_RUN: f64 = 1e-4;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Edge length at which a sampled edge counts as taut.
pub const TAUT_SAMPLE: f64 = 1.0 - 1e-4;

fn beyond(s: &WatchSample, side: Side) -> f64 {
    match side {
        Side::Left => s.beyond_ell,
        Side::Right => s.beyond_r,
    }
}

fn side_values(s: &WatchSample, side: Side) -> (usize, f64, f64, f64, f64) {
    let m = &s.m;
    match side {
        Side::Left => (s.seg.ell, m.alpha_ell, m.O_ell, m.gamma_ell, m.H_ell),
        Side::Right => (s.seg.r, m.alpha_r, m.O_r, m.gamma_r, m.H_r),
    }
}

/// Maximal runs of consecutive samples satisfying `pred` with a constant
/// `key`, returned as index ranges lasting at least [`MIN_REGIME`].
fn regimes(
    watch: &[WatchSample],
    pred: impl Fn(&WatchSample) -> bool,
    key: impl Fn(&WatchSample) -> (usize, usize),
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < watch.len() {
        if !pred(&watch[k]) {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < watch.len() && pred(&watch[k + 1]) && key(&watch[k + 1]) == key(&watch[start]) {
            k += 1;
        }
        if watch[k].t - watch[start].t >= MIN_REGIME {
            out.push((start, k));
        }
        k += 1;
    }
    out
}

/// The outer angles sit at different robots; a cluster tighter than the
/// merge radius counts as a single robot, so ell = r there.
fn separated(s: &WatchSample) -> bool {
    s.seg.defined && s.seg.ell < s.seg.r && s.m.I > WATCH_MERGE
}

pub fn audit_trace(watch: &[WatchSample], params: &MobParams) -> LemmaAudit {
    let mut a = LemmaAudit::default();
    let (tau, psi) = (params.tau, params.psi);
    for w in watch.windows(2) {
        let (s, t) = (&w[0], &w[1]);
        if !(separated(s) && t.seg.defined) {
            continue;
        }
        a.pairs += 1;
        if t.seg.ell < s.seg.ell || t.seg.r > s.seg.r {
            a.index_violations += 1;
        }
        if t.m.I > s.m.I + MONOTONE_SLACK {
            a.inner_increases += 1;
        }
    }
    let rate = |r: (usize, usize), f: &dyn Fn(&WatchSample) -> f64| {
        (f(&watch[r.1]) - f(&watch[r.0])) / (watch[r.1].t - watch[r.0].t)
    };
    let split = separated;
    let medium_bound = -(2.0 - 2f64.sqrt()).sqrt() / 2.0;
    for side in [Side::Left, Side::Right] {
        let key = move |s: &WatchSample| (s.seg.ell, s.seg.r);

        let sharp = regimes(watch, |s| split(s) && side_values(s, side).1 < psi, key);
        for r in sharp {
            a.sharp_regimes += 1;
            if rate(r, &|s| s.m.I) > -(1.0 - tau) * (1.0 - RATE_SLACK) {
                a.sharp_violations += 1;
            }
        }

        let slack = regimes(
            watch,
            |s| {
                let (_, alpha, o, gamma, _) = side_values(s, side);
                s.seg.defined && alpha >= psi && o < gamma - FULL_RUN
            },
            key,
        );
        for r in slack {
            // a taut edge beyond the angle drives r_i along its bisector,
            // a case the rate law's argument leaves out
            if watch[r.0..=r.1].iter().any(|s| beyond(s, side) >= TAUT_SAMPLE) {
                a.slack_driven += 1;
                continue;
            }
            a.slack_regimes += 1;
            let d = rate(r, &|s| side_values(s, side).2);
            if (d - (1.0 - tau)).abs() > RATE_SLACK * (1.0 - tau) {
                a.slack_violations += 1;
            }
        }

        let stretched = |s: &WatchSample| {
            let (_, _, o, gamma, _) = side_values(s, side);
            split(s) && o >= gamma - FULL_RUN
        };
        let medium = regimes(
            watch,
            |s| {
                let alpha = side_values(s, side).1;
                stretched(s) && alpha >= psi && alpha <= 0.75 * PI
            },
            key,
        );
        for r in medium {
            a.medium_regimes += 1;
            if rate(r, &|s| s.m.I) > medium_bound * (1.0 - RATE_SLACK) {
                a.medium_violations += 1;
            }
        }

        let wide = regimes(watch, |s| stretched(s) && side_values(s, side).1 >= 0.75 * PI, key);
        for r in wide {
            a.wide_regimes += 1;
            let alpha_drop = watch[r.0..=r.1]
                .windows(2)
                .any(|w| side_values(&w[1], side).1 < side_values(&w[0], side).1 - MONOTONE_SLACK);
            let dh = rate(r, &|s| side_values(s, side).4);
            if alpha_drop || dh > -(1.0 / 20.0) * (1.0 - RATE_SLACK) {
                a.wide_violations += 1;
            }
        }
    }
    a
}

pub fn ac12_invariant_suite() -> Result<(bool, String)> {
    const TRACES: u64 = 50;
    const TAU: f64 = 0.25;
    const EPS: f64 = 1e-3;
    let params = MobParams::new(TAU, false)?;
    let sample = 10.0 * params.dt;
    let audits: Vec<LemmaAudit> = (0..TRACES)
        .into_par_iter()
        .map(|k| -> Result<LemmaAudit> {
            let n = 9 + 4 * (k as usize % 3);
            let start = random_2d(n, 2000 + k)?;
            let r = integrate(&start, &params, EPS, EPS, main_time_bound(n, TAU), Sampling::Interval(sample))?;
            Ok(audit_trace(&outer_angle_watch(&r.trace), &params))
        })
        .collect::<Result<_>>()?;
    let mut total = LemmaAudit::default();
    for a in &audits {
        total.absorb(a);
    }
    Ok((total.violations() == 0, format!("{total:?}")))
}
