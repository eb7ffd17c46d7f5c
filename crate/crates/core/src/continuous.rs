//! Continuous-time engine for the move-on-bisector strategy.
//!
//! Inner robots take one of three roles at every evaluated state:
//!
//! * follower: the robot lies within one step length of the segment joining
//!   its neighbours (or shares a position with one of them). It keeps its
//!   relative place on that segment and drifts toward the midpoint.
//! * bisector mover: an adjacent edge is taut, or (outside naive mode) the
//!   interior angle is below `psi`. It moves at unit speed into the angle.
//! * still: none of the above.
//!
//! Outer robots recede from their neighbour at up to `1 - tau` (1 in naive
//! mode), slowed just enough that no edge of the straight run they pull
//! would pass unit length within the step.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::chain::{
    interior_angle, is_eps_maxchain, metrics, point_segment_distance, segment_indices_by_distance,
    ChainMetrics, Configuration, Point, SegmentIndices, ETA_COL, ETA_ZERO,
};
use crate::error::{invalid, Error, Result};

/// Distance within which a sampled robot counts as straight: twice the
/// default step, the distance at which the engine snaps a robot onto its
/// neighbours' line.
pub const WATCH_TOL: f64 = 2e-3;

const BISECT_ITERS: usize = 48;
/// Robots closer than this are one cluster for role decisions.
pub const MERGE_RADIUS: f64 = 1e-6;
/// Cluster radius used by the watch when locating the outer angles.
pub const WATCH_MERGE: f64 = 0.0;
const SLACK_FLOOR: f64 = 1e-9;
const MAX_HALVINGS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobParams {
    pub tau: f64,
    pub psi: f64,
    pub naive: bool,
    pub dt: f64,
    pub eta_taut: f64,
    pub eta_col: f64,
}

impl MobParams {
    pub fn new(tau: f64, naive: bool) -> Result<Self> {
        if !(tau > 0.0 && tau <= 0.5) {
            return Err(invalid(format!("tau must lie in (0, 1/2], got {tau}")));
        }
        Ok(Self {
            tau,
            psi: 2.0 * (1.0 - tau).acos(),
            naive,
            dt: 1e-3,
            eta_taut: 1e-6,
            eta_col: ETA_COL,
        })
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(invalid(format!("dt must lie in (0, 0.1], got {dt}")));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn outer_cap(&self) -> f64 {
        if self.naive {
            1.0
        } else {
            1.0 - self.tau
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Outer,
    Follower,
    Bisector,
    Still,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub v: Vec<Point>,
    pub roles: Vec<Role>,
    /// Inner robots (1-based) sharing a position with a neighbour.
    pub degenerate: Vec<usize>,
}

impl VelocityField {
    pub fn max_inner_speed(&self) -> f64 {
        let n = self.v.len();
        self.v[1..n - 1].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_outer_speed(&self) -> f64 {
        self.v[0].norm().max(self.v[self.v.len() - 1].norm())
    }
}

fn cap_norm(v: Point, cap: f64) -> Point {
    let s = v.norm();
    if s > cap {
        v * (cap / s)
    } else {
        v
    }
}

/// Nearest robot on one side farther than `radius`, so that a cluster of
/// near-coincident robots sees the same neighbours and moves as one.
fn distinct_neighbour(pos: &[Point], i: usize, forward: bool, radius: f64) -> Point {
    let p = pos[i];
    let adjacent = if forward { pos[i + 1] } else { pos[i - 1] };
    let mut side: Box<dyn Iterator<Item = &Point>> =
        if forward { Box::new(pos[i + 1..].iter()) } else { Box::new(pos[..i].iter().rev()) };
    side.find(|q| (*q - p).norm() > radius).copied().unwrap_or(adjacent)
}

fn inner_role(prev: Point, p: Point, next: Point, params: &MobParams, step: f64) -> (Role, bool) {
    let a = (prev - p).norm();
    let b = (next - p).norm();
    if a <= ETA_ZERO || b <= ETA_ZERO {
        return (Role::Follower, true);
    }
    if point_segment_distance(p, prev, next) <= step {
        return (Role::Follower, false);
    }
    let taut = a >= 1.0 - params.eta_taut || b >= 1.0 - params.eta_taut;
    let sharp = !params.naive && interior_angle(prev, p, next) < params.psi;
    (if taut || sharp { Role::Bisector } else { Role::Still }, false)
}

/// Unit speed into the angle, slowed so the robot does not cross the line
/// through its neighbours within one step.
fn bisector_velocity(prev: Point, p: Point, next: Point, step: f64) -> Point {
    let (a, b) = ((prev - p).norm(), (next - p).norm());
    let sum = (prev - p) / a + (next - p) / b;
    let s = sum.norm();
    if s <= ETA_ZERO {
        return Point::zeros();
    }
    let dir = sum / s;
    let half_cos = (0.5 * s).min(1.0);
    let hit = 2.0 * a * b * half_cos / (a + b);
    dir * (hit / step).min(1.0)
}

/// A maximal block of consecutive followers with fixed-velocity anchors at
/// `lo - 1` and `hi + 1`. Anchor velocities split along `axis`: the component
/// along it is shared by slack (`along`), the rest by position (`across`),
/// each weight being the share of the upper anchor. The follower's own
/// correction `a` comes on top.
struct Run {
    lo: usize,
    hi: usize,
    a: Vec<Point>,
    axis: Point,
    along: Vec<f64>,
    across: Vec<f64>,
}

impl Run {
    fn velocity(&self, k: usize, gain: f64, lo: Point, hi: Point) -> Point {
        let par = |v: Point| self.axis * v.dot(&self.axis);
        let (lo_par, hi_par) = (par(lo), par(hi));
        let (wa, wc) = (self.along[k], self.across[k]);
        self.a[k] * gain + lo_par * (1.0 - wa) + hi_par * wa + (lo - lo_par) * (1.0 - wc) + (hi - hi_par) * wc
    }
}

fn cumulative_shares(weights: &[f64], m: usize) -> Option<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    (total > SLACK_FLOOR).then(|| {
        let mut acc = 0.0;
        weights[..m].iter().map(|w| {
            acc += w;
            acc / total
        }).collect()
    })
}

fn thomas(sub: &[f64], sup: &[f64], rhs: &[Point]) -> Vec<Point> {
    let m = rhs.len();
    let mut cp = vec![0.0; m];
    let mut dp = vec![Point::zeros(); m];
    for k in 0..m {
        let lower = if k > 0 { sub[k] } else { 0.0 };
        let denom = 1.0 - lower * if k > 0 { cp[k - 1] } else { 0.0 };
        cp[k] = sup[k] / denom;
        dp[k] = (rhs[k] - if k > 0 { dp[k - 1] * lower } else { Point::zeros() }) / denom;
    }
    let mut x = vec![Point::zeros(); m];
    for k in (0..m).rev() {
        x[k] = dp[k] - if k + 1 < m { x[k + 1] * cp[k] } else { Point::zeros() };
    }
    x
}

fn solve_run(pos: &[Point], lo: usize, hi: usize, step: f64) -> Run {
    let m = hi - lo + 1;
    let mut sub = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut u = vec![Point::zeros(); m];
    for k in 0..m {
        let i = lo + k;
        let (prev, p, next) = (pos[i - 1], pos[i], pos[i + 1]);
        let seg = next - prev;
        let len2 = seg.norm_squared();
        let mid = 0.5 * (prev + next);
        let lambda = if len2 <= ETA_ZERO * ETA_ZERO {
            u[k] = cap_norm((mid - p) / step, 1.0);
            0.5
        } else {
            let raw = (p - prev).dot(&seg) / len2;
            // back onto the line within the step, then toward the midpoint
            let foot = prev + seg * raw;
            u[k] = (foot - p) / step + cap_norm((mid - foot) / step, 1.0);
            raw.clamp(0.01, 0.99)
        };
        // v_i - (1-lambda) v_{i-1} - lambda v_{i+1} = u_i
        sub[k] = -(1.0 - lambda);
        sup[k] = -lambda;
    }
    let a = thomas(&sub, &sup, &u);

    let lens: Vec<f64> = (lo - 1..=hi).map(|k| (pos[k + 1] - pos[k]).norm()).collect();
    let even: Vec<f64> = (1..=m).map(|k| k as f64 / (m + 1) as f64).collect();
    let across = cumulative_shares(&lens, m).unwrap_or_else(|| even.clone());
    // taut edges move rigidly along the line
    let slack: Vec<f64> = lens.iter().map(|l| (1.0 - l).max(0.0)).collect();
    let along = cumulative_shares(&slack, m).unwrap_or_else(|| across.clone());
    let span = pos[hi + 1] - pos[lo - 1];
    let axis = if span.norm() > ETA_ZERO { span / span.norm() } else { Point::zeros() };
    // without an axis everything is shared by position
    let along = if axis == Point::zeros() { across.clone() } else { along };
    Run { lo, hi, a, axis, along, across }
}

fn first_nonzero_dir(pos: &[Point], from_left: bool) -> Option<Point> {
    let n = pos.len();
    let edge = |k: usize| pos[k + 1] - pos[k];
    let pick = |k: usize| {
        let w = edge(k);
        let len = w.norm();
        (len > ETA_ZERO).then(|| w / len)
    };
    if from_left {
        (0..n - 1).find_map(pick)
    } else {
        (0..n - 1).rev().find_map(pick)
    }
}

struct Assembler<'a> {
    pos: &'a [Point],
    base: Vec<Point>,
    runs: Vec<Run>,
    gains: Vec<f64>,
    dir_first: Point,
    dir_last: Point,
    limits: Vec<f64>,
    step: f64,
}

impl Assembler<'_> {
    fn fill(&self, s_first: f64, s_last: f64, v: &mut [Point]) {
        let n = v.len();
        v.copy_from_slice(&self.base);
        v[0] = -self.dir_first * s_first;
        v[n - 1] = self.dir_last * s_last;
        for (run, &g) in self.runs.iter().zip(&self.gains) {
            let (vl, vh) = (v[run.lo - 1], v[run.hi + 1]);
            for k in 0..=run.hi - run.lo {
                v[run.lo + k] = cap_norm(run.velocity(k, g, vl, vh), 1.0);
            }
        }
    }

    fn feasible(&self, s_first: f64, s_last: f64, edges: (usize, usize), buf: &mut [Point]) -> bool {
        self.fill(s_first, s_last, buf);
        (edges.0..=edges.1).all(|k| stepped_length(self.pos, buf, k, self.step) <= self.limits[k])
    }
}

/// Edge length after one step to first order; sideways motion only adds
/// second-order length, which the shortening pass removes.
fn stepped_length(pos: &[Point], v: &[Point], k: usize, step: f64) -> f64 {
    let w = pos[k + 1] - pos[k];
    let len = w.norm();
    let dv = (v[k + 1] - v[k]) * step;
    if len <= ETA_ZERO {
        return dv.norm();
    }
    len + dv.dot(&(w / len))
}

fn max_feasible(lo: f64, hi: f64, mut ok: impl FnMut(f64) -> bool) -> f64 {
    if ok(hi) {
        return hi;
    }
    if !ok(lo) {
        return lo;
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Velocity of every robot at `config` under the base step `params.dt`.
pub fn velocity_field(config: &Configuration, params: &MobParams) -> VelocityField {
    field_with_step(config, params, params.dt)
}

fn field_with_step(config: &Configuration, params: &MobParams, step: f64) -> VelocityField {
    let pos = config.positions();
    let n = pos.len();
    let mut roles = vec![Role::Outer; n];
    let mut degenerate = Vec::new();
    let mut base = vec![Point::zeros(); n];
    for i in 1..n - 1 {
        let (prev, next) = (distinct_neighbour(pos, i, false, MERGE_RADIUS), distinct_neighbour(pos, i, true, MERGE_RADIUS));
        let (role, degen) = inner_role(prev, pos[i], next, params, step);
        roles[i] = role;
        if degen {
            degenerate.push(i + 1);
        }
        if role == Role::Bisector {
            base[i] = bisector_velocity(prev, pos[i], next, step);
        }
    }

    let mut runs = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if roles[i] == Role::Follower {
            let lo = i;
            while i + 1 < n - 1 && roles[i + 1] == Role::Follower {
                i += 1;
            }
            runs.push(solve_run(pos, lo, i, step));
        }
        i += 1;
    }

    let first = first_nonzero_dir(pos, true);
    let last = first_nonzero_dir(pos, false);
    // corrections get half the integrator's slack, the shortening pass takes it back
    let limits = pos.windows(2).map(|s| (s[1] - s[0]).norm().max(1.0 + 0.5 * params.eta_taut)).collect();
    let gains = vec![1.0; runs.len()];
    let mut asm = Assembler {
        pos,
        base,
        gains,
        dir_first: first.unwrap_or_else(Point::zeros),
        dir_last: last.unwrap_or_else(Point::zeros),
        runs,
        limits,
        step,
    };

    let cap = if first.is_some() { params.outer_cap() } else { 0.0 };
    // anchor reached by walking inward across followers
    let left_anchor = (1..n).find(|&k| roles[k] != Role::Follower).unwrap_or(n - 1);
    let right_anchor = (0..n - 1).rev().find(|&k| roles[k] != Role::Follower).unwrap_or(0);
    let mut buf = vec![Point::zeros(); n];
    // a run's own correction may not stretch a taut edge with the outers at rest
    for r in 0..asm.runs.len() {
        let edges = (asm.runs[r].lo - 1, asm.runs[r].hi);
        let g = max_feasible(0.0, 1.0, |g| {
            asm.gains[r] = g;
            asm.feasible(0.0, 0.0, edges, &mut buf)
        });
        asm.gains[r] = g;
    }
    // the outers may not stretch anything beyond what the corrections already do
    asm.fill(0.0, 0.0, &mut buf);
    asm.limits = (0..n - 1)
        .map(|k| {
            let moved = stepped_length(pos, &buf, k, step);
            (pos[k + 1] - pos[k]).norm().max(1.0).max(moved)
        })
        .collect();
    // an outer robot leading a run of followers pulls along the run's axis
    let axis = |from: usize, to: usize| {
        let span = pos[to] - pos[from];
        (span.norm() > ETA_ZERO).then(|| span / span.norm())
    };
    if left_anchor > 1 {
        if let Some(d) = axis(0, left_anchor) {
            asm.dir_first = d;
        }
    }
    if right_anchor < n - 2 {
        if let Some(d) = axis(right_anchor, n - 1) {
            asm.dir_last = d;
        }
    }
    let (s_first, s_last) = if left_anchor == n - 1 {
        let all = (0, n - 2);
        let common = max_feasible(0.0, cap, |s| asm.feasible(s, s, all, &mut buf));
        let s_first = max_feasible(common, cap, |s| asm.feasible(s, common, all, &mut buf));
        let s_last = max_feasible(common, cap, |s| asm.feasible(s_first, s, all, &mut buf));
        (s_first, s_last)
    } else {
        let s_first = max_feasible(0.0, cap, |s| asm.feasible(s, 0.0, (0, left_anchor - 1), &mut buf));
        let s_last =
            max_feasible(0.0, cap, |s| asm.feasible(0.0, s, (right_anchor, n - 2), &mut buf));
        (s_first, s_last)
    };

    let mut v = vec![Point::zeros(); n];
    asm.fill(s_first, s_last, &mut v);
    VelocityField { v, roles, degenerate }
}

/// Rate of change of the distance between two moving points.
pub fn distance_rate(p_i: Point, v_i: Point, p_j: Point, v_j: Point) -> Result<f64> {
    let d = p_j - p_i;
    let len = d.norm();
    if len <= ETA_ZERO {
        return Err(Error::CoincidentPoints);
    }
    Ok(-(v_i - v_j).dot(&(d / len)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sampling {
    None,
    Interval(f64),
    EveryStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContinuousOutcome {
    EpsMaxChain,
    Collapsed,
    TimeBudgetExceeded,
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub config: Configuration,
}

#[derive(Debug, Clone)]
pub struct ContinuousRunResult {
    pub final_config: Configuration,
    pub elapsed: f64,
    pub outcome: ContinuousOutcome,
    pub trace: Vec<Sample>,
    pub steps: usize,
    /// Steps where halving bottomed out and positions were projected.
    pub projection_fallbacks: usize,
}

fn collapsed(config: &Configuration, eps_collapse: f64) -> bool {
    let pos = config.positions();
    if pos.iter().any(|p| (p - pos[0]).norm() > eps_collapse) {
        return false;
    }
    config.max_pairwise_distance() <= eps_collapse
}

/// Pulls overlong edges back to unit length, symmetric sweeps first and a
/// single left-to-right pass as the last resort.
fn shorten_edges(pos: &mut [Point]) {
    let n = pos.len();
    for _ in 0..64 {
        let mut clean = true;
        for k in 0..n - 1 {
            let w = pos[k + 1] - pos[k];
            let len = w.norm();
            if len > 1.0 {
                clean = false;
                let shift = w * (0.5 * (len - 1.0) / len);
                pos[k] += shift;
                pos[k + 1] -= shift;
            }
        }
        if clean {
            return;
        }
    }
    for k in 0..n - 1 {
        let w = pos[k + 1] - pos[k];
        let len = w.norm();
        if len > 1.0 {
            pos[k + 1] = pos[k] + w / len;
        }
    }
}

pub fn integrate(
    start: &Configuration,
    params: &MobParams,
    eps: f64,
    eps_collapse: f64,
    t_max: f64,
    sampling: Sampling,
) -> Result<ContinuousRunResult> {
    if !(t_max > 0.0) {
        return Err(invalid("t_max must be positive"));
    }
    if !(eps > 0.0 && eps < 1.0) || !(eps_collapse >= 0.0) {
        return Err(invalid("eps must lie in (0, 1) and eps_collapse must be non-negative"));
    }
    if let Sampling::Interval(h) = sampling {
        if !(h > 0.0) {
            return Err(invalid("sampling interval must be positive"));
        }
    }
    let mut config = start.clone();
    let mut t = 0.0;
    let mut steps = 0;
    let mut fallbacks = 0;
    let mut trace = Vec::new();
    let mut next_sample = 0.0;
    let mut last_sampled = None;
    let outcome = loop {
        let due = match sampling {
            Sampling::None => false,
            Sampling::EveryStep => true,
            Sampling::Interval(h) => {
                if t >= next_sample {
                    next_sample += h * ((t - next_sample) / h).floor().max(0.0) + h;
                    true
                } else {
                    false
                }
            }
        };
        if due {
            trace.push(Sample { t, config: config.clone() });
            last_sampled = Some(steps);
        }
        if is_eps_maxchain(&config, eps) {
            break ContinuousOutcome::EpsMaxChain;
        }
        if collapsed(&config, eps_collapse) {
            break ContinuousOutcome::Collapsed;
        }
        if t >= t_max {
            break ContinuousOutcome::TimeBudgetExceeded;
        }
        let mut step = params.dt;
        let mut halvings = 0;
        let mut next = loop {
            let field = field_with_step(&config, params, step);
            let trial: Vec<Point> =
                config.positions().iter().zip(&field.v).map(|(p, v)| p + v * step).collect();
            let worst = trial.windows(2).map(|s| (s[1] - s[0]).norm()).fold(0.0, f64::max);
            if worst <= 1.0 + params.eta_taut {
                break trial;
            }
            if halvings == MAX_HALVINGS {
                fallbacks += 1;
                break trial;
            }
            step *= 0.5;
            halvings += 1;
        };
        shorten_edges(&mut next);
        config = Configuration::from_raw(next);
        t += step;
        steps += 1;
    };
    if sampling != Sampling::None && last_sampled != Some(steps) {
        trace.push(Sample { t, config: config.clone() });
    }
    Ok(ContinuousRunResult {
        final_config: config,
        elapsed: t,
        outcome,
        trace,
        steps,
        projection_fallbacks: fallbacks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WatchSample {
    pub t: f64,
    pub seg: SegmentIndices,
    pub m: ChainMetrics,
    /// Length of the edge leaving r_ell away from robot 1, and of the edge
    /// leaving r_r away from robot n; zero when the indices are undefined.
    pub beyond_ell: f64,
    pub beyond_r: f64,
}

/// Structural indices and metrics for every sampled state.
pub fn outer_angle_watch(trace: &[Sample]) -> Vec<WatchSample> {
    trace
        .iter()
        .map(|s| {
            let c = &s.config;
            let seg = segment_indices_by_distance(c, WATCH_TOL, WATCH_MERGE);
            let (beyond_ell, beyond_r) = if seg.defined {
                ((c.p(seg.ell + 1) - c.p(seg.ell)).norm(), (c.p(seg.r) - c.p(seg.r - 1)).norm())
            } else {
                (0.0, 0.0)
            };
            WatchSample { t: s.t, seg, m: metrics(c, &seg), beyond_ell, beyond_r }
        })
        .collect()
}

/// Long-format positions: `t,i,x,y`.
pub fn write_position_trace<W: Write>(trace: &[Sample], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["t", "i", "x", "y"])?;
    for s in trace {
        for (k, p) in s.config.positions().iter().enumerate() {
            wtr.write_record([s.t.to_string(), (k + 1).to_string(), p.x.to_string(), p.y.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Per-sample metrics: `t,alpha_ell,alpha_r,O_ell,O_r,I,H_ell,H_r,L,delta_1n`.
pub fn write_metrics_trace<W: Write>(watch: &[WatchSample], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["t", "alpha_ell", "alpha_r", "O_ell", "O_r", "I", "H_ell", "H_r", "L", "delta_1n"])?;
    for s in watch {
        let m = &s.m;
        wtr.write_record(
            [s.t, m.alpha_ell, m.alpha_r, m.O_ell, m.O_r, m.I, m.H_ell, m.H_r, m.L, m.delta_1n]
                .map(|x| x.to_string()),
        )?;
    }
    wtr.flush()?;
    Ok(())
}

/// Closed-form time bound for random starts with `n` robots.
pub fn main_time_bound(n: usize, tau: f64) -> f64 {
    let n = n as f64;
    let medium = (2.0 - 2f64.sqrt()).sqrt();
    2.0 * (n - 3.0) * (1.0 / (1.0 - tau) + 1.0 / medium + 10.0)
        + 3.0 * n * (1.0 / tau + 1.0 / (1.0 - tau))
}

/// Time bound for the continuous V family.
pub fn v_time_bound(n: usize, tau: f64) -> f64 {
    n as f64 * (1.0 / tau + 1.0 / (1.0 - tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::generators::{continuous_v_angle, gen_continuous_delta_v};

    fn fold(n: usize) -> Configuration {
        let half = (n - 1) / 2;
        let pts = (0..n)
            .map(|k| Point::new(if k <= half { k as f64 } else { (n - 1 - k) as f64 }, 0.0))
            .collect();
        Configuration::new(pts).unwrap()
    }

    #[test]
    fn psi_identity() {
        let p = MobParams::new(0.5, false).unwrap();
        assert!((p.psi - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(MobParams::new(0.0, false).is_err());
        assert!(MobParams::new(0.6, false).is_err());
    }

    #[test]
    fn v_apex_moves_up_and_outer_recede() {
        let c = gen_continuous_delta_v(9, 0.5).unwrap();
        let p = MobParams::new(0.1, false).unwrap();
        let f = velocity_field(&c, &p);
        assert_eq!(f.roles[4], Role::Bisector);
        assert!((f.v[4] - Point::new(0.0, 1.0)).norm() < 1e-12);
        for i in [1, 2, 3, 5, 6, 7] {
            assert_eq!(f.roles[i], Role::Follower);
        }
        assert!((f.v[0].norm() - 0.9).abs() < 1e-12);
        assert!((f.v[8].norm() - 0.9).abs() < 1e-12);
        // away from the neighbour along the leg
        assert!(f.v[0].dot(&(c.p(2) - c.p(1))) < 0.0);
    }

    #[test]
    fn maxchain_is_fixed() {
        let c = Configuration::from_signed_edges(&[1.0; 6]).unwrap();
        let f = velocity_field(&c, &MobParams::new(0.25, false).unwrap());
        assert!(f.v.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn fold_apex_heads_to_neighbours() {
        let c = fold(7);
        let p = MobParams::new(0.25, false).unwrap();
        let f = velocity_field(&c, &p);
        assert_eq!(f.roles[3], Role::Bisector);
        assert!((f.v[3] - Point::new(-1.0, 0.0)).norm() < 1e-12);
        let rate = distance_rate(c.p(1), f.v[0], c.p(4), f.v[3]).unwrap();
        assert!((rate + 0.25).abs() < 1e-9);
    }

    #[test]
    fn distance_rate_examples() {
        let o = Point::zeros();
        let e = Point::new(2.0, 0.0);
        assert!((distance_rate(o, Point::new(1.0, 0.0), e, o).unwrap() + 1.0).abs() < 1e-15);
        assert!(distance_rate(o, Point::new(0.0, 1.0), e, Point::new(0.0, -1.0)).unwrap().abs() < 1e-15);
        assert!(distance_rate(o, o, o, o).is_err());
    }

    #[test]
    fn naive_triangle_spreads_at_sin_theta() {
        let (n, delta) = (9, 0.5);
        let c = gen_continuous_delta_v(n, delta).unwrap();
        let f = velocity_field(&c, &MobParams::new(0.25, true).unwrap());
        let theta = continuous_v_angle(n, delta);
        let rate = distance_rate(c.p(1), f.v[0], c.p(n), f.v[n - 1]).unwrap();
        // the step-level tautness constraint costs O(dt) against the exact rate
        assert!((rate - theta.sin()).abs() < 1e-5, "{rate}");
    }

    #[test]
    fn maxchain_start_stops_immediately() {
        let c = Configuration::from_signed_edges(&[1.0; 4]).unwrap();
        let p = MobParams::new(0.25, false).unwrap();
        let r = integrate(&c, &p, 1e-3, 1e-3, 10.0, Sampling::None).unwrap();
        assert_eq!(r.outcome, ContinuousOutcome::EpsMaxChain);
        assert_eq!(r.elapsed, 0.0);
    }

    #[test]
    fn fold_collapses_in_time() {
        let (n, tau) = (9, 0.25);
        let p = MobParams::new(tau, false).unwrap();
        let r = integrate(&fold(n), &p, 1e-3, 1e-3, 100.0, Sampling::None).unwrap();
        assert_eq!(r.outcome, ContinuousOutcome::Collapsed);
        assert!(r.elapsed <= (n - 1) as f64 / (2.0 * tau) * 1.05, "{}", r.elapsed);
    }

    #[test]
    fn v_family_finishes_within_bound() {
        let p = MobParams::new(0.25, false).unwrap();
        let c = gen_continuous_delta_v(9, 0.5).unwrap();
        let r = integrate(&c, &p, 1e-3, 1e-3, 200.0, Sampling::None).unwrap();
        assert_eq!(r.outcome, ContinuousOutcome::EpsMaxChain);
        assert!(r.elapsed <= v_time_bound(9, 0.25) * 1.05, "{}", r.elapsed);
    }
}
