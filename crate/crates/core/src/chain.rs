//! Chain state, classification, structural indices, metrics and potentials.
//!
//! Robots are indexed 1..=n in every public API that talks about robots or
//! edges; edge `i` joins robot `i-1` to robot `i`, so edges run 2..=n.
//! Internally slices are 0-based.

use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

pub const ETA_CONN: f64 = 1e-9;
pub const ETA_COL: f64 = 1e-7;
pub const ETA_ANG: f64 = 1e-7;
pub const ETA_ZERO: f64 = 1e-9;

/// Numeric slacks used by predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub conn: f64,
    pub col: f64,
    pub ang: f64,
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { conn: ETA_CONN, col: ETA_COL, ang: ETA_ANG, zero: ETA_ZERO }
    }
}

/// Ordered robot positions. Construction through [`Configuration::new`]
/// guarantees n >= 2 and that every edge is at most `1 + ETA_CONN` long.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    positions: Vec<Point>,
}

impl Configuration {
    pub fn new(positions: Vec<Point>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::TooFewRobots { min: 2, got: positions.len() });
        }
        for i in 1..positions.len() {
            let length = (positions[i] - positions[i - 1]).norm();
            if !(length <= 1.0 + ETA_CONN) {
                return Err(Error::Disconnected { index: i + 1, length });
            }
        }
        Ok(Self { positions })
    }

    /// Skips the connectivity check. Engines use this for states whose
    /// connectivity follows from the update rule.
    pub(crate) fn from_raw(positions: Vec<Point>) -> Self {
        debug_assert!(positions.len() >= 2);
        Self { positions }
    }

    /// Rebuilds positions from an anchor for robot 1 and the edge vectors.
    pub fn from_vectors(anchor: Point, w: &[Point]) -> Result<Self> {
        let mut positions = Vec::with_capacity(w.len() + 1);
        positions.push(anchor);
        let mut p = anchor;
        for wi in w {
            p += wi;
            positions.push(p);
        }
        Self::new(positions)
    }

    /// Collinear chain along the +x axis from signed edge lengths.
    pub fn from_signed_edges(edges: &[f64]) -> Result<Self> {
        let w: Vec<Point> = edges.iter().map(|&e| Point::new(e, 0.0)).collect();
        Self::from_vectors(Point::zeros(), &w)
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Position of robot `i` (1-based).
    pub fn p(&self, i: usize) -> Point {
        self.positions[i - 1]
    }

    pub fn vectors(&self) -> VectorChain {
        chain_vectors(self)
    }

    pub fn translated(&self, by: Point) -> Self {
        Self::from_raw(self.positions.iter().map(|p| p + by).collect())
    }

    pub fn max_edge(&self) -> f64 {
        self.positions.windows(2).map(|s| (s[1] - s[0]).norm()).fold(0.0, f64::max)
    }

    pub fn max_pairwise_distance(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (k, a) in self.positions.iter().enumerate() {
            for b in &self.positions[k + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["i", "x", "y"])?;
        for (k, p) in self.positions.iter().enumerate() {
            wtr.write_record([(k + 1).to_string(), p.x.to_string(), p.y.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["i", "x", "y"] {
            return Err(Error::Parse(format!("expected header i,x,y, got {:?}", headers)));
        }
        let mut positions = Vec::new();
        for (row, record) in rdr.deserialize::<(usize, f64, f64)>().enumerate() {
            let (i, x, y) = record?;
            if i != row + 1 {
                return Err(Error::Parse(format!("row {} has index {}", row + 1, i)));
            }
            positions.push(Point::new(x, y));
        }
        Self::new(positions)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Edge vectors w_2..w_n; `w()[0]` is w_2.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorChain {
    w: Vec<Point>,
}

impl VectorChain {
    pub fn w(&self) -> &[Point] {
        &self.w
    }

    /// Edge `i` (2..=n).
    pub fn edge(&self, i: usize) -> Point {
        self.w[i - 2]
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.w.iter().map(|v| v.norm()).collect()
    }

    pub fn into_configuration(self, anchor: Point) -> Result<Configuration> {
        Configuration::from_vectors(anchor, &self.w)
    }
}

pub fn chain_vectors(config: &Configuration) -> VectorChain {
    VectorChain { w: config.positions.windows(2).map(|s| s[1] - s[0]).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainTag {
    Opposed,
    Marching,
    CollinearDegenerate,
    TwoDimensional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainClass {
    pub tag: ChainTag,
    pub collinear: bool,
}

/// Total-least-squares line through the points: (centroid, unit direction,
/// max point-to-line distance).
pub fn fit_line(points: &[Point]) -> (Point, Point, f64) {
    let n = points.len() as f64;
    let c = points.iter().sum::<Point>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = Point::new(phi.cos(), phi.sin());
    let normal = Point::new(-dir.y, dir.x);
    let spread = points.iter().map(|p| (p - c).dot(&normal).abs()).fold(0.0, f64::max);
    (c, dir, spread)
}

pub fn is_collinear(config: &Configuration, eta_col: f64) -> bool {
    fit_line(config.positions()).2 <= eta_col
}

/// Outer edges of a collinear chain are compared by their sign along the
/// fitted line, which is exact for any collinear input; `_eta_ang` is kept
/// for interface symmetry with the other predicates.
pub fn classify(config: &Configuration, _eta_ang: f64, eta_col: f64) -> ChainClass {
    let (_, dir, spread) = fit_line(config.positions());
    if spread > eta_col {
        return ChainClass { tag: ChainTag::TwoDimensional, collinear: false };
    }
    let w = config.vectors();
    let first = w.w()[0];
    let last = w.w()[w.len() - 1];
    if first.norm() <= ETA_ZERO || last.norm() <= ETA_ZERO {
        return ChainClass { tag: ChainTag::CollinearDegenerate, collinear: true };
    }
    let tag = if (first.dot(&dir) > 0.0) == (last.dot(&dir) > 0.0) {
        ChainTag::Opposed
    } else {
        ChainTag::Marching
    };
    ChainClass { tag, collinear: true }
}

pub fn is_eps_maxchain(config: &Configuration, eps: f64) -> bool {
    let n = config.n();
    let span = (config.p(n) - config.p(1)).norm();
    span >= (1.0 - eps) * (n - 1) as f64
        && config.positions.windows(2).all(|s| (s[1] - s[0]).norm() > 1.0 - eps)
}

/// Signed entries of the marching chain, 1 - 2(i-1)/n for edges i = 2..n.
pub fn marching_profile(n: usize) -> Vec<f64> {
    (2..=n).map(|i| 1.0 - 2.0 * (i - 1) as f64 / n as f64).collect()
}

pub fn is_eps_marching(config: &Configuration, eps: f64) -> bool {
    is_eps_marching_with(config, eps, ETA_COL)
}

pub fn is_eps_marching_with(config: &Configuration, eps: f64, eta_col: f64) -> bool {
    let (_, dir, spread) = fit_line(config.positions());
    if spread > eta_col {
        return false;
    }
    let target = marching_profile(config.n());
    let w = config.vectors();
    [1.0, -1.0].iter().any(|&sign| {
        w.w().iter()
            .zip(&target)
            .all(|(wi, m)| (sign * wi.dot(&dir) - m).abs() <= eps)
    })
}

/// Interior angle at `p` between the rays to `prev` and `next`, in [0, pi].
/// A zero-length ray counts as straight.
pub fn interior_angle(prev: Point, p: Point, next: Point) -> f64 {
    let u = prev - p;
    let v = next - p;
    if u.norm() <= ETA_ZERO || v.norm() <= ETA_ZERO {
        return PI;
    }
    u.perp(&v).abs().atan2(u.dot(&v))
}

/// Interior angle at robot `i` (2..=n-1).
pub fn angle_at(config: &Configuration, i: usize) -> f64 {
    interior_angle(config.p(i - 1), config.p(i), config.p(i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentIndices {
    pub ell: usize,
    pub ell_plus: usize,
    pub r: usize,
    pub r_plus: usize,
    pub defined: bool,
}

impl SegmentIndices {
    pub const UNDEFINED: Self = Self { ell: 0, ell_plus: 0, r: 0, r_plus: 0, defined: false };
}

fn aligned(v: Point, reference: Point, eta_col: f64, eta_zero: f64) -> bool {
    let len = v.norm();
    len <= eta_zero || (v / len - reference).norm() <= eta_col
}

/// Indices of the straight outer runs and the nearest bends beyond them.
pub fn segment_indices(config: &Configuration, eta_col: f64, eta_zero: f64) -> SegmentIndices {
    segment_indices_with(config, eta_col, eta_zero, ETA_ANG)
}

pub fn segment_indices_with(
    config: &Configuration,
    eta_col: f64,
    eta_zero: f64,
    eta_ang: f64,
) -> SegmentIndices {
    let n = config.n();
    if n < 3 {
        return SegmentIndices::UNDEFINED;
    }
    let w = config.vectors();
    let Some(lead) = w.w().iter().position(|v| v.norm() > eta_zero) else {
        return SegmentIndices::UNDEFINED;
    };
    let reference = w.w()[lead].normalize();
    // first edge (1-based, 3..=n) that breaks the left run
    let left_break = (lead + 1..w.len()).find(|&k| !aligned(w.w()[k], reference, eta_col, eta_zero));
    let Some(left_break) = left_break else {
        return SegmentIndices::UNDEFINED;
    };
    let ell = left_break + 1;

    let tail = w.w().iter().rposition(|v| v.norm() > eta_zero).expect("a nonzero edge exists");
    let reference = w.w()[tail].normalize();
    // alignment is not transitive, so the right scan may see a straight chain
    let Some(right_break) =
        (0..tail).rev().find(|&k| !aligned(w.w()[k], reference, eta_col, eta_zero))
    else {
        return SegmentIndices::UNDEFINED;
    };
    let r = right_break + 2;

    let bent = |i: usize| angle_at(config, i) <= PI - eta_ang;
    let ell_plus = (ell + 1..n).find(|&i| bent(i)).unwrap_or(n);
    let r_plus = (2..r).rev().find(|&i| bent(i)).unwrap_or(1);
    SegmentIndices { ell, ell_plus, r, r_plus, defined: true }
}

/// Structural indices where a robot counts as straight when it lies within
/// `tol` of the segment between its nearest neighbours farther than `merge`,
/// so a fold through a tight cluster still reads as a bend.
pub fn segment_indices_by_distance(config: &Configuration, tol: f64, merge: f64) -> SegmentIndices {
    let n = config.n();
    if n < 3 {
        return SegmentIndices::UNDEFINED;
    }
    let pos = config.positions();
    let distinct = |k: usize, forward: bool| -> Point {
        let p = pos[k];
        let found = if forward {
            pos[k + 1..].iter().find(|q| (*q - p).norm() > merge)
        } else {
            pos[..k].iter().rev().find(|q| (*q - p).norm() > merge)
        };
        found.copied().unwrap_or(if forward { pos[k + 1] } else { pos[k - 1] })
    };
    let bent = |i: usize| point_segment_distance(pos[i - 1], distinct(i - 1, false), distinct(i - 1, true)) > tol;
    let Some(ell) = (2..n).find(|&i| bent(i)) else {
        return SegmentIndices::UNDEFINED;
    };
    let r = (2..n).rev().find(|&i| bent(i)).expect("ell is bent");
    let ell_plus = (ell + 1..n).find(|&i| bent(i)).unwrap_or(n);
    let r_plus = (2..r).rev().find(|&i| bent(i)).unwrap_or(1);
    SegmentIndices { ell, ell_plus, r, r_plus, defined: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ChainMetrics {
    pub L: f64,
    pub delta_1n: f64,
    pub O_ell: f64,
    pub O_r: f64,
    pub I: f64,
    pub gamma_ell: f64,
    pub gamma_r: f64,
    pub H_ell: f64,
    pub H_r: f64,
    pub alpha_ell: f64,
    pub alpha_r: f64,
}

/// Distance from `p` to the closed segment [a, b].
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * s)).norm()
}

pub fn metrics(config: &Configuration, seg: &SegmentIndices) -> ChainMetrics {
    let n = config.n();
    let lengths = config.vectors().lengths();
    let edge_sum = |from: usize, to: usize| -> f64 {
        (from..=to).filter(|&i| i >= 2 && i <= n).map(|i| lengths[i - 2]).sum()
    };
    let total = lengths.iter().sum();
    let delta_1n = (config.p(n) - config.p(1)).norm();
    if !seg.defined {
        return ChainMetrics {
            L: total,
            delta_1n,
            O_ell: 0.0,
            O_r: 0.0,
            I: 0.0,
            gamma_ell: 0.0,
            gamma_r: 0.0,
            H_ell: 0.0,
            H_r: 0.0,
            alpha_ell: PI,
            alpha_r: PI,
        };
    }
    let (ell, r) = (seg.ell, seg.r);
    ChainMetrics {
        L: total,
        delta_1n,
        O_ell: edge_sum(2, ell),
        O_r: edge_sum(r + 1, n),
        I: if r > ell { edge_sum(ell + 1, r) } else { 0.0 },
        gamma_ell: (ell - 1) as f64,
        gamma_r: (n - r) as f64,
        H_ell: point_segment_distance(config.p(ell), config.p(1), config.p(seg.ell_plus)),
        H_r: point_segment_distance(config.p(r), config.p(seg.r_plus), config.p(n)),
        alpha_ell: angle_at(config, ell),
        alpha_r: angle_at(config, r),
    }
}

pub fn phi1(config: &Configuration) -> f64 {
    config.vectors().w().iter().map(|v| (1.0 - v.norm()).powi(2)).sum()
}

fn displacements(a: &Configuration, b: &Configuration) -> Result<Vec<Point>> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch { left: a.n(), right: b.n() });
    }
    Ok(a.positions.iter().zip(&b.positions).map(|(p, q)| q - p).collect())
}

pub fn phi2(config_t: &Configuration, config_t1: &Configuration) -> Result<f64> {
    Ok(displacements(config_t, config_t1)?.iter().map(|z| z.norm_squared()).sum())
}

/// Returns (phi2(t) - phi2(t+1), 1/4 sum ||z_{i-1} - z_{i+1}||^2) with
/// z_0 = z_1 and z_{n+1} = z_n.
pub fn phi2_diff_lower_bound(
    config_t: &Configuration,
    config_t1: &Configuration,
    config_t2: &Configuration,
) -> Result<(f64, f64)> {
    let z = displacements(config_t, config_t1)?;
    let z_next = displacements(config_t1, config_t2)?;
    let diff = z.iter().map(|v| v.norm_squared()).sum::<f64>()
        - z_next.iter().map(|v| v.norm_squared()).sum::<f64>();
    let n = z.len();
    let at = |k: isize| z[k.clamp(0, n as isize - 1) as usize];
    let bound = 0.25
        * (0..n as isize).map(|k| (at(k - 1) - at(k + 1)).norm_squared()).sum::<f64>();
    Ok((diff, bound))
}
