//! Named configuration families and seeded random chains.
//!
//! Random chains draw from a SplitMix64 stream seeded directly with the
//! user seed. Each uniform in [0, 1) is `(next_u64 >> 11) * 2^-53`. Edges
//! are drawn in order 2..=n; each edge consumes one uniform for its length
//! (`0.1 + 0.9 u`) followed by one uniform for its orientation (a sign,
//! negative when `u < 0.5`, for collinear families; an angle `2 pi u` for
//! planar chains). Outer edges of collinear families do not consume a sign
//! draw.

use std::f64::consts::PI;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::chain::{marching_profile, Configuration, Point};
use crate::error::{invalid, Result};

/// Edge length used by the slow opposed start.
pub const LOWER_BOUND_EDGE: f64 = 0.313;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    OpposedRandom,
    MarchingRandom,
    MarchingChain,
    DiscreteDeltaV,
    ContinuousDeltaV,
    TauDeltaV,
    Random2D,
    LowerBoundOpposed,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::OpposedRandom,
        Family::MarchingRandom,
        Family::MarchingChain,
        Family::DiscreteDeltaV,
        Family::ContinuousDeltaV,
        Family::TauDeltaV,
        Family::Random2D,
        Family::LowerBoundOpposed,
    ];

    pub fn from_cli_name(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.cli_name() == name)
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            Family::OpposedRandom => "opposed",
            Family::MarchingRandom => "marching",
            Family::MarchingChain => "marching-chain",
            Family::DiscreteDeltaV => "delta-v",
            Family::ContinuousDeltaV => "cont-delta-v",
            Family::TauDeltaV => "tau-delta-v",
            Family::Random2D => "random2d",
            Family::LowerBoundOpposed => "lower-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub delta: f64,
    pub tau: f64,
    pub seed: u64,
    pub epsilon: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self { family, n, delta: 0.0, tau: 0.0, seed: 0, epsilon: 0.0 }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Configuration> {
    match spec.family {
        Family::MarchingChain => gen_marching_chain(spec.n),
        Family::DiscreteDeltaV => gen_discrete_delta_v(spec.n, spec.delta),
        Family::ContinuousDeltaV => gen_continuous_delta_v(spec.n, spec.delta),
        Family::TauDeltaV => gen_tau_delta_v(spec.n, spec.delta, spec.tau),
        Family::LowerBoundOpposed => gen_lower_bound_opposed(spec.n, spec.epsilon),
        Family::OpposedRandom | Family::MarchingRandom | Family::Random2D => {
            gen_random(spec.family, spec.n, spec.seed)
        }
    }
}

fn require_even(n: usize, min: usize) -> Result<()> {
    if n % 2 != 0 || n < min {
        return Err(invalid(format!("n must be even and at least {min}, got {n}")));
    }
    Ok(())
}

/// Collinear marching chain along +x starting at the origin.
pub fn gen_marching_chain(n: usize) -> Result<Configuration> {
    require_even(n, 4)?;
    Configuration::from_signed_edges(&marching_profile(n))
}

pub fn gen_discrete_delta_v(n: usize, delta: f64) -> Result<Configuration> {
    require_even(n, 4)?;
    if !(delta >= 0.0) {
        return Err(invalid("delta must be non-negative"));
    }
    let x = delta / (n - 1) as f64;
    let w: Vec<Point> = marching_profile(n).into_iter().map(|y| Point::new(x, y)).collect();
    Configuration::from_vectors(Point::zeros(), &w)
}

/// Opening angle of the continuous V for `n` robots and half-separation `delta`.
pub fn continuous_v_angle(n: usize, delta: f64) -> f64 {
    2.0 * (delta / (n / 2) as f64).asin()
}

/// Isosceles V with unit edges, apex robot ceil(n/2) at the origin, legs
/// opening towards +y.
pub fn gen_continuous_delta_v(n: usize, delta: f64) -> Result<Configuration> {
    if n % 2 == 0 || n < 5 {
        return Err(invalid(format!("n must be odd and at least 5, got {n}")));
    }
    let legs = n / 2;
    if !(delta > 0.0 && delta < legs as f64) {
        return Err(invalid(format!("delta must lie in (0, {legs})")));
    }
    let half = continuous_v_angle(n, delta) / 2.0;
    let left = Point::new(-half.sin(), half.cos());
    let right = Point::new(half.sin(), half.cos());
    let apex = legs + 1;
    let positions = (1..=n)
        .map(|i| {
            if i < apex {
                left * (apex - i) as f64
            } else {
                right * (i - apex) as f64
            }
        })
        .collect();
    Configuration::new(positions)
}

/// V-shaped start for the slowed-outer discrete strategy.
///
/// The cross-axis component of every edge is `delta/(n-1)`; the along-axis
/// component of edge i is `(n/2 - i + 1)/(n/2 - 1)` times that of edge 2,
/// which is `(1-tau)/(1-tau + 2/(n-2))`. With `tau = 0` this is exactly the
/// discrete delta-V family.
pub fn gen_tau_delta_v(n: usize, delta: f64, tau: f64) -> Result<Configuration> {
    require_even(n, 6)?;
    if !(0.0..=0.5).contains(&tau) {
        return Err(invalid("tau must lie in [0, 1/2]"));
    }
    if !(delta >= 0.0) {
        return Err(invalid("delta must be non-negative"));
    }
    let x = delta / (n - 1) as f64;
    let y2 = (1.0 - tau) / (1.0 - tau + 2.0 / (n - 2) as f64);
    let half = n as f64 / 2.0;
    let w: Vec<Point> = (2..=n)
        .map(|i| Point::new(x, (half - i as f64 + 1.0) / (half - 1.0) * y2))
        .collect();
    Configuration::from_vectors(Point::zeros(), &w)
}

/// Signed edge list of the slow opposed start as written in the lower-bound
/// argument: `-0.313` for edges 2..n-1 and `epsilon` for edge n.
pub fn lower_bound_signed_edges(n: usize, epsilon: f64) -> Vec<f64> {
    let mut edges = vec![-LOWER_BOUND_EDGE; n - 1];
    edges[n - 2] = epsilon;
    edges
}

/// Slow opposed start: edges of length 0.313 followed by one edge of length
/// `epsilon`, all pointing along +x.
pub fn gen_lower_bound_opposed(n: usize, epsilon: f64) -> Result<Configuration> {
    if n < 3 {
        return Err(invalid("n must be at least 3"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon must lie in (0, 1)"));
    }
    let edges: Vec<f64> = lower_bound_signed_edges(n, epsilon).iter().map(|e| e.abs()).collect();
    Configuration::from_signed_edges(&edges)
}

pub(crate) struct Uniform(SplitMix64);

impl Uniform {
    pub(crate) fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub(crate) fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

pub fn gen_random(family: Family, n: usize, seed: u64) -> Result<Configuration> {
    if n < 3 {
        return Err(invalid("n must be at least 3"));
    }
    let mut rng = Uniform::new(seed);
    let mut w = Vec::with_capacity(n - 1);
    for i in 2..=n {
        let length = 0.1 + 0.9 * rng.next();
        let v = match family {
            Family::Random2D => {
                let angle = 2.0 * PI * rng.next();
                Point::new(length * angle.cos(), length * angle.sin())
            }
            Family::OpposedRandom | Family::MarchingRandom => {
                let sign = if i == 2 {
                    1.0
                } else if i == n {
                    if family == Family::OpposedRandom { 1.0 } else { -1.0 }
                } else if rng.next() < 0.5 {
                    -1.0
                } else {
                    1.0
                };
                Point::new(sign * length, 0.0)
            }
            other => return Err(invalid(format!("{other:?} is not a random family"))),
        };
        w.push(v);
    }
    Configuration::from_vectors(Point::zeros(), &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{angle_at, classify, ChainTag, ETA_ANG, ETA_COL};

    fn xs(c: &Configuration) -> Vec<f64> {
        c.vectors().w().iter().map(|v| v.x).collect()
    }

    #[test]
    fn marching_chain_values() {
        let c = gen_marching_chain(10).unwrap();
        let expect = [0.8, 0.6, 0.4, 0.2, 0.0, -0.2, -0.4, -0.6, -0.8];
        for (a, b) in xs(&c).iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(xs(&gen_marching_chain(4).unwrap()), vec![0.5, 0.0, -0.5]);
        for n in [4, 6, 20, 64] {
            let c = gen_marching_chain(n).unwrap();
            assert!((c.p(n) - c.p(1)).norm() < 1e-12);
        }
        assert!(gen_marching_chain(9).is_err());
        assert!(gen_marching_chain(2).is_err());
    }

    #[test]
    fn discrete_delta_v_values() {
        let c = gen_discrete_delta_v(10, 0.9).unwrap();
        let w = c.vectors();
        assert!((w.edge(2) - Point::new(0.1, 0.8)).norm() < 1e-15);
        assert!((w.edge(6) - Point::new(0.1, 0.0)).norm() < 1e-15);
        assert!((w.edge(10) - Point::new(0.1, -0.8)).norm() < 1e-15);
        assert!(((c.p(10) - c.p(1)).x - 0.9).abs() < 1e-14);
        assert_eq!(classify(&c, ETA_ANG, ETA_COL).tag, ChainTag::TwoDimensional);
        assert!(gen_discrete_delta_v(4, 3.0).is_err());
    }

    #[test]
    fn delta_v_at_zero_is_the_marching_chain_on_the_y_axis() {
        let v = gen_discrete_delta_v(12, 0.0).unwrap();
        let m = gen_marching_chain(12).unwrap();
        for (a, b) in v.positions().iter().zip(m.positions()) {
            assert_eq!(a.x, 0.0);
            assert_eq!(a.y, b.x);
        }
    }

    #[test]
    fn continuous_delta_v_shape() {
        let c = gen_continuous_delta_v(9, 0.5).unwrap();
        let theta = continuous_v_angle(9, 0.5);
        assert!((theta - 0.250_655_7).abs() < 1e-7);
        assert!(c.vectors().lengths().iter().all(|l| (l - 1.0).abs() < 1e-15));
        assert_eq!(c.p(5), Point::zeros());
        assert!((angle_at(&c, 5) - theta).abs() < 1e-12);
        for i in (2..=8).filter(|&i| i != 5) {
            assert!((angle_at(&c, i) - PI).abs() < 1e-12);
        }
        let span = (c.p(9) - c.p(1)).norm();
        assert!((span - 8.0 * (theta / 2.0).sin()).abs() < 1e-12);
        assert!(gen_continuous_delta_v(9, 4.0).is_err());
        assert!(gen_continuous_delta_v(8, 0.5).is_err());
    }

    #[test]
    fn tau_delta_v_values() {
        let c = gen_tau_delta_v(10, 0.9, 0.2).unwrap();
        let w = c.vectors();
        let y2 = 0.8 / 1.05;
        assert!((w.edge(2) - Point::new(0.1, y2)).norm() < 1e-15);
        let factors = [1.0, 0.75, 0.5, 0.25, 0.0, -0.25, -0.5, -0.75, -1.0];
        for (i, f) in (2..=10).zip(factors) {
            assert!((w.edge(i).y - f * y2).abs() < 1e-15);
            assert!((w.edge(i).x - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn tau_delta_v_reduces_to_delta_v() {
        let a = gen_tau_delta_v(16, 0.01, 0.0).unwrap();
        let b = gen_discrete_delta_v(16, 0.01).unwrap();
        for (p, q) in a.positions().iter().zip(b.positions()) {
            assert_eq!(p.x, q.x);
            assert!((p.y - q.y).abs() < 1e-14);
        }
    }

    #[test]
    fn lower_bound_start() {
        assert_eq!(lower_bound_signed_edges(4, 0.01), vec![-0.313, -0.313, 0.01]);
        let c = gen_lower_bound_opposed(4, 0.01).unwrap();
        assert_eq!(classify(&c, ETA_ANG, ETA_COL).tag, ChainTag::Opposed);
        assert!(c.max_edge() <= 1.0);
    }

    #[test]
    fn random_chains_are_deterministic_and_tagged() {
        for seed in 0..50 {
            let a = gen_random(Family::OpposedRandom, 12, seed).unwrap();
            assert_eq!(a, gen_random(Family::OpposedRandom, 12, seed).unwrap());
            assert_eq!(classify(&a, ETA_ANG, ETA_COL).tag, ChainTag::Opposed);
            let m = gen_random(Family::MarchingRandom, 12, seed).unwrap();
            assert_eq!(classify(&m, ETA_ANG, ETA_COL).tag, ChainTag::Marching);
            let r = gen_random(Family::Random2D, 16, seed).unwrap();
            assert!(r.max_edge() <= 1.0);
            assert!(r.vectors().lengths().iter().all(|&l| l >= 0.1));
        }
        assert_ne!(
            gen_random(Family::Random2D, 8, 1).unwrap(),
            gen_random(Family::Random2D, 8, 2).unwrap()
        );
    }

    #[test]
    fn uniform_stream_is_pinned() {
        // SplitMix64 with state 0 yields 0xe220a8397b1dcdaf first
        let mut u = Uniform::new(0);
        let expect = (0xe220a8397b1dcdafu64 >> 11) as f64 / (1u64 << 53) as f64;
        assert_eq!(u.next(), expect);
    }
}
