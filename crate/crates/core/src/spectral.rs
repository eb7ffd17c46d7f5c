//! Transition matrices, the linearised round map, and their spectra.
//!
//! Dense eigen-decomposition is delegated to nalgebra: symmetric inputs use
//! `SymmetricEigen`, general inputs use a real Schur form for the
//! eigenvalues and an SVD null vector of `A - lambda I` for each eigenvector
//! so that every reported pair carries a residual.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chain::{Configuration, ETA_ZERO};
use crate::error::{invalid, End, Error, Result};

pub const MAX_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    /// Absorbing-chain transition matrix of the one-dimensional round map.
    A1(usize),
    /// Reflecting random walk on a path.
    A2(usize),
    /// Substochastic matrix for one frozen endpoint.
    A3(usize),
    JacobianAt,
    JacobianMarching(usize),
    Strategy,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSpec {
    pub kind: MatrixKind,
    pub entries: DMatrix<f64>,
}

impl MatrixSpec {
    pub fn new(kind: MatrixKind, entries: DMatrix<f64>) -> Self {
        Self { kind, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.is_square() && self.entries == self.entries.transpose()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.sum()).collect()
    }
}

fn path_walk(dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim.saturating_sub(1) {
        m[(k, k + 1)] = 0.5;
        m[(k + 1, k)] = 0.5;
    }
    m
}

pub fn a1(n: usize) -> Result<MatrixSpec> {
    if n < 3 {
        return Err(invalid("A1 needs n >= 3"));
    }
    let mut m = path_walk(n);
    m[(0, 1)] = 0.0;
    m[(0, 0)] = 1.0;
    m[(n - 1, 0)] += 0.5;
    Ok(MatrixSpec::new(MatrixKind::A1(n), m))
}

pub fn a2(n: usize) -> Result<MatrixSpec> {
    if n < 3 {
        return Err(invalid("A2 needs n >= 3"));
    }
    let mut m = path_walk(n);
    m[(0, 0)] = 0.5;
    m[(n - 1, n - 1)] = 0.5;
    Ok(MatrixSpec::new(MatrixKind::A2(n), m))
}

pub fn a3(n: usize) -> Result<MatrixSpec> {
    if n < 3 {
        return Err(invalid("A3 needs n >= 3"));
    }
    let mut m = path_walk(n - 1);
    m[(n - 2, n - 2)] = 0.5;
    Ok(MatrixSpec::new(MatrixKind::A3(n), m))
}

/// Jacobian of the round map on the stacked state (x_2..x_n, y_2..y_n).
pub fn jacobian_at(config: &Configuration) -> Result<MatrixSpec> {
    let w = config.vectors();
    let d = w.len();
    if d < 2 {
        return Err(invalid("the Jacobian needs n >= 3"));
    }
    for (k, end) in [(0, End::First), (d - 1, End::Last)] {
        if w.w()[k].norm() <= ETA_ZERO {
            return Err(Error::ZeroOuterEdge { end, round: None });
        }
    }
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    let walk = path_walk(d);
    m.view_mut((0, 0), (d, d)).copy_from(&walk);
    m.view_mut((d, d), (d, d)).copy_from(&walk);
    for k in [0, d - 1] {
        let (x, y) = (w.w()[k].x, w.w()[k].y);
        let c = 0.5 / (x * x + y * y).powf(1.5);
        m[(k, k)] = y * y * c;
        m[(k, d + k)] = -x * y * c;
        m[(d + k, k)] = -x * y * c;
        m[(d + k, d + k)] = x * x * c;
    }
    Ok(MatrixSpec::new(MatrixKind::JacobianAt, m))
}

/// Jacobian at the marching chain laid along the y-axis; the first block
/// is the cross-axis (x) coordinate.
pub fn jacobian_marching(n: usize) -> Result<MatrixSpec> {
    if n < 3 {
        return Err(invalid("the Jacobian needs n >= 3"));
    }
    let d = n - 1;
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    let walk = path_walk(d);
    m.view_mut((0, 0), (d, d)).copy_from(&walk);
    m.view_mut((d, d), (d, d)).copy_from(&walk);
    let corner = n as f64 / (2.0 * (n as f64 - 2.0));
    m[(0, 0)] = corner;
    m[(d - 1, d - 1)] = corner;
    Ok(MatrixSpec::new(MatrixKind::JacobianMarching(n), m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    SymmetricQr,
    RealSchur,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Real parts, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Imaginary parts aligned with `eigenvalues`.
    pub imaginary: Vec<f64>,
    /// Eigenvectors (unit norm) aligned with `eigenvalues`; empty for complex pairs.
    pub eigenvectors: Vec<DVector<f64>>,
    pub residuals: Vec<f64>,
    pub method: Method,
}

impl SpectrumResult {
    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().zip(&self.imaginary).map(|(r, i)| r.hypot(*i)).collect()
    }
}

const MAX_ITER: usize = 10_000;

pub fn eigenvalues(m: &MatrixSpec, tol: f64) -> Result<SpectrumResult> {
    let dim = m.dim();
    if !m.entries.is_square() {
        return Err(invalid("matrix is not square"));
    }
    if dim > MAX_DIM {
        return Err(invalid(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    if dim == 0 {
        return Err(invalid("empty matrix"));
    }
    let eps = tol.min(1e-12).max(f64::EPSILON);
    if m.is_symmetric() {
        let eig = SymmetricEigen::try_new(m.entries.clone(), eps, MAX_ITER)
            .ok_or(Error::NonConvergence { dim })?;
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors: Vec<DVector<f64>> =
            order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
        let residuals =
            eigenvalues.iter().zip(&eigenvectors).map(|(l, x)| verify_eigenpair(m, *l, x)).collect();
        return Ok(SpectrumResult {
            imaginary: vec![0.0; dim],
            eigenvalues,
            eigenvectors,
            residuals,
            method: Method::SymmetricQr,
        });
    }
    let schur =
        Schur::try_new(m.entries.clone(), eps, MAX_ITER).ok_or(Error::NonConvergence { dim })?;
    let mut pairs: Vec<(f64, f64)> =
        schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut eigenvectors = Vec::with_capacity(dim);
    let mut residuals = Vec::with_capacity(dim);
    for &(re, im) in &pairs {
        if im.abs() > tol {
            eigenvectors.push(DVector::zeros(0));
            residuals.push(f64::NAN);
            continue;
        }
        let shifted = &m.entries - DMatrix::identity(dim, dim) * re;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or(Error::NonConvergence { dim })?;
        let k = svd.singular_values.imin();
        let x = v_t.row(k).transpose().into_owned();
        residuals.push(verify_eigenpair(m, re, &x));
        eigenvectors.push(x);
    }
    Ok(SpectrumResult {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        imaginary: pairs.iter().map(|p| p.1).collect(),
        eigenvectors,
        residuals,
        method: Method::RealSchur,
    })
}

/// Relative residual ||m x - lambda x|| / ||x||.
pub fn verify_eigenpair(m: &MatrixSpec, lambda: f64, x: &DVector<f64>) -> f64 {
    (&m.entries * x - x * lambda).norm() / x.norm()
}

pub fn rayleigh_quotient(m: &MatrixSpec, u: &DVector<f64>) -> f64 {
    u.dot(&(&m.entries * u)) / u.dot(u)
}

/// Rayleigh quotient at the all-ones vector; a lower bound on the largest
/// eigenvalue of a symmetric matrix.
pub fn rayleigh_bound(m: &MatrixSpec) -> Result<f64> {
    if !m.is_symmetric() {
        return Err(invalid("the Rayleigh bound needs a symmetric matrix"));
    }
    Ok(rayleigh_quotient(m, &DVector::repeat(m.dim(), 1.0)))
}

pub fn spectral_radius(m: &MatrixSpec) -> Result<f64> {
    Ok(eigenvalues(m, 1e-12)?.moduli().into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingBounds {
    pub lower: f64,
    pub upper: f64,
    pub lambda2: f64,
}

/// Relaxation-time bounds on the mixing time of A1 or A2.
///
/// `lower = (1/(1 - lambda2) - 1) * ln(1/(2 eps))`, clamped at 0 for
/// `eps >= 1/2`; `upper = (1/(1 - lambda2) - 1) * ln(1/(eps * pi_min))`.
/// A1 has an absorbing stationary distribution, so only its lower bound is
/// finite.
pub fn mixing_time_bounds(m: &MatrixSpec, eps: f64) -> Result<MixingBounds> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps must lie in (0, 1)"));
    }
    let pi_min = match m.kind {
        MatrixKind::A1(_) => None,
        MatrixKind::A2(n) => Some(1.0 / n as f64),
        other => return Err(invalid(format!("mixing bounds are defined for A1 and A2, not {other:?}"))),
    };
    let mut moduli = eigenvalues(m, 1e-12)?.moduli();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let lambda2 = moduli[1];
    let relax = 1.0 / (1.0 - lambda2) - 1.0;
    let lower = if eps >= 0.5 { 0.0 } else { relax * (1.0 / (2.0 * eps)).ln() };
    let upper = pi_min.map_or(f64::INFINITY, |p| relax * (1.0 / (eps * p)).ln());
    Ok(MixingBounds { lower, upper, lambda2 })
}

/// Closed-form spectra used as oracles.
pub mod closed_form {
    use super::*;

    pub fn a1_eigenvalues(n: usize) -> Vec<f64> {
        (0..n).map(|j| (j as f64 * PI / n as f64).cos()).collect()
    }

    pub fn a2_eigenvalues(n: usize) -> Vec<f64> {
        a1_eigenvalues(n)
    }

    pub fn a3_eigenvalues(n: usize) -> Vec<f64> {
        let m = (2 * n - 1) as f64;
        (1..n).map(|j| ((2 * j - 1) as f64 * PI / m).cos()).collect()
    }

    /// Eigenvector of A3(n) for eigenvalue j (1-based):
    /// `x[i] = sin(i (2j-1) pi / (2n-1))`, i = 1..n-1.
    pub fn a3_eigenvector(n: usize, j: usize) -> DVector<f64> {
        let m = (2 * n - 1) as f64;
        DVector::from_iterator(n - 1, (1..n).map(|i| (i as f64 * (2 * j - 1) as f64 * PI / m).sin()))
    }

    /// The cosine form `cos((2j-1)(2i-1)/(2(2n-1)))` with no factor of pi.
    pub fn a3_eigenvector_cosine_literal(n: usize, j: usize) -> DVector<f64> {
        let m = 2.0 * (2 * n - 1) as f64;
        DVector::from_iterator(n - 1, (1..n).map(|i| ((2 * j - 1) as f64 * (2 * i - 1) as f64 / m).cos()))
    }

    /// The cosine form with pi restored, `cos((2j-1)(2i-1) pi/(2(2n-1)))`.
    pub fn a3_eigenvector_cosine_pi(n: usize, j: usize) -> DVector<f64> {
        let m = 2.0 * (2 * n - 1) as f64;
        DVector::from_iterator(
            n - 1,
            (1..n).map(|i| ((2 * j - 1) as f64 * (2 * i - 1) as f64 * PI / m).cos()),
        )
    }

    /// Rayleigh quotient of the full marching Jacobian at the all-ones vector.
    pub fn marching_rayleigh_all_ones(n: usize) -> f64 {
        let n = n as f64;
        (2.0 * n - 3.0 + 2.0 / (n - 2.0)) / (2.0 * (n - 1.0))
    }

    /// Rayleigh quotient of the cross-axis block at its all-ones vector.
    pub fn marching_rayleigh_cross_block(n: usize) -> f64 {
        let n = n as f64;
        1.0 + 2.0 / ((n - 1.0) * (n - 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::closed_form::*;
    use super::*;
    use crate::chain::Point;
    use crate::discrete::step_max_gtm;
    use crate::generators::{gen_random, Family};

    fn assert_spectrum(got: &[f64], mut want: Vec<f64>, tol: f64) {
        want.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < tol, "{g} vs {w}");
        }
    }

    #[test]
    fn small_matrices_match_their_pictures() {
        let m = a1(3).unwrap().entries;
        assert_eq!(m, DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]));
        let m = a3(3).unwrap().entries;
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.5]));
        for n in [3, 4, 9, 32] {
            assert!(a1(n).unwrap().row_sums().iter().all(|&s| s == 1.0));
            let a = a2(n).unwrap();
            assert!(a.is_symmetric() && a.row_sums().iter().all(|&s| s == 1.0));
            let sums = a3(n).unwrap().row_sums();
            assert_eq!(sums[0], 0.5);
            assert!(sums[1..].iter().all(|&s| s == 1.0));
        }
        assert_eq!(jacobian_marching(10).unwrap().entries[(0, 0)], 0.625);
    }

    #[test]
    fn example_spectra() {
        let s = eigenvalues(&a1(4).unwrap(), 1e-12).unwrap();
        assert_eq!(s.method, Method::RealSchur);
        assert_spectrum(&s.eigenvalues, vec![1.0, 0.5f64.sqrt(), 0.0, -(0.5f64.sqrt())], 1e-12);
        assert!(s.residuals.iter().all(|&r| r < 1e-10));
        let s = eigenvalues(&a3(3).unwrap(), 1e-12).unwrap();
        assert_spectrum(&s.eigenvalues, vec![(PI / 5.0).cos(), (3.0 * PI / 5.0).cos()], 1e-14);
        let id = MatrixSpec::new(MatrixKind::Other, DMatrix::identity(5, 5));
        assert_eq!(eigenvalues(&id, 1e-12).unwrap().eigenvalues, vec![1.0; 5]);
    }

    #[test]
    fn a2_spectrum_is_cosine_family() {
        for n in [4, 8, 16, 32] {
            let s = eigenvalues(&a2(n).unwrap(), 1e-12).unwrap();
            assert_spectrum(&s.eigenvalues, a2_eigenvalues(n), 1e-10);
        }
    }

    #[test]
    fn a3_eigenvector_normalisation() {
        for n in [4, 8, 16] {
            let m = a3(n).unwrap();
            for j in 1..n {
                let lambda = a3_eigenvalues(n)[j - 1];
                assert!(verify_eigenpair(&m, lambda, &a3_eigenvector(n, j)) <= 1e-9);
            }
            // the literal cosine display and its pi-restored variant both fail
            let lambda = a3_eigenvalues(n)[0];
            assert!(verify_eigenpair(&m, lambda, &a3_eigenvector_cosine_literal(n, 1)) > 1e-3);
            assert!(verify_eigenpair(&m, lambda, &a3_eigenvector_cosine_pi(n, 1)) > 1e-3);
        }
    }

    #[test]
    fn random_pair_is_rejected() {
        let m = a2(6).unwrap();
        let x = DVector::from_vec(vec![0.3, -1.0, 0.2, 0.8, 0.1, -0.4]);
        assert!(verify_eigenpair(&m, 0.37, &x) > 0.1);
    }

    #[test]
    fn strategy_matrix_fixes_marching_chain() {
        let c = crate::generators::gen_marching_chain(10).unwrap();
        let s = crate::discrete::strategy_matrix(&c).unwrap();
        let w = DVector::from_iterator(9, c.vectors().w().iter().map(|v| v.x));
        assert!(verify_eigenpair(&s, 1.0, &w) <= 1e-12);
    }

    #[test]
    fn rayleigh_values() {
        let j = jacobian_marching(10).unwrap();
        let q = rayleigh_bound(&j).unwrap();
        assert!((q - 69.0 / 72.0).abs() < 1e-15);
        assert!((q - marching_rayleigh_all_ones(10)).abs() < 1e-15);
        let mut u = DVector::zeros(18);
        u.rows_mut(0, 9).fill(1.0);
        assert!((rayleigh_quotient(&j, &u) - (1.0 + 1.0 / 36.0)).abs() < 1e-15);
        let id = MatrixSpec::new(MatrixKind::Other, DMatrix::identity(4, 4));
        assert_eq!(rayleigh_bound(&id).unwrap(), 1.0);
        assert!((rayleigh_bound(&a2(7).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert!(rayleigh_bound(&a1(5).unwrap()).is_err());
    }

    #[test]
    fn spectral_radius_examples() {
        for n in [6, 10, 20] {
            let rho = spectral_radius(&jacobian_marching(n).unwrap()).unwrap();
            assert!(rho >= marching_rayleigh_cross_block(n) - 1e-12);
        }
        for n in [4, 8, 16] {
            let rho = spectral_radius(&a3(n).unwrap()).unwrap();
            assert!((rho - (PI / (2 * n - 1) as f64).cos()).abs() < 1e-12);
        }
        let zero = MatrixSpec::new(MatrixKind::Other, DMatrix::zeros(3, 3));
        assert_eq!(spectral_radius(&zero).unwrap(), 0.0);
    }

    #[test]
    fn substochastic_powers_decay() {
        for n in [4, 8, 16] {
            let m = a3(n).unwrap();
            let spec = eigenvalues(&m, 1e-12).unwrap();
            let beta = spec.moduli().into_iter().fold(0.0, f64::max);
            let mut alpha: f64 = 0.0;
            for x in &spec.eigenvectors {
                for y in &spec.eigenvectors {
                    alpha = alpha.max(x.amax() * y.amax());
                }
            }
            let mut power = m.entries.clone();
            for k in 1..=200 {
                let bound = n as f64 * alpha * beta.powi(k);
                assert!(power.max() <= bound + 1e-15, "n={n} k={k}");
                power = &power * &m.entries;
            }
        }
    }

    #[test]
    fn jacobian_at_marching_chain() {
        for n in [4, 6, 10, 16] {
            let w: Vec<Point> =
                crate::chain::marching_profile(n).into_iter().map(|y| Point::new(0.0, y)).collect();
            let c = Configuration::from_vectors(Point::zeros(), &w).unwrap();
            let j = jacobian_at(&c).unwrap().entries;
            let want = jacobian_marching(n).unwrap().entries;
            assert!((j - want).amax() <= 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = 1e-6;
        for n in [4, 6, 8] {
            for seed in 0..5 {
                let c = gen_random(Family::Random2D, n, seed).unwrap();
                // shrink so that +-h perturbations stay connected
                let w: Vec<Point> = c.vectors().w().iter().map(|v| v * 0.9).collect();
                let base = Configuration::from_vectors(Point::zeros(), &w).unwrap();
                let j = jacobian_at(&base).unwrap().entries;
                let d = w.len();
                let map = |w: &[Point]| -> DVector<f64> {
                    let c = Configuration::from_vectors(Point::zeros(), w).unwrap();
                    let next = step_max_gtm(&c).unwrap().vectors();
                    DVector::from_iterator(
                        2 * d,
                        next.w().iter().map(|v| v.x).chain(next.w().iter().map(|v| v.y)),
                    )
                };
                for col in 0..2 * d {
                    let mut plus = w.clone();
                    let mut minus = w.clone();
                    let (k, axis) = (col % d, col / d);
                    plus[k][axis] += h;
                    minus[k][axis] -= h;
                    let fd = (map(&plus) - map(&minus)) / (2.0 * h);
                    assert!((fd - j.column(col)).amax() <= 1e-5, "n={n} seed={seed} col={col}");
                }
            }
        }
    }

    #[test]
    fn mixing_bounds() {
        let b = mixing_time_bounds(&a2(8).unwrap(), 0.5).unwrap();
        assert_eq!(b.lower, 0.0);
        let b = mixing_time_bounds(&a1(16).unwrap(), 1e-3).unwrap();
        assert!(b.lower > 0.0 && b.upper.is_infinite());
        assert!((b.lambda2 - (PI / 16.0).cos()).abs() < 1e-10);
        let b = mixing_time_bounds(&a2(16).unwrap(), 1e-3).unwrap();
        assert!(b.upper > b.lower && b.lower > 0.0);
        assert!(mixing_time_bounds(&a3(5).unwrap(), 0.1).is_err());
    }
}
