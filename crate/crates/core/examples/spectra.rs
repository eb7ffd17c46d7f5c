//! Spectra of the analysis matrices against their closed forms, the
//! unstable marching fixed point, and mixing-time bounds.

use chainform::spectral::{
    a1, a2, a3, closed_form, eigenvalues, jacobian_marching, mixing_time_bounds, rayleigh_bound, spectral_radius,
};

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() {
    for n in [4, 8, 16, 32] {
        let e1 = eigenvalues(&a1(n).unwrap(), 1e-12).unwrap();
        let e2 = eigenvalues(&a2(n).unwrap(), 1e-12).unwrap();
        let e3 = eigenvalues(&a3(n).unwrap(), 1e-12).unwrap();
        println!(
            "n={n:>2} A1 {:.1e} A2 {:.1e} A3 {:.1e}  worst residual {:.1e}",
            max_gap(&e1.eigenvalues, &closed_form::a1_eigenvalues(n)),
            max_gap(&e2.eigenvalues, &closed_form::a2_eigenvalues(n)),
            max_gap(&e3.eigenvalues, &closed_form::a3_eigenvalues(n)),
            e3.residuals.iter().cloned().fold(0.0, f64::max),
        );
    }

    for n in [6, 10, 20] {
        let j = jacobian_marching(n).unwrap();
        let nf = n as f64;
        println!(
            "marching Jacobian n={n:>2}: radius {:.6}, all-ones Rayleigh {:.6}, instability bound {:.6}",
            spectral_radius(&j).unwrap(),
            rayleigh_bound(&j).unwrap(),
            1.0 + 1.0 / ((nf - 1.0) * (nf - 2.0)),
        );
    }

    let b = mixing_time_bounds(&a2(16).unwrap(), 1e-3).unwrap();
    println!("A2(16) lambda2 {:.6}, mixing time in [{:.1}, {:.1}]", b.lambda2, b.lower, b.upper);
}
