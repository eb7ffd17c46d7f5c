//! Slowing the outer robots does not remove the dependence on the V's
//! opening in the round-based model.

use chainform::discrete::{run_discrete, DiscreteStrategy, TraceMode};
use chainform::fit::fit_affine;
use chainform::generators::{gen_discrete_delta_v, gen_tau_delta_v};

fn main() {
    let (n, tau, eps) = (16, 0.2, 1e-3);
    let mut plain = Vec::new();
    let mut slowed = Vec::new();
    for delta in [1e-1, 1e-2, 1e-3, 1e-4] {
        let a = run_discrete(DiscreteStrategy::MaxGtM, &gen_discrete_delta_v(n, delta).unwrap(), eps, 10_000_000, TraceMode::None)
            .unwrap();
        let b = run_discrete(
            DiscreteStrategy::TauMaxGtM(tau),
            &gen_tau_delta_v(n, delta, tau).unwrap(),
            eps,
            10_000_000,
            TraceMode::None,
        )
        .unwrap();
        println!("delta {delta:.0e}: max-gtm {:>6} rounds, tau-gtm {:>6} rounds", a.rounds, b.rounds);
        plain.push(((1.0 / delta).ln(), a.rounds as f64));
        slowed.push(((1.0 / delta).ln(), b.rounds as f64));
    }
    for (name, pts) in [("max-gtm", plain), ("tau-gtm", slowed)] {
        let f = fit_affine(&pts).unwrap();
        println!("{name}: {:.1} rounds per e-fold of 1/delta (r2 {:.4})", f.slope, f.r_squared);
    }
}
