//! One outer robot stays put; convergence is governed by the frozen-end
//! matrix whose spectral radius is cos(pi/(2n-1)).

use std::f64::consts::PI;

use chainform::discrete::{run_discrete, DiscreteStrategy, TraceMode};
use chainform::generators::{gen_random, Family};
use chainform::spectral::{a3, spectral_radius};
use chainform::End;

fn main() {
    for n in [8, 16, 32] {
        let start = gen_random(Family::Random2D, n, 11).unwrap();
        let r = run_discrete(DiscreteStrategy::OneFixedMaxGtM(End::First), &start, 1e-4, 10_000_000, TraceMode::None)
            .unwrap();
        let rho = spectral_radius(&a3(n).unwrap()).unwrap();
        let expected = (PI / (2 * n - 1) as f64).cos();
        println!(
            "n={n:>2} {:?} in {:>6} rounds, first robot moved: {}, radius {rho:.10} (closed form {expected:.10})",
            r.outcome,
            r.rounds,
            r.final_config.p(1) != start.p(1)
        );
    }
}
