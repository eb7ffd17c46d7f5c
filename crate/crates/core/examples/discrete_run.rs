//! Max-GtM from a random opposed start, with the round matrix checked
//! against the step.

use chainform::chain::is_eps_maxchain;
use chainform::discrete::{run_discrete, step_max_gtm, strategy_matrix, DiscreteStrategy, TraceMode};
use chainform::generators::{gen_random, Family};
use nalgebra::DVector;

fn main() {
    let start = gen_random(Family::OpposedRandom, 16, 3).unwrap();

    let s = strategy_matrix(&start).unwrap();
    let x = DVector::from_iterator(15, start.vectors().w().iter().map(|w| w.x));
    let via_matrix = &s.entries * x;
    let next = step_max_gtm(&start).unwrap();
    let gap = next.vectors().w().iter().zip(via_matrix.iter()).map(|(w, m)| (w.x - m).abs()).fold(0.0, f64::max);
    println!("matrix vs step: {gap:.2e}");

    let r = run_discrete(DiscreteStrategy::MaxGtM, &start, 1e-4, 1_000_000, TraceMode::EveryK(100)).unwrap();
    println!("{:?} after {} rounds, max-chain check {}", r.outcome, r.rounds, is_eps_maxchain(&r.final_config, 1e-4));
    for e in r.trace.iter().step_by(4) {
        println!("  round {:>5} phi1 {:.3e} phi2 {:.3e}", e.round, e.phi1, e.phi2);
    }
}
