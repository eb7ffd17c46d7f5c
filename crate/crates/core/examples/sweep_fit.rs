//! A seeded sweep over chain sizes and the power-law fit of its median
//! round counts.

use chainform::generators::Family;
use chainform::harness::{run_sweep_to_dir, ExperimentSpec, Strategy};

fn main() {
    let mut spec = ExperimentSpec::new(Strategy::MaxGtm, Family::OpposedRandom, vec![8, 16, 32, 64]);
    spec.eps = vec![1e-4];
    spec.seeds = (0..10).collect();
    let dir = std::env::temp_dir().join("chainform-sweep");
    let result = run_sweep_to_dir(&spec, &dir).unwrap();
    for row in result.rows.iter().filter(|r| r.point.seed == 0) {
        println!("n={:>2} seed 0: {} after {} rounds", row.point.n, row.outcome, row.cost);
    }
    let fit = result.fit.unwrap();
    println!("rounds ~ n^{:.3} (r2 {:.4}); results in {}", fit.slope, fit.r_squared, dir.display());
}
