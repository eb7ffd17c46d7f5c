//! Generates one start from every family and prints its shape.

use chainform::chain::{classify, is_collinear, ETA_ANG, ETA_COL};
use chainform::generators::{generate, Family, GeneratorSpec};

fn main() {
    for family in Family::ALL {
        // the continuous V has an apex robot, so an odd count
        let n = if family == Family::ContinuousDeltaV { 11 } else { 10 };
        let spec = GeneratorSpec { family, n, delta: 0.1, tau: 0.2, seed: 7, epsilon: 1e-3 };
        let c = generate(&spec).unwrap();
        let lengths = c.vectors().lengths();
        println!(
            "{:<15} n={} class={:?} collinear={} edges [{:.3} .. {:.3}]",
            family.cli_name(),
            c.n(),
            classify(&c, ETA_ANG, ETA_COL).tag,
            is_collinear(&c, ETA_COL),
            lengths.iter().cloned().fold(f64::INFINITY, f64::min),
            lengths.iter().cloned().fold(0.0, f64::max),
        );
    }

    // the file format the CLI reads and writes
    let c = generate(&GeneratorSpec::new(Family::MarchingChain, 4)).unwrap();
    print!("\n{}", c.to_csv_string());
}
