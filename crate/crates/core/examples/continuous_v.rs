//! The continuous V: slowed outer robots finish in time independent of
//! the opening, the naive rule does not.

use chainform::continuous::{integrate, v_time_bound, MobParams, Sampling};
use chainform::generators::gen_continuous_delta_v;

fn main() {
    let n = 9;
    let tau = 0.5;
    let slowed = MobParams::new(tau, false).unwrap();
    let naive = MobParams::new(tau, true).unwrap();
    println!("time bound for the slowed rule: {:.2}", v_time_bound(n, tau));
    for delta in [1e-1, 1e-2, 1e-3] {
        let start = gen_continuous_delta_v(n, delta).unwrap();
        let a = integrate(&start, &slowed, 1e-3, 1e-3, 500.0, Sampling::None).unwrap();
        let b = integrate(&start, &naive, 1e-3, 1e-3, 500.0, Sampling::None).unwrap();
        println!("delta {delta:.0e}: slowed {:>7.3} ({:?}), naive {:>7.3} ({:?})", a.elapsed, a.outcome, b.elapsed, b.outcome);
    }
}
