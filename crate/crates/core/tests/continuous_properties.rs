use chainform::continuous::{integrate, velocity_field, ContinuousOutcome, MobParams, Sampling};
use chainform::generators::{gen_continuous_delta_v, gen_random, Family};
use chainform::Configuration;
use proptest::prelude::*;

fn planar() -> impl Strategy<Value = Configuration> {
    (3usize..=20, any::<u64>()).prop_map(|(n, seed)| gen_random(Family::Random2D, n, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn speeds_respect_their_caps(c in planar(), tau in 0.05f64..=0.5, naive in any::<bool>()) {
        let p = MobParams::new(tau, naive).unwrap();
        let f = velocity_field(&c, &p);
        prop_assert!(f.max_inner_speed() <= 1.0 + 1e-12);
        prop_assert!(f.max_outer_speed() <= p.outer_cap() + 1e-12);
    }

    #[test]
    fn sampled_states_stay_connected(c in planar(), tau in 0.1f64..=0.5) {
        let p = MobParams::new(tau, false).unwrap();
        let r = integrate(&c, &p, 1e-3, 1e-3, 3.0, Sampling::EveryStep).unwrap();
        for s in &r.trace {
            prop_assert!(s.config.max_edge() <= 1.0 + p.eta_taut);
            let f = velocity_field(&s.config, &p);
            prop_assert!(f.max_inner_speed() <= 1.0 + 1e-12);
            prop_assert!(f.max_outer_speed() <= p.outer_cap() + 1e-12);
        }
    }
}

#[test]
fn random_starts_finish() {
    for seed in 0..6 {
        let c = gen_random(Family::Random2D, 12, seed).unwrap();
        let r = integrate(&c, &MobParams::new(0.25, false).unwrap(), 1e-3, 1e-3, 500.0, Sampling::None).unwrap();
        assert_ne!(r.outcome, ContinuousOutcome::TimeBudgetExceeded, "seed {seed}");
    }
}

#[test]
fn slowed_outer_robots_make_v_time_independent_of_delta() {
    let p = MobParams::new(0.5, false).unwrap();
    let times: Vec<f64> = [0.1, 0.001]
        .iter()
        .map(|&d| integrate(&gen_continuous_delta_v(9, d).unwrap(), &p, 1e-3, 1e-3, 100.0, Sampling::None).unwrap().elapsed)
        .collect();
    assert!((times[0] - times[1]).abs() / times[0] < 0.25, "{times:?}");
}
