use chainform::chain::ETA_CONN;
use chainform::discrete::{run_discrete, step, step_max_gtm, DiscreteStrategy, TraceMode};
use chainform::generators::{gen_discrete_delta_v, gen_marching_chain, gen_random, gen_tau_delta_v, Family};
use chainform::{Configuration, End, Point};
use proptest::prelude::*;

/// Reads every robot from the old buffer and writes into a fresh one.
fn two_buffer(c: &Configuration, f_first: f64, f_last: f64) -> Vec<Point> {
    let old = c.positions().to_vec();
    let n = old.len();
    let mut new = vec![Point::zeros(); n];
    let outer = |p: Point, q: Point, f: f64| {
        let w = q - p;
        p + (w - w / w.norm()) * (0.5 * f)
    };
    new[0] = outer(old[0], old[1], f_first);
    new[n - 1] = outer(old[n - 1], old[n - 2], f_last);
    for i in 1..n - 1 {
        new[i] = (old[i - 1] + old[i + 1]) / 2.0;
    }
    new
}

fn planar() -> impl Strategy<Value = Configuration> {
    (3usize..=24, any::<u64>()).prop_map(|(n, seed)| gen_random(Family::Random2D, n, seed).unwrap())
}

fn close(a: &[Point], b: &[Point]) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).norm() < 1e-12)
}

proptest! {
    #[test]
    fn updates_are_simultaneous(c in planar(), tau in 0.01f64..0.5) {
        prop_assert!(close(step_max_gtm(&c).unwrap().positions(), &two_buffer(&c, 1.0, 1.0)));
        let tau_step = step(&c, DiscreteStrategy::TauMaxGtM(tau)).unwrap();
        prop_assert!(close(tau_step.positions(), &two_buffer(&c, 1.0 - tau, 1.0 - tau)));
        let fixed = step(&c, DiscreteStrategy::OneFixedMaxGtM(End::First)).unwrap();
        let mut want = two_buffer(&c, 1.0, 1.0);
        want[0] = c.p(1);
        prop_assert!(close(fixed.positions(), &want));
    }

    #[test]
    fn every_strategy_keeps_connectivity(c in planar(), tau in 0.01f64..0.5, rounds in 1usize..30) {
        for s in [DiscreteStrategy::MaxGtM, DiscreteStrategy::OneFixedMaxGtM(End::Last), DiscreteStrategy::TauMaxGtM(tau)] {
            let mut cur = c.clone();
            for _ in 0..rounds {
                cur = step(&cur, s).unwrap();
                prop_assert!(cur.max_edge() <= 1.0 + ETA_CONN);
            }
        }
    }

    #[test]
    fn one_dimensional_class_never_switches(n in 3usize..20, seed in any::<u64>(), marching in any::<bool>()) {
        let family = if marching { Family::MarchingRandom } else { Family::OpposedRandom };
        let mut c = gen_random(family, n, seed).unwrap();
        // along a line the outer edges keep their orientation
        let sign = |c: &Configuration| {
            let w = c.vectors();
            (w.w()[0].x > 0.0) == (w.w()[w.len() - 1].x > 0.0)
        };
        let start = sign(&c);
        for _ in 0..200 {
            c = step_max_gtm(&c).unwrap();
            prop_assert!(c.positions().iter().all(|p| p.y == 0.0));
            prop_assert_eq!(sign(&c), start);
        }
    }
}

#[test]
fn fixed_points() {
    let max = Configuration::from_signed_edges(&[1.0; 7]).unwrap();
    for s in [DiscreteStrategy::MaxGtM, DiscreteStrategy::OneFixedMaxGtM(End::First), DiscreteStrategy::TauMaxGtM(0.3)] {
        assert!(close(step(&max, s).unwrap().positions(), max.positions()));
    }
    let m = gen_marching_chain(12).unwrap();
    let next = step_max_gtm(&m).unwrap();
    for (a, b) in next.vectors().w().iter().zip(m.vectors().w()) {
        assert!((a - b).norm() < 1e-12);
    }
}

/// Lengths may dip below their start values, but only by the squared
/// initial cross-axis component.
fn edges_never_shrink(start: Configuration, strategy: DiscreteStrategy, rounds: usize) {
    let floor = start.vectors().lengths();
    let slack = start.vectors().w()[0].x.powi(2);
    let mut c = start;
    for t in 0..rounds {
        c = step(&c, strategy).unwrap();
        for (i, (now, was)) in c.vectors().lengths().iter().zip(&floor).enumerate() {
            assert!(now + slack >= *was, "round {t} edge {i}: {now} < {was} - {slack}");
        }
    }
}

#[test]
fn v_start_edges_never_shrink() {
    for n in [8, 16] {
        for delta in [0.05, 0.5] {
            edges_never_shrink(gen_discrete_delta_v(n, delta).unwrap(), DiscreteStrategy::MaxGtM, 5000);
            edges_never_shrink(gen_tau_delta_v(n, delta, 0.2).unwrap(), DiscreteStrategy::TauMaxGtM(0.2), 5000);
        }
    }
}

#[test]
fn v_start_outer_vector_dips_in_the_first_round() {
    // w_2 <- (w_3 + w_2/|w_2|) / 2 loses length whenever x_2 > 0
    let c = gen_discrete_delta_v(8, 0.05).unwrap();
    let before = c.vectors().lengths()[0];
    let after = step_max_gtm(&c).unwrap().vectors().lengths()[0];
    let x = 0.05 / 7.0;
    let w3 = Point::new(x, 0.5);
    let w2 = Point::new(x, 0.75);
    let oracle = ((w3 + w2 / w2.norm()) / 2.0).norm();
    assert!((after - oracle).abs() < 1e-15);
    assert!(after < before && before - after < x * x);
}

#[test]
fn v_start_cross_component_growth_is_capped() {
    for (n, delta) in [(8, 0.1), (16, 0.01), (16, 1e-4)] {
        let mut c = gen_discrete_delta_v(n, delta).unwrap();
        let cap = 1.0 + 1.0 / (n as f64 - 2.0);
        for t in 0..2000 {
            let x2 = c.vectors().w()[0].x.abs();
            c = step_max_gtm(&c).unwrap();
            let next = c.vectors().w()[0].x.abs();
            assert!(next <= cap * x2 + 1e-12, "n {n} round {t}: {next} > {cap} * {x2}");
        }
    }
}

#[test]
fn runs_report_the_first_round_a_target_holds() {
    let r = run_discrete(DiscreteStrategy::MaxGtM, &gen_marching_chain(10).unwrap(), 1e-6, 10, TraceMode::None).unwrap();
    assert_eq!(r.rounds, 0);
    let c = gen_random(Family::OpposedRandom, 8, 3).unwrap();
    let r = run_discrete(DiscreteStrategy::MaxGtM, &c, 1e-4, 100_000, TraceMode::Full).unwrap();
    assert_eq!(r.trace.len(), r.rounds + 1);
    assert!(chainform::chain::is_eps_maxchain(&r.final_config, 1e-4));
    assert!(!chainform::chain::is_eps_maxchain(&r.trace[r.rounds - 1].config, 1e-4));
}
