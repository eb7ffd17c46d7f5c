use chainform::chain::{
    classify, is_eps_maxchain, phi2, phi2_diff_lower_bound, ChainTag, ETA_ANG, ETA_COL, ETA_CONN,
};
use chainform::discrete::step_max_gtm;
use chainform::generators::{gen_random, Family};
use chainform::{Configuration, Point};
use proptest::prelude::*;

fn signed_edge() -> impl Strategy<Value = f64> {
    (0.05f64..=1.0, any::<bool>()).prop_map(|(len, neg)| if neg { -len } else { len })
}

/// A chain on a line through the origin at angle `theta`.
fn collinear() -> impl Strategy<Value = Configuration> {
    (prop::collection::vec(signed_edge(), 2..32), 0.0..std::f64::consts::TAU).prop_map(|(edges, theta)| {
        let dir = Point::new(theta.cos(), theta.sin());
        let w: Vec<Point> = edges.iter().map(|e| dir * *e).collect();
        Configuration::from_vectors(Point::zeros(), &w).unwrap()
    })
}

fn planar() -> impl Strategy<Value = Configuration> {
    (3usize..=32, any::<u64>()).prop_map(|(n, seed)| gen_random(Family::Random2D, n, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn collinear_class_survives_a_step(c in collinear()) {
        let before = classify(&c, ETA_ANG, ETA_COL);
        prop_assume!(before.tag != ChainTag::CollinearDegenerate);
        let next = step_max_gtm(&c).unwrap();
        prop_assert_eq!(classify(&next, ETA_ANG, ETA_COL).tag, before.tag);
    }
}

proptest! {
    #[test]
    fn maxchain_predicate_is_monotone_in_eps(c in planar(), eps in 1e-6f64..0.5, bump in 0.0f64..0.5) {
        if is_eps_maxchain(&c, eps) {
            prop_assert!(is_eps_maxchain(&c, eps + bump));
        }
        let straight = Configuration::from_signed_edges(&vec![1.0 - eps / 2.0; c.n() - 1]).unwrap();
        prop_assert!(is_eps_maxchain(&straight, eps));
        prop_assert!(is_eps_maxchain(&straight, eps + bump));
    }

    #[test]
    fn steps_keep_edges_within_range(c in planar(), rounds in 1usize..40) {
        let mut c = c;
        for _ in 0..rounds {
            c = step_max_gtm(&c).unwrap();
            prop_assert!(c.max_edge() <= 1.0 + ETA_CONN);
        }
    }

    #[test]
    fn displacement_energy_never_grows(c in planar(), rounds in 2usize..60) {
        let mut states = vec![c];
        for _ in 0..rounds {
            let next = step_max_gtm(states.last().unwrap()).unwrap();
            states.push(next);
        }
        for t in states.windows(3) {
            let (diff, bound) = phi2_diff_lower_bound(&t[0], &t[1], &t[2]).unwrap();
            prop_assert!(phi2(&t[1], &t[2]).unwrap() <= phi2(&t[0], &t[1]).unwrap() + 1e-9);
            prop_assert!(diff >= bound - 1e-9, "diff {diff} bound {bound}");
        }
    }

    #[test]
    fn csv_round_trip(c in planar()) {
        let back = Configuration::read_csv(c.to_csv_string().as_bytes()).unwrap();
        prop_assert_eq!(back.positions(), c.positions());
    }
}
