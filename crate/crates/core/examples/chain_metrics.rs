//! Segment indices and the outer-angle metrics of a bent chain.

use chainform::chain::{angle_at, metrics, phi1, segment_indices};
use chainform::chain::{ETA_COL, ETA_ZERO};
use chainform::{Configuration, Point};

fn main() {
    // straight legs meeting at two bends
    let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.6, 0.8), (3.2, 1.6), (4.2, 1.6), (5.2, 1.6)];
    let c = Configuration::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap();

    let seg = segment_indices(&c, ETA_COL, ETA_ZERO);
    println!("ell={} ell+={} r={} r+={}", seg.ell, seg.ell_plus, seg.r, seg.r_plus);
    for i in 2..c.n() {
        println!("  angle at {i}: {:.4}", angle_at(&c, i));
    }
    let m = metrics(&c, &seg);
    println!("O_ell={:.3} O_r={:.3} I={:.3} H_ell={:.3} H_r={:.3}", m.O_ell, m.O_r, m.I, m.H_ell, m.H_r);
    println!("L={:.3} delta_1n={:.3} phi1={:.3e}", m.L, m.delta_1n, phi1(&c));
}
