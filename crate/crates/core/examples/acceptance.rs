//! Runs acceptance criteria by id, or all of them without arguments.
//!
//! cargo run --release --example acceptance -- 1 6 10

use chainform::acceptance::{run_criterion, CRITERIA};

fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { ids };
    for id in ids {
        match run_criterion(id) {
            Some(report) => println!("{report}"),
            None => eprintln!("no criterion {id}"),
        }
    }
}
