//! The self-check suite behind `beamalign validate`, with smaller sizes.
//!
//! Run with `cargo run --release --example oracle_suite`.

use beamalign::validate::{run_suite, SuiteConfig};

fn main() -> beamalign::Result<()> {
    let cfg = SuiteConfig {
        gain_instances: 5,
        gain_samples: 5_000,
        greedy_instances: 10,
        collapse_scenarios: 20,
        seed: 1,
    };
    for check in run_suite(&cfg)? {
        println!("{}", check.line());
    }
    Ok(())
}
