//! Rate as a function of how many beams each side may pre-select.
//!
//! Run with `cargo run --release --example budget_sweep`.

use beamalign::evaluation::{run_experiments, Sweep};
use beamalign::scenario::Scenario;
use beamalign::strategies::{Strategy, StrategyConfig};

fn main() -> beamalign::Result<()> {
    let scenario = Scenario {
        strategy: StrategyConfig::new(1, 1).with_mc_iterations(50, 5),
        ..Scenario::default()
    };
    let sweep = Sweep::Budget { lo: 1, hi: 8 };
    let run = run_experiments(&scenario, &Strategy::ALL, &sweep, 40, 5)?;

    for s in Strategy::ALL {
        let curve: Vec<String> = (0..run.sweep_values.len())
            .map(|i| format!("{:5.2}", run.mean_rate(s, i).unwrap()))
            .collect();
        println!("{:>10}  D=1..8: {}", s.as_str(), curve.join(" "));
    }
    Ok(())
}
