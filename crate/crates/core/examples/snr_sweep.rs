//! Mean achievable rate versus SNR, with paired comparisons between
//! strategies. A reduced version of what `beamalign sweep` writes.
//!
//! Run with `cargo run --release --example snr_sweep`.

use beamalign::evaluation::{run_experiments, Sweep};
use beamalign::scenario::Scenario;
use beamalign::strategies::{Strategy, StrategyConfig};

fn main() -> beamalign::Result<()> {
    let scenario = Scenario {
        strategy: StrategyConfig::new(4, 4).with_mc_iterations(50, 5),
        ..Scenario::default()
    };
    let sweep: Sweep = "snr:-10:30:10".parse()?;
    let run = run_experiments(&scenario, &Strategy::ALL, &sweep, 60, 9)?;

    print!("{:>6}", "SNR");
    for s in Strategy::ALL {
        print!("{:>12}", s.as_str());
    }
    println!();
    for (i, snr) in run.sweep_values.iter().enumerate() {
        print!("{snr:>6}");
        for s in Strategy::ALL {
            print!("{:>12.3}", run.mean_rate(s, i).unwrap());
        }
        println!();
    }

    let mid = run.sweep_values.len() / 2;
    let d = run.paired(Strategy::TwoStep, Strategy::OneStep, mid).unwrap();
    println!(
        "\ntwo-step minus one-step at {} dB: {:.3} (95% lower bound {:.3}, {} trials)",
        run.sweep_values[mid],
        d.mean,
        d.lower_95(),
        d.n
    );
    Ok(())
}
