//! One realization of the four pre-selection strategies under params-A with
//! seven beams per side.
//!
//! Run with `cargo run --release --example strategy_snapshot`.

use beamalign::evaluation::snapshot_beams;
use beamalign::scenario::Scenario;
use beamalign::strategies::{Strategy, StrategyConfig};

fn main() -> beamalign::Result<()> {
    let scenario = Scenario {
        strategy: StrategyConfig::new(7, 7).with_mc_iterations(200, 20),
        ..Scenario::default()
    };
    let snap = snapshot_beams(&scenario, &Strategy::ALL, 2)?;

    let (t, r) = (snap.view_tx.rx(), snap.view_rx.rx());
    println!("RX position as seen by the TX: ({:.1}, {:.1})", t.x, t.y);
    println!("RX position as seen by the RX: ({:.1}, {:.1})\n", r.x, r.y);
    for s in &snap.selections {
        let tx: Vec<usize> = s.tx.iter().map(|b| b.index).collect();
        let rx: Vec<usize> = s.rx.iter().map(|b| b.index).collect();
        println!(
            "{:>10}  rate {:6.3} b/s/Hz  TX {:?}  RX {:?}",
            s.strategy.as_str(),
            s.rate.rate,
            tx,
            rx
        );
    }
    Ok(())
}
