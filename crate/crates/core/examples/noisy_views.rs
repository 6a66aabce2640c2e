//! How each side's position estimate is drawn, and how robust strategies
//! re-sample plausible truths around it.
//!
//! Run with `cargo run --example noisy_views`.

use beamalign::scenario::NamedParameterSet;
use beamalign::scenario::default_positions;
use beamalign::uncertainty::{make_noisy_view, sample_conditional_truth, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> beamalign::Result<()> {
    let truth = default_positions();
    let set = NamedParameterSet::params_a();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    for side in [Side::Tx, Side::Rx] {
        println!("{} radii per column [TX, R1, R2, RX]: {:?}", side.as_str(), set.errors.radii(side));
        let view = make_noisy_view(&truth, &set.errors, side, &mut rng)?;
        for (name, (t, v)) in ["TX", "R1", "R2", "RX"].iter().zip(truth.columns().zip(view.positions.columns())) {
            println!("  {name}: true ({:6.1}, {:6.1})  estimate ({:6.1}, {:6.1})  off by {:5.2} m",
                t.x, t.y, v.x, v.y, t.distance(&v));
        }
        // Plausible truths never stray further from the estimate than the radius.
        let guess = sample_conditional_truth(&view, &set.errors, &mut rng)?;
        let r = set.errors.radii(side);
        for (i, (g, v)) in guess.columns().zip(view.positions.columns()).enumerate() {
            assert!(g.distance(&v) <= r[i] + 1e-9);
        }
    }
    Ok(())
}
