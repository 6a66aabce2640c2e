//! Codebook grid, the Fejér beam-gain kernel and the average gain matrix.
//!
//! Run with `cargo run --example beam_gain`.

use beamalign::codebook::build_codebook;
use beamalign::gain::{fejer_gain, gain_matrix};
use beamalign::geometry::{Point2, PositionMatrix};
use beamalign::channel::PathProfile;

fn main() -> beamalign::Result<()> {
    let cb = build_codebook(8, 8)?;
    println!("8-beam grid (deg):");
    for (i, a) in cb.grid_angles().iter().enumerate() {
        println!("  beam {}: {:6.2}", i + 1, a.to_degrees());
    }

    println!("\nF(16, Δ) across one main lobe:");
    for k in 0..=8 {
        let delta = k as f64 / 64.0;
        println!("  Δ = {delta:.4}  F = {:8.4}", fejer_gain(16, delta));
    }

    let pos = PositionMatrix::new(
        Point2::ORIGIN,
        vec![Point2::new(50.0, 40.0), Point2::new(45.0, -30.0)],
        Point2::new(100.0, 0.0),
    )?;
    let profile = PathProfile::new(vec![0.4, 0.3, 0.3])?;
    let g = gain_matrix(&pos, &profile, &cb, &cb)?;

    println!("\naverage gain G[q][p] (rows: RX beams, columns: TX beams)");
    for q in 0..g.m_rx() {
        let row: Vec<String> = g.row(q).iter().map(|v| format!("{v:6.2}")).collect();
        println!("  {}", row.join(" "));
    }
    let (peak, q, p) = g.max_entry();
    println!("\nbest pair: TX beam {}, RX beam {} with gain {peak:.2}", p + 1, q + 1);
    Ok(())
}
