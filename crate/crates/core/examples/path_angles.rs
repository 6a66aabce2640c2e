//! Angles of departure and arrival for the default three-path layout.
//!
//! Run with `cargo run --example path_angles`.

use beamalign::geometry::{angle_to_vertical, path_angles, Point2, PositionMatrix};

fn main() -> beamalign::Result<()> {
    let pos = PositionMatrix::new(
        Point2::ORIGIN,
        vec![Point2::new(50.0, 40.0), Point2::new(45.0, -30.0)],
        Point2::new(100.0, 0.0),
    )?;
    let angles = path_angles(&pos)?;

    println!("path      AoD (deg)   AoA (deg)");
    let names = ["LoS", "R1", "R2"];
    for (l, name) in names.iter().enumerate() {
        println!(
            "{name:<6} {:>10.2}  {:>10.2}",
            angles.aods[l].to_degrees(),
            angles.aoas[l].to_degrees()
        );
    }

    // A point straight north lies on the array axis.
    let north = angle_to_vertical(Point2::new(0.0, 5.0), Point2::ORIGIN)?;
    println!("\nnorth of the TX: {:.1} deg", north.to_degrees());

    // Moving the whole scene leaves every angle where it was.
    let moved = pos.translated(Point2::new(-300.0, 12.5))?;
    assert_eq!(path_angles(&moved)?.aods.len(), 3);
    Ok(())
}
