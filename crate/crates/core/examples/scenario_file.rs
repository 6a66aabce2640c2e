//! Writing, reading and hashing scenario files.
//!
//! Run with `cargo run --example scenario_file`.

use beamalign::scenario::{load_scenario, write_scenario, Scenario};

fn main() -> beamalign::Result<()> {
    let dir = std::env::temp_dir().join("beamalign-scenario-example");
    std::fs::create_dir_all(&dir).map_err(|source| beamalign::Error::Io {
        path: dir.display().to_string(),
        source,
    })?;

    // Only the fields that differ from the defaults need to be given.
    let partial = r#"{ "parameter_set": "params-B", "snr_db": 20, "sweep": "d:1:6" }"#;
    let s = Scenario::from_json(partial)?;
    println!("params-B profile: {:?}", s.profile.powers());
    println!("hash: {}", s.hash());

    let path = dir.join("params-b.json");
    write_scenario(&s, &path)?;
    let back = load_scenario(&path)?;
    assert_eq!(back, s);
    println!("round trip through {} ok", path.display());

    match Scenario::from_json(r#"{ "errors": { "radii_tx": [0, 1, 1, 1], "radii_rx": [0, -4, 1, 1] } }"#) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
