use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn beamalign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamalign")).args(args).output().unwrap()
}

fn scenario(dir: &Path) -> PathBuf {
    let path = dir.join("s.json");
    std::fs::write(
        &path,
        r#"{"parameter_set": "params-B",
            "arrays": {"n_tx": 16, "n_rx": 16}, "codebook": {"m_tx": 16, "m_rx": 16},
            "strategy": {"d_tx": 2, "d_rx": 2, "mc_iterations": 6, "inner_mc_iterations": 3, "seed": 5}}"#,
    )
    .unwrap();
    path
}

#[test]
fn sweep_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario(dir.path());
    let out = dir.path().join("rates.csv");
    let o = beamalign(&[
        "sweep", "--scenario", scen.to_str().unwrap(), "--sweep", "d:1:3", "--trials", "4",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        ["strategy", "sweep_value", "mean_rate", "std_error", "n_trials", "seed", "scenario_hash"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4 * 3);
    // The scenario's own seed is used when --seed is absent.
    assert!(rows.iter().all(|r| &r[5] == "5" && &r[4] == "4"));
    let values: Vec<&str> = rows.iter().take(3).map(|r| &r[1]).collect();
    assert_eq!(values, ["1", "2", "3"]);
}

#[test]
fn seed_changes_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario(dir.path());
    let run = |seed: &str| {
        beamalign(&["sweep", "--scenario", scen.to_str().unwrap(), "--strategies", "naive",
            "--sweep", "snr:10:10:1", "--trials", "8", "--seed", seed])
        .stdout
    };
    assert_eq!(run("1"), run("1"));
    assert_ne!(run("1"), run("2"));
}

#[test]
fn snapshot_lists_selected_angles() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario(dir.path());
    let o = beamalign(&["snapshot", "--scenario", scen.to_str().unwrap(), "--strategies", "two-step,naive"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let sel = v["selections"].as_array().unwrap();
    assert_eq!(sel.len(), 2);
    assert_eq!(sel[0]["strategy"], "two-step");
    for side in ["tx", "rx"] {
        for beam in sel[0][side].as_array().unwrap() {
            let angle = beam["angle"].as_f64().unwrap();
            assert!((0.0..=std::f64::consts::PI).contains(&angle));
        }
    }
    assert_eq!(v["true_positions"]["rx"], serde_json::json!([100.0, 0.0]));
    assert!(v["view_tx"]["reflectors"].as_array().unwrap().len() == 2);
}

#[test]
fn usage_errors_exit_two_with_diagnostics() {
    for args in [
        vec!["sweep", "--strategies", ""],
        vec!["sweep", "--strategies", "three-step"],
        vec!["sweep", "--sweep", "freq:1:2"],
        vec!["sweep", "--trials", "0"],
        vec!["frobnicate"],
    ] {
        let o = beamalign(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn invalid_scenario_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"profile": [0.2, 0.2, 0.2]}"#).unwrap();
    let o = beamalign(&["sweep", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("profile"));
}

#[test]
fn help_succeeds() {
    let o = beamalign(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for cmd in ["sweep", "snapshot", "validate"] {
        assert!(text.contains(cmd));
    }
}
