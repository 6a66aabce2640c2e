//! Drives the command-line interface without spawning a process.
//!
//! Run with `cargo run --release --example cli_in_process`.

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = beamalign::cli::run(
        [
            "beamalign", "sweep",
            "--strategies", "idealized,naive,one-step",
            "--sweep", "snr:0:20:10",
            "--trials", "20",
            "--seed", "4",
            "--mc-iterations", "20",
        ],
        &mut out,
        &mut err,
    );
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));

    let mut usage = Vec::new();
    let code_empty = beamalign::cli::run(["beamalign", "sweep", "--strategies", ""], &mut Vec::new(), &mut usage);
    println!("\nsweep exit {code}; empty strategy list exit {code_empty}: {}", String::from_utf8_lossy(&usage).trim());
}
