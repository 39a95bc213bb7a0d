//! Runs every CLI command into one directory and prints the criteria table.
//!
//! `cargo run --release --example pipeline [out_dir]`

use prandtl_lab::cli::run;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out".into());
    for cmd in ["spectral", "quasimode", "scan", "steady", "report"] {
        let code = run(["prandtl-lab", cmd, "--out", &out]);
        if code != 0 {
            std::process::exit(code);
        }
    }
}
