//! Runs a scenario file and prints the text report.
//!
//! `cargo run --example scenario_runner -- crates/core/examples/scenarios/tour.json`

use stein_nbhd::scenario::{run_scenario, to_text, RunOptions, Scenario};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenarios/tour.json").into()
    });
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    let scenario = Scenario::from_json(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
    let report = run_scenario(&scenario, &RunOptions { timing: true });
    print!("{}", to_text(&report));
}
