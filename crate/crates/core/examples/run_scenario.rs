//! Runs a scenario through the library instead of the `ttdsim` binary.
//!
//!     cargo run --example run_scenario -- scenarios/prop1_sweep.json out/

use std::path::PathBuf;

use ttd_precoding::harness::{run, RunOptions, Scenario};
use ttd_precoding::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "scenarios/criteria_report.json".into());
    let out = args.next().map_or_else(|| PathBuf::from("out"), PathBuf::from);
    let scenario = Scenario::from_file(&path)?;
    let summary = run(&scenario, &RunOptions { out_dir: Some(out), ..Default::default() })?;
    for f in &summary.files {
        println!("{}", f.display());
    }
    println!("{}", summary.manifest.display());
    Ok(())
}
