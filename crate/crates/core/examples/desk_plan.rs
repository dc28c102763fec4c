//! Runs `examples/plans/desk.plan` (or a plan given as the first argument) and writes
//! its CSV report to stdout.

use std::path::PathBuf;

use ldp_motifs::harness::{run_plan, write_csv, ExperimentPlan};
use ldp_motifs::Result;

pub fn run_file(path: PathBuf) -> Result<()> {
    let mut plan = ExperimentPlan::load(&path)?;
    plan.output = None;
    let rows = run_plan(&plan)?;
    let mut out = Vec::new();
    write_csv(&rows, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

pub fn run() -> Result<()> {
    let default = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/plans/desk.plan");
    run_file(std::env::args().nth(1).map(PathBuf::from).unwrap_or(default))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
