//! An ε sweep driven by an inline experiment plan, printed as CSV.

use ldp_motifs::graph::load_graph_source;
use ldp_motifs::harness::{run_plan_on, write_csv, ExperimentPlan};
use ldp_motifs::Result;

const PLAN: &str = "\
dataset = er:400:0.025
seed = 1
trials = 10
eps = 0.5..2:0.5
query = walk-opt walk:3 distinct
query = path path:3
query = star star:2
";

pub fn run() -> Result<()> {
    let plan = ExperimentPlan::parse(PLAN)?;
    let g = load_graph_source(&plan.dataset, plan.seed)?;
    let rows = run_plan_on(&plan, &g)?;
    let mut out = Vec::new();
    write_csv(&rows, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
