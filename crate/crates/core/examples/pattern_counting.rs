//! General tree patterns: the same spider counted under different roots.
//! Fewer leaves means more rounds; every formulation is unbiased.

use ldp_motifs::graph::gen_erdos_renyi;
use ldp_motifs::harness::{compare_trees, write_tree_csv};
use ldp_motifs::pattern::{formulate_tree, Pattern};
use ldp_motifs::{Mechanism, Result, RunConfig};

pub fn run() -> Result<()> {
    let g = gen_erdos_renyi(60, 0.1, 1)?;
    let spider = Pattern::new(vec![(0, 1), (1, 2), (1, 3), (3, 4)])?;

    let tree = formulate_tree(&spider, Some(1))?;
    let mech = Mechanism::Pattern(tree);
    let one = mech.run(&g, &RunConfig::new(2.0).distinct(true).with_trial(1, 0))?;
    println!("{} at eps=2: {:.1} (exact {})", mech.query(), one.value, mech.exact_count(&g, true)?);

    let rows = compare_trees(&g, &spider, &[1, 3, 0], 2.0, 400, 7, true)?;
    let mut out = Vec::new();
    write_tree_csv(&rows, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
