//! Random-marking path counting. With fixed marks the noiseless output is
//! exactly `(k+1)^(k+1)` times the marked paths; averaging over marks
//! recovers the path count. Repetition splits ε across fresh markings.

use ldp_motifs::graph::gen_erdos_renyi_avg_degree;
use ldp_motifs::harness::run_trials;
use ldp_motifs::mech_marked::{draw_marks, rescale_factor, run_path};
use ldp_motifs::oracle;
use ldp_motifs::pattern::{formulate_tree, Pattern};
use ldp_motifs::{Mechanism, Result, RunConfig, TrialKey};

pub fn run() -> Result<()> {
    let g = gen_erdos_renyi_avg_degree(1000, 8.0, 2)?;
    let k = 3;
    let exact = oracle::path_count_oriented(&g, k)?;
    println!("G(1000, d=8): P_{k} = {exact}");

    let marks = draw_marks(g.node_count(), k, TrialKey::new(5, 0));
    let tree = formulate_tree(&Pattern::path(k)?, Some(k))?;
    let marked = oracle::marked_pattern_count(&g, &tree, &marks)?;
    let est = run_path(&g, k, &RunConfig::noiseless().with_marks(marks))?;
    println!("  one marking: {marked} marked paths -> estimate {} (= {}^{} x {marked})", est.value, k + 1, k + 1);
    assert_eq!(est.value, rescale_factor(k) * marked as f64);

    for n_rep in [1, 4] {
        let runs = run_trials(&g, &Mechanism::Path(k), &RunConfig::new(4.0).with_n_rep(n_rep), 3, 40)?;
        let mean = runs.iter().map(|(e, _)| e.value).sum::<f64>() / runs.len() as f64;
        let bytes = runs[0].0.comm.total_bytes();
        println!("  eps=4 n_rep={n_rep}: mean estimate {mean:.4e} ({:+.2}%), {bytes} bytes per trial", 100.0 * (mean / exact as f64 - 1.0));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
