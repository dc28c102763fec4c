//! The randomized-response baseline: every node reports one perturbed bit
//! per pair, the analyzer enumerates all tuples. Traffic is quadratic in N
//! regardless of the graph.

use ldp_motifs::baseline_rr::RrTarget;
use ldp_motifs::graph::gen_erdos_renyi_avg_degree;
use ldp_motifs::harness::{mean_and_se, run_trials};
use ldp_motifs::oracle;
use ldp_motifs::{Mechanism, Result, RunConfig};

pub fn run() -> Result<()> {
    let g = gen_erdos_renyi_avg_degree(150, 6.0, 4)?;
    let exact = oracle::walk_count_oriented(&g, 2)?;
    println!("G(150, d=6): W_2 = {exact}");
    for mech in [Mechanism::Rr(RrTarget::Walk(2)), Mechanism::WalkOpt(2)] {
        let runs = run_trials(&g, &mech, &RunConfig::new(1.0), 2, 100)?;
        let values: Vec<f64> = runs.iter().map(|(e, _)| e.value).collect();
        let (mean, se) = mean_and_se(&values);
        println!(
            "  {:<8} mean {mean:>10.1} (se {se:.1}) | {:>6} bytes",
            mech.name(),
            runs[0].0.comm.total_bytes()
        );
    }
    for n in [500, 1000, 2000] {
        let g = gen_erdos_renyi_avg_degree(n, 10.0, 1)?;
        let rr = ldp_motifs::baseline_rr::build_noisy_graph(&g, ldp_motifs::baseline_rr::RrBudget::Epsilon(1.0), Default::default())?.1;
        let path = Mechanism::Path(4).run(&g, &RunConfig::new(1.0))?;
        println!(
            "  N={n}: rr {} B vs path:4 {} B ({:.1}x)",
            rr.total_bytes(),
            path.comm.total_bytes(),
            rr.total_bytes() as f64 / path.comm.total_bytes() as f64
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
