//! Multi-round walk counting: the broadcast mechanism against the
//! round-reduced one, with traffic per channel and the error bound.

use ldp_motifs::graph::gen_erdos_renyi_avg_degree;
use ldp_motifs::harness::{mean_and_se, run_trials};
use ldp_motifs::mech_walk::walk_error_bound;
use ldp_motifs::netsim::Channel;
use ldp_motifs::oracle;
use ldp_motifs::{Mechanism, Result, RunConfig};

pub fn run() -> Result<()> {
    let g = gen_erdos_renyi_avg_degree(500, 10.0, 1)?;
    let k = 4;
    let exact = oracle::walk_count_oriented(&g, k)?;
    println!("G(500, d=10): W_{k} = {exact}");

    for mech in [Mechanism::WalkBasic(k), Mechanism::WalkOpt(k)] {
        let noiseless = mech.run(&g, &RunConfig::noiseless())?;
        assert_eq!(noiseless.value, exact as f64);
        let runs = run_trials(&g, &mech, &RunConfig::new(2.0), 1, 50)?;
        let errors: Vec<f64> = runs.iter().map(|(e, _)| (e.value - exact as f64).abs() / exact as f64).collect();
        let (err, se) = mean_and_se(&errors);
        let comm = &runs[0].0.comm;
        println!(
            "  {:<10} rounds {} | eps=2 mean rel err {:.2}% (se {:.2}) | n2n {} B, n2a {} B, a2n {} B",
            mech.name(),
            mech.rounds(),
            100.0 * err,
            100.0 * se,
            comm.bytes(Channel::NodeToNode),
            comm.bytes(Channel::NodeToAnalyzer),
            comm.bytes(Channel::AnalyzerToNode),
        );
    }
    let bound = walk_error_bound(g.node_count(), g.max_degree(), k, 2.0, 0.1);
    println!("  bound at beta=0.1: {bound:.3e} ({:.0}x the count)", bound / exact as f64);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
