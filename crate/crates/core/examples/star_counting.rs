//! One-round star counting from noisy degrees. The falling factorial of a
//! noisy degree is biased upward by the noise variance; the bias shrinks
//! relative to the count as degrees grow.

use ldp_motifs::graph::gen_erdos_renyi_avg_degree;
use ldp_motifs::harness::run_trials;
use ldp_motifs::oracle;
use ldp_motifs::{Mechanism, Result, RunConfig};

pub fn run() -> Result<()> {
    for avg in [10.0, 40.0] {
        let g = gen_erdos_renyi_avg_degree(2000, avg, 3)?;
        for k in [2, 3] {
            let exact = oracle::star_count(&g, k, false)?;
            let runs = run_trials(&g, &Mechanism::Star(k), &RunConfig::new(1.0), 1, 200)?;
            let mean = runs.iter().map(|(e, _)| e.value).sum::<f64>() / runs.len() as f64;
            println!(
                "d={avg:>4}: star:{k} exact {exact:>12} mean {mean:>14.1} bias {:+.2}% | {} B to analyzer, 1 round",
                100.0 * (mean / exact as f64 - 1.0),
                runs[0].0.comm.total_bytes()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
