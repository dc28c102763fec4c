//! Splits path-counting error into the part caused by marking and the part
//! caused by Laplace noise, by replaying each trial without noise.

use ldp_motifs::graph::gen_erdos_renyi_avg_degree;
use ldp_motifs::mech_marked::error_decompose;
use ldp_motifs::{Mechanism, Result, RunConfig};

pub fn run() -> Result<()> {
    let g = gen_erdos_renyi_avg_degree(1000, 12.0, 8)?;
    println!("path:4 on G(1000, d=12), 10 trials, trimmed mean");
    for eps in [0.5, 1.0, 2.0, 4.0] {
        let d = error_decompose(&g, &Mechanism::Path(4), &RunConfig::new(eps).with_trial(3, 0), 10)?;
        println!(
            "  eps={eps:<4} sampling {:>7.2}%  dp {:>7.2}%  total {:>7.2}%",
            100.0 * d.sampling,
            100.0 * d.dp,
            100.0 * d.total
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
