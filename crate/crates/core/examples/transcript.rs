//! What each party sees: the per-round values, the analyzer's published
//! maxima and the marks, for one seeded trial.

use ldp_motifs::graph::gen_erdos_renyi;
use ldp_motifs::mech_marked::run_path;
use ldp_motifs::mech_walk::run_walk_opt;
use ldp_motifs::{Result, RunConfig};

pub fn run() -> Result<()> {
    let g = gen_erdos_renyi(8, 0.4, 2)?;
    let cfg = RunConfig::new(1.0).with_trial(2, 0).with_transcript();

    let walk = run_walk_opt(&g, 3, &cfg)?;
    println!("# walk-opt walk:3 value {:.2}", walk.value);
    print!("{}", walk.transcript.expect("requested").dump());

    let path = run_path(&g, 2, &cfg)?;
    println!("# path path:2 value {:.2}", path.value);
    print!("{}", path.transcript.expect("requested").dump());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
