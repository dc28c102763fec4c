//! Per-node budget tracking: basic composition adds, parallel charges in the
//! same group count once, and overspending is reported with the round.

use ldp_motifs::graph::gen_erdos_renyi;
use ldp_motifs::privacy::{Composition, PrivacyAccountant};
use ldp_motifs::{Mechanism, Result, RunConfig, TrialKey};

pub fn run() -> Result<()> {
    let mut acct = PrivacyAccountant::new(2);
    acct.charge(0, 1, 0.25, Composition::Basic)?;
    acct.charge(0, 2, 0.25, Composition::Basic)?;
    acct.charge(1, 1, 0.5, Composition::Parallel { group: 0 })?;
    acct.charge(1, 2, 0.5, Composition::Parallel { group: 0 })?;
    println!("node 0 spent {} (basic), node 1 spent {} (parallel)", acct.effective_total(0), acct.effective_total(1));
    acct.assert_total(0.5)?;

    let g = gen_erdos_renyi(50, 0.2, 1)?;
    let mut acct = PrivacyAccountant::new(g.node_count());
    for rep in 0..3 {
        let cfg = RunConfig::new(1.0 / 3.0).with_key(TrialKey::new(1, 0).with_rep(rep));
        Mechanism::WalkOpt(4).run_with_accountant(&g, &cfg, &mut acct)?;
    }
    println!("three walk-opt runs at eps=1/3: max node spend {:.6}", acct.max_total());
    acct.assert_total(1.0)?;

    let cfg = RunConfig::new(1.0 / 3.0).with_key(TrialKey::new(1, 0).with_rep(3));
    Mechanism::WalkOpt(4).run_with_accountant(&g, &cfg, &mut acct)?;
    match acct.assert_total(1.0) {
        Err(e) => println!("a fourth run is rejected: {e}"),
        Ok(()) => println!("a fourth run slipped through"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
