//! Graph ingestion: seeded Erdős–Rényi generation, SNAP-style edge lists and
//! the `er:N:p[:seed]` source strings the CLI accepts.

use ldp_motifs::graph::{gen_erdos_renyi, gen_erdos_renyi_avg_degree, load_edge_list, load_graph_source};
use ldp_motifs::Result;

pub fn run() -> Result<()> {
    let snap = "\
# FromNodeId ToNodeId
10 20
20 30 1.5
30 10
30 30
40 10
";
    let g = load_edge_list(snap.as_bytes())?;
    println!("edge list: N={} M={} (ids compacted, self-loop dropped)", g.node_count(), g.edge_count());
    for i in 0..g.node_count() {
        println!("  node {i}: neighbors {:?}", g.neighbors(i)?);
    }

    let er = gen_erdos_renyi(1000, 0.01, 42)?;
    assert_eq!(er, gen_erdos_renyi(1000, 0.01, 42)?, "same seed, same graph");
    println!("G(1000, 0.01, seed 42): M={} avg degree {:.2} max degree {}", er.edge_count(), er.average_degree(), er.max_degree());

    let by_degree = gen_erdos_renyi_avg_degree(2000, 10.0, 1)?;
    println!("G(2000, d=10): avg degree {:.2}", by_degree.average_degree());

    let mut buf = Vec::new();
    er.write_edge_list(&mut buf)?;
    assert_eq!(load_edge_list(buf.as_slice())?, er);
    println!("write/load round trip: {} bytes, identical graph", buf.len());

    let same = load_graph_source("er:1000:0.01:42", 0)?;
    assert_eq!(same, er);
    println!("`er:1000:0.01:42` reproduces it");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
