//! Ground-truth counts from the oracle, and the size guard that refuses
//! enumerations it cannot finish.

use ldp_motifs::graph::gen_erdos_renyi;
use ldp_motifs::oracle;
use ldp_motifs::pattern::{formulate_tree, Pattern};
use ldp_motifs::{Error, Graph, Result};

pub fn run() -> Result<()> {
    let line = Graph::from_edges(3, [(0, 1), (1, 2)])?;
    println!("path 0-1-2: W_2 = {} walks, U_2 = {}", oracle::walk_count_oriented(&line, 2)?, oracle::walk_count_unoriented(&line, 2)?);

    let g = gen_erdos_renyi(200, 0.05, 3)?;
    println!("G(200, 0.05): N={} M={}", g.node_count(), g.edge_count());
    for k in 2..=5 {
        println!(
            "  k={k}: W={} U={} P={} paths={} S={} stars={}",
            oracle::walk_count_oriented(&g, k)?,
            oracle::walk_count_unoriented(&g, k)?,
            oracle::path_count_oriented(&g, k)?,
            oracle::pattern_count(&g, &Pattern::path(k)?)?,
            oracle::star_count(&g, k, false)?,
            oracle::star_count(&g, k, true)?,
        );
    }
    let spider = Pattern::new(vec![(0, 1), (1, 2), (1, 3), (3, 4)])?;
    let ordered = oracle::ordered_embedding_count(&g, &formulate_tree(&spider, None)?)?;
    println!("  spider: {} embeddings, {} distinct subgraphs", ordered, oracle::pattern_count(&g, &spider)?);

    let big = gen_erdos_renyi(3000, 0.05, 1)?;
    match oracle::path_count_oriented(&big, 6) {
        Err(Error::Size(msg)) => println!("size guard: {msg}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
