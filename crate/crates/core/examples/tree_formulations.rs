//! Tree formulations: one pattern, several roots. The root gets subscript
//! `k`, subscripts decrease away from it, and the round count is
//! `k + 2 - |leaves|`.

use ldp_motifs::pattern::{formulate_tree, Pattern, PatternSpec, parse_pattern};
use ldp_motifs::Result;

pub fn run() -> Result<()> {
    let spider = parse_pattern(&"0-1,1-2,1-3,3-4".parse::<PatternSpec>()?)?;
    println!("pattern {spider}: k={} sigma={}", spider.k(), formulate_tree(&spider, None)?.sigma());
    for root in 0..spider.vertex_count() {
        let t = formulate_tree(&spider, Some(root))?;
        let subscripts: Vec<String> = (0..spider.vertex_count())
            .map(|v| format!("v{v}->{}", t.subscript_of(v)))
            .collect();
        let internal: Vec<usize> = t.internal().collect();
        println!(
            "  root {root}: {} | leaves {:?} internal {:?} rounds {}",
            subscripts.join(" "),
            t.leaves(),
            internal,
            t.round_count()
        );
    }

    for (name, p) in [("path:4", Pattern::path(4)?), ("star:4", Pattern::star(4)?)] {
        let t = formulate_tree(&p, None)?;
        println!("{name}: default root {} rounds {} sigma {}", t.root_vertex(), t.round_count(), t.sigma());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
