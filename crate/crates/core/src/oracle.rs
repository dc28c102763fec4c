//! Exact, non-private counts used as ground truth.
//!
//! All counts are `u128`. Walk counts use the neighbor-sum recursion, pattern
//! counts enumerate injective embeddings along a tree formulation, and marked
//! counts use a mark-filtered tree dynamic program.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{formulate_tree, Pattern, TreeForm};

/// Longest walk the oracle accepts.
pub const MAX_WALK_LENGTH: usize = 30;

/// Ceiling on the estimated number of enumeration steps for embedding counts.
pub const ENUMERATION_BUDGET: f64 = 1e9;

fn check_walk_length(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::arg("k", "walk length must be at least 1"));
    }
    if k > MAX_WALK_LENGTH {
        return Err(Error::Overflow(format!(
            "walk length {k} exceeds the oracle limit of {MAX_WALK_LENGTH}"
        )));
    }
    Ok(())
}

/// Per-node walk counts `X^k_i` by the noiseless recursion.
pub fn walk_vector(g: &Graph, k: usize) -> Result<Vec<u128>> {
    let mut x = vec![1u128; g.node_count()];
    for _ in 0..k {
        let next: Option<Vec<u128>> = (0..g.node_count())
            .map(|i| {
                g.adj(i)
                    .iter()
                    .try_fold(0u128, |acc, &j| acc.checked_add(x[j]))
            })
            .collect();
        x = next.ok_or_else(|| Error::Overflow(format!("walk count for k = {k} exceeds 128 bits")))?;
    }
    Ok(x)
}

fn checked_sum(values: &[u128], what: &str) -> Result<u128> {
    values
        .iter()
        .try_fold(0u128, |acc, &v| acc.checked_add(v))
        .ok_or_else(|| Error::Overflow(format!("{what} exceeds 128 bits")))
}

/// `W_k`: ordered node sequences `v_0..v_k` with consecutive nodes adjacent.
pub fn walk_count_oriented(g: &Graph, k: usize) -> Result<u128> {
    check_walk_length(k)?;
    checked_sum(&walk_vector(g, k)?, "walk count")
}

/// `U_k`: walks with a walk and its reversal identified.
/// Odd `k`: `W_k / 2`; even `k`: `(W_k + W_{k/2}) / 2`.
pub fn walk_count_unoriented(g: &Graph, k: usize) -> Result<u128> {
    let w = walk_count_oriented(g, k)?;
    if k % 2 == 1 {
        Ok(w / 2)
    } else {
        let symmetric = walk_count_oriented(g, k / 2)?;
        Ok((w + symmetric) / 2)
    }
}

/// `P_k`: simple paths with `k` edges, both orientations counted.
pub fn path_count_oriented(g: &Graph, k: usize) -> Result<u128> {
    let tree = formulate_tree(&Pattern::path(k)?, None)?;
    ordered_embedding_count(g, &tree)
}

/// `Q_T`: distinct subgraphs isomorphic to `pattern`.
pub fn pattern_count(g: &Graph, pattern: &Pattern) -> Result<u128> {
    let tree = formulate_tree(pattern, None)?;
    let ordered = ordered_embedding_count(g, &tree)?;
    let sigma = u128::from(tree.sigma());
    assert_eq!(
        ordered % sigma,
        0,
        "{ordered} embeddings of {pattern} are not divisible by sigma = {sigma}"
    );
    Ok(ordered / sigma)
}

/// Homomorphism count of the tree with subscript 0 removed, in `f64`.
/// Bounds the work of [`ordered_embedding_count`].
pub fn enumeration_cost(g: &Graph, tree: &TreeForm) -> f64 {
    let k = tree.k();
    let n = g.node_count();
    let mut h: Vec<Vec<f64>> = vec![Vec::new(); k + 1];
    for l in 1..=k {
        let mut values = vec![1.0; n];
        for &c in tree.children(l).iter().filter(|&&c| c != 0) {
            for (v, value) in values.iter_mut().enumerate() {
                *value *= g.adj(v).iter().map(|&w| h[c][w]).sum::<f64>();
            }
        }
        h[l] = values;
    }
    k as f64 * h[k].iter().sum::<f64>()
}

/// Injective embeddings of the tree's pattern (automorphic images counted
/// separately, so this is `Q_T · σ`).
///
/// Pattern vertices are assigned root first, in descending subscript order,
/// so every vertex attaches to an assigned parent. The final vertex
/// (subscript 0, always a leaf) is counted without enumeration.
pub fn ordered_embedding_count(g: &Graph, tree: &TreeForm) -> Result<u128> {
    let cost = enumeration_cost(g, tree);
    if cost > ENUMERATION_BUDGET {
        return Err(Error::Size(format!(
            "exact count of {} needs about {cost:.2e} steps (limit {ENUMERATION_BUDGET:.0e}); \
             use a mechanism estimate instead",
            tree.pattern()
        )));
    }
    let k = tree.k();
    let total = (0..g.node_count())
        .into_par_iter()
        .map(|root| {
            let mut assign = vec![usize::MAX; k + 1];
            assign[k] = root;
            embed(g, tree, &mut assign, k - 1)
        })
        .sum();
    Ok(total)
}

fn embed(g: &Graph, tree: &TreeForm, assign: &mut [usize], pos: usize) -> u128 {
    let k = tree.k();
    let host = assign[tree.parent(pos).expect("non-root subscript has a parent")];
    if pos == 0 {
        let taken = assign[1..=k].iter().filter(|&&a| g.has_edge(host, a)).count();
        return (g.adj(host).len() - taken) as u128;
    }
    let mut total = 0;
    for &w in g.adj(host) {
        if assign[pos + 1..=k].contains(&w) {
            continue;
        }
        assign[pos] = w;
        total += embed(g, tree, assign, pos - 1);
    }
    assign[pos] = usize::MAX;
    total
}

/// Star counts: ordered `Σ_i (d_i)_k` or distinct `Σ_i C(d_i, k)`.
/// A 1-star is an edge with two possible centers, so its distinct count is
/// halved once more (`M`).
pub fn star_count(g: &Graph, k: usize, distinct: bool) -> Result<u128> {
    if k == 0 {
        return Err(Error::arg("k", "star size must be at least 1"));
    }
    let overflow = || Error::Overflow(format!("star:{k} count exceeds 128 bits"));
    let mut total: u128 = 0;
    for i in 0..g.node_count() {
        let d = g.adj(i).len() as u128;
        if d < k as u128 {
            continue;
        }
        let mut term: u128 = 1;
        for s in 0..k as u128 {
            term = term.checked_mul(d - s).ok_or_else(overflow)?;
            if distinct {
                // running C(d, s+1); each step divides exactly
                term /= s + 1;
            }
        }
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    Ok(if distinct && k == 1 { total / 2 } else { total })
}

/// Embeddings in which the node mapped to subscript `ℓ` carries mark `ℓ`.
///
/// Distinct subscripts carry distinct marks, so injectivity is automatic and
/// the count is a mark-filtered tree homomorphism count.
pub fn marked_pattern_count(g: &Graph, tree: &TreeForm, marks: &[u8]) -> Result<u128> {
    let k = tree.k();
    let n = g.node_count();
    if marks.len() != n {
        return Err(Error::arg(
            "marks",
            format!("expected {n} marks, got {}", marks.len()),
        ));
    }
    if let Some(bad) = marks.iter().find(|&&m| m as usize > k) {
        return Err(Error::arg("marks", format!("mark {bad} is outside 0..={k}")));
    }
    let overflow = || Error::Overflow("marked embedding count exceeds 128 bits".into());
    let mut c: Vec<Vec<u128>> = vec![Vec::new(); k + 1];
    for l in 0..=k {
        let mut values: Vec<u128> = marks.iter().map(|&m| u128::from(m as usize == l)).collect();
        for &child in tree.children(l) {
            for (v, value) in values.iter_mut().enumerate() {
                if *value == 0 {
                    continue;
                }
                let sum = checked_sum(
                    &g.adj(v).iter().map(|&w| c[child][w]).collect::<Vec<_>>(),
                    "marked embedding count",
                )?;
                *value = value.checked_mul(sum).ok_or_else(overflow)?;
            }
        }
        c[l] = values;
    }
    checked_sum(&c[k], "marked embedding count")
}
