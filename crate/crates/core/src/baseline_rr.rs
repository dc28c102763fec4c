//! One-round randomized-response baseline.
//!
//! Node `i` reports one perturbed bit for every pair `(i, j)` with `j > i`.
//! The analyzer unbiases the bits into edge estimates `â_ij` and sums, over
//! every candidate tuple, the product of `â` over the tuple's distinct edges.
//! Enumeration is `O(N^{k+1})`, so this only runs on small graphs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mechanism::{estimate, Estimate, RunConfig};
use crate::netsim::{CommLedger, Network, Party, Payload};
use crate::pattern::TreeForm;
use crate::privacy::{rr_perturb, rr_unbias, Composition, PrivacyAccountant, TrialKey};

/// Largest graph the baseline accepts.
pub const N_MAX_RR: usize = 4000;

/// Largest number of tuples `rr_count` will enumerate.
pub const TUPLE_BUDGET: f64 = 1e9;

/// What the baseline counts.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum RrTarget {
    Walk(usize),
    Pattern(TreeForm),
}

impl RrTarget {
    pub fn k(&self) -> usize {
        match self {
            RrTarget::Walk(k) => *k,
            RrTarget::Pattern(t) => t.k(),
        }
    }
}

/// Perturbation strength. `Exact` keeps every bit, the `ε → ∞` limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RrBudget {
    Epsilon(f64),
    Exact,
}

/// Unbiased adjacency estimates for all pairs `i < j`.
#[derive(Clone, Debug)]
pub struct NoisyGraphEstimates {
    n: usize,
    /// Reported bits, row-major upper triangle.
    bits: Vec<bool>,
    one: f64,
    zero: f64,
}

impl NoisyGraphEstimates {
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Reported bit for the pair; symmetric.
    pub fn bit(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.bits[self.index(a, b)]
    }

    /// `â_ij`; symmetric. Panics when `i == j`.
    #[inline]
    pub fn estimate(&self, i: usize, j: usize) -> f64 {
        assert_ne!(i, j, "no estimate for a self-pair");
        if self.bit(i, j) {
            self.one
        } else {
            self.zero
        }
    }
}

/// Every node perturbs and sends its bits for higher-indexed nodes.
/// Returns the estimates and the traffic of the single round.
pub fn build_noisy_graph(
    g: &Graph,
    budget: RrBudget,
    key: TrialKey,
) -> Result<(NoisyGraphEstimates, CommLedger)> {
    let n = g.node_count();
    if n > N_MAX_RR {
        return Err(Error::Size(format!(
            "randomized response needs N <= {N_MAX_RR}, graph has {n} nodes"
        )));
    }
    let mut net = Network::new(n);
    for i in 0..n {
        let truth: Vec<bool> = ((i + 1)..n).map(|j| g.has_edge(i, j)).collect();
        let report = match budget {
            RrBudget::Exact => truth,
            RrBudget::Epsilon(eps) => rr_perturb(&truth, eps, &mut key.stream(Party::Node(i), 1))?,
        };
        net.send(Party::Node(i), Party::Analyzer, 1, Payload::Bits(report))?;
    }
    net.end_round();

    let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut rows: Vec<(usize, &Vec<bool>)> = net
        .analyzer_tagged(1)
        .filter_map(|m| match (m.from, &m.payload) {
            (Party::Node(i), Payload::Bits(b)) => Some((i, b)),
            _ => None,
        })
        .collect();
    rows.sort_by_key(|&(i, _)| i);
    for (_, row) in rows {
        bits.extend_from_slice(row);
    }
    let (one, zero) = match budget {
        RrBudget::Exact => (1.0, 0.0),
        RrBudget::Epsilon(eps) => (rr_unbias(true, eps), rr_unbias(false, eps)),
    };
    let estimates = NoisyGraphEstimates { n, bits, one, zero };
    Ok((estimates, net.into_ledger()))
}

fn check_budget(n: usize, k: usize) -> Result<()> {
    let tuples = (n as f64).powi(k as i32 + 1);
    if tuples > TUPLE_BUDGET {
        return Err(Error::Size(format!(
            "randomized-response enumeration of {n}^{} = {tuples:.2e} tuples exceeds {TUPLE_BUDGET:.0e}",
            k + 1
        )));
    }
    Ok(())
}

/// Sums the distinct-edge product estimator over all candidate tuples.
///
/// Walks enumerate every tuple without self-loop steps; with `distinct`, a
/// walk and its reversal are counted once (tuples lexicographically no larger
/// than their reversal). Patterns enumerate injective maps; `distinct`
/// divides by σ.
pub fn rr_count(est: &NoisyGraphEstimates, target: &RrTarget, distinct: bool) -> Result<f64> {
    let n = est.node_count();
    check_budget(n, target.k())?;
    match target {
        RrTarget::Walk(k) => {
            if *k == 0 {
                return Err(Error::arg("k", "walk length must be at least 1"));
            }
            let per_start: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|start| {
                    let mut tuple = vec![start];
                    let mut edges = Vec::with_capacity(*k);
                    walk_sum(est, *k, distinct, &mut tuple, &mut edges, 1.0)
                })
                .collect();
            // Summed in order so the result does not depend on the pool size.
            Ok(per_start.iter().sum())
        }
        RrTarget::Pattern(tree) => {
            let k = tree.k();
            let per_root: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|root| {
                    let mut assign = vec![usize::MAX; k + 1];
                    assign[k] = root;
                    pattern_sum(est, tree, &mut assign, k, 1.0)
                })
                .collect();
            let ordered: f64 = per_root.iter().sum();
            Ok(if distinct { ordered / tree.sigma() as f64 } else { ordered })
        }
    }
}

fn walk_sum(
    est: &NoisyGraphEstimates,
    k: usize,
    distinct: bool,
    tuple: &mut Vec<usize>,
    edges: &mut Vec<(usize, usize)>,
    product: f64,
) -> f64 {
    if tuple.len() == k + 1 {
        if distinct && tuple.iter().gt(tuple.iter().rev()) {
            return 0.0;
        }
        return product;
    }
    if product == 0.0 {
        return 0.0;
    }
    let last = *tuple.last().expect("tuple starts non-empty");
    let mut total = 0.0;
    for next in 0..est.node_count() {
        if next == last {
            continue;
        }
        let edge = (last.min(next), last.max(next));
        let repeated = edges.contains(&edge);
        let factor = if repeated { 1.0 } else { est.estimate(last, next) };
        edges.push(edge);
        tuple.push(next);
        total += walk_sum(est, k, distinct, tuple, edges, product * factor);
        tuple.pop();
        edges.pop();
    }
    total
}

fn pattern_sum(
    est: &NoisyGraphEstimates,
    tree: &TreeForm,
    assign: &mut [usize],
    pos: usize,
    product: f64,
) -> f64 {
    if pos == 0 {
        return product;
    }
    if product == 0.0 {
        return 0.0;
    }
    let next = pos - 1;
    let k = tree.k();
    let host = assign[tree.parent(next).expect("non-root subscript has a parent")];
    let mut total = 0.0;
    for v in 0..est.node_count() {
        if assign[next + 1..=k].contains(&v) {
            continue;
        }
        assign[next] = v;
        total += pattern_sum(est, tree, assign, next, product * est.estimate(host, v));
    }
    assign[next] = usize::MAX;
    total
}

/// Estimator of a single walk and the number of `â` factors it used
/// (one per distinct edge).
pub fn walk_estimator(est: &NoisyGraphEstimates, walk: &[usize]) -> (f64, usize) {
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let mut product = 1.0;
    for pair in walk.windows(2) {
        let edge = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if !seen.contains(&edge) {
            seen.push(edge);
            product *= est.estimate(pair[0], pair[1]);
        }
    }
    (product, seen.len())
}

pub(crate) fn run_rr(
    g: &Graph,
    target: &RrTarget,
    cfg: &RunConfig,
    acct: &mut PrivacyAccountant,
) -> Result<Estimate> {
    check_budget(g.node_count(), target.k())?;
    let budget = if cfg.noiseless {
        RrBudget::Exact
    } else {
        RrBudget::Epsilon(cfg.epsilon)
    };
    let (noisy, comm) = build_noisy_graph(g, budget, cfg.key)?;
    for i in 0..g.node_count() {
        acct.charge(i, 1, cfg.epsilon, Composition::Basic)?;
    }
    let value = rr_count(&noisy, target, cfg.distinct)?;
    Ok(estimate(value, cfg, comm, 1))
}
