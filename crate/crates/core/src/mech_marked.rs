//! Random-marking mechanisms for paths and tree patterns, the one-round star
//! mechanism, `n_rep` averaging and the sampling/DP error decomposition.
//!
//! Every node draws a mark `r_i ∈ {0..k}` independently of the graph and
//! publishes it to its neighbors and the analyzer. A node takes part only in
//! the computation for subscript `r_i`, so every edge feeds at most one noisy
//! sum per node and the budget `ε` is not split across rounds.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mechanism::{estimate, Estimate, Mechanism, RunConfig};
use crate::netsim::{round_max, CommLedger, Network, Party, Payload, Transcript};
use crate::pattern::TreeForm;
use crate::privacy::{Composition, PrivacyAccountant, TrialKey, MARK_ROUND};

/// Message tag for marks.
const MARK_TAG: u32 = u32::MAX;

/// Draws `n` marks uniformly from `0..=k`. Takes no graph input: marks are
/// independent of the data and spend no budget.
pub fn draw_marks(n: usize, k: usize, key: TrialKey) -> Vec<u8> {
    (0..n)
        .map(|i| key.stream(Party::Node(i), MARK_ROUND).gen_range(0..=k as u8))
        .collect()
}

/// `(k+1)^{k+1}` as `f64`.
pub fn rescale_factor(k: usize) -> f64 {
    ((k + 1) as f64).powi(k as i32 + 1)
}

/// The random-marking `k`-path mechanism.
pub fn run_path(g: &Graph, k: usize, cfg: &RunConfig) -> Result<Estimate> {
    Mechanism::Path(k).run(g, cfg)
}

/// The tree-pattern mechanism for the formulation `tree`.
pub fn run_pattern(g: &Graph, tree: &TreeForm, cfg: &RunConfig) -> Result<Estimate> {
    Mechanism::Pattern(tree.clone()).run(g, cfg)
}

/// The one-round `k`-star mechanism.
pub fn run_star(g: &Graph, k: usize, cfg: &RunConfig) -> Result<Estimate> {
    Mechanism::Star(k).run(g, cfg)
}

/// Runs `mech` `cfg.n_rep` times with fresh marks at `ε / n_rep` each and
/// averages. Communication accumulates over runs; the accountant is shared
/// and must end at or below `ε`.
pub fn run_with_reps(g: &Graph, mech: &Mechanism, cfg: &RunConfig) -> Result<Estimate> {
    cfg.validate()?;
    let reps = cfg.n_rep;
    let mut acct = PrivacyAccountant::new(g.node_count());
    let mut sum = 0.0;
    let mut comm = CommLedger::default();
    let mut first = None;
    for rep in 0..reps {
        let run_cfg = RunConfig {
            epsilon: cfg.epsilon / f64::from(reps),
            n_rep: 1,
            key: cfg.key.with_rep(cfg.key.rep + rep),
            ..cfg.clone()
        };
        let est = mech.run_with_accountant(g, &run_cfg, &mut acct)?;
        sum += est.value;
        comm.merge(&est.comm);
        first.get_or_insert(est);
    }
    if !cfg.noiseless {
        acct.assert_total(cfg.epsilon)?;
    }
    let first = first.expect("n_rep >= 1");
    let repeated = reps > 1;
    Ok(Estimate {
        value: sum / f64::from(reps),
        epsilon: cfg.epsilon,
        comm,
        key: cfg.key,
        n_rep: reps,
        transcript: if repeated { None } else { first.transcript },
        marks: if repeated { None } else { first.marks },
        max_node_spend: acct.max_total(),
        ..first
    })
}

fn resolve_marks(g: &Graph, k: usize, cfg: &RunConfig) -> Result<Vec<u8>> {
    match &cfg.fixed_marks {
        Some(marks) => {
            if marks.len() != g.node_count() {
                return Err(Error::arg(
                    "fixed-marks",
                    format!("expected {} marks, got {}", g.node_count(), marks.len()),
                ));
            }
            if let Some(bad) = marks.iter().find(|&&m| m as usize > k) {
                return Err(Error::arg("fixed-marks", format!("mark {bad} is outside 0..={k}")));
            }
            Ok(marks.clone())
        }
        None => Ok(draw_marks(g.node_count(), k, cfg.key)),
    }
}

/// Marking round: every node sends its mark to its neighbors and the
/// analyzer. Returns what each node learned about its neighbors' marks.
fn marking_round(g: &Graph, net: &mut Network, marks: &[u8]) -> Result<Vec<Vec<(usize, u8)>>> {
    for (i, &r) in marks.iter().enumerate() {
        for &j in g.adj(i) {
            net.send(Party::Node(i), Party::Node(j), MARK_TAG, Payload::Mark(r))?;
        }
        net.send(Party::Node(i), Party::Analyzer, MARK_TAG, Payload::Mark(r))?;
    }
    net.end_round();
    Ok((0..g.node_count())
        .map(|i| {
            net.tagged(i, MARK_TAG)
                .filter_map(|m| match (m.from, m.payload.as_mark()) {
                    (Party::Node(j), Some(r)) => Some((j, r)),
                    _ => None,
                })
                .collect()
        })
        .collect())
}

fn analyzer_marks(net: &Network, n: usize) -> Vec<u8> {
    let mut marks = vec![0; n];
    for m in net.analyzer_tagged(MARK_TAG) {
        if let (Party::Node(i), Some(r)) = (m.from, m.payload.as_mark()) {
            marks[i] = r;
        }
    }
    marks
}

/// Sum of node-sent scalars tagged `tag` and the analyzer's max for it.
fn read_inputs(net: &Network, node: usize, tag: u32) -> (f64, f64) {
    let mut sum = 0.0;
    let mut max = 0.0;
    for m in net.tagged(node, tag) {
        match (m.from, m.payload.as_scalar()) {
            (Party::Node(_), Some(x)) => sum += x,
            (Party::Analyzer, Some(x)) => max = x,
            _ => {}
        }
    }
    (sum, max)
}

fn count_marked(neighbors: &[(usize, u8)], mark: usize) -> f64 {
    neighbors.iter().filter(|&&(_, r)| r as usize == mark).count() as f64
}

/// Analyzer sends the max of the values tagged `tag` to every node marked
/// `recipients`, and returns it.
fn send_round_max(net: &mut Network, marks: &[u8], tag: u32, recipients: usize) -> Result<f64> {
    let values: Vec<f64> = net.analyzer_tagged(tag).filter_map(|m| m.payload.as_scalar()).collect();
    let max = round_max(&values);
    for (i, &r) in marks.iter().enumerate() {
        if r as usize == recipients {
            net.send(Party::Analyzer, Party::Node(i), tag, Payload::Scalar(max))?;
        }
    }
    Ok(max)
}

pub(crate) fn path(
    g: &Graph,
    k: usize,
    cfg: &RunConfig,
    acct: &mut PrivacyAccountant,
) -> Result<Estimate> {
    let n = g.node_count();
    let eps = cfg.epsilon;
    let marks = resolve_marks(g, k, cfg)?;
    let mut net = Network::new(n);
    let mut transcript = cfg.record_transcript.then(Transcript::default);
    let neighbor_marks = marking_round(g, &mut net, &marks)?;
    let seen = analyzer_marks(&net, n);

    for l in 1..k {
        let tag = l as u32;
        if l >= 2 {
            let max = send_round_max(&mut net, &seen, tag - 1, l)?;
            if let Some(t) = transcript.as_mut() {
                t.record_max(tag - 1, max);
            }
            net.deliver();
        }
        for i in (0..n).filter(|&i| marks[i] as usize == l) {
            let mut rng = cfg.key.stream(Party::Node(i), tag);
            let (sum, max) = if l == 1 {
                (count_marked(&neighbor_marks[i], 0), 1.0)
            } else {
                read_inputs(&net, i, tag - 1)
            };
            let mut x = sum + cfg.noise(max / eps, &mut rng);
            if l + 1 == k {
                x *= count_marked(&neighbor_marks[i], k) + cfg.noise(1.0 / eps, &mut rng);
            } else {
                for &(j, r) in &neighbor_marks[i] {
                    if r as usize == l + 1 {
                        net.send(Party::Node(i), Party::Node(j), tag, Payload::Scalar(x))?;
                    }
                }
            }
            net.send(Party::Node(i), Party::Analyzer, tag, Payload::Scalar(x))?;
            if let Some(t) = transcript.as_mut() {
                t.record(tag, i, x)?;
            }
        }
        net.end_round();
    }

    for i in 0..n {
        acct.charge(i, 0, eps, Composition::Parallel { group: cfg.key.rep })?;
    }
    let total: f64 = net
        .analyzer_tagged(k as u32 - 1)
        .filter_map(|m| m.payload.as_scalar())
        .sum();
    let mut value = rescale_factor(k) * total;
    if cfg.distinct {
        value /= 2.0;
    }
    if let Some(t) = transcript.as_mut() {
        t.set_marks(&marks);
    }
    let mut est = estimate(value, cfg, net.into_ledger(), k);
    est.transcript = transcript;
    est.marks = Some(marks);
    Ok(est)
}

pub(crate) fn pattern(
    g: &Graph,
    tree: &TreeForm,
    cfg: &RunConfig,
    acct: &mut PrivacyAccountant,
) -> Result<Estimate> {
    let n = g.node_count();
    let k = tree.k();
    let eps = cfg.epsilon;
    let marks = resolve_marks(g, k, cfg)?;
    let mut net = Network::new(n);
    let mut transcript = cfg.record_transcript.then(Transcript::default);
    let neighbor_marks = marking_round(g, &mut net, &marks)?;
    let seen = analyzer_marks(&net, n);

    for l in tree.internal().collect::<Vec<_>>() {
        let tag = l as u32;
        let internal_children: Vec<usize> =
            tree.children(l).iter().copied().filter(|&c| !tree.is_leaf(c)).collect();
        for &c in &internal_children {
            send_round_max(&mut net, &seen, c as u32, l)?;
        }
        net.deliver();

        for i in (0..n).filter(|&i| marks[i] as usize == l) {
            let mut rng = cfg.key.stream(Party::Node(i), tag);
            let mut x = 1.0;
            for &c in tree.children(l) {
                let (sum, max) = if tree.is_leaf(c) {
                    (count_marked(&neighbor_marks[i], c), 1.0)
                } else {
                    read_inputs(&net, i, c as u32)
                };
                x *= sum + cfg.noise(max / eps, &mut rng);
            }
            if let Some(p) = tree.parent(l) {
                for &(j, r) in &neighbor_marks[i] {
                    if r as usize == p {
                        net.send(Party::Node(i), Party::Node(j), tag, Payload::Scalar(x))?;
                    }
                }
            }
            net.send(Party::Node(i), Party::Analyzer, tag, Payload::Scalar(x))?;
            if let Some(t) = transcript.as_mut() {
                t.record(tag, i, x)?;
            }
        }
        net.end_round();
        if let Some(t) = transcript.as_mut() {
            if l != k {
                let values: Vec<f64> =
                    net.analyzer_tagged(tag).filter_map(|m| m.payload.as_scalar()).collect();
                t.record_max(tag, round_max(&values));
            }
        }
    }

    for i in 0..n {
        acct.charge(i, 0, eps, Composition::Parallel { group: cfg.key.rep })?;
    }
    let total: f64 = net
        .analyzer_tagged(k as u32)
        .filter_map(|m| m.payload.as_scalar())
        .sum();
    let mut value = rescale_factor(k) * total;
    if cfg.distinct {
        value /= tree.sigma() as f64;
    }
    if let Some(t) = transcript.as_mut() {
        t.set_marks(&marks);
    }
    let mut est = estimate(value, cfg, net.into_ledger(), tree.round_count());
    est.transcript = transcript;
    est.marks = Some(marks);
    Ok(est)
}

pub(crate) fn star(
    g: &Graph,
    k: usize,
    cfg: &RunConfig,
    acct: &mut PrivacyAccountant,
) -> Result<Estimate> {
    let n = g.node_count();
    let eps = cfg.epsilon;
    let mut net = Network::new(n);
    let mut transcript = cfg.record_transcript.then(Transcript::default);
    for i in 0..n {
        let mut rng = cfg.key.stream(Party::Node(i), 1);
        let degree = g.adj(i).len() as f64 + cfg.noise(2.0 / eps, &mut rng);
        let falling: f64 = (0..k).map(|s| degree - s as f64).product();
        net.send(Party::Node(i), Party::Analyzer, 1, Payload::Scalar(falling))?;
        acct.charge(i, 1, eps, Composition::Basic)?;
        if let Some(t) = transcript.as_mut() {
            t.record(1, i, falling)?;
        }
    }
    net.end_round();
    let mut value: f64 = net.analyzer_tagged(1).filter_map(|m| m.payload.as_scalar()).sum();
    if cfg.distinct {
        // σ of a k-star: k! leaf permutations, or 2 for a single edge
        value /= if k == 1 { 2.0 } else { (1..=k).map(|s| s as f64).product::<f64>() };
    }
    let mut est = estimate(value, cfg, net.into_ledger(), 1);
    est.transcript = transcript;
    Ok(est)
}

/// Path bound of Theorem 4.3 (`wide = false`) or tree bound of Theorem 5.2
/// (`wide = true`, `γ` uses `12kN/β`):
/// `(k+1)√(2N/β)(d+k+1)^k + k(k+1)γ√N(d̂+γ√d̂+γ)^{k-1}`.
pub fn marked_error_bound(
    n: usize,
    max_degree: usize,
    k: usize,
    epsilon: f64,
    beta: f64,
    wide: bool,
) -> f64 {
    let (k_f, n_f, d) = (k as f64, n as f64, max_degree as f64);
    let log_arg = if wide { 12.0 * k_f * n_f / beta } else { 12.0 * n_f / beta };
    let gamma = (k_f + 1.0) * (8.0 * log_arg.ln()).sqrt() / epsilon;
    let d_hat = d.max((gamma * gamma).ceil());
    let sampling = (k_f + 1.0) * (2.0 * n_f / beta).sqrt() * (d + k_f + 1.0).powi(k as i32);
    let noise = k_f * (k_f + 1.0) * gamma * n_f.sqrt()
        * (d_hat + gamma * d_hat.sqrt() + gamma).powi(k as i32 - 1);
    sampling + noise
}

/// Mean relative errors of one configuration, split by source.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorDecomposition {
    /// `|noiseless - exact| / exact`: error from marking alone.
    pub sampling: f64,
    /// `|dp - noiseless| / exact`: error from the Laplace noise.
    pub dp: f64,
    /// `|dp - exact| / exact`.
    pub total: f64,
    pub exact: u128,
    pub trials: usize,
    /// Whether the trimmed mean (10 trials, drop 2 high and 2 low) was used.
    pub trimmed: bool,
}

/// Mean of `values`, trimmed when there are exactly 10 of them.
pub fn trimmed_mean(values: &[f64]) -> (f64, bool) {
    if values.len() == 10 {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        (sorted[2..8].iter().sum::<f64>() / 6.0, true)
    } else {
        (values.iter().sum::<f64>() / values.len().max(1) as f64, false)
    }
}

/// Runs `trials` DP runs, each paired with a noiseless replica that shares
/// its marks, and reports the sampling, DP and total relative errors.
/// Trial `t` uses `cfg.key` with trial index `cfg.key.trial + t`.
pub fn error_decompose(
    g: &Graph,
    mech: &Mechanism,
    cfg: &RunConfig,
    trials: usize,
) -> Result<ErrorDecomposition> {
    if trials == 0 {
        return Err(Error::arg("trials", "must be at least 1"));
    }
    let exact = mech.exact_count(g, cfg.distinct)?;
    if exact == 0 {
        return Err(Error::Validation(format!(
            "{} has exact count 0; relative error is undefined",
            mech.query()
        )));
    }
    let exact_f = exact as f64;
    let runs: Vec<(f64, f64)> = (0..trials as u64)
        .map(|t| {
            let key = cfg.key.with_trial(cfg.key.trial + t);
            let dp = mech.run(g, &RunConfig { key, ..cfg.clone() })?;
            let replica = mech.run(g, &RunConfig { key, noiseless: true, ..cfg.clone() })?;
            Ok((dp.value, replica.value))
        })
        .collect::<Result<_>>()?;
    let sampling: Vec<f64> = runs.iter().map(|&(_, s)| (s - exact_f).abs() / exact_f).collect();
    let dp: Vec<f64> = runs.iter().map(|&(d, s)| (d - s).abs() / exact_f).collect();
    let total: Vec<f64> = runs.iter().map(|&(d, _)| (d - exact_f).abs() / exact_f).collect();
    let (sampling, trimmed) = trimmed_mean(&sampling);
    Ok(ErrorDecomposition {
        sampling,
        dp: trimmed_mean(&dp).0,
        total: trimmed_mean(&total).0,
        exact,
        trials,
        trimmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_erdos_renyi;
    use crate::netsim::Channel;
    use crate::oracle::marked_pattern_count;
    use crate::pattern::{formulate_tree, Pattern};

    #[test]
    fn marks_are_keyed_and_in_range() {
        let key = TrialKey::new(3, 4);
        let a = draw_marks(1000, 4, key);
        assert_eq!(a, draw_marks(1000, 4, key));
        assert_ne!(a, draw_marks(1000, 4, key.with_rep(1)));
        assert!(a.iter().all(|&m| m <= 4));
        for m in 0..=4u8 {
            assert!(a.contains(&m));
        }
    }

    #[test]
    fn noiseless_path_equals_marked_count() {
        let g = gen_erdos_renyi(40, 0.2, 6).unwrap();
        for k in 2..=4 {
            let tree = formulate_tree(&Pattern::path(k).unwrap(), Some(k)).unwrap();
            for seed in 0..5 {
                let marks = draw_marks(40, k, TrialKey::new(seed, 0));
                let expected =
                    rescale_factor(k) * marked_pattern_count(&g, &tree, &marks).unwrap() as f64;
                let cfg = RunConfig::noiseless().with_marks(marks.clone());
                assert_eq!(run_path(&g, k, &cfg).unwrap().value, expected);
                assert_eq!(run_pattern(&g, &tree, &cfg).unwrap().value, expected);
            }
        }
    }

    #[test]
    fn path_k2_two_rounds() {
        let g = gen_erdos_renyi(20, 0.3, 1).unwrap();
        let est = run_path(&g, 2, &RunConfig::new(1.0)).unwrap();
        assert_eq!(est.rounds, 2);
        assert!(est.value.is_finite());
    }

    #[test]
    fn star_noiseless() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(run_star(&g, 3, &RunConfig::noiseless()).unwrap().value, 6.0);
        let est = run_star(&g, 3, &RunConfig::noiseless().distinct(true)).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.rounds, 1);
        assert_eq!(est.comm.total_bytes(), 4 * 8);
    }

    #[test]
    fn fixed_marks_validated() {
        let g = gen_erdos_renyi(10, 0.3, 1).unwrap();
        assert!(run_path(&g, 3, &RunConfig::noiseless().with_marks(vec![0; 9])).is_err());
        assert!(run_path(&g, 3, &RunConfig::noiseless().with_marks(vec![4; 10])).is_err());
        assert!(run_star(&g, 3, &RunConfig::noiseless().with_marks(vec![0; 10])).is_err());
    }

    #[test]
    fn single_rep_matches_plain_run() {
        let g = gen_erdos_renyi(30, 0.2, 2).unwrap();
        let cfg = RunConfig::new(1.0).with_trial(1, 2);
        let mut acct = PrivacyAccountant::new(30);
        let plain = Mechanism::Path(3).run_with_accountant(&g, &cfg, &mut acct).unwrap();
        let reps = run_path(&g, 3, &cfg).unwrap();
        assert_eq!(plain.value, reps.value);
        assert_eq!(plain.comm, reps.comm);
    }

    #[test]
    fn reps_accumulate_comm_and_budget() {
        let g = gen_erdos_renyi(30, 0.2, 2).unwrap();
        let one = run_path(&g, 3, &RunConfig::new(1.0)).unwrap();
        let four = run_path(&g, 3, &RunConfig::new(1.0).with_n_rep(4)).unwrap();
        assert!(four.comm.bytes(Channel::NodeToAnalyzer) > 3 * one.comm.bytes(Channel::NodeToAnalyzer));
        assert!((four.max_node_spend - 1.0).abs() < 1e-9);
        assert_eq!(four.n_rep, 4);
    }

    #[test]
    fn decomposition_edge_cases() {
        let g = gen_erdos_renyi(40, 0.2, 3).unwrap();
        let d = error_decompose(&g, &Mechanism::Path(3), &RunConfig::noiseless(), 4).unwrap();
        assert_eq!(d.dp, 0.0);
        let d = error_decompose(&g, &Mechanism::WalkOpt(3), &RunConfig::new(1.0), 10).unwrap();
        assert_eq!(d.sampling, 0.0);
        assert!(d.trimmed);
    }

    #[test]
    fn trimming_rule() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(trimmed_mean(&values), (5.5, true));
        assert_eq!(trimmed_mean(&[1.0, 2.0, 6.0]), (3.0, false));
    }
}
