//! Multi-round `k`-walk counting.
//!
//! Both variants propagate `X^ℓ_i = Σ_{j∈N(i)} X^{ℓ-1}_j + Lap(2k·‖X^{ℓ-1}‖∞/ε)`
//! from `X^0 = 1`. The basic variant publishes every value to everyone for
//! `k` rounds. The optimized variant sends values only to neighbors and the
//! analyzer, lets the analyzer broadcast the round maximum, and replaces the
//! last round by a noisy-degree product, finishing in `k - 1` rounds.
//!
//! Privacy is charged per node as the loss of an incident edge: each noisy
//! sum releases `ε/(2k)` per node and an edge touches two nodes, so each
//! round costs `ε/k` and the whole run `ε`.

use crate::error::Result;
use crate::graph::Graph;
use crate::mechanism::{estimate, Estimate, Mechanism, RunConfig};
use crate::netsim::{round_max, Network, Party, Payload, Transcript};
use crate::privacy::{Composition, PrivacyAccountant};

/// Algorithm 1. Returns `W_k`, or `U_k` when `cfg.distinct` is set.
pub fn run_walk_basic(g: &Graph, k: usize, cfg: &RunConfig) -> Result<Estimate> {
    Mechanism::WalkBasic(k).run(g, cfg)
}

/// Algorithm 2. Returns `W_k`, or `U_k` when `cfg.distinct` is set.
pub fn run_walk_opt(g: &Graph, k: usize, cfg: &RunConfig) -> Result<Estimate> {
    Mechanism::WalkOpt(k).run(g, cfg)
}

/// Optimized walk counting of unoriented walks `U_k`.
pub fn run_walk_unoriented(g: &Graph, k: usize, cfg: &RunConfig) -> Result<Estimate> {
    Mechanism::WalkOpt(k).run(g, &cfg.clone().distinct(true))
}

/// `(W + Ŝ) / 2` for even `k`, `W / 2` for odd `k`.
fn unorient(k: usize, walks: f64, symmetric: Option<f64>) -> f64 {
    if k % 2 == 1 {
        walks / 2.0
    } else {
        let s = symmetric.expect("even k publishes a round-k/2 aggregate");
        (walks + s) / 2.0
    }
}

pub(crate) fn walk_basic(
    g: &Graph,
    k: usize,
    cfg: &RunConfig,
    acct: &mut PrivacyAccountant,
) -> Result<Estimate> {
    let n = g.node_count();
    let eps = cfg.epsilon;
    let mut net = Network::new(n);
    let mut transcript = cfg.record_transcript.then(Transcript::default);
    let mut prev = vec![1.0; n];
    let mut prev_max = 1.0;
    let mut symmetric = None;

    for l in 1..=k {
        let tag = l as u32;
        for i in 0..n {
            let mut rng = cfg.key.stream(Party::Node(i), tag);
            let sum: f64 = g.adj(i).iter().map(|&j| prev[j]).sum();
            let x = sum + cfg.noise(2.0 * k as f64 * prev_max / eps, &mut rng);
            net.broadcast(i, tag, Payload::Scalar(x))?;
            acct.charge(i, tag, eps / k as f64, Composition::Basic)?;
        }
        net.end_round();

        // every party rebuilds the public vector from the board
        let mut current = vec![0.0; n];
        for m in net.board().iter().filter(|m| m.tag == tag) {
            if let (Party::Node(j), Some(x)) = (m.from, m.payload.as_scalar()) {
                current[j] = x;
            }
        }
        prev_max = round_max(&current);
        if let Some(t) = transcript.as_mut() {
            for (i, &x) in current.iter().enumerate() {
                t.record(tag, i, x)?;
            }
            t.record_max(tag, prev_max);
        }
        if 2 * l == k {
            symmetric = Some(current.iter().sum());
        }
        prev = current;
    }

    let walks: f64 = prev.iter().sum();
    let value = if cfg.distinct { unorient(k, walks, symmetric) } else { walks };
    let mut est = estimate(value, cfg, net.into_ledger(), k);
    est.transcript = transcript;
    Ok(est)
}

pub(crate) fn walk_opt(
    g: &Graph,
    k: usize,
    cfg: &RunConfig,
    acct: &mut PrivacyAccountant,
) -> Result<Estimate> {
    let n = g.node_count();
    let eps = cfg.epsilon;
    let scale = 2.0 * k as f64 / eps;
    let final_tag = k as u32;
    let mut net = Network::new(n);
    let mut transcript = cfg.record_transcript.then(Transcript::default);

    for l in 1..k {
        let tag = l as u32;
        for i in 0..n {
            let mut rng = cfg.key.stream(Party::Node(i), tag);
            let (sum, max) = if l == 1 {
                (g.adj(i).len() as f64, 1.0)
            } else {
                let prev = tag - 1;
                let mut sum = 0.0;
                let mut max = 0.0;
                for m in net.tagged(i, prev) {
                    match (m.from, m.payload.as_scalar()) {
                        (Party::Node(_), Some(x)) => sum += x,
                        (Party::Analyzer, Some(x)) => max = x,
                        _ => {}
                    }
                }
                (sum, max)
            };
            let x = sum + cfg.noise(scale * max, &mut rng);
            acct.charge(i, tag, eps / k as f64, Composition::Basic)?;

            if l + 1 < k {
                for &j in g.adj(i) {
                    net.send(Party::Node(i), Party::Node(j), tag, Payload::Scalar(x))?;
                }
                net.send(Party::Node(i), Party::Analyzer, tag, Payload::Scalar(x))?;
                if let Some(t) = transcript.as_mut() {
                    t.record(tag, i, x)?;
                }
            } else {
                // last edge: noisy degree of the second-to-last node
                let degree = g.adj(i).len() as f64 + cfg.noise(scale, &mut rng);
                acct.charge(i, tag, eps / k as f64, Composition::Basic)?;
                let product = x * degree;
                net.send(Party::Node(i), Party::Analyzer, final_tag, Payload::Scalar(product))?;
                if k == 2 && cfg.distinct {
                    // Ŝ_2 needs the pre-multiplication round-1 values
                    net.send(Party::Node(i), Party::Analyzer, tag, Payload::Scalar(x))?;
                    if let Some(t) = transcript.as_mut() {
                        t.record(tag, i, x)?;
                    }
                }
                if let Some(t) = transcript.as_mut() {
                    t.record(final_tag, i, product)?;
                }
            }
        }
        net.deliver();

        if l + 1 < k {
            let values: Vec<f64> = net
                .analyzer_tagged(tag)
                .filter_map(|m| m.payload.as_scalar())
                .collect();
            let max = round_max(&values);
            for i in 0..n {
                net.send(Party::Analyzer, Party::Node(i), tag, Payload::Scalar(max))?;
            }
            if let Some(t) = transcript.as_mut() {
                t.record_max(tag, max);
            }
            net.deliver();
        }
        net.advance_round();
    }

    let sum_tag = |tag: u32| -> f64 {
        net.analyzer_tagged(tag).filter_map(|m| m.payload.as_scalar()).sum()
    };
    let walks = sum_tag(final_tag);
    let value = if cfg.distinct {
        let symmetric = k.is_multiple_of(2).then(|| sum_tag(final_tag / 2));
        unorient(k, walks, symmetric)
    } else {
        walks
    };
    let mut est = estimate(value, cfg, net.into_ledger(), k - 1);
    est.transcript = transcript;
    Ok(est)
}

/// Theorem 4.4 bound `kγ√N(d+γ)^{k-1}` with `γ = 2k√(8 ln(2kN/β))/ε`,
/// holding with probability at least `1 - β`.
pub fn walk_error_bound(n: usize, max_degree: usize, k: usize, epsilon: f64, beta: f64) -> f64 {
    let k_f = k as f64;
    let n_f = n as f64;
    let gamma = 2.0 * k_f * (8.0 * (2.0 * k_f * n_f / beta).ln()).sqrt() / epsilon;
    k_f * gamma * n_f.sqrt() * (max_degree as f64 + gamma).powi(k as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_erdos_renyi;
    use crate::netsim::Channel;
    use crate::oracle::{walk_count_oriented, walk_count_unoriented};

    fn k3() -> Graph {
        gen_erdos_renyi(3, 1.0, 0).unwrap()
    }

    #[test]
    fn noiseless_triangle() {
        let cfg = RunConfig::noiseless();
        assert_eq!(run_walk_basic(&k3(), 2, &cfg).unwrap().value, 12.0);
        assert_eq!(run_walk_opt(&k3(), 2, &cfg).unwrap().value, 12.0);
        assert_eq!(run_walk_unoriented(&k3(), 2, &cfg).unwrap().value, 9.0);
        assert_eq!(run_walk_basic(&k3(), 2, &cfg.clone().distinct(true)).unwrap().value, 9.0);
    }

    #[test]
    fn noiseless_matches_oracle() {
        let g = gen_erdos_renyi(40, 0.15, 3).unwrap();
        let cfg = RunConfig::noiseless();
        for k in 2..=5 {
            let w = walk_count_oriented(&g, k).unwrap() as f64;
            let u = walk_count_unoriented(&g, k).unwrap() as f64;
            assert_eq!(run_walk_basic(&g, k, &cfg).unwrap().value, w);
            assert_eq!(run_walk_opt(&g, k, &cfg).unwrap().value, w);
            assert_eq!(run_walk_unoriented(&g, k, &cfg).unwrap().value, u);
        }
        assert_eq!(run_walk_basic(&g, 1, &cfg).unwrap().value, 2.0 * g.edge_count() as f64);
    }

    #[test]
    fn optimized_traffic() {
        let g = gen_erdos_renyi(50, 0.1, 1).unwrap();
        let m = g.edge_count() as u64;
        let est = run_walk_opt(&g, 4, &RunConfig::new(1.0)).unwrap();
        assert_eq!(est.comm.bytes(Channel::NodeToNode), 2 * m * 2 * 8);
        assert_eq!(est.rounds, 3);
        let est = run_walk_opt(&g, 2, &RunConfig::new(1.0)).unwrap();
        assert_eq!(est.comm.bytes(Channel::NodeToNode), 0);
    }

    #[test]
    fn accounting_reaches_budget() {
        let g = gen_erdos_renyi(30, 0.2, 2).unwrap();
        for mech in [Mechanism::WalkBasic(3), Mechanism::WalkOpt(3)] {
            let est = mech.run(&g, &RunConfig::new(2.0)).unwrap();
            assert!((est.max_node_spend - 2.0).abs() < 1e-9, "{mech:?}");
        }
    }

    #[test]
    fn transcript_maxima_match_values() {
        let g = gen_erdos_renyi(30, 0.2, 2).unwrap();
        let est = run_walk_opt(&g, 4, &RunConfig::new(1.0).with_transcript()).unwrap();
        let t = est.transcript.unwrap();
        for (round, max) in t.maxima() {
            let values: Vec<f64> = t.values(*round).unwrap().values().copied().collect();
            assert_eq!(*max, round_max(&values));
        }
    }

    #[test]
    fn reproducible() {
        let g = gen_erdos_renyi(30, 0.2, 2).unwrap();
        let cfg = RunConfig::new(1.0).with_trial(5, 9);
        let a = run_walk_basic(&g, 3, &cfg).unwrap();
        let b = run_walk_basic(&g, 3, &cfg).unwrap();
        assert_eq!(a, b);
        let c = run_walk_basic(&g, 3, &cfg.clone().with_trial(5, 10)).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn bound_grows_with_noise() {
        let loose = walk_error_bound(500, 20, 4, 0.5, 0.1);
        let tight = walk_error_bound(500, 20, 4, 2.0, 0.1);
        assert!(loose > tight && tight > 0.0);
    }
}
