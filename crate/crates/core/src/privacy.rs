//! Noise primitives, keyed randomness and per-node privacy accounting.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::netsim::Party;

/// Round index reserved for the marking draw.
pub const MARK_ROUND: u32 = u32::MAX;

/// Identifies one execution of a mechanism: master seed, trial and the
/// repetition index used by `n_rep` averaging.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TrialKey {
    pub seed: u64,
    pub trial: u64,
    pub rep: u32,
}

impl TrialKey {
    pub fn new(seed: u64, trial: u64) -> Self {
        TrialKey { seed, trial, rep: 0 }
    }

    pub fn with_rep(self, rep: u32) -> Self {
        TrialKey { rep, ..self }
    }

    pub fn with_trial(self, trial: u64) -> Self {
        TrialKey { trial, ..self }
    }

    /// Stream owned by `party` in `round`.
    pub fn stream(&self, party: Party, round: u32) -> RngStream {
        RngStream::new(*self, party, round)
    }
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a sequence of words into one 64-bit value.
pub fn mix_words(words: &[u64]) -> u64 {
    let mut state = 0x6A09_E667_F3BC_C908u64;
    let mut acc = 0;
    for &w in words {
        state ^= w;
        acc = splitmix64(&mut state);
        state ^= acc.rotate_left(17);
    }
    acc
}

/// Deterministic random stream derived from `(seed, trial, rep, party, round)`.
///
/// Identical keys give identical streams; there is no shared RNG state, so
/// trials can run on any thread in any order.
#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(key: TrialKey, party: Party, round: u32) -> Self {
        let party_word = match party {
            Party::Node(i) => i as u64,
            Party::Analyzer => u64::MAX,
        };
        let mut state = mix_words(&[key.seed, key.trial, key.rep as u64, party_word, round as u64]);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        RngStream(ChaCha8Rng::from_seed(seed))
    }

    /// Stream seeded directly from a number (tests and tooling).
    pub fn from_seed(seed: u64) -> Self {
        RngStream(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Zero-mean Laplace sample with the given scale, by inverse CDF.
/// A scale of exactly 0 yields exactly 0.
pub fn laplace<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    if !scale.is_finite() || scale < 0.0 {
        return Err(Error::arg("scale", format!("{scale} is not a finite non-negative scale")));
    }
    Ok(sample_laplace(scale, rng))
}

pub(crate) fn sample_laplace<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    debug_assert!(scale >= 0.0);
    if scale == 0.0 {
        return 0.0;
    }
    let u = loop {
        let u = rng.gen::<f64>() - 0.5;
        if u > -0.5 {
            break u;
        }
    };
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Probability that randomized response keeps a bit: `e^ε / (e^ε + 1)`.
pub fn rr_keep_probability(epsilon: f64) -> f64 {
    // 1 / (1 + e^-ε) stays finite for large ε
    1.0 / (1.0 + (-epsilon).exp())
}

/// Flips each bit independently with probability `1 / (e^ε + 1)`.
pub fn rr_perturb<R: Rng + ?Sized>(bits: &[bool], epsilon: f64, rng: &mut R) -> Result<Vec<bool>> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::arg("epsilon", format!("{epsilon} must be positive")));
    }
    let keep = rr_keep_probability(epsilon);
    Ok(bits.iter().map(|&b| if rng.gen_bool(keep) { b } else { !b }).collect())
}

/// Unbiased estimate of the true bit from a randomized-response report:
/// `(bit - q) / (p - q)`.
pub fn rr_unbias(bit: bool, epsilon: f64) -> f64 {
    let p = rr_keep_probability(epsilon);
    let q = 1.0 - p;
    (f64::from(u8::from(bit)) - q) / (p - q)
}

/// How a charge composes with the node's other charges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composition {
    /// Adds to everything else.
    Basic,
    /// Charges in the same group touch disjoint edges; only the largest counts.
    Parallel { group: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Charge {
    pub round: u32,
    pub epsilon: f64,
    pub composition: Composition,
}

/// Per-node ledger of privacy spending.
///
/// A node's effective spend is the sum of its basic charges plus, for each
/// parallel group, the largest charge in that group. Charges are expressed as
/// the loss an incident edge suffers through this node's release.
#[derive(Clone, Debug, Default)]
pub struct PrivacyAccountant {
    charges: Vec<Vec<Charge>>,
}

const BUDGET_SLACK: f64 = 1e-9;

impl PrivacyAccountant {
    pub fn new(nodes: usize) -> Self {
        PrivacyAccountant {
            charges: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.charges.len()
    }

    pub fn charge(
        &mut self,
        node: usize,
        round: u32,
        epsilon: f64,
        composition: Composition,
    ) -> Result<()> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::arg("epsilon", format!("charge {epsilon} is negative")));
        }
        let ledger = self
            .charges
            .get_mut(node)
            .ok_or_else(|| Error::arg("node", format!("{node} has no ledger")))?;
        ledger.push(Charge {
            round,
            epsilon,
            composition,
        });
        Ok(())
    }

    pub fn charges(&self, node: usize) -> &[Charge] {
        &self.charges[node]
    }

    /// Effective spend of `node` and the round of its latest charge.
    fn running_total(charges: &[Charge], budget: Option<f64>) -> (f64, Option<u32>) {
        let mut basic = 0.0;
        let mut groups: Vec<(u32, f64)> = Vec::new();
        let mut crossed = None;
        for charge in charges {
            match charge.composition {
                Composition::Basic => basic += charge.epsilon,
                Composition::Parallel { group } => {
                    match groups.iter_mut().find(|(g, _)| *g == group) {
                        Some((_, max)) => *max = max.max(charge.epsilon),
                        None => groups.push((group, charge.epsilon)),
                    }
                }
            }
            let total = basic + groups.iter().map(|(_, m)| m).sum::<f64>();
            if let Some(budget) = budget {
                if crossed.is_none() && total > budget * (1.0 + BUDGET_SLACK) {
                    crossed = Some(charge.round);
                }
            }
        }
        (basic + groups.iter().map(|(_, m)| m).sum::<f64>(), crossed)
    }

    pub fn effective_total(&self, node: usize) -> f64 {
        Self::running_total(&self.charges[node], None).0
    }

    /// Largest effective spend over all nodes.
    pub fn max_total(&self) -> f64 {
        (0..self.charges.len())
            .map(|i| self.effective_total(i))
            .fold(0.0, f64::max)
    }

    /// Fails on the first node whose effective spend exceeds `budget`.
    pub fn assert_total(&self, budget: f64) -> Result<()> {
        for (node, charges) in self.charges.iter().enumerate() {
            let (spent, crossed) = Self::running_total(charges, Some(budget));
            if let Some(round) = crossed {
                return Err(Error::PrivacyViolation {
                    node,
                    round,
                    spent,
                    budget,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_zero_scale_is_exact() {
        let mut rng = RngStream::from_seed(1);
        for _ in 0..100 {
            assert_eq!(laplace(0.0, &mut rng).unwrap(), 0.0);
        }
        assert!(laplace(-1.0, &mut rng).is_err());
        assert!(laplace(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn laplace_moments() {
        let mut rng = RngStream::from_seed(2);
        let b = 3.0;
        let n = 1_000_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let x = laplace(b, &mut rng).unwrap();
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sq / n as f64 - mean * mean;
        assert!(mean.abs() < 5.0 * b / 1e3, "mean {mean}");
        assert!((var / (2.0 * b * b) - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn rr_probabilities() {
        assert!((rr_keep_probability(3f64.ln()) - 0.75).abs() < 1e-12);
        assert!((rr_unbias(true, 3f64.ln()) - 1.5).abs() < 1e-12);
        assert!((rr_unbias(false, 3f64.ln()) + 0.5).abs() < 1e-12);
        assert!(rr_perturb(&[true], 0.0, &mut RngStream::from_seed(0)).is_err());
    }

    #[test]
    fn rr_large_budget_keeps_everything() {
        let mut rng = RngStream::from_seed(3);
        let bits: Vec<bool> = (0..10_000).map(|i| i % 3 == 0).collect();
        assert_eq!(rr_perturb(&bits, 50.0, &mut rng).unwrap(), bits);
    }

    #[test]
    fn rr_flip_rate() {
        let mut rng = RngStream::from_seed(4);
        let n = 1_000_000;
        let bits = vec![false; n];
        let flips = rr_perturb(&bits, 1.0, &mut rng).unwrap().iter().filter(|&&b| b).count();
        let q = 1.0 / (1f64.exp() + 1.0);
        let sd = (n as f64 * q * (1.0 - q)).sqrt();
        assert!((flips as f64 - n as f64 * q).abs() < 3.0 * sd);
    }

    #[test]
    fn rr_unbias_is_unbiased() {
        let eps = 1.0;
        let n = 1_000_000;
        for truth in [false, true] {
            let mut rng = RngStream::from_seed(5 + u64::from(truth));
            let reports = rr_perturb(&vec![truth; n], eps, &mut rng).unwrap();
            let values: Vec<f64> = reports.iter().map(|&b| rr_unbias(b, eps)).collect();
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - f64::from(u8::from(truth))).abs() < 3.0 * se);
        }
    }

    #[test]
    fn streams_are_keyed() {
        let key = TrialKey::new(9, 4);
        let draw = |k: TrialKey, p: Party, r: u32| k.stream(p, r).next_u64();
        assert_eq!(draw(key, Party::Node(3), 2), draw(key, Party::Node(3), 2));
        assert_ne!(draw(key, Party::Node(3), 2), draw(key, Party::Node(4), 2));
        assert_ne!(draw(key, Party::Node(3), 2), draw(key, Party::Node(3), 3));
        assert_ne!(draw(key, Party::Node(3), 2), draw(key, Party::Analyzer, 2));
        assert_ne!(draw(key, Party::Node(3), 2), draw(key.with_rep(1), Party::Node(3), 2));
        assert_ne!(draw(key, Party::Node(3), 2), draw(key.with_trial(5), Party::Node(3), 2));
    }

    #[test]
    fn accountant_basic_composition() {
        let eps = 1.0;
        let k = 4;
        let mut acct = PrivacyAccountant::new(2);
        for round in 1..=k {
            acct.charge(0, round, eps / k as f64, Composition::Basic).unwrap();
        }
        acct.assert_total(eps).unwrap();

        acct.charge(1, 1, eps, Composition::Basic).unwrap();
        acct.charge(1, 2, eps, Composition::Basic).unwrap();
        match acct.assert_total(eps) {
            Err(Error::PrivacyViolation { node, round, .. }) => assert_eq!((node, round), (1, 2)),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn accountant_parallel_composition() {
        let mut acct = PrivacyAccountant::new(1);
        acct.charge(0, 1, 1.0, Composition::Parallel { group: 0 }).unwrap();
        acct.charge(0, 2, 1.0, Composition::Parallel { group: 0 }).unwrap();
        acct.assert_total(1.0).unwrap();
        assert_eq!(acct.effective_total(0), 1.0);
        // a second group composes with the first
        acct.charge(0, 1, 0.5, Composition::Parallel { group: 1 }).unwrap();
        assert!(acct.assert_total(1.0).is_err());
        assert!(acct.charge(0, 1, -0.1, Composition::Basic).is_err());
    }
}
