//! Shared run configuration, the mechanism selector and the estimate record.

use rand::Rng;

use crate::baseline_rr::{self, RrTarget};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mech_marked;
use crate::mech_walk;
use crate::netsim::{CommLedger, Transcript};
use crate::oracle;
use crate::pattern::{formulate_tree, parse_pattern, PatternSpec, TreeForm};
use crate::privacy::{sample_laplace, PrivacyAccountant, TrialKey};

/// Options common to every mechanism.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Total privacy budget.
    pub epsilon: f64,
    /// Independent runs averaged at `epsilon / n_rep` each.
    pub n_rep: u32,
    /// Replace every noise draw with 0 (randomized response keeps every bit).
    pub noiseless: bool,
    /// Count distinct instances instead of oriented ones: unoriented walks,
    /// paths halved, patterns divided by σ, stars divided by `k!`.
    pub distinct: bool,
    /// Marks to use instead of drawing them (marked mechanisms only).
    pub fixed_marks: Option<Vec<u8>>,
    pub key: TrialKey,
    pub record_transcript: bool,
}

impl RunConfig {
    pub fn new(epsilon: f64) -> Self {
        RunConfig {
            epsilon,
            n_rep: 1,
            noiseless: false,
            distinct: false,
            fixed_marks: None,
            key: TrialKey::default(),
            record_transcript: false,
        }
    }

    /// Noiseless configuration at a nominal budget of 1.
    pub fn noiseless() -> Self {
        RunConfig {
            noiseless: true,
            ..RunConfig::new(1.0)
        }
    }

    pub fn distinct(mut self, distinct: bool) -> Self {
        self.distinct = distinct;
        self
    }

    pub fn with_key(mut self, key: TrialKey) -> Self {
        self.key = key;
        self
    }

    pub fn with_trial(mut self, seed: u64, trial: u64) -> Self {
        self.key = TrialKey::new(seed, trial);
        self
    }

    pub fn with_n_rep(mut self, n_rep: u32) -> Self {
        self.n_rep = n_rep;
        self
    }

    pub fn with_marks(mut self, marks: Vec<u8>) -> Self {
        self.fixed_marks = Some(marks);
        self
    }

    pub fn with_transcript(mut self) -> Self {
        self.record_transcript = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::arg("eps", format!("{} must be positive and finite", self.epsilon)));
        }
        if self.n_rep == 0 {
            return Err(Error::arg("nrep", "must be at least 1"));
        }
        Ok(())
    }

    /// Laplace draw at `scale`, or 0 in noiseless mode.
    pub(crate) fn noise<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> f64 {
        if self.noiseless {
            0.0
        } else {
            sample_laplace(scale, rng)
        }
    }
}

/// Output of one (possibly repeated) mechanism execution.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Oracle count when the caller supplied one.
    pub exact: Option<u128>,
    pub epsilon: f64,
    pub comm: CommLedger,
    /// Protocol rounds of one run, including the marking round.
    pub rounds: usize,
    pub key: TrialKey,
    pub n_rep: u32,
    pub transcript: Option<Transcript>,
    pub marks: Option<Vec<u8>>,
    /// Largest effective per-node spend recorded by the accountant.
    pub max_node_spend: f64,
}

impl Estimate {
    pub fn with_exact(mut self, exact: u128) -> Self {
        self.exact = Some(exact);
        self
    }

    /// `|value - exact| / exact`, if an exact count is known and nonzero.
    pub fn relative_error(&self) -> Option<f64> {
        self.exact
            .filter(|&e| e > 0)
            .map(|e| (self.value - e as f64).abs() / e as f64)
    }
}

/// Everything a run can count.
#[derive(Clone, Debug, PartialEq)]
pub enum Mechanism {
    /// Algorithm 1: `k` rounds, every value published to all parties.
    WalkBasic(usize),
    /// Algorithm 2: `k - 1` rounds, values to neighbors and analyzer only.
    WalkOpt(usize),
    /// Random-marking `k`-path mechanism.
    Path(usize),
    /// Random-marking mechanism for an arbitrary tree formulation.
    Pattern(TreeForm),
    /// One-round noisy-degree star mechanism.
    Star(usize),
    /// One-round randomized-response enumeration baseline.
    Rr(RrTarget),
}

impl Mechanism {
    /// Builds a mechanism from its command-line name and a query spec.
    ///
    /// Names: `walk-basic`, `walk-opt` (alias `walk`), `path`, `pattern`,
    /// `star`, `rr`. `root` applies to `pattern` and to `rr` pattern targets.
    pub fn parse(name: &str, spec: &PatternSpec, root: Option<usize>) -> Result<Self> {
        let mechanism = match (name, spec) {
            ("walk-basic", PatternSpec::Walk(k)) => Mechanism::WalkBasic(*k),
            ("walk" | "walk-opt", PatternSpec::Walk(k)) => Mechanism::WalkOpt(*k),
            ("path", PatternSpec::Path(k)) => Mechanism::Path(*k),
            ("star", PatternSpec::Star(k)) => Mechanism::Star(*k),
            ("pattern", PatternSpec::Walk(_)) => {
                return Err(Error::arg("pattern", "the pattern mechanism needs an acyclic pattern"))
            }
            ("pattern", spec) => Mechanism::Pattern(formulate_tree(&parse_pattern(spec)?, root)?),
            ("rr", PatternSpec::Walk(k)) => Mechanism::Rr(RrTarget::Walk(*k)),
            ("rr", spec) => Mechanism::Rr(RrTarget::Pattern(formulate_tree(&parse_pattern(spec)?, root)?)),
            ("walk-basic" | "walk" | "walk-opt" | "path" | "star", spec) => {
                return Err(Error::arg(
                    "pattern",
                    format!("mechanism `{name}` cannot count `{spec}`"),
                ))
            }
            (other, _) => {
                return Err(Error::arg(
                    "mech",
                    format!("unknown mechanism `{other}` (walk-basic, walk-opt, path, pattern, star, rr)"),
                ))
            }
        };
        mechanism.validate()?;
        Ok(mechanism)
    }

    pub fn validate(&self) -> Result<()> {
        let (k, min) = match self {
            Mechanism::WalkBasic(k) => (*k, 1),
            Mechanism::WalkOpt(k) => (*k, 2),
            Mechanism::Path(k) => (*k, 2),
            Mechanism::Star(k) => (*k, 1),
            Mechanism::Pattern(_) | Mechanism::Rr(_) => return Ok(()),
        };
        if k < min {
            return Err(Error::arg("k", format!("{} needs k >= {min}, got {k}", self.name())));
        }
        if k > oracle::MAX_WALK_LENGTH {
            return Err(Error::arg("k", format!("k = {k} exceeds {}", oracle::MAX_WALK_LENGTH)));
        }
        if matches!(self, Mechanism::Path(_)) && k > crate::pattern::MAX_PATTERN_EDGES {
            return Err(Error::arg(
                "k",
                format!("paths are capped at {} edges", crate::pattern::MAX_PATTERN_EDGES),
            ));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::WalkBasic(_) => "walk-basic",
            Mechanism::WalkOpt(_) => "walk-opt",
            Mechanism::Path(_) => "path",
            Mechanism::Pattern(_) => "pattern",
            Mechanism::Star(_) => "star",
            Mechanism::Rr(_) => "rr",
        }
    }

    /// Query label such as `walk:4`, `path:3` or `0-1,1-2 root=1`.
    pub fn query(&self) -> String {
        match self {
            Mechanism::WalkBasic(k) | Mechanism::WalkOpt(k) => format!("walk:{k}"),
            Mechanism::Path(k) => format!("path:{k}"),
            Mechanism::Star(k) => format!("star:{k}"),
            Mechanism::Pattern(t) => format!("{} root={}", t.pattern(), t.root_vertex()),
            Mechanism::Rr(RrTarget::Walk(k)) => format!("walk:{k}"),
            Mechanism::Rr(RrTarget::Pattern(t)) => t.pattern().to_string(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Mechanism::WalkBasic(k) | Mechanism::WalkOpt(k) | Mechanism::Path(k) | Mechanism::Star(k) => *k,
            Mechanism::Pattern(t) => t.k(),
            Mechanism::Rr(target) => target.k(),
        }
    }

    /// Rounds of one run, marking round included.
    pub fn rounds(&self) -> usize {
        match self {
            Mechanism::WalkBasic(k) => *k,
            Mechanism::WalkOpt(k) => k - 1,
            Mechanism::Path(k) => *k,
            Mechanism::Pattern(t) => t.round_count(),
            Mechanism::Star(_) | Mechanism::Rr(_) => 1,
        }
    }

    pub fn uses_marks(&self) -> bool {
        matches!(self, Mechanism::Path(_) | Mechanism::Pattern(_))
    }

    /// Runs `n_rep` repetitions and checks the privacy budget.
    pub fn run(&self, g: &Graph, cfg: &RunConfig) -> Result<Estimate> {
        mech_marked::run_with_reps(g, self, cfg)
    }

    /// One run at `cfg.epsilon`, charging `acct`. Does not check the total.
    pub fn run_with_accountant(
        &self,
        g: &Graph,
        cfg: &RunConfig,
        acct: &mut PrivacyAccountant,
    ) -> Result<Estimate> {
        self.validate()?;
        cfg.validate()?;
        if cfg.fixed_marks.is_some() && !self.uses_marks() {
            return Err(Error::arg("fixed-marks", format!("{} does not use marks", self.name())));
        }
        if acct.node_count() != g.node_count() {
            return Err(Error::arg("accountant", "ledger size does not match the graph"));
        }
        let mut estimate = match self {
            Mechanism::WalkBasic(k) => mech_walk::walk_basic(g, *k, cfg, acct)?,
            Mechanism::WalkOpt(k) => mech_walk::walk_opt(g, *k, cfg, acct)?,
            Mechanism::Path(k) => mech_marked::path(g, *k, cfg, acct)?,
            Mechanism::Pattern(t) => mech_marked::pattern(g, t, cfg, acct)?,
            Mechanism::Star(k) => mech_marked::star(g, *k, cfg, acct)?,
            Mechanism::Rr(target) => baseline_rr::run_rr(g, target, cfg, acct)?,
        };
        estimate.max_node_spend = acct.max_total();
        Ok(estimate)
    }

    /// Oracle count matching what this mechanism estimates under `distinct`.
    pub fn exact_count(&self, g: &Graph, distinct: bool) -> Result<u128> {
        let walk = |k: usize| {
            if distinct {
                oracle::walk_count_unoriented(g, k)
            } else {
                oracle::walk_count_oriented(g, k)
            }
        };
        let tree = |t: &TreeForm| -> Result<u128> {
            let ordered = oracle::ordered_embedding_count(g, t)?;
            Ok(if distinct { ordered / u128::from(t.sigma()) } else { ordered })
        };
        match self {
            Mechanism::WalkBasic(k) | Mechanism::WalkOpt(k) => walk(*k),
            Mechanism::Path(k) => {
                let p = oracle::path_count_oriented(g, *k)?;
                Ok(if distinct { p / 2 } else { p })
            }
            Mechanism::Pattern(t) => tree(t),
            Mechanism::Star(k) => oracle::star_count(g, *k, distinct),
            Mechanism::Rr(RrTarget::Walk(k)) => walk(*k),
            Mechanism::Rr(RrTarget::Pattern(t)) => tree(t),
        }
    }
}

/// Basic Estimate skeleton used by the mechanism implementations.
pub(crate) fn estimate(value: f64, cfg: &RunConfig, comm: CommLedger, rounds: usize) -> Estimate {
    Estimate {
        value,
        exact: None,
        epsilon: cfg.epsilon,
        comm,
        rounds,
        key: cfg.key,
        n_rep: 1,
        transcript: None,
        marks: None,
        max_node_spend: 0.0,
    }
}
