//! Multi-round edge-local-differential-privacy counting of walks, paths and
//! acyclic patterns in undirected graphs.
//!
//! Every mechanism runs inside a simulated round-synchronous network
//! ([`netsim`]): nodes see only their own adjacency list plus the messages
//! delivered to them, the analyzer sees only what nodes send it, and every
//! message is charged to a [`netsim::CommLedger`]. Privacy spending is tracked
//! per node by a [`privacy::PrivacyAccountant`] and checked at the end of
//! every run.
//!
//! | module | contents |
//! |---|---|
//! | [`graph`] | graph model, SNAP edge-list loader, Erdős–Rényi generator |
//! | [`pattern`] | acyclic patterns, rooted tree formulations, automorphism counts |
//! | [`oracle`] | exact non-private counts used as ground truth |
//! | [`privacy`] | Laplace and randomized response, keyed RNG streams, accountant |
//! | [`netsim`] | message passing, transcripts and communication accounting |
//! | [`mech_walk`] | multi-round walk counting (basic and optimized) |
//! | [`mech_marked`] | random-marking path, tree pattern and star mechanisms |
//! | [`baseline_rr`] | one-round randomized-response enumeration baseline |
//! | [`harness`] | experiment plans, trimmed-mean reports, CSV output |
//! | [`cli`] | the `ldp-motifs` command line |
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory (`cargo run --release --example <name>`).

pub mod baseline_rr;
pub mod cli;
pub mod error;
pub mod graph;
pub mod harness;
pub mod mech_marked;
pub mod mech_walk;
pub mod mechanism;
pub mod netsim;
pub mod oracle;
pub mod pattern;
pub mod privacy;

pub use error::{Error, Result};
pub use graph::Graph;
pub use mechanism::{Estimate, Mechanism, RunConfig};
pub use pattern::{Pattern, PatternSpec, TreeForm};
pub use privacy::TrialKey;
