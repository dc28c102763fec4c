//! Round-synchronous message fabric between nodes and the analyzer, with
//! per-channel communication accounting and an optional transcript.
//!
//! Everything sent during a round becomes readable only after
//! [`Network::deliver`]. Mechanisms follow one schedule per round: nodes
//! send, the network delivers, the analyzer reads and replies, the network
//! delivers again, and the round counter advances.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Bytes charged for one real-valued message (an `f64`).
pub const COST_PER_SCALAR: u64 = 8;
/// Bytes charged for one mark.
pub const COST_PER_MARK: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Node(usize),
    Analyzer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    NodeToNode,
    NodeToAnalyzer,
    AnalyzerToNode,
}

impl Channel {
    pub const ALL: [Channel; 3] = [
        Channel::NodeToNode,
        Channel::NodeToAnalyzer,
        Channel::AnalyzerToNode,
    ];

    fn index(self) -> usize {
        match self {
            Channel::NodeToNode => 0,
            Channel::NodeToAnalyzer => 1,
            Channel::AnalyzerToNode => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::NodeToNode => "node_to_node",
            Channel::NodeToAnalyzer => "node_to_analyzer",
            Channel::AnalyzerToNode => "analyzer_to_node",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Mark(u8),
    Scalar(f64),
    Bits(Vec<bool>),
}

impl Payload {
    /// Size under the declared cost model.
    pub fn bits(&self) -> u64 {
        match self {
            Payload::Mark(_) => 8 * COST_PER_MARK,
            Payload::Scalar(_) => 8 * COST_PER_SCALAR,
            Payload::Bits(b) => b.len() as u64,
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Payload::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_mark(&self) -> Option<u8> {
        match self {
            Payload::Mark(m) => Some(*m),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Message {
    pub from: Party,
    /// Mechanism-defined label, usually the round or subscript the value belongs to.
    pub tag: u32,
    pub payload: Payload,
}

/// Bits and message counts per channel.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommLedger {
    bits: [u64; 3],
    messages: [u64; 3],
}

impl CommLedger {
    pub fn record(&mut self, channel: Channel, bits: u64) {
        self.bits[channel.index()] += bits;
        self.messages[channel.index()] += 1;
    }

    pub fn bits(&self, channel: Channel) -> u64 {
        self.bits[channel.index()]
    }

    /// Bytes on one channel, rounding a partial final byte up.
    pub fn bytes(&self, channel: Channel) -> u64 {
        self.bits[channel.index()].div_ceil(8)
    }

    pub fn messages(&self, channel: Channel) -> u64 {
        self.messages[channel.index()]
    }

    pub fn total_bytes(&self) -> u64 {
        Channel::ALL.iter().map(|&c| self.bytes(c)).sum()
    }

    pub fn total_messages(&self) -> u64 {
        self.messages.iter().sum()
    }

    pub fn merge(&mut self, other: &CommLedger) {
        for i in 0..3 {
            self.bits[i] += other.bits[i];
            self.messages[i] += other.messages[i];
        }
    }
}

/// Largest absolute value, or 0 for an empty slice.
pub fn round_max(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Simulated network for one mechanism run.
#[derive(Debug)]
pub struct Network {
    round: u32,
    inbox: Vec<Vec<Message>>,
    pending: Vec<Vec<Message>>,
    analyzer_inbox: Vec<Message>,
    analyzer_pending: Vec<Message>,
    board: Vec<Message>,
    board_pending: Vec<Message>,
    ledger: CommLedger,
}

impl Network {
    pub fn new(nodes: usize) -> Self {
        Network {
            round: 0,
            inbox: vec![Vec::new(); nodes],
            pending: vec![Vec::new(); nodes],
            analyzer_inbox: Vec::new(),
            analyzer_pending: Vec::new(),
            board: Vec::new(),
            board_pending: Vec::new(),
            ledger: CommLedger::default(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.inbox.len()
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < self.inbox.len() {
            Ok(())
        } else {
            Err(Error::arg("party", format!("node {node} is not in the network")))
        }
    }

    /// Queues a point-to-point message and charges it to the matching channel.
    pub fn send(&mut self, from: Party, to: Party, tag: u32, payload: Payload) -> Result<()> {
        let channel = match (from, to) {
            (Party::Node(a), Party::Node(b)) => {
                self.check_node(a)?;
                self.check_node(b)?;
                if a == b {
                    return Err(Error::arg("party", format!("node {a} cannot message itself")));
                }
                Channel::NodeToNode
            }
            (Party::Node(a), Party::Analyzer) => {
                self.check_node(a)?;
                Channel::NodeToAnalyzer
            }
            (Party::Analyzer, Party::Node(b)) => {
                self.check_node(b)?;
                Channel::AnalyzerToNode
            }
            (Party::Analyzer, Party::Analyzer) => {
                return Err(Error::arg("party", "the analyzer cannot message itself"));
            }
        };
        self.ledger.record(channel, payload.bits());
        let message = Message { from, tag, payload };
        match to {
            Party::Node(b) => self.pending[b].push(message),
            Party::Analyzer => self.analyzer_pending.push(message),
        }
        Ok(())
    }

    /// Publishes a node's value to every other node and the analyzer.
    pub fn broadcast(&mut self, from: usize, tag: u32, payload: Payload) -> Result<()> {
        self.check_node(from)?;
        let bits = payload.bits();
        for _ in 1..self.inbox.len() {
            self.ledger.record(Channel::NodeToNode, bits);
        }
        self.ledger.record(Channel::NodeToAnalyzer, bits);
        self.board_pending.push(Message {
            from: Party::Node(from),
            tag,
            payload,
        });
        Ok(())
    }

    /// Makes everything queued so far readable. Inboxes accumulate across rounds.
    pub fn deliver(&mut self) {
        for (inbox, pending) in self.inbox.iter_mut().zip(self.pending.iter_mut()) {
            inbox.append(pending);
        }
        self.analyzer_inbox.append(&mut self.analyzer_pending);
        self.board.append(&mut self.board_pending);
    }

    pub fn advance_round(&mut self) {
        self.round += 1;
    }

    /// `deliver` followed by `advance_round`.
    pub fn end_round(&mut self) {
        self.deliver();
        self.advance_round();
    }

    pub fn inbox(&self, node: usize) -> &[Message] {
        &self.inbox[node]
    }

    pub fn tagged(&self, node: usize, tag: u32) -> impl Iterator<Item = &Message> + '_ {
        self.inbox[node].iter().filter(move |m| m.tag == tag)
    }

    pub fn analyzer_inbox(&self) -> &[Message] {
        &self.analyzer_inbox
    }

    pub fn analyzer_tagged(&self, tag: u32) -> impl Iterator<Item = &Message> + '_ {
        self.analyzer_inbox.iter().filter(move |m| m.tag == tag)
    }

    /// Public broadcasts delivered so far.
    pub fn board(&self) -> &[Message] {
        &self.board
    }

    pub fn ledger(&self) -> &CommLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> CommLedger {
        self.ledger
    }
}

/// Record of published values, round maxima and marks for one run.
///
/// Rounds are keyed by the computation index the value belongs to: the walk
/// round `ℓ` for walk mechanisms and the tree subscript for marked ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    values: BTreeMap<u32, BTreeMap<usize, f64>>,
    maxima: BTreeMap<u32, f64>,
    marks: Option<Vec<u8>>,
}

impl Transcript {
    pub fn record(&mut self, round: u32, node: usize, value: f64) -> Result<()> {
        let slot = self.values.entry(round).or_default();
        if slot.insert(node, value).is_some() {
            return Err(Error::Validation(format!(
                "transcript already holds a value for node {node} in round {round}"
            )));
        }
        Ok(())
    }

    pub fn record_max(&mut self, round: u32, value: f64) {
        self.maxima.insert(round, value);
    }

    pub fn set_marks(&mut self, marks: &[u8]) {
        self.marks = Some(marks.to_vec());
    }

    pub fn values(&self, round: u32) -> Option<&BTreeMap<usize, f64>> {
        self.values.get(&round)
    }

    pub fn rounds(&self) -> impl Iterator<Item = u32> + '_ {
        self.values.keys().copied()
    }

    pub fn maxima(&self) -> &BTreeMap<u32, f64> {
        &self.maxima
    }

    pub fn marks(&self) -> Option<&[u8]> {
        self.marks.as_deref()
    }

    /// Line-oriented dump: `mark <node> <r>`, `max <round> <value>` and
    /// `<round> <node> <value>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        if let Some(marks) = &self.marks {
            for (i, r) in marks.iter().enumerate() {
                let _ = writeln!(out, "mark {i} {r}");
            }
        }
        for (round, values) in &self.values {
            if let Some(max) = self.maxima.get(round) {
                let _ = writeln!(out, "max {round} {max}");
            }
            for (node, value) in values {
                let _ = writeln!(out, "{round} {node} {value}");
            }
        }
        for (round, max) in &self.maxima {
            if !self.values.contains_key(round) {
                let _ = writeln!(out, "max {round} {max}");
            }
        }
        out
    }
}
