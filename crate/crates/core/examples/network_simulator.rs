//! The round-synchronous network on its own: messages are delivered at the
//! end of a round and every payload is charged to its channel.

use ldp_motifs::netsim::{Channel, Network, Party, Payload};
use ldp_motifs::Result;

pub fn run() -> Result<()> {
    let mut net = Network::new(3);
    net.send(Party::Node(0), Party::Node(1), 1, Payload::Scalar(2.5))?;
    net.send(Party::Node(2), Party::Analyzer, 1, Payload::Mark(3))?;
    net.broadcast(1, 1, Payload::Scalar(-1.0))?;
    println!("before delivery node 1 holds {} messages", net.inbox(1).len());
    net.end_round();
    println!("round {}: node 1 inbox {:?}", net.round(), net.inbox(1).iter().map(|m| m.payload.clone()).collect::<Vec<_>>());
    println!("analyzer inbox {:?}", net.analyzer_inbox().iter().map(|m| (m.from, m.payload.clone())).collect::<Vec<_>>());
    for c in Channel::ALL {
        println!("  {:<17} {} messages, {} bytes", c.name(), net.ledger().messages(c), net.ledger().bytes(c));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
