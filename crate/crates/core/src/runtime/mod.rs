//! Synchronous round-based message passing.
//!
//! Every protocol runs on a [`RoundEngine`] restricted to one partition.
//! Messages broadcast in round `t` reach all neighbours inside the partition
//! in round `t + 1`, sorted by sender id. The engine counts what every node
//! broadcasts, in memory words (one id or one scalar per word), and the peak
//! size of each node's working table.

mod power;
mod protocols;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{CommGraph, NodeId, NodeSet};

pub use power::{
    distributed_power_iteration, distributed_rank_test, DistributedPower, DistributedRankTest,
};
pub use protocols::{
    dual_flood, flood_from, max_consensus, min_id_consensus, run_eccentricity,
    run_eccentricity_with, DualFlood, Eccentricity, Flood, MaxConsensus, Retention,
};

/// Per-run accounting. `per_node_broadcasts` counts broadcast memory words;
/// `per_node_messages` counts rounds in which the node transmitted at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub protocol: String,
    pub per_node_broadcasts: BTreeMap<NodeId, u64>,
    pub per_node_messages: BTreeMap<NodeId, u64>,
    pub per_node_peak_words: BTreeMap<NodeId, u64>,
    pub totals: Totals,
    pub rounds: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<Vec<LogEntry>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub broadcasts: u64,
    pub messages: u64,
    pub peak_words: u64,
}

/// One transmission in the optional message log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub round: u64,
    pub from: NodeId,
    pub words: u64,
}

impl RoundTrace {
    pub fn new(protocol: &str, nodes: &NodeSet) -> Self {
        let zeros: BTreeMap<NodeId, u64> = nodes.iter().map(|&v| (v, 0)).collect();
        RoundTrace {
            protocol: protocol.to_string(),
            per_node_broadcasts: zeros.clone(),
            per_node_messages: zeros.clone(),
            per_node_peak_words: zeros,
            totals: Totals::default(),
            rounds: 0,
            log: None,
        }
    }

    pub fn broadcasts_of(&self, v: NodeId) -> u64 {
        self.per_node_broadcasts.get(&v).copied().unwrap_or(0)
    }

    /// Folds another run into this one: broadcasts and rounds add up, peaks
    /// take the maximum.
    pub fn absorb(&mut self, other: &RoundTrace) {
        for (&v, &w) in &other.per_node_broadcasts {
            *self.per_node_broadcasts.entry(v).or_default() += w;
        }
        for (&v, &w) in &other.per_node_messages {
            *self.per_node_messages.entry(v).or_default() += w;
        }
        for (&v, &w) in &other.per_node_peak_words {
            let e = self.per_node_peak_words.entry(v).or_default();
            *e = (*e).max(w);
        }
        self.totals.broadcasts += other.totals.broadcasts;
        self.totals.messages += other.totals.messages;
        self.totals.peak_words = self.totals.peak_words.max(other.totals.peak_words);
        self.rounds += other.rounds;
        if let (Some(mine), Some(theirs)) = (self.log.as_mut(), other.log.as_ref()) {
            mine.extend(theirs.iter().cloned());
        }
    }
}

/// Lock-step engine over the subgraph induced by a partition.
pub struct RoundEngine<'g> {
    graph: &'g CommGraph,
    members: Vec<NodeId>,
    mask: Vec<bool>,
    /// member position of every node id, `usize::MAX` outside
    pos: Vec<usize>,
    round: u64,
    trace: RoundTrace,
    /// per-member counters, folded into `trace` by `finish`
    words: Vec<u64>,
    messages: Vec<u64>,
    peak: Vec<u64>,
}

impl<'g> RoundEngine<'g> {
    pub fn new(graph: &'g CommGraph, partition: &NodeSet, protocol: &str) -> Self {
        let members: Vec<NodeId> = partition.iter().copied().collect();
        let mask = graph.mask(partition);
        let mut pos = vec![usize::MAX; graph.node_count()];
        for (i, v) in members.iter().enumerate() {
            pos[v.index()] = i;
        }
        RoundEngine {
            graph,
            members,
            mask,
            pos,
            round: 0,
            trace: RoundTrace::new(protocol, partition),
            words: vec![0; partition.len()],
            messages: vec![0; partition.len()],
            peak: vec![0; partition.len()],
        }
    }

    /// Records every transmission in the trace log.
    pub fn with_log(mut self) -> Self {
        self.trace.log = Some(Vec::new());
        self
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.pos
            .get(v.index())
            .copied()
            .filter(|&p| p != usize::MAX)
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Neighbours of member `i` inside the partition, as member positions.
    pub fn neighbor_positions(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .neighbors(self.members[i])
            .iter()
            .filter(|w| self.mask[w.index()])
            .map(|w| self.pos[w.index()])
    }

    /// Accounts a broadcast of `words` by member `i` in the current round.
    pub fn record(&mut self, i: usize, words: u64) {
        if words == 0 {
            return;
        }
        self.words[i] += words;
        self.messages[i] += 1;
        if let Some(log) = self.trace.log.as_mut() {
            log.push(LogEntry {
                round: self.round,
                from: self.members[i],
                words,
            });
        }
    }

    /// Updates the peak table size of member `i`.
    pub fn note_table(&mut self, i: usize, words: u64) {
        self.peak[i] = self.peak[i].max(words);
    }

    /// Sends the current round's outboxes (indexed by member position) and
    /// advances the clock. Returns each member's inbox, sorted by sender.
    pub fn exchange<'m, M>(
        &mut self,
        outbox: &'m [Option<M>],
        words: impl Fn(&M) -> u64,
    ) -> Vec<Vec<(NodeId, &'m M)>> {
        assert_eq!(outbox.len(), self.members.len());
        let mut inbox: Vec<Vec<(NodeId, &M)>> = vec![Vec::new(); self.members.len()];
        for i in 0..self.members.len() {
            if let Some(m) = &outbox[i] {
                self.record(i, words(m));
                let v = self.members[i];
                for j in self.neighbor_positions(i).collect::<Vec<_>>() {
                    inbox[j].push((v, m));
                }
            }
        }
        // senders are visited in id order, so inboxes are already sorted
        self.round += 1;
        inbox
    }

    /// Accounts one round in which member `i` broadcasts `words[i]` words
    /// (zero meaning silent). Used by protocols whose receivers read the
    /// neighbours' broadcasts through precomputed routes.
    pub fn account_round(&mut self, words: &[u64]) {
        assert_eq!(words.len(), self.members.len());
        for (i, &w) in words.iter().enumerate() {
            self.record(i, w);
        }
        self.round += 1;
    }

    /// Advances the clock without a data exchange accounted through
    /// [`exchange`](Self::exchange) (e.g. tree reductions tallied by hand).
    pub fn advance(&mut self, rounds: u64) {
        self.round += rounds;
    }

    pub fn finish(mut self) -> RoundTrace {
        let t = &mut self.trace;
        for (i, v) in self.members.iter().enumerate() {
            t.per_node_broadcasts.insert(*v, self.words[i]);
            t.per_node_messages.insert(*v, self.messages[i]);
            t.per_node_peak_words.insert(*v, self.peak[i]);
        }
        t.totals = Totals {
            broadcasts: self.words.iter().sum(),
            messages: self.messages.iter().sum(),
            peak_words: self.peak.iter().copied().max().unwrap_or(0),
        };
        t.rounds = self.round;
        self.trace
    }
}
