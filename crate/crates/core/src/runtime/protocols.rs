use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{RoundEngine, RoundTrace};
use crate::error::{Error, Result};
use crate::graph::{CommGraph, NodeId, NodeSet};

fn require_connected(g: &CommGraph, partition: &NodeSet) -> Result<()> {
    if partition.is_empty() {
        return Err(Error::InvalidParameter("empty partition".into()));
    }
    let k = g.components_within(partition).len();
    if k != 1 {
        return Err(Error::DisconnectedPartition { components: k });
    }
    Ok(())
}

/// How long a node keeps a discovered id in its table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retention {
    /// An id discovered in round `d` is kept through round `d + k`.
    Rounds(u64),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eccentricity {
    pub f: BTreeMap<NodeId, u64>,
    pub trace: RoundTrace,
    /// Ids some node broadcast more than once (instrumentation, not node
    /// state).
    pub duplicate_broadcasts: u64,
}

/// Eccentricity of every node by flooding ids, each node keeping its
/// discoveries for two rounds.
pub fn run_eccentricity(g: &CommGraph, partition: &NodeSet) -> Result<Eccentricity> {
    run_eccentricity_with(g, partition, Retention::Rounds(2))
}

pub fn run_eccentricity_with(
    g: &CommGraph,
    partition: &NodeSet,
    retention: Retention,
) -> Result<Eccentricity> {
    require_connected(g, partition)?;
    let mut eng = RoundEngine::new(g, partition, "eccentricity");
    let m = eng.members().len();
    let members = eng.members().to_vec();

    // node-local state: table id -> discovery round
    let mut table: Vec<HashMap<NodeId, u64>> =
        members.iter().map(|&v| HashMap::from([(v, 0)])).collect();
    let mut halted = vec![false; m];
    let mut f = vec![0u64; m];
    let mut sent: Vec<HashSet<NodeId>> = vec![HashSet::new(); m];
    let mut duplicates = 0u64;

    let mut outbox: Vec<Option<Vec<NodeId>>> = members.iter().map(|&v| Some(vec![v])).collect();
    for i in 0..m {
        eng.note_table(i, 1);
    }
    let limit = m as u64 + 3;
    while halted.iter().any(|h| !h) {
        for (i, out) in outbox.iter().enumerate() {
            if let Some(ids) = out {
                for id in ids {
                    if !sent[i].insert(*id) {
                        duplicates += 1;
                    }
                }
            }
        }
        let inbox = eng.exchange(&outbox, |ids| ids.len() as u64);
        let t = eng.round();
        if t > limit {
            return Err(Error::RoundLimit(limit as usize));
        }
        let mut next: Vec<Option<Vec<NodeId>>> = vec![None; m];
        for i in 0..m {
            if halted[i] {
                continue;
            }
            if let Retention::Rounds(k) = retention {
                table[i].retain(|_, d| *d + k >= t);
            }
            let mut new: BTreeSet<NodeId> = BTreeSet::new();
            for (_, ids) in &inbox[i] {
                for id in ids.iter() {
                    if !table[i].contains_key(id) {
                        new.insert(*id);
                    }
                }
            }
            if new.is_empty() {
                halted[i] = true;
                f[i] = t - 1;
                continue;
            }
            for &id in &new {
                table[i].insert(id, t);
            }
            eng.note_table(i, table[i].len() as u64);
            next[i] = Some(new.into_iter().collect());
        }
        outbox = next;
    }
    Ok(Eccentricity {
        f: members.iter().copied().zip(f).collect(),
        trace: eng.finish(),
        duplicate_broadcasts: duplicates,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxConsensus {
    pub value: u64,
    /// Smallest id among the nodes that started with the maximum.
    pub witness: NodeId,
    pub converged: BTreeMap<NodeId, u64>,
    pub max_trace: RoundTrace,
    pub witness_trace: RoundTrace,
}

/// Max consensus: every node announces its value once, then rebroadcasts only
/// strictly larger values it learns. A min-id consensus among the holders of
/// the maximum then elects the witness.
pub fn max_consensus(
    g: &CommGraph,
    partition: &NodeSet,
    values: &BTreeMap<NodeId, u64>,
) -> Result<MaxConsensus> {
    require_connected(g, partition)?;
    let mut eng = RoundEngine::new(g, partition, "max_consensus");
    let members = eng.members().to_vec();
    let m = members.len();
    let mut cur: Vec<u64> = members
        .iter()
        .map(|v| values.get(v).copied().ok_or(Error::UnknownNode(*v)))
        .collect::<Result<_>>()?;
    let mut outbox: Vec<Option<u64>> = cur.iter().map(|&x| Some(x)).collect();
    for i in 0..m {
        eng.note_table(i, 1);
    }
    while outbox.iter().any(Option::is_some) {
        let inbox = eng.exchange(&outbox, |_| 1);
        let mut next = vec![None; m];
        for i in 0..m {
            let best = inbox[i].iter().map(|(_, &x)| x).max();
            if let Some(b) = best {
                if b > cur[i] {
                    cur[i] = b;
                    next[i] = Some(b);
                }
            }
        }
        outbox = next;
    }
    let max_trace = eng.finish();
    let value = cur[0];
    let holders: NodeSet = members
        .iter()
        .filter(|v| values[v] == value)
        .copied()
        .collect();
    let (witness, witness_trace) = min_id_consensus(g, partition, &holders)?;
    Ok(MaxConsensus {
        value,
        witness,
        converged: members.iter().copied().zip(cur).collect(),
        max_trace,
        witness_trace,
    })
}

/// Elects the smallest id among `candidates`: candidates announce themselves,
/// every node forwards strictly smaller ids than it has seen.
pub fn min_id_consensus(
    g: &CommGraph,
    partition: &NodeSet,
    candidates: &NodeSet,
) -> Result<(NodeId, RoundTrace)> {
    require_connected(g, partition)?;
    if candidates.is_empty() || !candidates.is_subset(partition) {
        return Err(Error::InvalidParameter(
            "candidates must be a nonempty subset of the partition".into(),
        ));
    }
    let mut eng = RoundEngine::new(g, partition, "min_id_consensus");
    let members = eng.members().to_vec();
    let m = members.len();
    let mut best: Vec<Option<NodeId>> = members
        .iter()
        .map(|v| candidates.contains(v).then_some(*v))
        .collect();
    let mut outbox: Vec<Option<NodeId>> = best.clone();
    while outbox.iter().any(Option::is_some) {
        let inbox = eng.exchange(&outbox, |_| 1);
        let mut next = vec![None; m];
        for i in 0..m {
            if let Some(low) = inbox[i].iter().map(|(_, &x)| x).min() {
                if best[i].is_none_or(|b| low < b) {
                    best[i] = Some(low);
                    next[i] = Some(low);
                }
            }
            eng.note_table(i, 1);
        }
        outbox = next;
    }
    let winner = best[0].expect("connected partition reaches every node");
    Ok((winner, eng.finish()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flood {
    /// Round of first contact (0 for sources); unreached nodes are absent.
    pub arrival: BTreeMap<NodeId, u64>,
    /// Every distinct source id each node received.
    pub received: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub trace: RoundTrace,
}

/// Floods the ids of `sources` through the partition; each node forwards each
/// source id once, in the round it first hears it.
pub fn flood_from(g: &CommGraph, partition: &NodeSet, sources: &NodeSet) -> Result<Flood> {
    if sources.is_empty() {
        return Err(Error::InvalidParameter(
            "flood needs at least one source".into(),
        ));
    }
    if let Some(v) = sources.iter().find(|v| !partition.contains(v)) {
        return Err(Error::UnknownNode(*v));
    }
    let mut eng = RoundEngine::new(g, partition, "flood");
    let members = eng.members().to_vec();
    let m = members.len();
    let mut arrival: Vec<Option<u64>> = vec![None; m];
    let mut received: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); m];
    let mut outbox: Vec<Option<Vec<NodeId>>> = vec![None; m];
    for (i, v) in members.iter().enumerate() {
        if sources.contains(v) {
            arrival[i] = Some(0);
            received[i].insert(*v);
            outbox[i] = Some(vec![*v]);
            eng.note_table(i, 1);
        }
    }
    while outbox.iter().any(Option::is_some) {
        let inbox = eng.exchange(&outbox, |ids| ids.len() as u64);
        let t = eng.round();
        let mut next = vec![None; m];
        for i in 0..m {
            let mut new = Vec::new();
            for (_, ids) in &inbox[i] {
                for &id in ids.iter() {
                    if received[i].insert(id) {
                        new.push(id);
                    }
                }
            }
            if !new.is_empty() {
                arrival[i].get_or_insert(t);
                new.sort_unstable();
                eng.note_table(i, received[i].len() as u64);
                next[i] = Some(new);
            }
        }
        outbox = next;
    }
    let mut arr = BTreeMap::new();
    let mut rec = BTreeMap::new();
    for (i, v) in members.iter().enumerate() {
        if let Some(a) = arrival[i] {
            arr.insert(*v, a);
            rec.insert(*v, std::mem::take(&mut received[i]));
        }
    }
    Ok(Flood {
        arrival: arr,
        received: rec,
        trace: eng.finish(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualFlood {
    pub boundary: NodeSet,
    /// Side label (`u` or `v`) of every non-boundary node.
    pub side: BTreeMap<NodeId, NodeId>,
    /// Round of first reception per node (0 for `u` and `v`).
    pub first: BTreeMap<NodeId, u64>,
    pub trace: RoundTrace,
}

/// Boundary flood between the diameter nodes `u` and `v`. Both broadcast
/// their id in round 0 and stop. Every other node acts once, in the round it
/// first hears an id: if it heard both ids it joins the boundary and
/// broadcasts the lower one, otherwise it forwards the single id. It then
/// listens one more round; hearing the other id then also makes it a
/// boundary node.
pub fn dual_flood(g: &CommGraph, partition: &NodeSet, u: NodeId, v: NodeId) -> Result<DualFlood> {
    require_connected(g, partition)?;
    for x in [u, v] {
        if !partition.contains(&x) {
            return Err(Error::UnknownNode(x));
        }
    }
    if u == v {
        return Err(Error::InvalidParameter("diameter nodes coincide".into()));
    }
    let mut eng = RoundEngine::new(g, partition, "boundary_flood");
    let members = eng.members().to_vec();
    let m = members.len();

    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Idle,
        /// heard a single id in round `at`; still listening next round
        Waiting {
            label: NodeId,
            at: u64,
        },
        Side(NodeId),
        Boundary,
    }
    let mut state = vec![State::Idle; m];
    let mut first = vec![None; m];
    let mut outbox: Vec<Option<NodeId>> = vec![None; m];
    for (i, x) in members.iter().enumerate() {
        if *x == u || *x == v {
            state[i] = State::Side(*x);
            first[i] = Some(0);
            outbox[i] = Some(*x);
        }
        eng.note_table(i, 1);
    }
    loop {
        let listening = state.iter().any(|s| matches!(s, State::Waiting { .. }));
        if outbox.iter().all(Option::is_none) && !listening {
            break;
        }
        let inbox = eng.exchange(&outbox, |_| 1);
        let t = eng.round();
        let mut next = vec![None; m];
        for i in 0..m {
            let heard: BTreeSet<NodeId> = inbox[i].iter().map(|(_, &x)| x).collect();
            match state[i] {
                State::Idle if !heard.is_empty() => {
                    first[i] = Some(t);
                    let low = *heard.iter().next().unwrap();
                    if heard.len() >= 2 {
                        state[i] = State::Boundary;
                    } else {
                        state[i] = State::Waiting { label: low, at: t };
                    }
                    next[i] = Some(low);
                    eng.note_table(i, heard.len() as u64);
                }
                State::Waiting { label, at } => {
                    debug_assert_eq!(at + 1, t);
                    state[i] = if heard.iter().any(|&x| x != label) {
                        State::Boundary
                    } else {
                        State::Side(label)
                    };
                }
                _ => {}
            }
        }
        outbox = next;
    }
    let mut boundary = NodeSet::new();
    let mut side = BTreeMap::new();
    let mut first_map = BTreeMap::new();
    for (i, x) in members.iter().enumerate() {
        match state[i] {
            State::Boundary => {
                boundary.insert(*x);
            }
            State::Side(l) => {
                side.insert(*x, l);
            }
            State::Idle | State::Waiting { .. } => {
                unreachable!("connected partition is fully flooded")
            }
        }
        if let Some(a) = first[i] {
            first_map.insert(*x, a);
        }
    }
    Ok(DualFlood {
        boundary,
        side,
        first: first_map,
        trace: eng.finish(),
    })
}
