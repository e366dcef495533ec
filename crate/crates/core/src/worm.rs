//! Telling wormholes from coverage holes, and finding the tunnel ends.
//!
//! A non-bounding cycle around a coverage hole lies in the deployment
//! surface: once it is pushed into the network and removed together with its
//! neighbours, the inside is cut off from the outside. A cycle through a
//! wormhole leaves the surface and its removal disconnects nothing.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::complex::{Chain, H1Annotation, RipsComplex};
use crate::error::{Error, Result};
use crate::graph::{CommGraph, NodeId, NodeSet};

/// A simple closed walk in the communication graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<NodeId>", into = "Vec<NodeId>")]
pub struct CycleChain {
    nodes: Vec<NodeId>,
}

impl CycleChain {
    /// Checks that `nodes` is a simple cycle of `g` (closing edge implied).
    pub fn new(g: &CommGraph, nodes: Vec<NodeId>) -> Result<Self> {
        let c = Self::unchecked(nodes)?;
        for (a, b) in c.pairs() {
            if a.index() >= g.node_count() || b.index() >= g.node_count() || !g.has_edge(a, b) {
                return Err(Error::InvalidCycle(format!("{a} and {b} are not adjacent")));
            }
        }
        Ok(c)
    }

    fn unchecked(nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidCycle(format!(
                "{} nodes do not form a cycle",
                nodes.len()
            )));
        }
        let distinct: NodeSet = nodes.iter().copied().collect();
        if distinct.len() != nodes.len() {
            return Err(Error::InvalidCycle("repeated node".into()));
        }
        Ok(CycleChain { nodes })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_set(&self) -> NodeSet {
        self.nodes.iter().copied().collect()
    }

    /// Consecutive pairs, including the closing one.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let n = self.nodes.len();
        (0..n).map(move |i| (self.nodes[i], self.nodes[(i + 1) % n]))
    }

    /// The 1-chain of the oriented cycle in `x`.
    pub fn chain(&self, x: &RipsComplex) -> Result<Chain> {
        Chain::from_closed_walk(x, &self.nodes)
    }
}

impl TryFrom<Vec<NodeId>> for CycleChain {
    type Error = Error;

    fn try_from(nodes: Vec<NodeId>) -> Result<Self> {
        CycleChain::unchecked(nodes)
    }
}

impl From<CycleChain> for Vec<NodeId> {
    fn from(c: CycleChain) -> Self {
        c.nodes
    }
}

/// One homologous move. In both cases `old − new` is the boundary of
/// `triangle` traversed in the listed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum GrowthStep {
    /// edge `v1 → v2` replaced by `v1 → v3 → v2`
    Detour { triangle: [NodeId; 3] },
    /// path `v2 → v1 → v3` replaced by `v2 → v3`
    Shortcut { triangle: [NodeId; 3] },
}

impl GrowthStep {
    pub fn triangle(&self) -> [NodeId; 3] {
        match *self {
            GrowthStep::Detour { triangle } | GrowthStep::Shortcut { triangle } => triangle,
        }
    }

    /// Applies the step to a cycle; `None` if it does not fit.
    pub fn apply(&self, c: &CycleChain) -> Option<CycleChain> {
        let n = c.nodes.len();
        let at = |v: NodeId| c.nodes.iter().position(|&w| w == v);
        let mut nodes = c.nodes.clone();
        match *self {
            GrowthStep::Detour {
                triangle: [v1, v2, v3],
            } => {
                let i = at(v1)?;
                if nodes[(i + 1) % n] != v2 || at(v3).is_some() {
                    return None;
                }
                nodes.insert(i + 1, v3);
            }
            GrowthStep::Shortcut {
                triangle: [v2, v1, v3],
            } => {
                let i = at(v1)?;
                if nodes[(i + n - 1) % n] != v2 || nodes[(i + 1) % n] != v3 || n <= 3 {
                    return None;
                }
                nodes.remove(i);
            }
        }
        Some(CycleChain { nodes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grown {
    pub cycle: CycleChain,
    /// Original cycle nodes plus every node pushed off the cycle since.
    pub enclosed: NodeSet,
    pub steps: Vec<GrowthStep>,
    pub sweeps: usize,
    /// No step applied in the first sweep.
    pub stalled: bool,
}

/// Pushes `c` into the network by detours through common neighbours and
/// shortcuts across triangles, keeping it simple and homologous.
///
/// A sweep pushes off the nodes that were on the cycle when it started (the
/// front): edges touching the front are detoured through a common neighbour
/// that is neither on the cycle nor enclosed, then front nodes are shortcut
/// wherever their two cycle neighbours are adjacent, until the front is gone
/// or nothing applies. Shortcut nodes join the enclosed ledger and are never
/// reused.
pub fn grow_cycle(c: &CycleChain, g: &CommGraph, sweeps: usize) -> Grown {
    let mut cycle = c.nodes.clone();
    let mut on_cycle = vec![false; g.node_count()];
    let mut enclosed = vec![false; g.node_count()];
    for &v in &cycle {
        on_cycle[v.index()] = true;
        enclosed[v.index()] = true;
    }
    let mut steps = Vec::new();
    let mut done = 0;
    let mut stalled = false;
    for sweep in 0..sweeps {
        let front: NodeSet = cycle.iter().copied().collect();
        let before = steps.len();
        loop {
            let pass = steps.len();
            let mut next = Vec::with_capacity(cycle.len() * 2);
            for i in 0..cycle.len() {
                let (v1, v2) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                next.push(v1);
                if !front.contains(&v1) && !front.contains(&v2) {
                    continue;
                }
                let free = |w: NodeId| !on_cycle[w.index()] && !enclosed[w.index()];
                // the candidate with most free neighbours faces away from the
                // enclosed side; ties go to the smallest id
                let v3 = g
                    .neighbors(v1)
                    .iter()
                    .copied()
                    .filter(|&w| free(w) && g.has_edge(w, v2))
                    .max_by_key(|&w| {
                        (
                            g.neighbors(w).iter().filter(|&&u| free(u)).count(),
                            std::cmp::Reverse(w),
                        )
                    });
                if let Some(v3) = v3 {
                    on_cycle[v3.index()] = true;
                    next.push(v3);
                    steps.push(GrowthStep::Detour {
                        triangle: [v1, v2, v3],
                    });
                }
            }
            cycle = next;

            loop {
                let n = cycle.len();
                let pos = (0..n).find(|&i| {
                    front.contains(&cycle[i])
                        && n > 3
                        && g.has_edge(cycle[(i + n - 1) % n], cycle[(i + 1) % n])
                });
                let Some(i) = pos else { break };
                let (v2, v1, v3) = (cycle[(i + n - 1) % n], cycle[i], cycle[(i + 1) % n]);
                cycle.remove(i);
                on_cycle[v1.index()] = false;
                enclosed[v1.index()] = true;
                steps.push(GrowthStep::Shortcut {
                    triangle: [v2, v1, v3],
                });
            }
            if steps.len() == pass || cycle.iter().all(|v| !front.contains(v)) {
                break;
            }
        }

        done += 1;
        if steps.len() == before {
            stalled = sweep == 0;
            break;
        }
    }
    Grown {
        cycle: CycleChain { nodes: cycle },
        enclosed: (0..g.node_count())
            .filter(|&i| enclosed[i] && !on_cycle[i])
            .map(|i| NodeId(i as u32))
            .collect(),
        steps,
        sweeps: done,
        stalled,
    }
}

/// Replaces arcs of `c` by strictly shorter paths of `g` while the piece
/// cut off bounds in the Rips complex of `c`'s component, so the result is
/// homologous to `c`. A cycle that is shortest only inside some partition
/// becomes locally shortest in the whole network.
pub fn shorten_cycle(c: &CycleChain, g: &CommGraph) -> CycleChain {
    let all = vec![true; g.node_count()];
    let reach = g.bfs_within(&all, &[c.nodes[0]]);
    let comp: NodeSet = g.nodes().filter(|v| reach[v.index()].is_some()).collect();
    let x = RipsComplex::induced(g, &comp);
    let ann = H1Annotation::new(&x);
    let none = (c.nodes[0], c.nodes[0]);
    let mut cyc = c.nodes.clone();
    'improve: loop {
        let n = cyc.len();
        for i in 0..n {
            let dist = distances(g, &all, cyc[i], none);
            for k in 2..n - 1 {
                let j = (i + k) % n;
                if dist[cyc[j].index()].is_none_or(|d| d >= k) {
                    continue;
                }
                // path from cyc[i] to cyc[j], then the rest of the cycle back
                let mut path = walk_down(g, &all, &dist, cyc[j], none);
                path.reverse();
                let rest: Vec<NodeId> = (0..=n - k).map(|t| cyc[(j + t) % n]).collect();
                let inner = &path[1..path.len() - 1];
                if inner.iter().any(|v| rest.contains(v)) || rest.len() + inner.len() < 3 {
                    continue;
                }
                let cut: Vec<NodeId> = (0..k)
                    .map(|t| cyc[(i + t) % n])
                    .chain(path.iter().rev().copied().take(path.len() - 1))
                    .collect();
                if ann.bounds(&x, &cut) != Some(true) {
                    continue;
                }
                cyc = rest.into_iter().chain(inner.iter().copied()).collect();
                continue 'improve;
            }
        }
        break;
    }
    CycleChain { nodes: cyc }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    CoverageHole,
    Wormhole,
}

/// Outcome of the per-pair localization test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    pub v1: NodeId,
    pub v2: NodeId,
    /// The shortest path between the pair runs along the cycle only.
    pub flagged: bool,
    /// No path at all once the neighbourhoods are removed.
    pub disconnected: bool,
    pub path: Option<Vec<NodeId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: CycleKind,
    /// Components left after removing the cycle and its neighbours.
    pub components: usize,
    pub removed: NodeSet,
    /// Flagged pairs, filled in by [`classify_and_localize`] for wormholes.
    pub flagged_pairs: Vec<(NodeId, NodeId)>,
    pub per_pair_paths: Vec<PairCheck>,
}

/// Removes the cycle and all its neighbours from the component holding it
/// and counts what is left: two or more components mean a coverage hole.
pub fn remove_and_classify(c: &CycleChain, g: &CommGraph) -> Result<Verdict> {
    let start = c.nodes[0];
    let component = g.bfs_within(&vec![true; g.node_count()], &[start]);
    let mut removed = c.node_set();
    for &v in c.nodes() {
        removed.extend(g.neighbors(v).iter().copied());
    }
    let rest: NodeSet = g
        .nodes()
        .filter(|v| component[v.index()].is_some() && !removed.contains(v))
        .collect();
    if rest.is_empty() {
        return Err(Error::Indeterminate);
    }
    let components = g.components_within(&rest).len();
    Ok(Verdict {
        kind: if components >= 2 {
            CycleKind::CoverageHole
        } else {
            CycleKind::Wormhole
        },
        components,
        removed,
        flagged_pairs: Vec::new(),
        per_pair_paths: Vec::new(),
    })
}

/// For every adjacent pair of the (ungrown) cycle: drop the pair's edge and
/// their off-cycle neighbours, then look for a shortest path between them.
/// The pair is flagged when such a path uses cycle nodes only.
pub fn localize_wormhole(c: &CycleChain, g: &CommGraph) -> Vec<PairCheck> {
    let on_cycle = g.mask(c.nodes());
    c.pairs()
        .map(|(v1, v2)| {
            let mut mask = vec![true; g.node_count()];
            for &w in g.neighbors(v1).iter().chain(g.neighbors(v2)) {
                if !on_cycle[w.index()] {
                    mask[w.index()] = false;
                }
            }
            let skip = (v1, v2);
            let Some(d) = distances(g, &mask, v2, skip)[v1.index()] else {
                return PairCheck {
                    v1,
                    v2,
                    flagged: false,
                    disconnected: true,
                    path: None,
                };
            };
            // a shortest path inside the cycle wins ties
            let cycle_mask: Vec<bool> = mask.iter().zip(&on_cycle).map(|(&a, &b)| a && b).collect();
            let along = distances(g, &cycle_mask, v2, skip);
            let (flagged, path) = if along[v1.index()] == Some(d) {
                (true, walk_down(g, &cycle_mask, &along, v1, skip))
            } else {
                (
                    false,
                    walk_down(g, &mask, &distances(g, &mask, v2, skip), v1, skip),
                )
            };
            PairCheck {
                v1,
                v2,
                flagged,
                disconnected: false,
                path: Some(path),
            }
        })
        .collect()
}

fn is_skipped(a: NodeId, b: NodeId, skip: (NodeId, NodeId)) -> bool {
    (a, b) == skip || (b, a) == skip
}

/// Hop distances to `to` inside `mask`, ignoring the edge `skip`.
fn distances(
    g: &CommGraph,
    mask: &[bool],
    to: NodeId,
    skip: (NodeId, NodeId),
) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[to.index()] = Some(0);
    let mut queue = VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v.index()].unwrap();
        for &w in g.neighbors(v) {
            if mask[w.index()] && dist[w.index()].is_none() && !is_skipped(v, w, skip) {
                dist[w.index()] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Lexicographically smallest shortest path from `from` down the distance
/// field to its source.
fn walk_down(
    g: &CommGraph,
    mask: &[bool],
    dist: &[Option<usize>],
    from: NodeId,
    skip: (NodeId, NodeId),
) -> Vec<NodeId> {
    let mut path = vec![from];
    let mut cur = from;
    while let Some(d) = dist[cur.index()].filter(|&d| d > 0) {
        // neighbours are sorted, so the first match is the smallest id
        cur = *g
            .neighbors(cur)
            .iter()
            .find(|w| {
                mask[w.index()] && dist[w.index()] == Some(d - 1) && !is_skipped(cur, **w, skip)
            })
            .expect("distance field is consistent");
        path.push(cur);
    }
    path
}

/// Shortens the cycle in the whole network, grows and classifies it and, for
/// wormholes, localizes the tunnel on the shortened (ungrown) cycle.
pub fn classify_and_localize(
    c: &CycleChain,
    g: &CommGraph,
    sweeps: usize,
) -> Result<(Grown, Verdict)> {
    let c = &shorten_cycle(c, g);
    let grown = grow_cycle(c, g, sweeps);
    let mut verdict = remove_and_classify(&grown.cycle, g)?;
    if verdict.kind == CycleKind::Wormhole {
        let checks = localize_wormhole(c, g);
        verdict.flagged_pairs = checks
            .iter()
            .filter(|p| p.flagged)
            .map(|p| (p.v1, p.v2))
            .collect();
        verdict.per_pair_paths = checks;
    }
    Ok((grown, verdict))
}
