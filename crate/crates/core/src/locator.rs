//! Divide-and-conquer localization of coverage holes.
//!
//! Each partition checks its Rips complex for a hole with the distributed
//! rank test. Hole-free partitions go to sleep. A partition with a hole
//! elects two diameter nodes, floods from both to find a separating boundary,
//! repairs the boundary into a connected set and splits into the two sides,
//! each keeping the boundary. Partitions that cannot shrink any further are
//! the survivors and carry one hole each.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{
    betti_exact, shortest_nontrivial_cycle, Betti, Chain, H1Annotation, HomologyChecker,
    PowerConfig, RipsComplex, SpectralVerdict, Verdict,
};
use crate::error::{Error, Result};
use crate::graph::{CommGraph, NodeId, NodeSet};
use crate::runtime::{
    distributed_rank_test, dual_flood, flood_from, max_consensus, min_id_consensus,
    run_eccentricity, RoundTrace,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocatorConfig {
    /// Relative tolerance of the rank-deficiency test.
    pub tol: f64,
    pub power: PowerConfig,
    /// Factor applied to the iteration cap when a detection is retried.
    pub retry_factor: usize,
    /// Safety bound on split generations.
    pub max_generations: usize,
    /// A hole partition with at most `girth_factor` times the length of its
    /// shortest non-bounding cycle stops splitting. `0` disables the rule.
    pub girth_factor: usize,
}

impl Default for LocatorConfig {
    fn default() -> Self {
        LocatorConfig {
            tol: 1e-6,
            power: PowerConfig::default(),
            retry_factor: 100,
            max_generations: 64,
            girth_factor: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    /// no hole detected; the partition's nodes stop working
    Asleep,
    /// split into children
    Split,
    /// holds a hole and cannot be split further
    Survivor,
    /// detection failed twice
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub id: usize,
    pub nodes: NodeSet,
    /// Boundary shared with the sibling (empty for initial partitions).
    pub boundary: NodeSet,
    pub parent: Option<usize>,
    pub generation: usize,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterPair {
    pub u: NodeId,
    pub v: NodeId,
    pub eccentricity: u64,
}

impl DiameterPair {
    pub fn is_degenerate(&self) -> bool {
        self.u == self.v
    }
}

/// Broadcast accounting of one partition, per phase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTraces {
    pub phases: BTreeMap<String, RoundTrace>,
}

impl PhaseTraces {
    pub fn add(&mut self, phase: &str, t: &RoundTrace) {
        match self.phases.get_mut(phase) {
            Some(acc) => acc.absorb(t),
            None => {
                let mut t = t.clone();
                t.protocol = phase.to_string();
                self.phases.insert(phase.to_string(), t);
            }
        }
    }

    pub fn merge(&mut self, other: &PhaseTraces) {
        for (k, t) in &other.phases {
            self.add(k, t);
        }
    }

    pub fn total_broadcasts(&self) -> u64 {
        self.phases.values().map(|t| t.totals.broadcasts).sum()
    }

    pub fn total_rounds(&self) -> u64 {
        self.phases.values().map(|t| t.rounds).sum()
    }

    pub fn broadcasts_of(&self, v: NodeId) -> u64 {
        self.phases.values().map(|t| t.broadcasts_of(v)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterElection {
    pub pair: DiameterPair,
    pub f: BTreeMap<NodeId, u64>,
    pub traces: PhaseTraces,
}

/// Eccentricities, max consensus on them, then the smallest id at maximal
/// distance from the elected node.
pub fn find_diameter_nodes(g: &CommGraph, p: &NodeSet) -> Result<DiameterElection> {
    let ecc = run_eccentricity(g, p)?;
    let mut traces = PhaseTraces::default();
    traces.add("eccentricity", &ecc.trace);
    let mc = max_consensus(g, p, &ecc.f)?;
    traces.add("max", &mc.max_trace);
    traces.add("max", &mc.witness_trace);
    let u = mc.witness;
    let far = mc.value;
    let v = if far == 0 {
        u
    } else {
        let fl = flood_from(g, p, &[u].into_iter().collect())?;
        traces.add("antipode", &fl.trace);
        let cands: NodeSet = fl
            .arrival
            .iter()
            .filter(|(_, &d)| d == far)
            .map(|(&w, _)| w)
            .collect();
        let (v, t) = min_id_consensus(g, p, &cands)?;
        traces.add("antipode", &t);
        v
    };
    Ok(DiameterElection {
        pair: DiameterPair {
            u,
            v,
            eccentricity: far,
        },
        f: ecc.f,
        traces,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySplit {
    pub boundary: NodeSet,
    pub side_u: NodeSet,
    pub side_v: NodeSet,
    /// `side_u ∪ boundary`
    pub s1: NodeSet,
    /// `side_v ∪ boundary`
    pub s2: NodeSet,
    pub trace: RoundTrace,
}

impl BoundarySplit {
    /// True when no edge joins the two sides.
    pub fn separates(&self, g: &CommGraph) -> bool {
        self.side_u
            .iter()
            .all(|&a| g.neighbors(a).iter().all(|b| !self.side_v.contains(b)))
    }
}

pub fn find_boundary_nodes(
    g: &CommGraph,
    p: &NodeSet,
    dia: &DiameterPair,
) -> Result<BoundarySplit> {
    if dia.is_degenerate() {
        return Err(Error::InvalidParameter("degenerate diameter pair".into()));
    }
    let df = dual_flood(g, p, dia.u, dia.v)?;
    let side_u: NodeSet = df
        .side
        .iter()
        .filter(|(_, &l)| l == dia.u)
        .map(|(&w, _)| w)
        .collect();
    let side_v: NodeSet = df
        .side
        .iter()
        .filter(|(_, &l)| l == dia.v)
        .map(|(&w, _)| w)
        .collect();
    let s1 = side_u.union(&df.boundary).copied().collect();
    let s2 = side_v.union(&df.boundary).copied().collect();
    let split = BoundarySplit {
        boundary: df.boundary,
        side_u,
        side_v,
        s1,
        s2,
        trace: df.trace,
    };
    assert!(
        split.separates(g),
        "boundary flood failed to separate the sides"
    );
    Ok(split)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairedBoundary {
    pub boundary: NodeSet,
    /// nodes added to join the boundary's components
    pub added: NodeSet,
    pub betti: Betti,
    pub trace: RoundTrace,
}

impl RepairedBoundary {
    pub fn contractible(&self) -> bool {
        self.betti.is_contractible()
    }
}

/// Joins the components of `b` by shortest paths inside `p`: flood from the
/// component holding the smallest id, walk back from the closest node of
/// another component, repeat until connected.
pub fn repair_boundary(g: &CommGraph, p: &NodeSet, b: &NodeSet) -> Result<RepairedBoundary> {
    if b.is_empty() {
        return Err(Error::InvalidParameter("empty boundary".into()));
    }
    let mut out = b.clone();
    let mut added = NodeSet::new();
    let mut trace = RoundTrace::new("repair", p);
    let mask = g.mask(p);
    loop {
        let comps = g.components_within(&out);
        if comps.len() == 1 {
            break;
        }
        let fl = flood_from(g, p, &comps[0])?;
        trace.absorb(&fl.trace);
        let target = comps[1..]
            .iter()
            .flatten()
            .filter_map(|w| fl.arrival.get(w).map(|&d| (d, *w)))
            .min()
            .ok_or(Error::NoConnectingPath)?;
        let (mut d, mut cur) = target;
        while d > 1 {
            let prev = g
                .neighbors(cur)
                .iter()
                .copied()
                .find(|w| mask[w.index()] && fl.arrival.get(w) == Some(&(d - 1)))
                .ok_or(Error::NoConnectingPath)?;
            if out.insert(prev) {
                added.insert(prev);
            }
            cur = prev;
            d -= 1;
        }
    }
    let betti = betti_exact(&RipsComplex::induced(g, &out));
    Ok(RepairedBoundary {
        boundary: out,
        added,
        betti,
        trace,
    })
}

/// Children of a split: the two sides with the repaired boundary added,
/// each broken into connected components.
pub fn split_partition(g: &CommGraph, split: &BoundarySplit, repaired: &NodeSet) -> Vec<NodeSet> {
    let mut children = Vec::new();
    for side in [&split.side_u, &split.side_v] {
        let s: NodeSet = side
            .difference(repaired)
            .chain(repaired.iter())
            .copied()
            .collect();
        children.extend(g.components_within(&s));
    }
    children
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    HasHole,
    NoHole,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleCheck {
    pub detection: Detection,
    pub spectral: Option<SpectralVerdict>,
    pub retried: bool,
    pub trace: RoundTrace,
}

/// Rank test of the partition's `L1`, retried once with a larger iteration
/// cap before an inconclusive result is reported.
pub fn detect_hole(g: &CommGraph, p: &NodeSet, cfg: &LocatorConfig) -> Result<HoleCheck> {
    let x = RipsComplex::induced(g, p);
    let l = match crate::complex::laplacian1(&x) {
        Ok(l) => l,
        Err(Error::EmptyComplex) => {
            return Ok(HoleCheck {
                detection: Detection::NoHole,
                spectral: None,
                retried: false,
                trace: RoundTrace::new("detection", p),
            })
        }
        Err(e) => return Err(e),
    };
    let run = |power: &PowerConfig| distributed_rank_test(g, p, &l, cfg.tol, power);
    let first = run(&cfg.power)?;
    let mut trace = first.trace.clone();
    trace.protocol = "detection".into();
    let (verdict, retried) = if first.verdict.verdict == Verdict::Inconclusive {
        let cap = cfg.power.cap(l.dim()) * cfg.retry_factor.max(1);
        let second = run(&PowerConfig {
            max_iters: Some(cap),
            ..cfg.power
        })?;
        trace.absorb(&second.trace);
        (second.verdict, true)
    } else {
        (first.verdict, false)
    };
    Ok(HoleCheck {
        detection: match verdict.verdict {
            Verdict::Deficient => Detection::HasHole,
            Verdict::FullRank => Detection::NoHole,
            Verdict::Inconclusive => Detection::Inconclusive,
        },
        spectral: Some(verdict),
        retried,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub parent: usize,
    pub children: Vec<usize>,
    pub diameter: DiameterPair,
    pub boundary: NodeSet,
    pub repaired: NodeSet,
    pub contractible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    pub partition: usize,
    pub nodes: NodeSet,
    /// Shortest non-bounding cycle of the survivor's complex.
    pub cycle: Vec<NodeId>,
    /// The cycle was confirmed not to bound by exact elimination.
    pub cycle_verified: bool,
    pub betti1: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub partition: Partition,
    pub detection: Option<HoleCheck>,
    /// Reason a hole partition stopped splitting.
    pub stop: Option<StopReason>,
    pub traces: PhaseTraces,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    SingleNode,
    WithinGirthBound,
    BoundaryIsEverything,
    NoProgress,
    GenerationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationResult {
    pub partitions: Vec<PartitionRecord>,
    pub splits: Vec<SplitRecord>,
    pub survivors: Vec<Survivor>,
    pub inconclusive: Vec<usize>,
    pub generations: usize,
    pub total_rounds: u64,
    pub total_broadcasts: u64,
    pub traces: PhaseTraces,
}

/// Runs the divide-and-conquer loop on every connected component of `g`.
pub fn localize_holes(g: &CommGraph, cfg: &LocatorConfig) -> Result<LocalizationResult> {
    let mut records: Vec<PartitionRecord> = Vec::new();
    let mut splits = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for comp in g.components() {
        let id = records.len();
        records.push(PartitionRecord {
            partition: Partition {
                id,
                nodes: comp,
                boundary: NodeSet::new(),
                parent: None,
                generation: 0,
                status: Status::Active,
            },
            detection: None,
            stop: None,
            traces: PhaseTraces::default(),
        });
        active.push(id);
    }

    let mut generation = 0;
    while !active.is_empty() {
        let mut next = Vec::new();
        for id in active {
            let nodes = records[id].partition.nodes.clone();
            let check = detect_hole(g, &nodes, cfg)?;
            records[id].traces.add("detection", &check.trace);
            let detection = check.detection;
            records[id].detection = Some(check);
            match detection {
                Detection::NoHole => {
                    records[id].partition.status = Status::Asleep;
                    continue;
                }
                Detection::Inconclusive => {
                    records[id].partition.status = Status::Inconclusive;
                    continue;
                }
                Detection::HasHole => {}
            }
            if generation >= cfg.max_generations {
                stop(&mut records[id], StopReason::GenerationLimit);
                continue;
            }
            match try_split(g, &nodes, cfg.girth_factor)? {
                Attempt::Stop(reason, traces) => {
                    records[id].traces.merge(&traces);
                    stop(&mut records[id], reason);
                }
                Attempt::Split {
                    children,
                    diameter,
                    boundary,
                    repaired,
                    traces,
                } => {
                    records[id].traces.merge(&traces);
                    records[id].partition.status = Status::Split;
                    let mut child_ids = Vec::new();
                    for c in children {
                        let cid = records.len();
                        let shared: NodeSet = c.intersection(&repaired.boundary).copied().collect();
                        records.push(PartitionRecord {
                            partition: Partition {
                                id: cid,
                                nodes: c,
                                boundary: shared,
                                parent: Some(id),
                                generation: generation + 1,
                                status: Status::Active,
                            },
                            detection: None,
                            stop: None,
                            traces: PhaseTraces::default(),
                        });
                        child_ids.push(cid);
                        next.push(cid);
                    }
                    splits.push(SplitRecord {
                        parent: id,
                        children: child_ids,
                        diameter,
                        boundary,
                        repaired: repaired.boundary.clone(),
                        contractible: repaired.contractible(),
                    });
                }
            }
        }
        active = next;
        generation += 1;
    }

    let mut survivors = Vec::new();
    let mut inconclusive = Vec::new();
    let mut traces = PhaseTraces::default();
    for r in &records {
        traces.merge(&r.traces);
        match r.partition.status {
            Status::Survivor => survivors.push(survivor_cycle(g, &r.partition)),
            Status::Inconclusive => inconclusive.push(r.partition.id),
            _ => {}
        }
    }
    Ok(LocalizationResult {
        total_rounds: traces.total_rounds(),
        total_broadcasts: traces.total_broadcasts(),
        partitions: records,
        splits,
        survivors,
        inconclusive,
        generations: generation,
        traces,
    })
}

fn stop(r: &mut PartitionRecord, reason: StopReason) {
    r.partition.status = Status::Survivor;
    r.stop = Some(reason);
}

enum Attempt {
    Stop(StopReason, PhaseTraces),
    Split {
        children: Vec<NodeSet>,
        diameter: DiameterPair,
        boundary: NodeSet,
        repaired: RepairedBoundary,
        traces: PhaseTraces,
    },
}

fn try_split(g: &CommGraph, nodes: &NodeSet, girth_factor: usize) -> Result<Attempt> {
    let mut traces = PhaseTraces::default();
    if let Some(girth) = girth(g, nodes).filter(|_| girth_factor > 0) {
        if nodes.len() <= girth_factor * girth {
            return Ok(Attempt::Stop(StopReason::WithinGirthBound, traces));
        }
    }
    let dia = find_diameter_nodes(g, nodes)?;
    traces.merge(&dia.traces);
    if dia.pair.is_degenerate() {
        return Ok(Attempt::Stop(StopReason::SingleNode, traces));
    }
    let split = find_boundary_nodes(g, nodes, &dia.pair)?;
    traces.add("boundary", &split.trace);
    if split.boundary == *nodes {
        return Ok(Attempt::Stop(StopReason::BoundaryIsEverything, traces));
    }
    let repaired = repair_boundary(g, nodes, &split.boundary)?;
    traces.add("repair", &repaired.trace);
    let children = split_partition(g, &split, &repaired.boundary);
    if children.iter().any(|c| c == nodes) {
        return Ok(Attempt::Stop(StopReason::NoProgress, traces));
    }
    Ok(Attempt::Split {
        children,
        diameter: dia.pair,
        boundary: split.boundary,
        repaired,
        traces,
    })
}

/// Length of the shortest non-bounding cycle of the partition's complex.
fn girth(g: &CommGraph, nodes: &NodeSet) -> Option<usize> {
    let x = RipsComplex::induced(g, nodes);
    let ann = H1Annotation::new(&x);
    shortest_nontrivial_cycle(&x, &ann).map(|c| c.len())
}

fn survivor_cycle(g: &CommGraph, p: &Partition) -> Survivor {
    let x = RipsComplex::induced(g, &p.nodes);
    let ann = H1Annotation::new(&x);
    let cycle = shortest_nontrivial_cycle(&x, &ann).unwrap_or_default();
    let cycle_verified = !cycle.is_empty()
        && Chain::from_closed_walk(&x, &cycle)
            .ok()
            .and_then(|c| HomologyChecker::new(&x).is_boundary(&c).ok())
            == Some(false);
    Survivor {
        partition: p.id,
        nodes: p.nodes.clone(),
        cycle,
        cycle_verified,
        betti1: ann.dim(),
    }
}
