//! Running a scenario end to end and the report it produces.

use std::collections::BTreeMap;
use std::time::Instant;

use ripsnet::complex::{betti_exact, build_rips};
use ripsnet::deploy::{build_comm_graph, coverage_ground_truth, Deployment, FaultRecord, Point};
use ripsnet::graph::NodeSet;
use ripsnet::locator::{
    localize_holes, Detection, LocalizationResult, SplitRecord, Status, StopReason, Survivor,
};
use ripsnet::worm::{classify_and_localize, CycleChain, CycleKind};
use ripsnet::{CommGraph, NodeId};
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;
use crate::CliError;

pub const VERSION: &str = concat!("ripsnet-cli ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub version: String,
    pub scenario: Scenario,
    pub ground_truth: GroundTruth,
    pub geometry: Geometry,
    pub localization: LocalizationSummary,
    pub verdicts: Vec<VerdictSummary>,
    pub outcome: Outcome,
    /// Excluded from golden comparisons.
    pub wall_clock_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub faults: Vec<FaultRecord>,
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    /// First Betti number of the whole Rips complex, by exact elimination.
    pub betti1: usize,
    /// Uncovered interior regions of the sensing disks (raster estimate).
    pub coverage_holes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub r_c: f64,
    pub r_s: f64,
    pub positions: Vec<Point>,
}

impl Geometry {
    /// The deployment the report was produced from (faults included).
    pub fn deployment(&self, seed: u64, faults: &[FaultRecord]) -> Deployment {
        Deployment {
            positions: self.positions.clone(),
            r_c: self.r_c,
            r_s: self.r_s,
            seed,
            faults: faults.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSummary {
    pub id: usize,
    pub parent: Option<usize>,
    pub generation: usize,
    pub status: Status,
    pub size: usize,
    pub detection: Option<Detection>,
    pub margin: Option<f64>,
    pub retried: bool,
    pub stop: Option<StopReason>,
    pub broadcasts: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseTotals {
    pub broadcasts: u64,
    pub messages: u64,
    pub rounds: u64,
    pub peak_words: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationSummary {
    pub partitions: Vec<PartitionSummary>,
    pub splits: Vec<SplitRecord>,
    pub survivors: Vec<Survivor>,
    pub inconclusive: Vec<usize>,
    pub generations: usize,
    pub total_rounds: u64,
    pub total_broadcasts: u64,
    pub phases: BTreeMap<String, PhaseTotals>,
}

impl LocalizationSummary {
    fn new(r: &LocalizationResult) -> Self {
        let partitions = r
            .partitions
            .iter()
            .map(|rec| {
                let p = &rec.partition;
                let det = rec.detection.as_ref();
                PartitionSummary {
                    id: p.id,
                    parent: p.parent,
                    generation: p.generation,
                    status: p.status,
                    size: p.nodes.len(),
                    detection: det.map(|d| d.detection),
                    margin: det.and_then(|d| d.spectral).map(|s| s.margin),
                    retried: det.is_some_and(|d| d.retried),
                    stop: rec.stop,
                    broadcasts: rec.traces.total_broadcasts(),
                }
            })
            .collect();
        let phases = r
            .traces
            .phases
            .iter()
            .map(|(k, t)| {
                let totals = PhaseTotals {
                    broadcasts: t.totals.broadcasts,
                    messages: t.totals.messages,
                    rounds: t.rounds,
                    peak_words: t.totals.peak_words,
                };
                (k.clone(), totals)
            })
            .collect();
        LocalizationSummary {
            partitions,
            splits: r.splits.clone(),
            survivors: r.survivors.clone(),
            inconclusive: r.inconclusive.clone(),
            generations: r.generations,
            total_rounds: r.total_rounds,
            total_broadcasts: r.total_broadcasts,
            phases,
        }
    }
}

/// Classification of one surviving cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictSummary {
    pub partition: usize,
    /// `None` when removing the cycle and its neighbours leaves nothing.
    pub kind: Option<CycleKind>,
    pub components: usize,
    pub grown_cycle: Vec<NodeId>,
    pub growth_steps: usize,
    pub stalled: bool,
    pub removed: NodeSet,
    pub flagged_pairs: Vec<(NodeId, NodeId)>,
}

fn classify(g: &CommGraph, sv: &Survivor, sweeps: usize) -> Result<VerdictSummary, CliError> {
    let c = CycleChain::new(g, sv.cycle.clone())?;
    match classify_and_localize(&c, g, sweeps) {
        Ok((grown, v)) => Ok(VerdictSummary {
            partition: sv.partition,
            kind: Some(v.kind),
            components: v.components,
            grown_cycle: grown.cycle.nodes().to_vec(),
            growth_steps: grown.steps.len(),
            stalled: grown.stalled,
            removed: v.removed,
            flagged_pairs: v.flagged_pairs,
        }),
        Err(ripsnet::Error::Indeterminate) => Ok(VerdictSummary {
            partition: sv.partition,
            kind: None,
            components: 0,
            grown_cycle: Vec::new(),
            growth_steps: 0,
            stalled: true,
            removed: NodeSet::new(),
            flagged_pairs: Vec::new(),
        }),
        Err(e) => Err(e.into()),
    }
}

/// Deploy, localize and (if selected) classify. An inconclusive detection
/// or classification still yields a report, marked
/// [`Outcome::Inconclusive`].
pub fn run_scenario(s: &Scenario) -> Result<Report, CliError> {
    s.validate()?;
    let start = Instant::now();
    let d = s.build()?;
    let g = build_comm_graph(&d);
    let coverage_holes = if s.pipeline.rasterizes() {
        Some(coverage_ground_truth(&d, None)?.holes)
    } else {
        None
    };
    let ground_truth = GroundTruth {
        faults: d.faults.clone(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        components: g.components().len(),
        betti1: betti_exact(&build_rips(&g)).b1,
        coverage_holes,
    };
    let loc = localize_holes(&g, &s.locator_config())?;
    let verdicts = if s.pipeline.classifies() {
        loc.survivors
            .iter()
            .map(|sv| classify(&g, sv, s.algorithm.sweeps))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let outcome = if loc.inconclusive.is_empty() && verdicts.iter().all(|v| v.kind.is_some()) {
        Outcome::Ok
    } else {
        Outcome::Inconclusive
    };
    Ok(Report {
        version: VERSION.to_string(),
        scenario: s.clone(),
        ground_truth,
        geometry: Geometry {
            r_c: d.r_c,
            r_s: d.r_s,
            positions: d.positions.clone(),
        },
        localization: LocalizationSummary::new(&loc),
        verdicts,
        outcome,
        wall_clock_ms: start.elapsed().as_millis() as u64,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The report with the wall-clock field zeroed, as stored in goldens.
    pub fn normalized(&self) -> Report {
        Report {
            wall_clock_ms: 0,
            ..self.clone()
        }
    }

    pub fn deployment(&self) -> Deployment {
        self.geometry
            .deployment(self.scenario.seed, &self.ground_truth.faults)
    }
}
