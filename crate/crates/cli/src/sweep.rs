//! Communication cost of the first partition as the network grows.
//!
//! Nodes are dropped uniformly in a disk with `r_c` shrinking as `n^(-1/2)`,
//! so the mean degree stays put while the diameter grows like `sqrt(n)`.
//! Each run measures the broadcast words of the eccentricity phase, the
//! max-consensus phase and the hole detection of the largest component.

use std::io::Write;

use ripsnet::deploy::{build_comm_graph, Deployment, Sampler};
use ripsnet::graph::NodeSet;
use ripsnet::locator::{detect_hole, find_diameter_nodes, Detection, LocatorConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Expected neighbour count of an interior node.
pub const MEAN_DEGREE: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub repeat: usize,
    pub seed: u64,
    /// size of the largest component, the partition that is measured
    pub nodes: usize,
    pub f_words: u64,
    pub max_words: u64,
    pub detection_words: u64,
    pub detection: Detection,
}

/// Least-squares slopes of `log(words)` against `log(n)`, on the per-size
/// means of the totals and of the per-node averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub f_total: f64,
    pub f_per_node: f64,
    pub max_total: f64,
    pub max_per_node: f64,
    pub detection_total: f64,
    pub detection_per_node: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub slopes: Option<Slopes>,
    /// Set when a run failed; `rows` then holds the runs before it.
    pub error: Option<String>,
}

pub fn radius_for(n: usize) -> f64 {
    // disk of radius 1/2: degree ≈ n · r_c² / (1/2)²
    (MEAN_DEGREE / (4.0 * n as f64)).sqrt()
}

fn run_one(n: usize, repeat: usize, seed: u64, cfg: &LocatorConfig) -> Result<SweepRow, CliError> {
    let r_c = radius_for(n);
    let d = Deployment::generate(n, r_c, r_c * 0.6, seed, &Sampler::Disk)?;
    let g = build_comm_graph(&d);
    let part: NodeSet = g
        .components()
        .into_iter()
        .max_by_key(|c| c.len())
        .expect("at least one node");
    let e = find_diameter_nodes(&g, &part)?;
    let phase = |k: &str| e.traces.phases.get(k).map_or(0, |t| t.totals.broadcasts);
    let h = detect_hole(&g, &part, cfg)?;
    Ok(SweepRow {
        n,
        repeat,
        seed,
        nodes: part.len(),
        f_words: phase("eccentricity"),
        max_words: phase("max"),
        detection_words: h.trace.totals.broadcasts,
        detection: h.detection,
    })
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

impl SweepTable {
    fn fit(rows: &[SweepRow]) -> Option<Slopes> {
        let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
        sizes.dedup();
        let mean = |f: &dyn Fn(&SweepRow) -> f64| -> Vec<(f64, f64)> {
            sizes
                .iter()
                .map(|&n| {
                    let rs: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
                    let x = rs.iter().map(|r| r.nodes as f64).sum::<f64>() / rs.len() as f64;
                    let y = rs.iter().map(|r| f(r)).sum::<f64>() / rs.len() as f64;
                    (x, y)
                })
                .collect()
        };
        let per = |w: fn(&SweepRow) -> u64| move |r: &SweepRow| w(r) as f64 / r.nodes as f64;
        let tot = |w: fn(&SweepRow) -> u64| move |r: &SweepRow| w(r) as f64;
        Some(Slopes {
            f_total: loglog_slope(&mean(&tot(|r| r.f_words)))?,
            f_per_node: loglog_slope(&mean(&per(|r| r.f_words)))?,
            max_total: loglog_slope(&mean(&tot(|r| r.max_words)))?,
            max_per_node: loglog_slope(&mean(&per(|r| r.max_words)))?,
            detection_total: loglog_slope(&mean(&tot(|r| r.detection_words)))?,
            detection_per_node: loglog_slope(&mean(&per(|r| r.detection_words)))?,
        })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        out.write_record([
            "n",
            "repeat",
            "seed",
            "nodes",
            "f_words",
            "f_words_per_node",
            "max_words",
            "max_words_per_node",
            "detection_words",
            "detection_words_per_node",
            "detection",
        ])
        .map_err(io)?;
        for r in &self.rows {
            let per = |x: u64| format!("{:.4}", x as f64 / r.nodes as f64);
            let det = serde_json::to_value(r.detection).expect("enum serializes");
            out.write_record([
                r.n.to_string(),
                r.repeat.to_string(),
                r.seed.to_string(),
                r.nodes.to_string(),
                r.f_words.to_string(),
                per(r.f_words),
                r.max_words.to_string(),
                per(r.max_words),
                r.detection_words.to_string(),
                per(r.detection_words),
                det.as_str().unwrap_or_default().to_string(),
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Runs `repeats` networks per size. Seeds are `seed + repeat` for every
/// size. A failing run ends the sweep; the table keeps the finished rows and
/// records the error.
pub fn run_complexity_sweep(
    sizes: &[usize],
    repeats: usize,
    seed: u64,
    cfg: &LocatorConfig,
) -> Result<SweepTable, CliError> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(CliError::Validation(
            "a sweep needs at least two distinct sizes".into(),
        ));
    }
    if repeats == 0 || distinct[0] < 2 {
        return Err(CliError::Validation(
            "a sweep needs repeats >= 1 and sizes >= 2".into(),
        ));
    }
    let mut rows = Vec::new();
    for &n in &distinct {
        for repeat in 0..repeats {
            let s = seed + repeat as u64;
            match run_one(n, repeat, s, cfg) {
                Ok(r) => rows.push(r),
                Err(e) => {
                    return Ok(SweepTable {
                        rows,
                        slopes: None,
                        error: Some(format!("n = {n}, repeat {repeat}: {e}")),
                    })
                }
            }
        }
    }
    let slopes = SweepTable::fit(&rows);
    Ok(SweepTable {
        rows,
        slopes,
        error: None,
    })
}
