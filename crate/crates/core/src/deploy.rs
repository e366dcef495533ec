//! Deployments, fault injection and geometric ground truth.
//!
//! Positions live in the unit square. Everything in here except
//! [`build_comm_graph`] is test-oracle material: the algorithms downstream
//! of [`CommGraph`] never see coordinates.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CommGraph, NodeId};

/// Relative slack on the `d <= r_c` test so that nodes placed exactly at
/// distance `r_c` are linked despite rounding.
const EDGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// How node positions are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sampler {
    /// Uniform in the unit square.
    Uniform,
    /// Mixture of isotropic Gaussians truncated to the unit square.
    Clustered { clusters: usize, sigma: f64 },
    /// Uniform in the disk inscribed in the unit square.
    Disk,
    /// Regular `cols x rows` lattice with spacing `1 / max(cols, rows)`,
    /// ids in row-major order.
    Grid { cols: usize, rows: usize },
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler::Uniform
    }
}

impl Sampler {
    /// Lattice spacing for grid samplers.
    pub fn grid_spacing(&self) -> Option<f64> {
        match *self {
            Sampler::Grid { cols, rows } => Some(1.0 / cols.max(rows) as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FaultRecord {
    CoverageHole {
        center: Point,
        radius: f64,
        removed: usize,
        /// Surviving nodes within `r_c` of the hole rim.
        rim: Vec<NodeId>,
    },
    Wormhole {
        p1: Point,
        p2: Point,
        r_w: f64,
        v1: Vec<NodeId>,
        v2: Vec<NodeId>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub positions: Vec<Point>,
    pub r_c: f64,
    pub r_s: f64,
    pub seed: u64,
    pub faults: Vec<FaultRecord>,
}

fn check_radii(r_c: f64, r_s: f64) -> Result<()> {
    if !(r_c > 0.0) || !r_c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "r_c must be positive, got {r_c}"
        )));
    }
    let min = r_c / 3f64.sqrt();
    if !(r_s >= min) {
        return Err(Error::RadiusConstraint { r_c, r_s, min });
    }
    Ok(())
}

fn in_unit_square(p: &Point) -> bool {
    (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y)
}

/// Uniform deployment of `n` nodes.
pub fn generate_deployment(n: usize, r_c: f64, r_s: f64, seed: u64) -> Result<Deployment> {
    Deployment::generate(n, r_c, r_s, seed, &Sampler::Uniform)
}

impl Deployment {
    pub fn generate(
        n: usize,
        r_c: f64,
        r_s: f64,
        seed: u64,
        sampler: &Sampler,
    ) -> Result<Deployment> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "deployment needs at least one node".into(),
            ));
        }
        check_radii(r_c, r_s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = match *sampler {
            Sampler::Uniform => (0..n)
                .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
                .collect(),
            Sampler::Disk => (0..n)
                .map(|_| loop {
                    let p = Point::new(rng.random::<f64>(), rng.random::<f64>());
                    if p.dist2(&Point::new(0.5, 0.5)) <= 0.25 {
                        break p;
                    }
                })
                .collect(),
            Sampler::Clustered { clusters, sigma } => {
                if clusters == 0 || !(sigma > 0.0) {
                    return Err(Error::InvalidParameter(
                        "clustered sampler needs clusters >= 1 and sigma > 0".into(),
                    ));
                }
                let centers: Vec<Point> = (0..clusters)
                    .map(|_| Point::new(rng.random_range(0.15..0.85), rng.random_range(0.15..0.85)))
                    .collect();
                let normal = Normal::new(0.0, sigma).expect("sigma checked positive");
                (0..n)
                    .map(|_| {
                        let c = centers[rng.random_range(0..clusters)];
                        loop {
                            let p = Point::new(
                                c.x + normal.sample(&mut rng),
                                c.y + normal.sample(&mut rng),
                            );
                            if in_unit_square(&p) {
                                break p;
                            }
                        }
                    })
                    .collect()
            }
            Sampler::Grid { cols, rows } => {
                if cols * rows != n {
                    return Err(Error::InvalidParameter(format!(
                        "grid {cols}x{rows} has {} nodes but n = {n}",
                        cols * rows
                    )));
                }
                let s = sampler.grid_spacing().unwrap();
                (0..rows)
                    .flat_map(|j| {
                        (0..cols)
                            .map(move |i| Point::new((i as f64 + 0.5) * s, (j as f64 + 0.5) * s))
                    })
                    .collect()
            }
        };
        Ok(Deployment {
            positions,
            r_c,
            r_s,
            seed,
            faults: Vec::new(),
        })
    }

    /// Hand-placed deployment, used by fixtures.
    pub fn from_positions(positions: Vec<Point>, r_c: f64, r_s: f64) -> Result<Deployment> {
        if positions.is_empty() {
            return Err(Error::InvalidParameter(
                "deployment needs at least one node".into(),
            ));
        }
        check_radii(r_c, r_s)?;
        if let Some(p) = positions.iter().find(|p| !in_unit_square(p)) {
            return Err(Error::InvalidParameter(format!(
                "position ({}, {}) outside unit square",
                p.x, p.y
            )));
        }
        Ok(Deployment {
            positions,
            r_c,
            r_s,
            seed: 0,
            faults: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, v: NodeId) -> Point {
        self.positions[v.index()]
    }

    /// Nodes whose position lies in the closed disk.
    pub fn nodes_in_disk(&self, center: Point, radius: f64) -> Vec<NodeId> {
        self.positions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.dist2(&center) <= radius * radius)
            .map(|(i, _)| NodeId::from(i))
            .collect()
    }

    fn remap_faults(&mut self, new_id: &[Option<NodeId>]) {
        let remap = |ids: &mut Vec<NodeId>| {
            *ids = ids.iter().filter_map(|v| new_id[v.index()]).collect();
        };
        for f in &mut self.faults {
            match f {
                FaultRecord::CoverageHole { rim, .. } => remap(rim),
                FaultRecord::Wormhole { v1, v2, .. } => {
                    remap(v1);
                    remap(v2);
                }
            }
        }
    }

    pub fn holes(&self) -> impl Iterator<Item = (&Point, f64, &[NodeId])> {
        self.faults.iter().filter_map(|f| match f {
            FaultRecord::CoverageHole {
                center,
                radius,
                rim,
                ..
            } => Some((center, *radius, rim.as_slice())),
            _ => None,
        })
    }

    pub fn wormholes(&self) -> impl Iterator<Item = &FaultRecord> {
        self.faults
            .iter()
            .filter(|f| matches!(f, FaultRecord::Wormhole { .. }))
    }
}

/// Closed-ball unit-disk graph plus the complete bipartite link set of every
/// wormhole fault.
pub fn build_comm_graph(d: &Deployment) -> CommGraph {
    let n = d.len();
    let mut g = CommGraph::empty(n);
    let r2 = d.r_c * d.r_c * (1.0 + EDGE_SLACK);
    for i in 0..n {
        for j in (i + 1)..n {
            if d.positions[i].dist2(&d.positions[j]) <= r2 {
                g.add_edge(NodeId::from(i), NodeId::from(j));
            }
        }
    }
    for f in &d.faults {
        if let FaultRecord::Wormhole { v1, v2, .. } = f {
            for &a in v1 {
                for &b in v2 {
                    g.add_edge(a, b);
                }
            }
        }
    }
    g
}

/// Removes every node in the closed disk and records the hole together with
/// its rim (surviving nodes within `r_c` of the disk boundary).
pub fn inject_hole(d: &Deployment, center: Point, radius: f64) -> Result<Deployment> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hole radius must be positive, got {radius}"
        )));
    }
    let cx = center.x.clamp(0.0, 1.0);
    let cy = center.y.clamp(0.0, 1.0);
    if center.dist(&Point::new(cx, cy)) >= radius {
        return Err(Error::InvalidParameter(
            "hole does not intersect the region".into(),
        ));
    }
    let mut new_id = vec![None; d.len()];
    let mut positions = Vec::with_capacity(d.len());
    for (i, p) in d.positions.iter().enumerate() {
        if p.dist2(&center) > radius * radius {
            new_id[i] = Some(NodeId::from(positions.len()));
            positions.push(*p);
        }
    }
    if positions.is_empty() {
        return Err(Error::HoleSwallowsNetwork {
            x: center.x,
            y: center.y,
            radius,
        });
    }
    let removed = d.len() - positions.len();
    let mut out = Deployment {
        positions,
        r_c: d.r_c,
        r_s: d.r_s,
        seed: d.seed,
        faults: d.faults.clone(),
    };
    out.remap_faults(&new_id);
    let rim = out
        .positions
        .iter()
        .enumerate()
        .filter(|(_, p)| p.dist(&center) - radius <= d.r_c)
        .map(|(i, _)| NodeId::from(i))
        .collect();
    out.faults.push(FaultRecord::CoverageHole {
        center,
        radius,
        removed,
        rim,
    });
    Ok(out)
}

/// Records a wormhole between the vicinities of `p1` and `p2`. The two
/// vicinity disks of radius `r_w` must be disjoint and non-empty.
pub fn inject_wormhole(d: &Deployment, p1: Point, p2: Point, r_w: f64) -> Result<Deployment> {
    if !(r_w > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "vicinity radius must be positive, got {r_w}"
        )));
    }
    if p1.dist(&p2) <= 2.0 * r_w {
        return Err(Error::InvalidParameter(
            "wormhole vicinities overlap".into(),
        ));
    }
    let v1 = d.nodes_in_disk(p1, r_w);
    let v2 = d.nodes_in_disk(p2, r_w);
    if v1.is_empty() || v2.is_empty() {
        return Err(Error::InvalidParameter(
            "wormhole vicinity contains no node".into(),
        ));
    }
    let mut out = d.clone();
    out.faults.push(FaultRecord::Wormhole {
        p1,
        p2,
        r_w,
        v1,
        v2,
    });
    Ok(out)
}

/// Raster estimate of the coverage holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageTruth {
    pub holes: usize,
    /// For each interior uncovered component, the nodes whose sensing disk
    /// borders it.
    pub rims: Vec<Vec<NodeId>>,
    pub cell: f64,
}

/// Rasterizes the sensing disks and counts uncovered 4-connected components
/// that do not reach the raster border. `cell` defaults to `r_s / 8` and may
/// not exceed `r_s / 4`.
pub fn coverage_ground_truth(d: &Deployment, cell: Option<f64>) -> Result<CoverageTruth> {
    let cell = cell.unwrap_or(d.r_s / 8.0);
    let limit = d.r_s / 4.0;
    if !(cell > 0.0) || cell > limit {
        return Err(Error::RasterTooCoarse { cell, limit });
    }
    let margin = d.r_s + 2.0 * cell;
    let origin = -margin;
    let side = ((1.0 + 2.0 * margin) / cell).ceil() as usize + 1;
    let center_of = |i: usize| origin + (i as f64 + 0.5) * cell;
    let mut covered = vec![false; side * side];
    let r2 = d.r_s * d.r_s;
    for p in &d.positions {
        let lo_x = (((p.x - d.r_s - origin) / cell).floor().max(0.0)) as usize;
        let hi_x = ((((p.x + d.r_s - origin) / cell).ceil()) as usize).min(side - 1);
        let lo_y = (((p.y - d.r_s - origin) / cell).floor().max(0.0)) as usize;
        let hi_y = ((((p.y + d.r_s - origin) / cell).ceil()) as usize).min(side - 1);
        for iy in lo_y..=hi_y {
            for ix in lo_x..=hi_x {
                let q = Point::new(center_of(ix), center_of(iy));
                if q.dist2(p) <= r2 {
                    covered[iy * side + ix] = true;
                }
            }
        }
    }

    let mut label = vec![usize::MAX; side * side];
    let mut rims = Vec::new();
    let mut next = 0;
    for start in 0..side * side {
        if covered[start] || label[start] != usize::MAX {
            continue;
        }
        let mut touches_border = false;
        let mut cells = Vec::new();
        let mut queue = VecDeque::from([start]);
        label[start] = next;
        while let Some(c) = queue.pop_front() {
            cells.push(c);
            let (ix, iy) = (c % side, c / side);
            if ix == 0 || iy == 0 || ix == side - 1 || iy == side - 1 {
                touches_border = true;
            }
            let mut push = |nc: usize| {
                if !covered[nc] && label[nc] == usize::MAX {
                    label[nc] = next;
                    queue.push_back(nc);
                }
            };
            if ix > 0 {
                push(c - 1);
            }
            if ix + 1 < side {
                push(c + 1);
            }
            if iy > 0 {
                push(c - side);
            }
            if iy + 1 < side {
                push(c + side);
            }
        }
        next += 1;
        if touches_border {
            continue;
        }
        let reach = d.r_s + cell * std::f64::consts::SQRT_2;
        let rim = d
            .positions
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                cells
                    .iter()
                    .any(|&c| Point::new(center_of(c % side), center_of(c / side)).dist(p) <= reach)
            })
            .map(|(i, _)| NodeId::from(i))
            .collect();
        rims.push(rim);
    }
    Ok(CoverageTruth {
        holes: rims.len(),
        rims,
        cell,
    })
}

/// Positions plus edges, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentExport {
    pub r_c: f64,
    pub r_s: f64,
    pub positions: Vec<Point>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub faults: Vec<FaultRecord>,
}

impl DeploymentExport {
    pub fn new(d: &Deployment, g: &CommGraph) -> Self {
        DeploymentExport {
            r_c: d.r_c,
            r_s: d.r_s,
            positions: d.positions.clone(),
            edges: g.edges(),
            faults: d.faults.clone(),
        }
    }
}
