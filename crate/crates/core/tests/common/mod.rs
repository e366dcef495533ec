#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use ripsnet::complex::{exact::q, Chain, Laplacian1, RipsComplex};
use ripsnet::deploy::{build_comm_graph, Deployment, Point, Sampler};
use ripsnet::{CommGraph, NodeId};
use serde::Deserialize;

#[derive(Deserialize)]
pub struct WorkedExample {
    pub vertices: Vec<String>,
    pub edges: BTreeMap<String, [String; 2]>,
    pub triangles: BTreeMap<String, [String; 3]>,
    pub chains: BTreeMap<String, Vec<(String, i64)>>,
    pub expected: Expected,
}

#[derive(Deserialize)]
pub struct Expected {
    pub betti1: usize,
    pub dim_ker_d1: usize,
    pub rank_d2: usize,
}

impl WorkedExample {
    pub fn load() -> Self {
        serde_json::from_str(include_str!("../fixtures/worked_example.json")).unwrap()
    }

    /// `V1..V8` map to ids `0..7`.
    pub fn id(&self, name: &str) -> NodeId {
        NodeId(self.vertices.iter().position(|v| v == name).unwrap() as u32)
    }

    pub fn graph(&self) -> CommGraph {
        CommGraph::from_edges(
            self.vertices.len(),
            self.edges
                .values()
                .map(|[a, b]| (self.id(a).index(), self.id(b).index())),
        )
    }

    pub fn complex(&self) -> RipsComplex {
        RipsComplex::from_simplices(
            (0..self.vertices.len() as u32).map(NodeId).collect(),
            self.edges
                .values()
                .map(|[a, b]| [self.id(a), self.id(b)])
                .collect(),
            self.triangles
                .values()
                .map(|[a, b, c]| [self.id(a), self.id(b), self.id(c)])
                .collect(),
        )
    }

    /// A chain written in the figure's edge labels and orientations.
    pub fn chain(&self, x: &RipsComplex, name: &str) -> Chain {
        let mut c = Chain::zero(1);
        for (label, sign) in &self.chains[name] {
            let [a, b] = &self.edges[label];
            let e = Chain::edge(x, self.id(a), self.id(b)).unwrap();
            c = c + e.scale(&q(*sign));
        }
        c
    }
}

pub fn cycle_graph(n: usize) -> CommGraph {
    CommGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn complete_graph(n: usize) -> CommGraph {
    CommGraph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
}

/// Random unit-disk graph in the unit square.
pub fn unit_disk(n: usize, r_c: f64, seed: u64) -> CommGraph {
    let d = Deployment::generate(n, r_c, r_c * 0.6, seed, &Sampler::Uniform).unwrap();
    build_comm_graph(&d)
}

/// Regular grid of `side x side` nodes with `r_c = factor` spacings.
pub fn grid(side: usize, factor: f64) -> Deployment {
    let s = 1.0 / side as f64;
    Deployment::generate(
        side * side,
        factor * s,
        factor * s * 0.6,
        0,
        &Sampler::Grid {
            cols: side,
            rows: side,
        },
    )
    .unwrap()
}

pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

pub fn dense(l: &Laplacian1) -> DMatrix<f64> {
    let d = l.to_dense();
    DMatrix::from_fn(l.dim(), l.dim(), |i, j| d[i][j])
}

/// Eigenvalues in ascending order.
pub fn eigenvalues(l: &Laplacian1) -> Vec<f64> {
    let mut ev: Vec<f64> = dense(l)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

pub const SIDE: usize = 20;
pub const S: f64 = 1.0 / SIDE as f64;

/// 20x20 grid, `r_c = 1.6 s`, `r_s = 0.95 s`.
pub fn dense_grid() -> Deployment {
    Deployment::generate(
        SIDE * SIDE,
        1.6 * S,
        0.95 * S,
        0,
        &Sampler::Grid {
            cols: SIDE,
            rows: SIDE,
        },
    )
    .unwrap()
}

/// Dense grid with a hole of radius `3 s`, centre moving with `k`.
pub fn grid_hole(k: usize) -> Deployment {
    let c = pt(0.3 + 0.05 * k as f64, 0.35 + 0.04 * k as f64);
    ripsnet::deploy::inject_hole(&dense_grid(), c, 3.0 * S).unwrap()
}

/// Dense grid with a wormhole of radius `s`; endpoints move with `k`.
pub fn grid_wormhole(k: usize) -> Deployment {
    let p1 = pt(0.2 + 0.02 * k as f64, 0.25);
    let p2 = pt(0.75, 0.7 + 0.02 * k as f64);
    ripsnet::deploy::inject_wormhole(&dense_grid(), p1, p2, S).unwrap()
}

/// Rim-set hop distance of every node, over the whole graph.
pub fn hops_from(g: &CommGraph, set: &[NodeId]) -> Vec<Option<usize>> {
    g.bfs_within(&vec![true; g.node_count()], set)
}
