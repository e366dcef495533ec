//! Rips complexes truncated at dimension 2 and the linear algebra on them.

mod boundary;
mod chain;
mod cycles;
pub mod exact;
mod homology;
mod laplacian;
mod spectral;

use serde::{Deserialize, Serialize};

use crate::graph::{CommGraph, NodeId, NodeSet};

pub use boundary::{boundary_matrix, BoundaryMatrix};
pub use chain::Chain;
pub use cycles::{shortest_nontrivial_cycle, H1Annotation};
pub use homology::{betti_exact, homologous_check, Betti, HomologyChecker};
pub use laplacian::{laplacian1, Laplacian1};
pub(crate) use spectral::spectral_tracker;
pub use spectral::{
    edge_start_value, power_iteration, rank_deficiency_test, rank_test_with_retry, start_vector,
    PowerConfig, PowerOutcome, SpectralVerdict, Verdict,
};

/// An oriented simplex of dimension 0, 1 or 2 in canonical (ascending) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplex {
    vertices: Vec<NodeId>,
}

impl Simplex {
    /// Canonicalizes an ordered vertex tuple. Returns the simplex and the sign
    /// of the permutation that sorts the tuple, or `None` if vertices repeat.
    pub fn oriented(vertices: &[NodeId]) -> Option<(Simplex, i8)> {
        assert!(
            !vertices.is_empty() && vertices.len() <= 3,
            "dimension must be 0, 1 or 2"
        );
        let mut v = vertices.to_vec();
        let mut sign = 1i8;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((Simplex { vertices: v }, sign))
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[NodeId] {
        &self.vertices
    }
}

/// Rips complex of a graph (or of the subgraph induced on a node set).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RipsComplex {
    vertices: Vec<NodeId>,
    edges: Vec<[NodeId; 2]>,
    triangles: Vec<[NodeId; 3]>,
}

pub fn build_rips(g: &CommGraph) -> RipsComplex {
    RipsComplex::from_graph(g)
}

impl RipsComplex {
    pub fn from_graph(g: &CommGraph) -> Self {
        let all: Vec<NodeId> = g.nodes().collect();
        Self::build(g, all, &vec![true; g.node_count()])
    }

    /// Complex of the subgraph induced on `nodes`.
    pub fn induced(g: &CommGraph, nodes: &NodeSet) -> Self {
        let mask = g.mask(nodes);
        Self::build(g, nodes.iter().copied().collect(), &mask)
    }

    fn build(g: &CommGraph, vertices: Vec<NodeId>, mask: &[bool]) -> Self {
        let mut edges = Vec::new();
        let mut triangles = Vec::new();
        for &a in &vertices {
            let na = g.neighbors(a);
            for &b in na.iter().filter(|&&b| b > a && mask[b.index()]) {
                edges.push([a, b]);
                // common neighbours above b, by merging two sorted lists
                let nb = g.neighbors(b);
                let (mut i, mut j) = (0, 0);
                while i < na.len() && j < nb.len() {
                    match na[i].cmp(&nb[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            let c = na[i];
                            if c > b && mask[c.index()] {
                                triangles.push([a, b, c]);
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
        }
        triangles.sort_unstable();
        RipsComplex {
            vertices,
            edges,
            triangles,
        }
    }

    /// Complex given directly by simplex lists; faces of every triangle must
    /// be listed among the edges.
    pub fn from_simplices(
        vertices: Vec<NodeId>,
        edges: Vec<[NodeId; 2]>,
        triangles: Vec<[NodeId; 3]>,
    ) -> Self {
        let mut vertices = vertices;
        vertices.sort_unstable();
        vertices.dedup();
        let mut edges: Vec<[NodeId; 2]> = edges
            .into_iter()
            .map(|[a, b]| if a < b { [a, b] } else { [b, a] })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut triangles: Vec<[NodeId; 3]> = triangles
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        triangles.sort_unstable();
        triangles.dedup();
        let x = RipsComplex {
            vertices,
            edges,
            triangles,
        };
        for e in &x.edges {
            assert!(
                x.vertex_index(e[0]).is_some() && x.vertex_index(e[1]).is_some(),
                "edge endpoint missing"
            );
        }
        for t in &x.triangles {
            for f in triangle_faces(*t) {
                assert!(
                    x.edge_index(f.0[0], f.0[1]).is_some(),
                    "triangle face missing"
                );
            }
        }
        x
    }

    pub fn vertices(&self) -> &[NodeId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[NodeId; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[NodeId; 3]] {
        &self.triangles
    }

    pub fn vertex_index(&self, v: NodeId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Column index of the edge `{a, b}` in either order.
    pub fn edge_index(&self, a: NodeId, b: NodeId) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edges.binary_search(&key).ok()
    }

    pub fn triangle_index(&self, mut t: [NodeId; 3]) -> Option<usize> {
        t.sort_unstable();
        self.triangles.binary_search(&t).ok()
    }

    pub fn simplices(&self, dim: usize) -> Vec<Simplex> {
        match dim {
            0 => self
                .vertices
                .iter()
                .map(|&v| Simplex { vertices: vec![v] })
                .collect(),
            1 => self
                .edges
                .iter()
                .map(|e| Simplex {
                    vertices: e.to_vec(),
                })
                .collect(),
            2 => self
                .triangles
                .iter()
                .map(|t| Simplex {
                    vertices: t.to_vec(),
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// The 1-skeleton as a graph over the same global ids.
    pub fn skeleton(&self, n: usize) -> CommGraph {
        CommGraph::from_edges(n, self.edges.iter().map(|e| (e[0].index(), e[1].index())))
    }

    pub fn export(&self) -> ComplexExport {
        ComplexExport {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            triangles: self.triangles.clone(),
        }
    }
}

/// Faces of a canonical triangle with their boundary signs:
/// `∂(a,b,c) = (b,c) − (a,c) + (a,b)`.
pub(crate) fn triangle_faces(t: [NodeId; 3]) -> [([NodeId; 2], i64); 3] {
    let [a, b, c] = t;
    [([b, c], 1), ([a, c], -1), ([a, b], 1)]
}

/// Simplex lists for debugging and plotting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexExport {
    pub vertices: Vec<NodeId>,
    pub edges: Vec<[NodeId; 2]>,
    pub triangles: Vec<[NodeId; 3]>,
}
