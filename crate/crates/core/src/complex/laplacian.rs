use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{boundary_matrix, RipsComplex};
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// First combinatorial Laplacian `L1 = ∂2 ∂2ᵀ + ∂1ᵀ ∂1`, rows indexed by edge.
/// Stored as sorted sparse rows of exact integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Laplacian1 {
    rows: Vec<Vec<(usize, i64)>>,
    /// Edge labelling each row; seeds the per-edge start vector.
    labels: Vec<[NodeId; 2]>,
}

pub fn laplacian1(x: &RipsComplex) -> Result<Laplacian1> {
    if x.edges().is_empty() {
        return Err(Error::EmptyComplex);
    }
    let m = x.edges().len();
    let mut acc: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); m];

    // ∂1ᵀ∂1: edges sharing a vertex, through the vertex's row of ∂1
    let d1 = boundary_matrix(1, x);
    let mut by_vertex: Vec<Vec<(usize, i64)>> = vec![Vec::new(); d1.rows];
    for (e, col) in d1.cols.iter().enumerate() {
        for &(v, s) in col {
            by_vertex[v].push((e, s));
        }
    }
    for star in &by_vertex {
        for &(e, se) in star {
            for &(f, sf) in star {
                *acc[e].entry(f).or_default() += se * sf;
            }
        }
    }

    // ∂2∂2ᵀ: edges sharing a triangle
    for col in boundary_matrix(2, x).cols {
        for &(e, se) in &col {
            for &(f, sf) in &col {
                *acc[e].entry(f).or_default() += se * sf;
            }
        }
    }

    let rows = acc
        .into_iter()
        .map(|r| r.into_iter().filter(|&(_, v)| v != 0).collect())
        .collect();
    Ok(Laplacian1 {
        rows,
        labels: x.edges().to_vec(),
    })
}

impl Laplacian1 {
    /// Builds a matrix from sparse rows; used for synthetic operators in tests
    /// and for the scalar special cases.
    pub fn from_rows(rows: Vec<Vec<(usize, i64)>>) -> Self {
        let mut rows = rows;
        for r in &mut rows {
            r.sort_unstable();
        }
        let labels = (0..rows.len())
            .map(|i| [NodeId::from(i), NodeId::from(i)])
            .collect();
        Laplacian1 { rows, labels }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn label(&self, i: usize) -> [NodeId; 2] {
        self.labels[i]
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().all(|&(j, v)| self.get(j, i) == v))
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, r) in self.rows.iter().enumerate() {
            y[i] = r.iter().map(|&(j, v)| v as f64 * x[j]).sum();
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[i][j] = v as f64;
            }
        }
        m
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, v)| v.unsigned_abs() as f64).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
