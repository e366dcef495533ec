use serde::{Deserialize, Serialize};

use super::{triangle_faces, RipsComplex};

/// Sparse boundary operator `∂_k`, stored by column. Entries are ±1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryMatrix {
    pub k: usize,
    pub rows: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

/// `∂_1` (vertices × edges) or `∂_2` (edges × triangles).
pub fn boundary_matrix(k: usize, x: &RipsComplex) -> BoundaryMatrix {
    match k {
        1 => {
            let cols = x
                .edges()
                .iter()
                .map(|&[a, b]| {
                    // ∂(a,b) = b − a
                    let ia = x.vertex_index(a).expect("edge endpoint is a vertex");
                    let ib = x.vertex_index(b).expect("edge endpoint is a vertex");
                    vec![(ia, -1), (ib, 1)]
                })
                .collect();
            BoundaryMatrix {
                k,
                rows: x.vertices().len(),
                cols,
            }
        }
        2 => {
            let cols = x
                .triangles()
                .iter()
                .map(|&t| {
                    let mut col: Vec<(usize, i64)> = triangle_faces(t)
                        .iter()
                        .map(|(e, s)| {
                            (
                                x.edge_index(e[0], e[1]).expect("triangle face is an edge"),
                                *s,
                            )
                        })
                        .collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            BoundaryMatrix {
                k,
                rows: x.edges().len(),
                cols,
            }
        }
        _ => panic!("boundary_matrix: k must be 1 or 2, got {k}"),
    }
}

impl BoundaryMatrix {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Dense copy, row-major; for tests and small oracles.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[i][j] += v;
            }
        }
        m
    }

    /// Applies the operator to a coefficient vector over the columns.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let mut y = vec![0; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            if x[j] != 0 {
                for &(i, v) in col {
                    y[i] += v * x[j];
                }
            }
        }
        y
    }
}
