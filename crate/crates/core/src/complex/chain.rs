use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use super::exact::{axpy_neg, q, SparseVec, Q};
use super::{boundary_matrix, RipsComplex};
use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Formal rational combination of `degree`-simplices, indexed by their column
/// position in a [`RipsComplex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub degree: usize,
    coeffs: SparseVec,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs<I>(degree: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, Q)>,
    {
        let mut c = Chain::zero(degree);
        for (i, x) in entries {
            c.add_term(i, x);
        }
        c
    }

    pub fn add_term(&mut self, index: usize, x: Q) {
        let slot = self.coeffs.entry(index).or_insert_with(Q::zero);
        *slot += x;
        if slot.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    /// The oriented edge `a → b`, i.e. `±` the canonical edge.
    pub fn edge(x: &RipsComplex, a: NodeId, b: NodeId) -> Result<Self> {
        let i = x
            .edge_index(a, b)
            .ok_or_else(|| Error::InvalidCycle(format!("({a}, {b}) is not an edge")))?;
        Ok(Chain::from_coeffs(1, [(i, q(if a < b { 1 } else { -1 }))]))
    }

    /// Sum of the oriented edges of the closed walk `v0 → v1 → … → v0`.
    pub fn from_closed_walk(x: &RipsComplex, walk: &[NodeId]) -> Result<Self> {
        let mut c = Chain::zero(1);
        for i in 0..walk.len() {
            let (a, b) = (walk[i], walk[(i + 1) % walk.len()]);
            c = c + Chain::edge(x, a, b)?;
        }
        Ok(c)
    }

    /// `∂` of the triangle `{a, b, c}` traversed as `a → b → c`.
    pub fn triangle(x: &RipsComplex, t: [NodeId; 3]) -> Result<Self> {
        let (s, sign) = super::Simplex::oriented(&t)
            .ok_or_else(|| Error::InvalidCycle("degenerate triangle".into()))?;
        let v = s.vertices();
        let i = x
            .triangle_index([v[0], v[1], v[2]])
            .ok_or_else(|| Error::InvalidCycle(format!("{t:?} is not a triangle")))?;
        Ok(Chain::from_coeffs(2, [(i, q(sign as i64))]))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &SparseVec {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> SparseVec {
        self.coeffs
    }

    pub fn get(&self, index: usize) -> Q {
        self.coeffs.get(&index).cloned().unwrap_or_else(Q::zero)
    }

    pub fn boundary(&self, x: &RipsComplex) -> Chain {
        if self.degree == 0 {
            return Chain::zero(0);
        }
        let d = boundary_matrix(self.degree, x);
        let mut out = Chain::zero(self.degree - 1);
        for (&j, c) in &self.coeffs {
            for &(i, s) in &d.cols[j] {
                out.add_term(i, c * q(s));
            }
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Chain {
        if s.is_zero() {
            return Chain::zero(self.degree);
        }
        Chain {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(&i, x)| (i, x * s)).collect(),
        }
    }
}

impl Add for Chain {
    type Output = Chain;
    fn add(mut self, rhs: Chain) -> Chain {
        assert_eq!(self.degree, rhs.degree, "adding chains of different degree");
        axpy_neg(&mut self.coeffs, &q(-1), &rhs.coeffs);
        self
    }
}

impl Sub for Chain {
    type Output = Chain;
    fn sub(mut self, rhs: Chain) -> Chain {
        assert_eq!(
            self.degree, rhs.degree,
            "subtracting chains of different degree"
        );
        axpy_neg(&mut self.coeffs, &q(1), &rhs.coeffs);
        self
    }
}

impl Neg for Chain {
    type Output = Chain;
    fn neg(self) -> Chain {
        self.scale(&q(-1))
    }
}
