//! Exact sparse linear algebra over the rationals.
//!
//! Columns are kept in echelon form keyed by their largest nonzero row
//! ("low"), the same bookkeeping used by boundary-matrix reduction in
//! persistent homology. Ranks, span membership and the quotient maps used by
//! homology annotations are all derived from it.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// Sparse vector: row index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Q>;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// `v -= c * w`, dropping entries that cancel.
pub fn axpy_neg(v: &mut SparseVec, c: &Q, w: &SparseVec) {
    for (r, x) in w {
        let delta = c * x;
        match v.get_mut(r) {
            Some(slot) => {
                *slot -= delta;
                if slot.is_zero() {
                    v.remove(r);
                }
            }
            None => {
                v.insert(*r, -delta);
            }
        }
    }
}

/// Integer column (entries from a boundary or Laplacian matrix) as a rational
/// sparse vector.
pub fn from_integer_entries<I>(entries: I) -> SparseVec
where
    I: IntoIterator<Item = (usize, i64)>,
{
    let mut v = SparseVec::new();
    for (r, x) in entries {
        if x == 0 {
            continue;
        }
        let slot = v.entry(r).or_insert_with(Q::zero);
        *slot += q(x);
        if slot.is_zero() {
            v.remove(&r);
        }
    }
    v
}

/// Column-echelon basis of a growing set of vectors.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    /// low row -> column with coefficient 1 at that row
    pivots: HashMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_pivot(&self, row: usize) -> bool {
        self.pivots.contains_key(&row)
    }

    /// Eliminates leading entries of `v` against the basis. The result is zero
    /// iff `v` lies in the span.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some((&low, c)) = v.last_key_value() {
            match self.pivots.get(&low) {
                Some(p) => {
                    let c = c.clone();
                    axpy_neg(&mut v, &c, p);
                }
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the basis; returns false if it was already in the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        match v.last_key_value() {
            None => false,
            Some((&low, c)) => {
                let inv = c.recip();
                let v = v.into_iter().map(|(r, x)| (r, x * &inv)).collect();
                self.pivots.insert(low, v);
                true
            }
        }
    }

    /// Pivot columns fully back-substituted so that each one has a single
    /// pivot entry (its low) and otherwise only non-pivot rows.
    pub fn reduced_pivots(&self) -> BTreeMap<usize, SparseVec> {
        let mut lows: Vec<usize> = self.pivots.keys().copied().collect();
        lows.sort_unstable();
        let mut done: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for low in lows {
            let mut v = self.pivots[&low].clone();
            loop {
                let next = v
                    .range(..low)
                    .rev()
                    .find(|(r, _)| done.contains_key(r))
                    .map(|(r, c)| (*r, c.clone()));
                match next {
                    Some((r, c)) => axpy_neg(&mut v, &c, &done[&r]),
                    None => break,
                }
            }
            done.insert(low, v);
        }
        done
    }
}

/// Rank over the rationals of the given columns.
pub fn rank<I>(columns: I) -> usize
where
    I: IntoIterator<Item = SparseVec>,
{
    let mut e = Echelon::new();
    for c in columns {
        e.insert(c);
    }
    e.rank()
}

/// Least common multiple of denominators, used to scale rational vectors to
/// integers.
pub fn denominator_lcm<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a Q>,
{
    let mut l = BigInt::one();
    for v in values {
        let d = v.denom().abs();
        let g = num_integer_gcd(&l, &d);
        l = &l / &g * d;
    }
    l
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}
