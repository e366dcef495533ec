use serde::{Deserialize, Serialize};

use super::exact::{from_integer_entries, Echelon};
use super::{boundary_matrix, Chain, RipsComplex};
use crate::error::{Error, Result};

/// Exact Betti numbers and the ranks they come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
    pub rank_d1: usize,
    pub rank_d2: usize,
    pub dim_ker_d1: usize,
}

impl Betti {
    pub fn is_contractible(&self) -> bool {
        self.b0 == 1 && self.b1 == 0
    }
}

/// β0 and β1 by exact rational elimination of `∂1` and `∂2`.
pub fn betti_exact(x: &RipsComplex) -> Betti {
    let echelon_of = |k: usize| {
        let d = boundary_matrix(k, x);
        let mut e = Echelon::new();
        for col in d.cols {
            e.insert(from_integer_entries(col));
        }
        e
    };
    let rank_d1 = echelon_of(1).rank();
    let rank_d2 = echelon_of(2).rank();
    let dim_ker_d1 = x.edges().len() - rank_d1;
    Betti {
        b0: x.vertices().len() - rank_d1,
        b1: dim_ker_d1 - rank_d2,
        rank_d1,
        rank_d2,
        dim_ker_d1,
    }
}

/// Reusable boundary-membership test against the column space of `∂2`.
pub struct HomologyChecker<'a> {
    x: &'a RipsComplex,
    d2: Echelon,
}

impl<'a> HomologyChecker<'a> {
    pub fn new(x: &'a RipsComplex) -> Self {
        let mut d2 = Echelon::new();
        for col in boundary_matrix(2, x).cols {
            d2.insert(from_integer_entries(col));
        }
        HomologyChecker { x, d2 }
    }

    fn require_cycle(&self, c: &Chain) -> Result<()> {
        if c.degree != 1 || !c.boundary(self.x).is_zero() {
            return Err(Error::NotACycle);
        }
        Ok(())
    }

    /// True iff the 1-cycle `c` bounds, i.e. lies in the image of `∂2`.
    pub fn is_boundary(&self, c: &Chain) -> Result<bool> {
        self.require_cycle(c)?;
        Ok(self.d2.contains(c.coeffs().clone()))
    }

    pub fn homologous(&self, c1: &Chain, c2: &Chain) -> Result<bool> {
        self.require_cycle(c1)?;
        self.require_cycle(c2)?;
        Ok(self.d2.contains((c1.clone() - c2.clone()).into_coeffs()))
    }
}

/// True iff `c1 − c2` is a sum of triangle boundaries. Both chains must be
/// 1-cycles.
pub fn homologous_check(c1: &Chain, c2: &Chain, x: &RipsComplex) -> Result<bool> {
    HomologyChecker::new(x).homologous(c1, c2)
}
