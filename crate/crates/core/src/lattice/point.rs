use std::fmt;

use serde::{Deserialize, Serialize};

/// A site `(i1, i2)` of the square lattice; `i1` is the column, `i2` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub i1: i64,
    pub i2: i64,
}

impl LatticePoint {
    pub const fn new(i1: i64, i2: i64) -> Self {
        Self { i1, i2 }
    }

    pub fn chebyshev(self, other: LatticePoint) -> u64 {
        self.i1.abs_diff(other.i1).max(self.i2.abs_diff(other.i2))
    }

    /// Both coordinates even, i.e. the site lies on the weak sublattice `(2Z)^2`.
    pub fn is_even_site(self) -> bool {
        self.i1.rem_euclid(2) == 0 && self.i2.rem_euclid(2) == 0
    }

    /// The four axis neighbours: right, left, up, down.
    pub fn neighbors4(self) -> [LatticePoint; 4] {
        [
            Self::new(self.i1 + 1, self.i2),
            Self::new(self.i1 - 1, self.i2),
            Self::new(self.i1, self.i2 + 1),
            Self::new(self.i1, self.i2 - 1),
        ]
    }

    pub fn translate(self, d1: i64, d2: i64) -> Self {
        Self::new(self.i1 + d1, self.i2 + d2)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i1, self.i2)
    }
}

impl From<(i64, i64)> for LatticePoint {
    fn from((i1, i2): (i64, i64)) -> Self {
        Self::new(i1, i2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BondKind {
    Strong,
    Weak,
    NotNeighbors,
}

/// Classifies the pair `(i, j)`. Axis-adjacent pairs share one coordinate; the bond is
/// strong when that shared coordinate is odd and weak when it is even.
pub fn bond_kind(i: LatticePoint, j: LatticePoint) -> BondKind {
    let shared = if i.i1 == j.i1 && i.i2.abs_diff(j.i2) == 1 {
        i.i1
    } else if i.i2 == j.i2 && i.i1.abs_diff(j.i1) == 1 {
        i.i2
    } else {
        return BondKind::NotNeighbors;
    };
    if shared.rem_euclid(2) == 1 {
        BondKind::Strong
    } else {
        BondKind::Weak
    }
}
