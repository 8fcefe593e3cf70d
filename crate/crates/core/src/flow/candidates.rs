//! Structured candidate sets, in coordinates where the current rectangle is `[0, n1] x [0, n2]`.

use super::extents::RectExtents;
use crate::error::Result;
use crate::lattice::{DiscreteSet, LatticePoint};

/// Bounds `(a1, b1, a2, b2)` of the shrunken core `[2h, n1 - 2h] x [2k, n2 - 2k]`; `None`
/// when they cross.
pub fn core_bounds(h: u64, k: u64, ext: &RectExtents) -> Option<(i64, i64, i64, i64)> {
    let (a1, b1) = (2 * h as i64, ext.n1 as i64 - 2 * h as i64);
    let (a2, b2) = (2 * k as i64, ext.n2 as i64 - 2 * k as i64);
    (a1 <= b1 && a2 <= b2).then_some((a1, b1, a2, b2))
}

/// Lattice points of the shrunken core `C(h, k)`.
pub fn core_rect(h: u64, k: u64, ext: &RectExtents) -> Result<DiscreteSet> {
    ext.check_index(h, k)?;
    Ok(match core_bounds(h, k, ext) {
        Some((a1, b1, a2, b2)) => DiscreteSet::rect(a1, b1, a2, b2),
        None => DiscreteSet::new(),
    })
}

/// `C(h, k)` plus every weak site of `prev`: the mushy layer is kept.
pub fn candidate_weak_retain(
    h: u64,
    k: u64,
    prev: &DiscreteSet,
    ext: &RectExtents,
) -> Result<DiscreteSet> {
    let core = core_rect(h, k, ext)?;
    Ok(core.union(&prev.filter(LatticePoint::is_even_site)))
}

/// Weak sites of `C(depth, depth)`, empty when the depth exceeds the rectangle.
pub fn island_layer(depth: u64, ext: &RectExtents) -> DiscreteSet {
    match core_bounds(depth, depth, ext) {
        Some((a1, b1, a2, b2)) => DiscreteSet::rect(a1, b1, a2, b2).filter(LatticePoint::is_even_site),
        None => DiscreteSet::new(),
    }
}

/// `C(s, t)` plus the weak sites of `C(N, N)`: only islands at depth at least `2N` survive.
pub fn candidate_weak_dissolve(s: u64, t: u64, ext: &RectExtents, n_ag: u64) -> Result<DiscreteSet> {
    let core = core_rect(s, t, ext)?;
    Ok(core.union(&island_layer(n_ag, ext)))
}
