//! Direct lattice evaluation of the normalized step energy of structured candidates.
//!
//! A candidate agrees with the previous set everywhere inside the open core, so only the
//! frame between the core and the previous rectangle (plus the islands outside it) can carry
//! cut bonds that differ or removed sites. The evaluator walks exactly those sites and
//! classifies every bond with [`bond_kind`]; depths come from a distance transform of the
//! previous set.

use num_traits::Zero;

use super::candidates::core_bounds;
use super::extents::RectExtents;
use crate::error::{Error, Result};
use crate::lattice::{
    bond_kind, perimeter_energy, step_energy, BondKind, DiscreteSet, DistanceField, EnergyWeights,
    LatticePoint, Params,
};
use crate::rational::Rational;

/// Which weak sites a candidate keeps besides its core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Every weak site of the previous set.
    Retain,
    /// The weak sites of `C(depth, depth)`; everything else dissolves.
    Dissolve { depth: u64 },
}

/// Integer ingredients of `E(I, prev) - F(prev)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct DeltaCounts {
    pub strong: i64,
    pub weak: i64,
    pub dissipation: u64,
}

impl DeltaCounts {
    /// `(E(I, prev) - F(prev)) / eps`.
    pub fn normalized(&self, w: &EnergyWeights, eps: &Rational) -> Rational {
        let z = |v: i64| Rational::from_integer(v.into());
        (&w.strong * z(self.strong)
            + &w.weak * z(self.weak)
            + &w.dissipation * Rational::from_integer(self.dissipation.into()))
            / eps
    }
}

/// Evaluates candidates against a fixed previous set, given in coordinates where the current
/// rectangle is `[0, n1] x [0, n2]`.
pub struct DirectEvaluator<'a> {
    prev: &'a DiscreteSet,
    ext: &'a RectExtents,
    depth: DistanceField,
    outside: Vec<LatticePoint>,
}

impl<'a> DirectEvaluator<'a> {
    pub fn new(prev: &'a DiscreteSet, ext: &'a RectExtents) -> Result<Self> {
        let depth = DistanceField::to_complement(prev).ok_or(Error::EmptyRect)?;
        let rect = (ext.n1 as i64, ext.n2 as i64);
        let outside = prev
            .iter()
            .filter(|p| !(0..=rect.0).contains(&p.i1) || !(0..=rect.1).contains(&p.i2))
            .collect();
        Ok(Self { prev, ext, depth, outside })
    }

    fn member(&self, p: LatticePoint, core: Option<(i64, i64, i64, i64)>, layer: Option<(i64, i64, i64, i64)>, family: Family) -> bool {
        let inside = |b: Option<(i64, i64, i64, i64)>| {
            b.is_some_and(|(a1, b1, a2, b2)| (a1..=b1).contains(&p.i1) && (a2..=b2).contains(&p.i2))
        };
        if inside(core) {
            return true;
        }
        if !p.is_even_site() {
            return false;
        }
        match family {
            Family::Retain => self.prev.contains(p),
            Family::Dissolve { .. } => inside(layer),
        }
    }

    /// Integer deltas for the candidate `core(h, k)` of the given family.
    pub fn counts(&self, h: u64, k: u64, family: Family) -> Result<DeltaCounts> {
        self.ext.check_index(h, k)?;
        Ok(self.counts_with(core_bounds(h, k, self.ext), family))
    }

    /// Integer deltas for the candidate without a core: the rectangle is removed and only the
    /// family's weak sites remain.
    pub fn empty_counts(&self, family: Family) -> DeltaCounts {
        self.counts_with(None, family)
    }

    fn counts_with(&self, core: Option<(i64, i64, i64, i64)>, family: Family) -> DeltaCounts {
        let layer = match family {
            Family::Retain => None,
            Family::Dissolve { depth } => core_bounds(depth, depth, self.ext),
        };
        let mut d = DeltaCounts::default();
        let mut visit = |p: LatticePoint| {
            let in_prev = self.prev.contains(p);
            let in_new = self.member(p, core, layer, family);
            debug_assert!(in_prev || !in_new, "candidates never add sites");
            for q in p.neighbors4() {
                let sign = match (in_new && !self.member(q, core, layer, family), in_prev && !self.prev.contains(q)) {
                    (true, false) => 1,
                    (false, true) => -1,
                    _ => continue,
                };
                match bond_kind(p, q) {
                    BondKind::Strong => d.strong += sign,
                    BondKind::Weak => d.weak += sign,
                    BondKind::NotNeighbors => unreachable!(),
                }
            }
            if in_prev && !in_new {
                d.dissipation += self.depth.get(p).expect("prev sites lie in the field");
            }
        };
        let (n1, n2) = (self.ext.n1 as i64, self.ext.n2 as i64);
        // Open interior of the core, where nothing changes.
        let (ia1, ib1, ia2, ib2) = match core {
            Some((a1, b1, a2, b2)) => (a1 + 1, b1 - 1, a2 + 1, b2 - 1),
            None => (1, 0, 1, 0),
        };
        for i1 in 0..=n1 {
            if ia1 <= i1 && i1 <= ib1 && ia2 <= ib2 {
                for i2 in (0..ia2).chain(ib2 + 1..=n2) {
                    visit(LatticePoint::new(i1, i2));
                }
            } else {
                for i2 in 0..=n2 {
                    visit(LatticePoint::new(i1, i2));
                }
            }
        }
        for &p in &self.outside {
            visit(p);
        }
        d
    }

    pub fn value(&self, h: u64, k: u64, family: Family, p: &Params, w: &EnergyWeights) -> Result<Rational> {
        Ok(self.counts(h, k, family)?.normalized(w, &p.eps))
    }

    pub fn empty_value(&self, family: Family, p: &Params, w: &EnergyWeights) -> Rational {
        self.empty_counts(family).normalized(w, &p.eps)
    }
}

/// Counts of the candidate without a core, in closed form, for a previous set made of the
/// rectangle `[0, n1] x [0, n2]` and `islands` weak sites outside it. Agrees with
/// [`DirectEvaluator::empty_counts`] at a cost independent of the area.
pub fn rect_empty_counts(ext: &RectExtents, family: Family, islands: usize) -> DeltaCounts {
    let (n1, n2) = (ext.n1 as i64, ext.n2 as i64);
    let islands = islands as i64;
    // even integers in [lo, hi]
    let evens = |lo: i64, hi: i64| if lo > hi { 0 } else { hi.div_euclid(2) - (lo + 1).div_euclid(2) + 1 };
    // sites and weak sites whose Chebyshev depth exceeds t
    let all_at = |t: i64| (n1 - 2 * t + 1).max(0) * (n2 - 2 * t + 1).max(0);
    let weak_at = |t: i64| evens(t, n1 - t) * evens(t, n2 - t);
    let reach = n1.min(n2) / 2;
    let depth_all: i64 = (0..=reach).map(all_at).sum();
    let depth_weak: i64 = (0..=reach).map(weak_at).sum();
    let boundary_strong = n1 + n2;
    let boundary_weak = n1 + n2 + 4;
    let (kept, kept_depth, removed_islands) = match family {
        Family::Retain => (weak_at(0), depth_weak, 0),
        Family::Dissolve { depth } => {
            let d = 2 * depth as i64;
            if d > reach {
                (0, 0, islands)
            } else {
                let below: i64 = d * weak_at(d);
                let above: i64 = (d..=reach).map(weak_at).sum();
                (weak_at(d), below + above, islands)
            }
        }
    };
    let removed_depth = match family {
        Family::Retain => depth_all - depth_weak,
        Family::Dissolve { .. } => depth_all - kept_depth + removed_islands,
    };
    DeltaCounts {
        strong: -boundary_strong,
        weak: 4 * kept - boundary_weak - 4 * removed_islands,
        dissipation: removed_depth as u64,
    }
}

/// `(E(candidate, prev) - F(prev)) / eps` computed on materialized sets with the generic
/// lattice energies. Slow; used as the reference for the frame evaluator and the closed forms.
pub fn materialized_value(candidate: &DiscreteSet, prev: &DiscreteSet, p: &Params) -> Result<Rational> {
    if prev.is_empty() && candidate.is_empty() {
        return Ok(Rational::zero());
    }
    let e = step_energy(candidate, prev, p)?;
    Ok((e.0 - perimeter_energy(prev, p).0) / &p.eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::candidates::{candidate_weak_dissolve, candidate_weak_retain};
    use crate::rational::{int, rat};

    #[test]
    fn frame_walk_matches_materialized_sets() {
        let p = Params::with_gamma(rat(1, 3), int(1), rat(1, 10), rat(3, 2)).unwrap();
        let w = EnergyWeights::new(&p);
        let ext = RectExtents::exact(12, 16);
        let rect = DiscreteSet::rect(0, 12, 0, 16);
        // previous islands sitting outside the rectangle
        let prev = rect.union(&DiscreteSet::from_sites([LatticePoint::new(-2, 4), LatticePoint::new(14, 18)]));
        let ev = DirectEvaluator::new(&prev, &ext).unwrap();
        for h in 0..=3 {
            for k in 0..=4 {
                let cand = candidate_weak_retain(h, k, &prev, &ext).unwrap();
                assert_eq!(
                    ev.value(h, k, Family::Retain, &p, &w).unwrap(),
                    materialized_value(&cand, &prev, &p).unwrap(),
                    "retain ({h}, {k})"
                );
                let cand = candidate_weak_dissolve(h, k, &ext, 2).unwrap();
                assert_eq!(
                    ev.value(h, k, Family::Dissolve { depth: 2 }, &p, &w).unwrap(),
                    materialized_value(&cand, &prev, &p).unwrap(),
                    "dissolve ({h}, {k})"
                );
            }
        }
        let evens = prev.filter(LatticePoint::is_even_site);
        assert_eq!(ev.empty_value(Family::Retain, &p, &w), materialized_value(&evens, &prev, &p).unwrap());
        let layer = crate::flow::island_layer(2, &ext);
        assert_eq!(
            ev.empty_value(Family::Dissolve { depth: 2 }, &p, &w),
            materialized_value(&layer, &prev, &p).unwrap()
        );
    }

    #[test]
    fn empty_core_counts_in_closed_form() {
        for n1 in (0..=14).step_by(2) {
            for n2 in (0..=10).step_by(2) {
                let ext = RectExtents::exact(n1, n2);
                let rect = DiscreteSet::rect(0, n1 as i64, 0, n2 as i64);
                let islands = DiscreteSet::from_sites([
                    LatticePoint::new(-2, 0),
                    LatticePoint::new(n1 as i64 + 2, 2),
                    LatticePoint::new(4, -4),
                ]);
                for (prev, count) in [(rect.clone(), 0), (rect.union(&islands), 3)] {
                    let ev = DirectEvaluator::new(&prev, &ext).unwrap();
                    let families = [Family::Retain, Family::Dissolve { depth: 0 }, Family::Dissolve { depth: 1 },
                        Family::Dissolve { depth: 2 }, Family::Dissolve { depth: 4 }];
                    for f in families {
                        assert_eq!(rect_empty_counts(&ext, f, count), ev.empty_counts(f), "{n1}x{n2} {f:?} {count}");
                    }
                }
            }
        }
    }
}
