//! Chebyshev (`l^inf`) distances between sites and sets.
//!
//! Single queries use an expanding-ring search; whole-set queries use a two-pass
//! distance transform with the 3x3 unit mask, which is exact for the chessboard metric.

use super::point::LatticePoint;
use super::set::{BBox, DiscreteSet};
use crate::error::{Error, Result};

/// Smallest `r >= 1` such that the ring of radius `r` around `p` contains a site satisfying
/// `hit`, searching up to `max_radius`. Returns 0 if `p` itself satisfies `hit`.
pub fn ring_distance(
    p: LatticePoint,
    max_radius: u64,
    mut hit: impl FnMut(LatticePoint) -> bool,
) -> Option<u64> {
    if hit(p) {
        return Some(0);
    }
    for r in 1..=max_radius as i64 {
        for d in -r..=r {
            let ring = [
                p.translate(d, -r),
                p.translate(d, r),
                p.translate(-r, d),
                p.translate(r, d),
            ];
            if ring.into_iter().any(&mut hit) {
                return Some(r as u64);
            }
        }
    }
    None
}

/// `dist_inf(p, Z^2 \ set)`. Always finite; zero when `p` is not in the set.
pub fn distance_to_complement(p: LatticePoint, set: &DiscreteSet) -> u64 {
    let Some(b) = set.bbox() else { return 0 };
    let bound = (b.width().max(b.height()) + 1) as u64;
    ring_distance(p, bound, |q| !set.contains(q)).expect("complement is within one box diameter")
}

/// `dist_inf(p, set)`. Errors on an empty target.
pub fn distance_to_set(p: LatticePoint, set: &DiscreteSet) -> Result<u64> {
    let Some(b) = set.bbox() else {
        return Err(Error::EmptyTarget(p));
    };
    let b = b.include(p);
    let bound = b.width().max(b.height()) as u64;
    Ok(ring_distance(p, bound, |q| set.contains(q)).expect("target lies inside the joint box"))
}

/// Chebyshev distance to a seed set, tabulated over a box.
#[derive(Debug, Clone)]
pub struct DistanceField {
    region: BBox,
    dist: Vec<u32>,
}

impl DistanceField {
    /// Distance from every site of `region` to the nearest site with `seed(p) == true`.
    /// Seeds must exist in `region`, and `region` must contain every seed that matters
    /// (distances are geodesic inside the box, which equals Chebyshev for a box).
    fn from_seeds(region: BBox, mut seed: impl FnMut(LatticePoint) -> bool) -> Self {
        const INF: u32 = u32::MAX / 2;
        let (w, h) = (region.width(), region.height());
        let mut dist = vec![INF; region.area()];
        for (idx, d) in dist.iter_mut().enumerate() {
            if seed(region.point(idx)) {
                *d = 0;
            }
        }
        let at = |x: usize, y: usize| x * h + y;
        // forward pass: neighbours already visited in column-major order
        for x in 0..w {
            for y in 0..h {
                let mut best = dist[at(x, y)];
                if best == 0 {
                    continue;
                }
                if y > 0 {
                    best = best.min(dist[at(x, y - 1)] + 1);
                }
                if x > 0 {
                    best = best.min(dist[at(x - 1, y)] + 1);
                    if y > 0 {
                        best = best.min(dist[at(x - 1, y - 1)] + 1);
                    }
                    if y + 1 < h {
                        best = best.min(dist[at(x - 1, y + 1)] + 1);
                    }
                }
                dist[at(x, y)] = best;
            }
        }
        for x in (0..w).rev() {
            for y in (0..h).rev() {
                let mut best = dist[at(x, y)];
                if best == 0 {
                    continue;
                }
                if y + 1 < h {
                    best = best.min(dist[at(x, y + 1)] + 1);
                }
                if x + 1 < w {
                    best = best.min(dist[at(x + 1, y)] + 1);
                    if y + 1 < h {
                        best = best.min(dist[at(x + 1, y + 1)] + 1);
                    }
                    if y > 0 {
                        best = best.min(dist[at(x + 1, y - 1)] + 1);
                    }
                }
                dist[at(x, y)] = best;
            }
        }
        Self { region, dist }
    }

    /// Distance of each member of `set` to the complement of `set`.
    pub fn to_complement(set: &DiscreteSet) -> Option<Self> {
        let region = set.bbox()?.expand(1);
        Some(Self::from_seeds(region, |p| !set.contains(p)))
    }

    /// Distance to `set` over `region`, which is enlarged to cover the set.
    pub fn to_set(set: &DiscreteSet, region: BBox) -> Option<Self> {
        let region = region.union(&set.bbox()?);
        Some(Self::from_seeds(region, |p| set.contains(p)))
    }

    pub fn region(&self) -> BBox {
        self.region
    }

    /// Tabulated distance; `None` outside the region.
    #[inline]
    pub fn get(&self, p: LatticePoint) -> Option<u64> {
        self.region
            .contains(p)
            .then(|| self.dist[self.region.index(p)] as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(a: i64, b: i64) -> LatticePoint {
        LatticePoint::new(a, b)
    }

    #[test]
    fn square_depths() {
        let sq = DiscreteSet::rect(0, 4, 0, 4);
        assert_eq!(distance_to_complement(p(0, 0), &sq), 1);
        assert_eq!(distance_to_complement(p(1, 2), &sq), 2);
        assert_eq!(distance_to_complement(p(2, 2), &sq), 3);
        assert_eq!(distance_to_complement(p(9, 9), &sq), 0);
        let field = DistanceField::to_complement(&sq).unwrap();
        assert_eq!(field.get(p(2, 2)), Some(3));
        assert_eq!(field.get(p(-1, 0)), Some(0));
    }

    #[test]
    fn distance_to_set_and_empty_target() {
        let s = DiscreteSet::from_sites([p(0, 0)]);
        assert_eq!(distance_to_set(p(3, 0), &s).unwrap(), 3);
        assert_eq!(distance_to_set(p(-2, 5), &s).unwrap(), 5);
        assert!(matches!(
            distance_to_set(p(0, 0), &DiscreteSet::new()),
            Err(Error::EmptyTarget(_))
        ));
    }

    fn arb_set() -> impl Strategy<Value = DiscreteSet> {
        prop::collection::vec((-5i64..5, -5i64..5), 1..25)
            .prop_map(|v| v.into_iter().map(LatticePoint::from).collect())
    }

    proptest! {
        #[test]
        fn transform_matches_ring_search(s in arb_set()) {
            let inner = DistanceField::to_complement(&s).unwrap();
            let region = BBox::new(-8, 8, -8, 8);
            let outer = DistanceField::to_set(&s, region).unwrap();
            for q in region.points() {
                if s.contains(q) {
                    prop_assert_eq!(inner.get(q).unwrap(), distance_to_complement(q, &s));
                }
                prop_assert_eq!(outer.get(q).unwrap(), distance_to_set(q, &s).unwrap());
            }
        }
    }
}
