//! Integer tables and the two enumeration strategies over subsets of a small site list.

use std::sync::atomic::{AtomicI64, AtomicU64, Ordering};

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    bond_kind, distance_to_complement, distance_to_set, BondKind, DiscreteSet, EnergyWeights,
    LatticePoint, Params,
};
use crate::rational::Rational;

/// The sites a minimizer may use, with everything the energy of a subset mask needs.
///
/// For a mask `S` the step energy is `(A s + B w + C d) / den`, where `s` and `w` count the
/// strong and weak cut bonds and `d` is the dissipation sum.
pub struct SearchSpace {
    pub sites: Vec<LatticePoint>,
    /// Mask of the previous set.
    pub prev_mask: u64,
    strong_nbr: Vec<u64>,
    weak_nbr: Vec<u64>,
    /// Bonds to neighbours outside the search space (always cut when the site is kept).
    strong_out: Vec<i64>,
    weak_out: Vec<i64>,
    /// Depth in the previous set for its sites, distance to it for the others.
    cost: Vec<i64>,
    coef: (i64, i64, i64),
    den: Rational,
}

/// Sites of `prev` plus every site within Chebyshev distance `collar` of it.
pub fn search_sites(prev: &DiscreteSet, collar: u32) -> DiscreteSet {
    let Some(bbox) = prev.bbox() else {
        return DiscreteSet::new();
    };
    let c = i64::from(collar);
    let region = bbox.expand(c);
    DiscreteSet::from_predicate(region, |p| {
        prev.contains(p)
            || (c > 0 && (-c..=c).any(|d1| (-c..=c).any(|d2| prev.contains(p.translate(d1, d2)))))
    })
}

impl SearchSpace {
    pub fn new(prev: &DiscreteSet, collar: u32, p: &Params, max_sites: usize) -> Result<Self> {
        let space = search_sites(prev, collar);
        if space.len() > max_sites.min(63) {
            return Err(Error::SearchSpaceTooLarge { sites: space.len(), limit: max_sites.min(63) });
        }
        let sites = space.to_vec();
        let index = |q: LatticePoint| sites.iter().position(|&s| s == q);
        let n = sites.len();
        let mut me = Self {
            prev_mask: 0,
            strong_nbr: vec![0; n],
            weak_nbr: vec![0; n],
            strong_out: vec![0; n],
            weak_out: vec![0; n],
            cost: vec![0; n],
            coef: (0, 0, 0),
            den: Rational::from_integer(1.into()),
            sites: Vec::new(),
        };
        for (i, &s) in sites.iter().enumerate() {
            if prev.contains(s) {
                me.prev_mask |= 1 << i;
                me.cost[i] = distance_to_complement(s, prev) as i64;
            } else {
                me.cost[i] = distance_to_set(s, prev)? as i64;
            }
            for q in s.neighbors4() {
                let strong = bond_kind(s, q) == BondKind::Strong;
                match (index(q), strong) {
                    (Some(j), true) => me.strong_nbr[i] |= 1 << j,
                    (Some(j), false) => me.weak_nbr[i] |= 1 << j,
                    (None, true) => me.strong_out[i] += 1,
                    (None, false) => me.weak_out[i] += 1,
                }
            }
        }
        me.sites = sites;
        let w = EnergyWeights::new(p);
        let den = [&w.strong, &w.weak, &w.dissipation]
            .iter()
            .fold(num_bigint::BigInt::from(1), |acc, q| acc.lcm(q.denom()));
        let scale = |q: &Rational| (q * Rational::from_integer(den.clone())).to_integer().to_i64();
        let too_large = || Error::InvalidParams("energy weights too large for integer enumeration".into());
        me.coef = (
            scale(&w.strong).ok_or_else(too_large)?,
            scale(&w.weak).ok_or_else(too_large)?,
            scale(&w.dissipation).ok_or_else(too_large)?,
        );
        me.den = Rational::from_integer(den);
        // every count is at most 4 bonds per site or the total cost
        let bound = 4 * n as i128 * (i128::from(me.coef.0) + i128::from(me.coef.1))
            + i128::from(me.coef.2) * me.cost.iter().map(|&c| i128::from(c)).sum::<i128>();
        if bound > i128::from(i64::MAX / 4) {
            return Err(too_large());
        }
        Ok(me)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn set(&self, mask: u64) -> DiscreteSet {
        DiscreteSet::from_sites((0..self.len()).filter(|i| mask >> i & 1 == 1).map(|i| self.sites[i]))
    }

    /// Exact step energy of an integer score.
    pub fn energy(&self, score: i64) -> Rational {
        Rational::from_integer(score.into()) / &self.den
    }

    fn score(&self, c: Counts) -> i64 {
        self.coef.0 * c.strong + self.coef.1 * c.weak + self.coef.2 * c.diss
    }

    /// Counts of a mask computed from scratch.
    fn counts(&self, mask: u64) -> Counts {
        let mut c = Counts::default();
        for i in 0..self.len() {
            let kept = mask >> i & 1 == 1;
            let in_prev = self.prev_mask >> i & 1 == 1;
            if kept {
                c.strong += self.strong_out[i] + i64::from((self.strong_nbr[i] & !mask).count_ones());
                c.weak += self.weak_out[i] + i64::from((self.weak_nbr[i] & !mask).count_ones());
            }
            if kept != in_prev {
                c.diss += self.cost[i];
            }
        }
        c
    }

    /// Score of a mask, for checks against the lattice energies.
    pub fn score_of(&self, mask: u64) -> i64 {
        self.score(self.counts(mask))
    }

    /// Updates `c` for toggling site `i` of `mask` (the mask before the toggle).
    fn toggle(&self, c: &mut Counts, mask: u64, i: usize) {
        let rest = mask & !(1 << i);
        let ds = self.strong_out[i] + i64::from(self.strong_nbr[i].count_ones())
            - 2 * i64::from((self.strong_nbr[i] & rest).count_ones());
        let dw = self.weak_out[i] + i64::from(self.weak_nbr[i].count_ones())
            - 2 * i64::from((self.weak_nbr[i] & rest).count_ones());
        let adding = mask >> i & 1 == 0;
        let sign = if adding { 1 } else { -1 };
        c.strong += sign * ds;
        c.weak += sign * dw;
        // membership after the toggle differs from prev iff it agreed before
        let in_prev = self.prev_mask >> i & 1 == 1;
        c.diss += if adding != in_prev { self.cost[i] } else { -self.cost[i] };
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    strong: i64,
    weak: i64,
    diss: i64,
}

/// Minimal score, the minimizing masks (at most `cap`) and how many masks attain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Best {
    pub score: i64,
    pub masks: Vec<u64>,
    pub count: u64,
}

impl Best {
    fn empty() -> Self {
        Self { score: i64::MAX, masks: Vec::new(), count: 0 }
    }

    fn offer(&mut self, score: i64, mask: u64, cap: usize) {
        if score < self.score {
            self.score = score;
            self.masks.clear();
            self.count = 0;
        }
        if score == self.score {
            self.count += 1;
            if self.masks.len() < cap {
                self.masks.push(mask);
            }
        }
    }

    fn merge(mut self, other: Self, cap: usize) -> Self {
        if other.score < self.score {
            return other;
        }
        if other.score == self.score {
            self.count += other.count;
            self.masks.extend(other.masks);
            self.masks.sort_unstable();
            self.masks.truncate(cap);
        }
        self
    }
}

/// Prefix bits split across workers.
fn split_bits(n: usize) -> usize {
    n.min(8)
}

/// Visits every subset: the high bits are fixed per job, the low bits follow a Gray code so
/// each mask differs from the previous one in a single site.
pub fn enumerate(space: &SearchSpace, cap: usize) -> (Best, u64) {
    let n = space.len();
    let p = split_bits(n);
    let m = n - p;
    let best = (0..1u64 << p)
        .into_par_iter()
        .map(|prefix| {
            let mut mask = prefix << m;
            let mut c = space.counts(mask);
            let mut best = Best::empty();
            best.offer(space.score(c), mask, cap);
            for i in 1..1u64 << m {
                let bit = i.trailing_zeros() as usize;
                space.toggle(&mut c, mask, bit);
                mask ^= 1 << bit;
                best.offer(space.score(c), mask, cap);
            }
            best
        })
        .reduce(Best::empty, |a, b| a.merge(b, cap));
    let mut best = best;
    best.masks.sort_unstable();
    (best, 1u64 << n)
}

/// Depth-first branch and bound. Every term of the energy is nonnegative, so the bonds and
/// dissipation already fixed by a partial assignment bound all its completions from below.
/// Branches are cut only when that bound strictly exceeds the best score, so ties survive.
pub fn branch_and_bound(space: &SearchSpace, cap: usize) -> (Best, u64) {
    let n = space.len();
    let shared = AtomicI64::new(space.score(space.counts(space.prev_mask)));
    let leaves = AtomicU64::new(0);
    let p = split_bits(n).min(6);
    let best = (0..1u64 << p)
        .into_par_iter()
        .map(|prefix| {
            let mut search = Dfs { space, shared: &shared, cap, best: Best::empty(), leaves: 0 };
            let mut partial = Counts::default();
            let mut mask = 0u64;
            for i in 0..p {
                let keep = prefix >> i & 1 == 1;
                search.decide(&mut partial, mask, i, keep);
                if keep {
                    mask |= 1 << i;
                }
            }
            if space.score(partial) <= shared.load(Ordering::Relaxed) {
                search.descend(p, mask, partial);
            }
            leaves.fetch_add(search.leaves, Ordering::Relaxed);
            search.best
        })
        .reduce(Best::empty, |a, b| a.merge(b, cap));
    let mut best = best;
    best.masks.sort_unstable();
    (best, leaves.into_inner())
}

struct Dfs<'a> {
    space: &'a SearchSpace,
    shared: &'a AtomicI64,
    cap: usize,
    best: Best,
    leaves: u64,
}

impl Dfs<'_> {
    /// Adds the bonds and dissipation fixed by deciding site `i`; sites `< i` are decided and
    /// `mask` holds the kept ones.
    fn decide(&self, c: &mut Counts, mask: u64, i: usize, keep: bool) {
        let s = self.space;
        let decided = (1u64 << i) - 1;
        let in_prev = s.prev_mask >> i & 1 == 1;
        if keep {
            c.strong += s.strong_out[i] + i64::from((s.strong_nbr[i] & decided & !mask).count_ones());
            c.weak += s.weak_out[i] + i64::from((s.weak_nbr[i] & decided & !mask).count_ones());
        } else {
            c.strong += i64::from((s.strong_nbr[i] & mask).count_ones());
            c.weak += i64::from((s.weak_nbr[i] & mask).count_ones());
        }
        if keep != in_prev {
            c.diss += s.cost[i];
        }
    }

    fn descend(&mut self, i: usize, mask: u64, c: Counts) {
        if i == self.space.len() {
            self.leaves += 1;
            let score = self.space.score(c);
            self.shared.fetch_min(score, Ordering::Relaxed);
            self.best.offer(score, mask, self.cap);
            return;
        }
        // try the previous membership first: it is the cheaper branch more often
        let first = self.space.prev_mask >> i & 1 == 1;
        for keep in [first, !first] {
            let mut next = c;
            self.decide(&mut next, mask, i, keep);
            if self.space.score(next) <= self.shared.load(Ordering::Relaxed) {
                self.descend(i + 1, if keep { mask | 1 << i } else { mask }, next);
            }
        }
    }
}
