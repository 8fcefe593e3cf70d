use std::fmt;
use std::ops::Add;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::distance::DistanceField;
use super::params::Params;
use super::point::{bond_kind, BondKind};
use super::set::DiscreteSet;
use crate::error::{Error, Result};
use crate::rational::{self, from_u64, Rational};

/// Number of cut bonds `(i, j)` with `i` in the set and `j` outside, split by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BondCounts {
    pub strong: u64,
    pub weak: u64,
}

/// Integer ingredients of a step energy: cut bonds of the candidate plus the
/// unweighted dissipation sum against the previous set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepCounts {
    pub strong: u64,
    pub weak: u64,
    pub dissipation: u64,
}

/// An energy value in physical units.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Energy(#[serde(with = "crate::rational::exact")] pub Rational);

impl Energy {
    pub fn zero() -> Self {
        Energy(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl Add for Energy {
    type Output = Energy;

    fn add(self, rhs: Energy) -> Energy {
        Energy(self.0 + rhs.0)
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::display(&self.0))
    }
}

/// Per-unit weights `eps * beta` (strong bond), `eps^2 * alpha` (weak bond) and
/// `eps^3 / tau` (unit of dissipation), precomputed once per parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyWeights {
    pub strong: Rational,
    pub weak: Rational,
    pub dissipation: Rational,
}

impl EnergyWeights {
    pub fn new(p: &Params) -> Self {
        let e2 = &p.eps * &p.eps;
        Self {
            strong: &p.eps * &p.beta,
            weak: &e2 * &p.alpha,
            dissipation: &e2 * &p.eps / &p.tau,
        }
    }

    pub fn perimeter(&self, c: BondCounts) -> Rational {
        &self.strong * from_u64(c.strong) + &self.weak * from_u64(c.weak)
    }

    pub fn step(&self, c: StepCounts) -> Rational {
        &self.strong * from_u64(c.strong)
            + &self.weak * from_u64(c.weak)
            + &self.dissipation * from_u64(c.dissipation)
    }
}

pub fn cut_bonds(set: &DiscreteSet) -> BondCounts {
    let mut counts = BondCounts::default();
    for i in set.iter() {
        for j in i.neighbors4() {
            if set.contains(j) {
                continue;
            }
            match bond_kind(i, j) {
                BondKind::Strong => counts.strong += 1,
                BondKind::Weak => counts.weak += 1,
                BondKind::NotNeighbors => unreachable!("axis neighbours always bond"),
            }
        }
    }
    counts
}

pub fn perimeter_energy(set: &DiscreteSet, p: &Params) -> Energy {
    Energy(EnergyWeights::new(p).perimeter(cut_bonds(set)))
}

/// Unweighted dissipation: removed sites count their depth in `prev`, added sites their
/// distance to `prev`. Adding sites to an empty `prev` is an error.
pub fn dissipation_sum(set: &DiscreteSet, prev: &DiscreteSet) -> Result<u64> {
    let removed = prev.difference(set);
    let added = set.difference(prev);
    let mut total = 0u64;
    if !removed.is_empty() {
        let field = DistanceField::to_complement(prev).expect("prev contains the removed sites");
        total += removed
            .iter()
            .map(|i| field.get(i).expect("removed sites lie inside prev"))
            .sum::<u64>();
    }
    if let Some(region) = added.bbox() {
        let field = DistanceField::to_set(prev, region)
            .ok_or_else(|| Error::EmptyTarget(added.iter().next().expect("nonempty")))?;
        total += added
            .iter()
            .map(|i| field.get(i).expect("added sites lie inside the field"))
            .sum::<u64>();
    }
    Ok(total)
}

pub fn dissipation(set: &DiscreteSet, prev: &DiscreteSet, p: &Params) -> Result<Energy> {
    let d = dissipation_sum(set, prev)?;
    let e = &p.eps;
    Ok(Energy(e * e * e * from_u64(d)))
}

pub fn step_counts(set: &DiscreteSet, prev: &DiscreteSet) -> Result<StepCounts> {
    let b = cut_bonds(set);
    Ok(StepCounts {
        strong: b.strong,
        weak: b.weak,
        dissipation: dissipation_sum(set, prev)?,
    })
}

/// `F(set) + D(set, prev) / tau`.
pub fn step_energy(set: &DiscreteSet, prev: &DiscreteSet, p: &Params) -> Result<Energy> {
    Ok(Energy(EnergyWeights::new(p).step(step_counts(set, prev)?)))
}
