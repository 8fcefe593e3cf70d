//! Brute-force ground truth: exact minimization of the step energy over every subset of a
//! small search space, and comparison with the structured candidates.

mod search;

use serde::{Deserialize, Serialize};

pub use search::{branch_and_bound, enumerate, search_sites, Best, SearchSpace};

use crate::error::Result;
use crate::flow::{
    candidate_weak_dissolve, candidate_weak_retain, island_layer, DirectSolver, Family, RectExtents, StepProblem,
    StepSolver,
};
use crate::lattice::{
    decompose, perimeter_energy, step_energy, Decomposition, DiscreteSet, LatticePoint, Params,
};
use crate::rational::Rational;

/// Largest search space enumerated exhaustively.
pub const MAX_SITES: usize = 28;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Width of the ring of extra sites around the previous set that minimizers may use.
    pub collar: u32,
    /// Branch and bound instead of full enumeration.
    pub prune: bool,
    pub max_sites: usize,
    /// Minimizers listed in the report; the count is always exact.
    pub max_listed: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { collar: 1, prune: false, max_sites: MAX_SITES, max_listed: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub sites: usize,
    pub collar: u32,
    pub pruned: bool,
    /// Subsets whose energy was evaluated (`2^sites` without pruning).
    pub enumerated: u64,
    /// Global minimizers, in mask order; at most `max_listed` of them.
    pub minimizers: Vec<DiscreteSet>,
    pub minimizer_count: u64,
    /// Minimal `E(I, prev) = F(I) + D(I, prev) / tau`.
    #[serde(with = "crate::rational::exact")]
    pub min_value: Rational,
    /// `(min_value - F(prev)) / eps`, the normalization of the structured solvers.
    #[serde(with = "crate::rational::exact")]
    pub normalized_min: Rational,
    /// Every listed minimizer is a rectangle plus weak islands.
    pub structure_ok: bool,
    /// Every listed minimizer is contained in the previous set.
    pub subset_ok: bool,
    /// The structured minimizers attain the same value and are global minimizers; `None`
    /// when the previous set is not a rectangle plus islands.
    pub matches_structured: Option<bool>,
}

impl OracleReport {
    /// `min=<num>/<den> count=<k> structured_match=<bool>`.
    pub fn summary(&self) -> String {
        format!(
            "min={}/{} count={} structured_match={}",
            self.min_value.numer(),
            self.min_value.denom(),
            self.minimizer_count,
            self.matches_structured.map_or("n/a".to_string(), |b| b.to_string())
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Exhaustive minimization of `E(., prev)` over subsets of `prev` and its collar.
pub fn exhaustive_minimize(prev: &DiscreteSet, p: &Params, cfg: &OracleConfig) -> Result<OracleReport> {
    let space = SearchSpace::new(prev, cfg.collar, p, cfg.max_sites)?;
    let (best, enumerated) = if cfg.prune {
        branch_and_bound(&space, cfg.max_listed)
    } else {
        enumerate(&space, cfg.max_listed)
    };
    let minimizers: Vec<DiscreteSet> = best.masks.iter().map(|&m| space.set(m)).collect();
    let min_value = space.energy(best.score);
    let normalized_min = (&min_value - perimeter_energy(prev, p).0) / &p.eps;
    let structure_ok = minimizers.iter().all(|m| decompose(m).is_structured());
    let subset_ok = minimizers.iter().all(|m| m.is_subset(prev));
    let matches_structured = structured_minimizers(prev, p)?
        .map(|(value, sets)| -> Result<bool> {
            if value != normalized_min {
                return Ok(false);
            }
            for s in &sets {
                if step_energy(s, prev, p)?.0 != min_value {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .transpose()?;
    Ok(OracleReport {
        sites: space.len(),
        collar: cfg.collar,
        pruned: cfg.prune,
        enumerated,
        minimizers,
        minimizer_count: best.count,
        min_value,
        normalized_min,
        structure_ok,
        subset_ok,
        matches_structured,
    })
}

/// Minimal normalized value over the structured candidates and every candidate attaining it,
/// materialized in the coordinates of `prev`. `None` when `prev` has no rectangle.
pub fn structured_minimizers(prev: &DiscreteSet, p: &Params) -> Result<Option<(Rational, Vec<DiscreteSet>)>> {
    let Decomposition::Structured(state) = decompose(prev) else {
        return Ok(None);
    };
    let Some(rect) = state.rect else {
        return Ok(None);
    };
    let ext = RectExtents::from_rect(&rect);
    let problem = StepProblem::new(&state, &ext, p)?;
    let families = problem.families();
    let scan = DirectSolver { full_box: true }.scan(&problem)?;
    let mut sets = Vec::new();
    for s in &scan.minimizers {
        let (family, _) = families
            .iter()
            .find(|(_, v)| *v == s.variant)
            .copied()
            .expect("scan only uses listed families");
        let (h, k) = s.hk;
        let set = match (family, s.empty) {
            (Family::Retain, false) => candidate_weak_retain(h, k, problem.prev(), &ext)?,
            (Family::Dissolve { depth }, false) => candidate_weak_dissolve(h, k, &ext, depth)?,
            (Family::Retain, true) => problem.prev().filter(LatticePoint::is_even_site),
            (Family::Dissolve { depth }, true) => island_layer(depth, &ext),
        };
        sets.push(set.translate(rect.a1, rect.a2));
    }
    let value = scan.minimizers[0].value.clone();
    Ok(Some((value, sets)))
}

/// Every listed minimizer is contained in `prev` and decomposes into a rectangle plus weak
/// islands.
pub fn verify_structure(report: &OracleReport, prev: &DiscreteSet) -> bool {
    report.minimizers.iter().all(|m| m.is_subset(prev) && decompose(m).is_structured())
}
