//! Exact per-step minimization over the structured candidates.
//!
//! Strategies implement [`StepSolver`] and are looked up by name in a [`SolverRegistry`]:
//!
//! * `direct`: lattice evaluation of every candidate in the localization window
//!   `[0, ceil(center) + 2]^2`, clipped to the index box, plus the collapse edges;
//! * `direct-full`: the same over the whole index box `[0, n1/4] x [0, n2/4]`;
//! * `closed-form`: the polynomial expressions over the square `[0, min(n1, n2)/4]^2`, with an
//!   `f64` prefilter and exact re-evaluation of every near-minimal candidate.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::candidates::core_bounds;
use super::closed_form::{localization_center, predict_pair, FormCoeffs};
use super::direct::{rect_empty_counts, DirectEvaluator, Family};
use super::extents::RectExtents;
use super::thresholds::Thresholds;
use crate::error::{Error, Result};
use crate::lattice::{DiscreteSet, EnergyWeights, Params, RectState, Regime};
use crate::rational::{from_u64, int, Rational};

/// One step's minimization problem, in coordinates where the rectangle is `[0, n1] x [0, n2]`.
pub struct StepProblem {
    pub params: Params,
    pub thresholds: Thresholds,
    pub ext: RectExtents,
    state: RectState,
    prev: OnceLock<DiscreteSet>,
    /// Islands of the previous set outside the rectangle.
    pub outside_islands: usize,
}

impl StepProblem {
    pub fn new(state: &RectState, ext: &RectExtents, params: &Params) -> Result<Self> {
        let rect = state.rect.ok_or(Error::EmptyRect)?;
        if rect.n1() as u64 != ext.n1 || rect.n2() as u64 != ext.n2 {
            return Err(Error::InvalidParams(format!(
                "extents {}x{} do not match rectangle {rect}",
                ext.n1, ext.n2
            )));
        }
        Ok(Self {
            params: params.clone(),
            thresholds: Thresholds::new(params),
            ext: ext.clone(),
            state: state.clone(),
            prev: OnceLock::new(),
            outside_islands: state.islands.len(),
        })
    }

    /// The previous set (rectangle plus islands), translated to the origin. Materialized on
    /// first use, since the closed forms never need it.
    pub fn prev(&self) -> &DiscreteSet {
        self.prev.get_or_init(|| {
            let rect = self.state.rect.expect("checked at construction");
            self.state.materialize().translate(-rect.a1, -rect.a2)
        })
    }

    /// Candidate families searched by the lattice solvers; the second entry is the
    /// shallower island layer used when `4 alpha gamma` is an odd integer above one.
    pub fn families(&self) -> Vec<(Family, bool)> {
        match (self.thresholds.regime, self.thresholds.n_ag) {
            (Regime::WeakDissolve, Some(n)) => {
                let mut out = vec![(Family::Dissolve { depth: n }, false)];
                if self.thresholds.odd_integer_flag && n >= 1 {
                    out.push((Family::Dissolve { depth: n - 1 }, true));
                }
                out
            }
            _ => vec![(Family::Retain, false)],
        }
    }

    pub fn lengths(&self) -> (Rational, Rational) {
        self.ext.lengths(&self.params.eps)
    }

    /// Constant separating the closed forms (taken against the bare rectangle) from the
    /// energy against the actual previous set: every stale island that dissolves changes the
    /// normalized energy by `eps (1/gamma - 4 alpha)`.
    pub fn island_offset(&self) -> Rational {
        match self.thresholds.regime {
            Regime::WeakDissolve => {
                let p = &self.params;
                &p.eps * (int(1) / &p.gamma - int(4) * &p.alpha) * from_u64(self.outside_islands as u64)
            }
            _ => Rational::zero(),
        }
    }

    /// Localization radius `ceil(center) + 2`.
    pub fn window_radius(&self) -> Result<u64> {
        let (l1, l2) = self.lengths();
        Ok(localization_center(&l1, &l2, &self.params)?.saturating_add(2))
    }
}

/// A scored candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scored {
    pub hk: (u64, u64),
    /// Uses the shallower island layer (odd-integer case only).
    pub variant: bool,
    /// The rectangle is removed entirely; `hk` is then the corner of the index box.
    pub empty: bool,
    #[serde(with = "crate::rational::exact")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Every co-minimal candidate, sorted by `(empty, hk, variant)`.
    pub minimizers: Vec<Scored>,
    pub scanned: usize,
    /// Largest `(h, k)` scanned.
    pub window: (u64, u64),
}

pub trait StepSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn scan(&self, problem: &StepProblem) -> Result<ScanResult>;
}

/// A core shrunk to one weak site that the family keeps anyway is the same set as the
/// candidate without a core; only the latter is listed.
fn same_as_empty(hk: (u64, u64), family: Family, ext: &RectExtents) -> bool {
    let Some((a1, b1, a2, b2)) = core_bounds(hk.0, hk.1, ext) else {
        return false;
    };
    if a1 != b1 || a2 != b2 || a1 % 2 != 0 || a2 % 2 != 0 {
        return false;
    }
    match family {
        Family::Retain => true,
        Family::Dissolve { depth } => core_bounds(depth, depth, ext)
            .is_some_and(|(c1, d1, c2, d2)| (c1..=d1).contains(&a1) && (c2..=d2).contains(&a2)),
    }
}

fn collect_minimizers(mut all: Vec<Scored>, scanned: usize, window: (u64, u64)) -> ScanResult {
    let min = all
        .iter()
        .map(|s| &s.value)
        .min()
        .cloned()
        .expect("index box always contains (0, 0)");
    all.retain(|s| s.value == min);
    all.sort_by(|a, b| (a.empty, a.hk, a.variant).cmp(&(b.empty, b.hk, b.variant)));
    ScanResult { minimizers: all, scanned, window }
}

/// Lattice evaluation of each candidate.
pub struct DirectSolver {
    pub full_box: bool,
}

impl StepSolver for DirectSolver {
    fn name(&self) -> &'static str {
        if self.full_box {
            "direct-full"
        } else {
            "direct"
        }
    }

    fn description(&self) -> &'static str {
        if self.full_box {
            "lattice evaluation over the whole index box"
        } else {
            "lattice evaluation over the localization window"
        }
    }

    fn scan(&self, problem: &StepProblem) -> Result<ScanResult> {
        let (max_h, max_k) = problem.ext.index_box();
        let window = if self.full_box {
            (max_h, max_k)
        } else {
            let r = problem.window_radius()?;
            (r.min(max_h), r.min(max_k))
        };
        let evaluator = DirectEvaluator::new(problem.prev(), &problem.ext)?;
        let weights = EnergyWeights::new(&problem.params);
        let families = problem.families();
        // Far from the center the energy is concave in each index, so the only other
        // candidates that can win are on the collapse edges `h = max_h` or `k = max_k`.
        let mut cells: BTreeSet<(u64, u64)> = (0..=window.0)
            .flat_map(|h| (0..=window.1).map(move |k| (h, k)))
            .collect();
        cells.extend((0..=max_k).map(|k| (max_h, k)));
        cells.extend((0..=max_h).map(|h| (h, max_k)));
        let ext = &problem.ext;
        let jobs: Vec<(u64, u64, Family, bool)> = cells
            .into_iter()
            .flat_map(|(h, k)| families.iter().map(move |&(f, v)| (h, k, f, v)))
            .filter(|&(h, k, f, _)| !same_as_empty((h, k), f, ext))
            .collect();
        let scored = jobs
            .par_iter()
            .map(|&(h, k, family, variant)| {
                Ok(Scored {
                    hk: (h, k),
                    variant,
                    empty: false,
                    value: evaluator.value(h, k, family, &problem.params, &weights)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut scored = scored;
        scored.extend(families.iter().map(|&(family, variant)| Scored {
            hk: (max_h, max_k),
            variant,
            empty: true,
            value: evaluator.empty_value(family, &problem.params, &weights),
        }));
        let n = scored.len();
        Ok(collect_minimizers(scored, n, window))
    }
}

/// Polynomial evaluation of each candidate.
pub struct ClosedFormSolver;

impl ClosedFormSolver {
    const REL_TOL: f64 = 1e-8;
}

impl StepSolver for ClosedFormSolver {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn description(&self) -> &'static str {
        "closed-form energies over the square index box"
    }

    fn scan(&self, problem: &StepProblem) -> Result<ScanResult> {
        let bound = problem.ext.square_bound();
        let exact = FormCoeffs::new(&problem.ext, &problem.params);
        let approx = exact.to_f64();
        let dissolve = problem.thresholds.regime == Regime::WeakDissolve;
        let eval_f64 = |h: u64, k: u64| if dissolve { approx.g(h, k) } else { approx.f(h, k) };
        let values: Vec<(u64, u64, f64)> = (0..=bound)
            .into_par_iter()
            .flat_map_iter(|h| (0..=bound).map(move |k| (h, k, eval_f64(h, k))))
            .collect();
        let min = values.iter().map(|v| v.2).fold(f64::INFINITY, f64::min);
        let scale = values.iter().map(|v| v.2.abs()).fold(1.0, f64::max);
        let cutoff = min + Self::REL_TOL * scale;
        let offset = problem.island_offset();
        let (family, _) = problem.families()[0];
        let mut near: Vec<Scored> = values
            .iter()
            .filter(|v| v.2 <= cutoff || !v.2.is_finite())
            .filter(|v| !same_as_empty((v.0, v.1), family, &problem.ext))
            .map(|&(h, k, _)| Scored {
                hk: (h, k),
                variant: false,
                empty: false,
                value: if dissolve { exact.g(h, k) } else { exact.f(h, k) } + &offset,
            })
            .collect();
        // the closed forms stop at a one-line core; removing the rectangle is counted apart
        let weights = EnergyWeights::new(&problem.params);
        near.push(Scored {
            hk: problem.ext.index_box(),
            variant: false,
            empty: true,
            value: rect_empty_counts(&problem.ext, family, problem.outside_islands)
                .normalized(&weights, &problem.params.eps),
        });
        Ok(collect_minimizers(near, values.len() + 1, (bound, bound)))
    }
}

/// Named strategies for [`step_minimize`].
pub struct SolverRegistry {
    entries: Vec<Box<dyn StepSolver>>,
}

impl SolverRegistry {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    /// `direct`, `direct-full` and `closed-form`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Box::new(DirectSolver { full_box: false }));
        r.register(Box::new(DirectSolver { full_box: true }));
        r.register(Box::new(ClosedFormSolver));
        r
    }

    /// Adds a strategy, replacing any previous one with the same name.
    pub fn register(&mut self, solver: Box<dyn StepSolver>) {
        self.entries.retain(|s| s.name() != solver.name());
        self.entries.push(solver);
    }

    pub fn get(&self, name: &str) -> Result<&dyn StepSolver> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "step solver",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

/// Result of one minimization step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    /// Chosen displacement: the lexicographically smallest co-minimizer.
    pub hk: (u64, u64),
    /// Minimal `(E(I, prev) - F(prev)) / eps`.
    #[serde(with = "crate::rational::exact")]
    pub value: Rational,
    /// All co-minimal index pairs (candidates with a core).
    pub ties: Vec<(u64, u64)>,
    /// The chosen candidate removes the rectangle entirely.
    pub empty_core: bool,
    /// Removing the rectangle is among the minimizers.
    pub empty_minimal: bool,
    /// The chosen candidate keeps the shallower island layer.
    pub variant: bool,
    /// Both island layers attain the minimum for some index pair.
    pub variant_tie: bool,
    pub pinned: bool,
    /// Co-minimizers predicted from the side lengths; empty when the predictor declines.
    pub predicted: Vec<(u64, u64)>,
    /// `ties` equals `predicted` as a set.
    pub agree: bool,
    pub vanished: bool,
    /// Every co-minimizer lies strictly inside the localization window (or the scan covered
    /// the whole admissible range in that direction).
    pub localized: bool,
    pub solver: String,
    pub scanned: usize,
}

/// Minimizes the step energy for `state`, whose rectangle has extents `ext`.
pub fn step_minimize(
    state: &RectState,
    ext: &RectExtents,
    p: &Params,
    solver: &dyn StepSolver,
) -> Result<StepOutcome> {
    let problem = StepProblem::new(state, ext, p)?;
    let scan = solver.scan(&problem)?;
    let chosen = scan.minimizers[0].clone();
    let empty_minimal = scan.minimizers.iter().any(|s| s.empty);
    let ties: Vec<(u64, u64)> = scan
        .minimizers
        .iter()
        .filter(|s| !s.empty)
        .map(|s| s.hk)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let variant_tie = scan.minimizers.iter().any(|s| s.variant)
        && scan.minimizers.iter().any(|s| !s.variant);
    let (l1, l2) = problem.lengths();
    let predicted = predict_pair(&l1, &l2, p).unwrap_or_default();
    let agree = !predicted.is_empty()
        && !empty_minimal
        && predicted.iter().collect::<BTreeSet<_>>() == ties.iter().collect::<BTreeSet<_>>();
    let radius = problem.window_radius()?;
    let (max_h, max_k) = ext.index_box();
    // A coordinate is trustworthy when it sits inside the localization radius, strictly inside
    // the scanned range, or the scan reached the admissible limit.
    let ok = |x: u64, edge: u64, limit: u64| x < radius || x < edge || edge >= limit;
    let localized = ties
        .iter()
        .all(|&(h, k)| ok(h, scan.window.0, max_h) && ok(k, scan.window.1, max_k));
    let (h, k) = chosen.hk;
    Ok(StepOutcome {
        hk: chosen.hk,
        value: chosen.value,
        ties,
        empty_core: chosen.empty,
        empty_minimal,
        variant: chosen.variant,
        variant_tie,
        pinned: !chosen.empty && chosen.hk == (0, 0),
        predicted,
        agree,
        vanished: chosen.empty || ext.n1 == 4 * h || ext.n2 == 4 * k,
        localized,
        solver: solver.name().to_string(),
        scanned: scan.scanned,
    })
}

/// Runs the windowed lattice solver and the closed forms on the same step and reports
/// whether they select the same minimizers with the same value.
pub fn solvers_agree(state: &RectState, ext: &RectExtents, p: &Params) -> Result<bool> {
    let problem = StepProblem::new(state, ext, p)?;
    let a = DirectSolver { full_box: false }.scan(&problem)?;
    let b = ClosedFormSolver.scan(&problem)?;
    let plain = |r: &ScanResult| -> Vec<((u64, u64), bool, Rational)> {
        r.minimizers
            .iter()
            .filter(|s| !s.variant)
            .map(|s| (s.hk, s.empty, s.value.clone()))
            .collect()
    };
    Ok(plain(&a) == plain(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Rect;
    use crate::rational::rat;

    #[test]
    fn registry_lookup() {
        let reg = SolverRegistry::with_defaults();
        assert_eq!(reg.names(), vec!["direct", "direct-full", "closed-form"]);
        assert_eq!(reg.get("closed-form").unwrap().name(), "closed-form");
        match reg.get("simplex") {
            Err(Error::UnknownStrategy { available, .. }) => assert!(available.contains("direct")),
            _ => panic!("expected an unknown-strategy error"),
        }
    }

    #[test]
    fn shrinking_square_step() {
        // the cubic coupling terms still win at eps = 1/100, so take eps small
        let p = Params::with_gamma(rat(1, 8), int(1), rat(1, 1000), int(1)).unwrap();
        let ext = RectExtents::from_lengths(&rat(2, 5), &rat(2, 5), &p.eps).unwrap();
        let state = RectState::from_rect(Rect::origin(400, 400).unwrap());
        let reg = SolverRegistry::with_defaults();
        // the full box is 100 x 100 candidates here; the window covers the minimizer
        for name in ["direct", "closed-form"] {
            let out = step_minimize(&state, &ext, &p, reg.get(name).unwrap()).unwrap();
            assert_eq!(out.hk, (1, 1), "{name}");
            assert!(out.agree && out.localized && !out.pinned);
        }
        assert!(solvers_agree(&state, &ext, &p).unwrap());
    }

    #[test]
    fn coarse_square_collapses_in_one_step() {
        let p = Params::with_gamma(rat(1, 8), int(1), rat(1, 100), int(1)).unwrap();
        let ext = RectExtents::exact(32, 32);
        let state = RectState::from_rect(Rect::origin(32, 32).unwrap());
        let out = step_minimize(&state, &ext, &p, &DirectSolver { full_box: false }).unwrap();
        assert_eq!(out.hk, (8, 8));
        assert!(out.vanished);
        assert!(solvers_agree(&state, &ext, &p).unwrap());
    }

    #[test]
    fn pinned_above_threshold() {
        let p = Params::with_gamma(rat(1, 8), int(1), rat(1, 100), int(1)).unwrap();
        let ext = RectExtents::exact(100, 100);
        let state = RectState::from_rect(Rect::origin(100, 100).unwrap());
        let out = step_minimize(&state, &ext, &p, &DirectSolver { full_box: false }).unwrap();
        assert!(out.pinned && out.agree);
        assert_eq!(out.value, int(0));
    }

    #[test]
    fn empty_rect_is_rejected() {
        let p = Params::with_gamma(rat(1, 8), int(1), rat(1, 100), int(1)).unwrap();
        let state = RectState { rect: None, islands: DiscreteSet::new() };
        assert!(matches!(
            step_minimize(&state, &RectExtents::exact(4, 4), &p, &ClosedFormSolver),
            Err(Error::EmptyRect)
        ));
    }
}
