use std::io::Write;

use serde::{Deserialize, Serialize};

use super::candidates::island_layer;
use super::extents::RectExtents;
use super::solver::{solvers_agree, step_minimize, StepOutcome, StepSolver};
use super::thresholds::Thresholds;
use crate::error::Result;
use crate::lattice::{LatticePoint, Params, Rect, RectState, Regime};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub max_steps: usize,
    /// Reject an `eps` that leaves a fractional cell on the shorter side.
    pub strict_condo: bool,
    /// Cross-check every step against the other solver family.
    pub check_agreement: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { max_steps: 1000, strict_condo: false, check_agreement: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    /// State after the step.
    pub state: RectState,
    pub outcome: StepOutcome,
    /// Lattice and closed-form solvers agreed (when checked).
    pub solvers_agree: Option<bool>,
}

/// A discrete evolution: the initial rectangle and one entry per performed step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub params: Params,
    pub initial: RectState,
    pub initial_extents: RectExtents,
    pub steps: Vec<TraceStep>,
    pub warnings: Vec<String>,
}

impl Trace {
    /// Side lengths `(eps n1, eps n2)` after `n` steps (`n = 0` is the initial rectangle);
    /// zero once vanished. Steps past the end of the trace repeat the last state.
    pub fn lengths_after(&self, n: usize) -> (f64, f64) {
        let state = if n == 0 || self.steps.is_empty() {
            &self.initial
        } else {
            &self.steps[n.min(self.steps.len()) - 1].state
        };
        let eps = rational::to_f64(&self.params.eps);
        match state.rect {
            Some(r) => (eps * r.n1() as f64, eps * r.n2() as f64),
            None => (0.0, 0.0),
        }
    }

    pub fn pinned(&self) -> bool {
        self.steps.last().is_some_and(|s| s.outcome.pinned)
    }

    pub fn vanished(&self) -> bool {
        self.steps.last().is_some_and(|s| s.outcome.vanished)
    }

    /// CSV with one row per step:
    /// `step,h,k,L1_cells,L2_cells,islands_count,energy_num,energy_den,pinned,tie_count`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "step", "h", "k", "L1_cells", "L2_cells", "islands_count", "energy_num", "energy_den",
            "pinned", "tie_count",
        ])?;
        for s in &self.steps {
            let (n1, n2) = s.state.rect.map_or((0, 0), |r| (r.n1(), r.n2()));
            w.write_record([
                s.step.to_string(),
                s.outcome.hk.0.to_string(),
                s.outcome.hk.1.to_string(),
                n1.to_string(),
                n2.to_string(),
                s.state.islands.len().to_string(),
                s.outcome.value.numer().to_string(),
                s.outcome.value.denom().to_string(),
                s.outcome.pinned.to_string(),
                s.outcome.ties.len().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Iterates the step minimization from the rectangle with continuum sides `(l1, l2)`.
///
/// Islands follow the regime: when they are retained, every weak site of the initial
/// rectangle outside the current one stays; when they dissolve, only the weak sites of the
/// previous rectangle's `C(N, N)` outside the new core remain. Stops at pinning (a fixed
/// point), when a side collapses to a single lattice line, or after `max_steps`.
pub fn evolve(
    l1: &Rational,
    l2: &Rational,
    p: &Params,
    solver: &dyn StepSolver,
    cfg: &EvolveConfig,
) -> Result<Trace> {
    let ext0 = if cfg.strict_condo {
        RectExtents::from_lengths_strict(l1, l2, &p.eps)?
    } else {
        RectExtents::from_lengths(l1, l2, &p.eps)?
    };
    let th = Thresholds::new(p);
    let mut warnings = Vec::new();
    if th.regime == Regime::Boundary {
        warnings.push("4 alpha gamma = 1: keeping or dissolving islands costs the same; islands are kept".into());
    }
    if th.regime == Regime::WeakDissolve && th.odd_integer_flag {
        warnings.push("4 alpha gamma is an odd integer: island layers of depth N and N-1 may tie".into());
    }
    let initial = RectState::from_rect(Rect::origin(ext0.n1 as i64, ext0.n2 as i64)?);
    let mut trace = Trace {
        params: p.clone(),
        initial: initial.clone(),
        initial_extents: ext0.clone(),
        steps: Vec::new(),
        warnings,
    };
    if ext0.n1 == 0 || ext0.n2 == 0 {
        trace.warnings.push("initial rectangle is thinner than two lattice cells".into());
        return Ok(trace);
    }
    let mut state = initial;
    let mut ext = ext0;
    for step in 1..=cfg.max_steps {
        let outcome = step_minimize(&state, &ext, p, solver)?;
        let agree = if cfg.check_agreement {
            Some(solvers_agree(&state, &ext, p)?)
        } else {
            None
        };
        let next = advance(&state, &ext, &outcome, &th)?;
        let stop = outcome.pinned || outcome.vanished;
        trace.steps.push(TraceStep { step, state: next.clone(), outcome, solvers_agree: agree });
        if stop {
            break;
        }
        ext = RectExtents::from_rect(&next.rect.expect("not vanished"));
        state = next;
    }
    Ok(trace)
}

/// The state after applying `outcome` to `state`.
pub fn advance(
    state: &RectState,
    ext: &RectExtents,
    outcome: &StepOutcome,
    th: &Thresholds,
) -> Result<RectState> {
    let old = state.rect.expect("step_minimize checked the rectangle");
    let (h, k) = (outcome.hk.0 as i64, outcome.hk.1 as i64);
    let new_rect = (!outcome.vanished)
        .then(|| Rect::new(old.a1 + 2 * h, old.b1 - 2 * h, old.a2 + 2 * k, old.b2 - 2 * k))
        .transpose()?;
    let outside = |p: &LatticePoint| new_rect.is_none_or(|r| !r.contains(*p));
    let islands = match th.regime {
        Regime::WeakDissolve => {
            let depth = th.n_ag.expect("present") - u64::from(outcome.variant);
            island_layer(depth, ext).translate(old.a1, old.a2).filter(|p| outside(&p))
        }
        _ => state
            .materialize()
            .filter(|p| p.is_even_site() && outside(&p)),
    };
    RectState::new(new_rect, islands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::solver::{ClosedFormSolver, DirectSolver};
    use crate::lattice::DiscreteSet;
    use crate::rational::{int, rat};

    fn weak_sites(set: &DiscreteSet) -> DiscreteSet {
        set.filter(LatticePoint::is_even_site)
    }

    fn retain(eps: Rational) -> Params {
        Params::with_gamma(rat(1, 8), int(1), eps, int(1)).unwrap()
    }

    #[test]
    fn pinned_initial_data_gives_one_step() {
        let p = retain(rat(1, 50));
        let t = evolve(&int(1), &int(1), &p, &ClosedFormSolver, &EvolveConfig::default()).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert!(t.pinned());
    }

    #[test]
    fn square_shrinks_symmetrically_until_it_vanishes() {
        let p = retain(rat(1, 100));
        let cfg = EvolveConfig { check_agreement: true, ..EvolveConfig::default() };
        let t = evolve(&rat(2, 5), &rat(2, 5), &p, &DirectSolver { full_box: false }, &cfg).unwrap();
        assert!(t.vanished());
        let mut prev = t.initial.rect.unwrap();
        for s in &t.steps {
            assert_eq!(s.outcome.hk.0, s.outcome.hk.1);
            assert_eq!(s.solvers_agree, Some(true));
            if let Some(r) = s.state.rect {
                assert!(r.is_subset(&prev) && r.n1() < prev.n1());
                prev = r;
            }
        }
        // every weak site of the initial square is still there
        let last = &t.steps.last().unwrap().state;
        assert_eq!(last.materialize(), weak_sites(&t.initial.materialize()));
    }

    #[test]
    fn long_side_is_pinned() {
        let p = retain(rat(1, 400));
        let t = evolve(&int(1), &rat(1, 5), &p, &ClosedFormSolver, &EvolveConfig { max_steps: 3, ..Default::default() })
            .unwrap();
        for s in &t.steps {
            // the short vertical sides move inward; the long horizontal ones stay
            assert!(s.outcome.hk.0 > 0);
            assert_eq!(s.outcome.hk.1, 0);
        }
    }

    #[test]
    fn csv_layout() {
        let p = retain(rat(1, 50));
        let t = evolve(&int(1), &int(1), &p, &ClosedFormSolver, &EvolveConfig::default()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "step,h,k,L1_cells,L2_cells,islands_count,energy_num,energy_den,pinned,tie_count\n1,0,0,50,50,0,0,1,true,1\n"
        );
    }
}
