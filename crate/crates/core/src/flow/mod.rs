//! The minimizing-movement iteration over structured candidates: rectangle extents,
//! thresholds, closed-form energies and predictors, the exact per-step argmin and the
//! evolution loop.

mod candidates;
mod closed_form;
mod direct;
mod evolve;
mod extents;
pub mod polys;
mod solver;
mod thresholds;

pub use candidates::{candidate_weak_dissolve, candidate_weak_retain, core_bounds, core_rect, island_layer};
pub use closed_form::{
    closed_form_centers, f_eps, g_eps, localization_center, predict_displacement, predict_pair,
    FormCoeffs,
};
pub use direct::{materialized_value, rect_empty_counts, DeltaCounts, DirectEvaluator, Family};
pub use evolve::{advance, evolve, EvolveConfig, Trace, TraceStep};
pub use extents::{i_floor_even, RectExtents};
pub use polys::poly_eval;
pub use solver::{
    solvers_agree, step_minimize, ClosedFormSolver, DirectSolver, ScanResult, Scored,
    SolverRegistry, StepOutcome, StepProblem, StepSolver,
};
pub use thresholds::{is_odd_integer, n_alpha_gamma, Thresholds};
