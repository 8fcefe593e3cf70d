//! Minimizing-movement evolution of discrete sets on the square lattice under
//! double-porosity ferromagnetic perimeter energies.
//!
//! The crate is organised by layer:
//!
//! * [`lattice`]: sites, bonds, the perimeter and dissipation energies, connectivity and
//!   the rectangle-plus-islands decomposition of minimizers.
//! * [`flow`]: the structured candidate families, their closed-form normalized energies,
//!   the exact per-step argmin (behind the [`flow::StepSolver`] registry) and the evolution loop.
//! * [`limit`]: continuum side-length ODEs (behind the [`limit::VelocityLaw`] registry) and an
//!   event-aware integrator.
//! * [`oracle`]: brute-force subset enumeration used as ground truth at desk scale.
//! * [`experiments`]: convergence studies, algebra cross-checks and regime sweeps.
//!
//! All energy comparisons use exact rationals; only the continuum layer uses `f64`.

pub mod error;
pub mod experiments;
pub mod flow;
pub mod lattice;
pub mod limit;
pub mod oracle;
pub mod rational;

pub use error::{Error, Result};
pub use lattice::{DiscreteSet, LatticePoint, Params, Rect, RectState, Regime};
pub use rational::Rational;
