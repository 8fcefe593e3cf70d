//! Continuum limit of the discrete flow: side-length velocity laws and their integration.

mod integrate;
mod law;

pub use integrate::{integrate, EventKind, IntegrateConfig, LimitEvent, LimitTrace, SideLengths};
pub use law::{
    crystalline_reference, curvature_velocity, displacement_count, pinning_threshold, rhs,
    rhs_infinite_gamma, slow_floor, CrystallineLaw, FloorBranch, FloorLaw, InfiniteGammaLaw,
    LawRegistry, LimitParams, VelocityLaw,
};
