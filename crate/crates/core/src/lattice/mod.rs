//! Lattice layer: sites of the square lattice, the strong/weak bond pattern, the perimeter
//! energy `F`, the dissipation `D`, the step energy `F + D/tau`, 8-connectivity, and the
//! decomposition of a set into a bulky rectangle plus weak islands.

mod connectivity;
mod distance;
mod energy;
mod params;
mod point;
mod set;
mod structure;

pub use connectivity::{connected_components, is_connected};
pub use distance::{distance_to_complement, distance_to_set, ring_distance, DistanceField};
pub use energy::{
    cut_bonds, dissipation, dissipation_sum, perimeter_energy, step_counts, step_energy,
    BondCounts, Energy, EnergyWeights, StepCounts,
};
pub use params::{Params, Regime};
pub use point::{bond_kind, BondKind, LatticePoint};
pub use set::{BBox, DiscreteSet};
pub use structure::{decompose, Decomposition, Rect, RectState, StructureViolation};
