//! Viscous-dispersive shock profiles: parameters, equilibria and the
//! heteroclinic orbit with its extrema and interval markers.

mod eigen;
mod params;
mod shape;

pub use eigen::{equilibrium_eigen, linearized_decay_ratio, DecayRatios, EigenPair, Equilibria};
pub use params::{normalize, FrameMap, ShockParams};
pub use shape::{
    compute_profile, detect_extrema, effective_energy, energy_value, locate_markers, Extremum,
    ExtremumKind, IntervalMarkers, MarkerSet, Profile, ProfileOptions,
};
