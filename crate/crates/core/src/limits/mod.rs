//! Vanishing viscosity-dispersion experiments: the ν-scaled family with
//! diffusion νε and dispersion ν²δ, the exact scaling relations between
//! its members, and the distance to the shifted Riemann shock.

pub mod riemann;
pub mod scaling;
pub mod sweep;

pub use riemann::{riemann_distance, RiemannShock};
pub use scaling::{scaled_config, scaled_run, verify_scaling, GridPolicy, ScalingDeviation};
pub use sweep::{fit_sqrt, nu_sweep, DistancePoint, LimitConfig, LimitRun, NuRun, SqrtFit, SweepRow};
