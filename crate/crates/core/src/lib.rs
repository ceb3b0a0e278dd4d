//! Numerical laboratory for oscillatory shock profiles of the KdV–Burgers
//! equation `u_t + (u²/2)_x = ε u_xx − δ u_xxx`.
//!
//! * [`numerics`]: ODE integration, quadrature, root finding, banded solves.
//! * [`profile`]: traveling-wave profiles and their extrema.
//! * [`verify`]: certificates for the structural inequalities of the profile.
//! * [`pde`]: time-dependent simulation with a shift and contraction monitor.
//! * [`limits`]: scaled families and distance to the Riemann shock.
//! * [`report`]: float formatting, CSV and provenance records.
//! * [`cli`]: the `shocklab` command-line front end.

pub mod cli;
pub mod error;
pub mod limits;
pub mod numerics;
pub mod profile;
pub mod pde;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
