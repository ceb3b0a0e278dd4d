//! Time-dependent KdV–Burgers simulation around a traveling profile, with
//! the shift ODE and the contraction monitor.
//!
//! Runs take place in the normalized frame on a truncated line whose outer
//! nodes are pinned to the end states.

pub mod checkpoint;
pub mod config;
pub mod operator;
pub mod sim;
pub mod study;
pub mod trace;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointHeader};
pub use config::{Perturbation, SchemeOptions, SimConfig};
pub use operator::{Boundary, Coefficients, Grid, ImexStepper};
pub use sim::{init_sim, run, shift_rhs, SimRun, SimState, Simulation, Snapshot, SHIFT_SIGN_NOTE};
pub use study::{galilean_check, refined, refinement_study, run_difference, GalileanReport, RefinementStudy, RunDifference};
pub use trace::{key1_residual, lyapunov, ContractionTrace, LyapunovParts, LyapunovWeights, RunSummary, TracePoint};
