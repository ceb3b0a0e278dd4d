//! Numerical kernels: adaptive ODE integration with dense output and events,
//! quadrature, bracketed root finding and banded linear solves.

pub mod banded;
pub mod ode;
pub mod quad;
pub mod root;

use serde::{Deserialize, Serialize};

pub use banded::{solve_banded, BandedLu, BandedMatrix};
pub use ode::{integrate_ode, DenseTrajectory, EventHit, Flow, OdeSolution, StepInfo};
pub use quad::{chebyshev_points, quad_adaptive, quad_composite, simpson, trapezoid, QuadResult};
pub use root::find_root;

use crate::error::{Error, Result};

/// Tolerances used by integrators, event location and inequality checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceSet {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub event_tol: f64,
    /// Relative slack allowed when asserting an inequality on sampled data.
    pub margin_tol: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            event_tol: 1e-12,
            margin_tol: 1e-7,
        }
    }
}

impl ToleranceSet {
    pub fn validate(&self) -> Result<()> {
        let all = [self.abs_tol, self.rel_tol, self.event_tol, self.margin_tol];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidParams(format!(
                "tolerances must be strictly positive: {self:?}"
            )));
        }
        if self.margin_tol < self.event_tol {
            return Err(Error::InvalidParams(
                "margin_tol must be at least event_tol".into(),
            ));
        }
        Ok(())
    }

    /// Multiply every tolerance by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            event_tol: self.event_tol * factor,
            margin_tol: self.margin_tol * factor,
        }
    }
}
