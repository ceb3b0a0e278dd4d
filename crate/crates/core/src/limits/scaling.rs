//! The ν-scaled family u^ν(t, x) = u(t/ν, x/ν) and checks of the exact
//! scaling relations between runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::{SimConfig, SimRun, Simulation};
use crate::profile::Profile;

/// How the grid of a ν-run relates to the base grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPolicy {
    /// Δx, dt and the domain all multiplied by ν: the image of the base
    /// grid under x ↦ νx, t ↦ νt.
    #[default]
    Scaled,
    /// Δx kept, dt and the domain multiplied by ν: a coarser
    /// discretization of the same rescaled problem.
    Fixed,
}

/// Configuration of the ν-run that covers the base run's time interval
/// [0, T] as [0, νT].
pub fn scaled_config(base: &SimConfig, nu: f64, policy: GridPolicy) -> Result<SimConfig> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::Config(format!("nu must be positive and finite, got {nu}")));
    }
    if base.nu != 1.0 {
        return Err(Error::Config("the base configuration must have nu = 1".into()));
    }
    let grid_size = match policy {
        GridPolicy::Scaled => base.grid_size,
        GridPolicy::Fixed => {
            let n = base.grid_size as f64 * nu;
            if n.fract() != 0.0 {
                return Err(Error::Config(format!(
                    "grid size {} times nu = {nu} is not an integer",
                    base.grid_size
                )));
            }
            n as usize
        }
    };
    Ok(SimConfig {
        half_width: base.half_width * nu,
        grid_size,
        dt: base.dt * nu,
        horizon: base.horizon * nu,
        nu,
        ..base.clone()
    })
}

/// Run the scaled equation with data u₀(x/ν), keeping snapshots. Refuses
/// grids that do not resolve the compressed oscillation.
pub fn scaled_run(profile: &Profile, base: &SimConfig, nu: f64, policy: GridPolicy) -> Result<SimRun> {
    Simulation::new(profile, &scaled_config(base, nu, policy)?)?.run_with(true)
}

/// Largest departures from u(t, x) = u^ν(νt, νx) and X_ν(t) = νX(t/ν).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingDeviation {
    pub nu: f64,
    pub max_shift: f64,
    pub max_u: f64,
    /// Snapshot times compared.
    pub samples: usize,
    /// Base nodes per ν-run node after rescaling.
    pub stride: usize,
}

/// Compare a ν-run with the base run at every shared snapshot time, on the
/// ν-run nodes whose preimages x/ν are base nodes.
pub fn verify_scaling(scaled: &SimRun, base: &SimRun, nu: f64) -> Result<ScalingDeviation> {
    let (gs, gb) = (scaled.grid, base.grid);
    let stride = gs.dx / (nu * gb.dx);
    let k = stride.round();
    if k < 1.0 || (stride - k).abs() > 1e-9 * stride {
        return Err(Error::Dimension(format!("rescaled spacing ratio {stride} is not a positive integer")));
    }
    let stride = k as usize;
    if (gs.x0 - nu * gb.x0).abs() > 1e-9 * gb.x0.abs().max(1.0) || (gs.len - 1) * stride != gb.len - 1 {
        return Err(Error::Dimension("rescaled grids do not cover the same interval".into()));
    }
    if scaled.snapshots.is_empty() || scaled.snapshots.len() != base.snapshots.len() {
        return Err(Error::Dimension(format!(
            "snapshot counts differ: {} and {}",
            scaled.snapshots.len(),
            base.snapshots.len()
        )));
    }
    let mut out = ScalingDeviation { nu, max_shift: 0.0, max_u: 0.0, samples: 0, stride };
    for (a, b) in scaled.snapshots.iter().zip(&base.snapshots) {
        if (a.t - nu * b.t).abs() > 1e-9 * b.t.max(1.0) {
            return Err(Error::Dimension(format!("snapshot at {} does not match {} under t -> nu t", a.t, b.t)));
        }
        out.max_shift = out.max_shift.max((a.shift - nu * b.shift).abs());
        for (j, v) in a.u.iter().enumerate() {
            out.max_u = out.max_u.max((v - b.u[j * stride]).abs());
        }
        out.samples += 1;
    }
    Ok(out)
}
