//! Sweeps over ν of the distance to the shifted Riemann shock, with a
//! least-squares fit of the excess against √ν.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::riemann::{riemann_distance, RiemannShock};
use super::scaling::{scaled_run, GridPolicy};
use crate::error::{Error, Result};
use crate::pde::{ContractionTrace, RunSummary, SimConfig, SimRun};
use crate::profile::Profile;

/// Settings of a ν-sweep. `sim` describes the unscaled problem; every
/// ν-run covers the same physical interval [0, horizon].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitConfig {
    pub sim: SimConfig,
    /// Strictly decreasing positive values.
    pub nu_list: Vec<f64>,
    pub horizon: f64,
    pub policy: GridPolicy,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            sim: SimConfig::default(),
            nu_list: vec![1.0, 0.5, 0.25, 0.125],
            horizon: 6.4,
            policy: GridPolicy::Scaled,
        }
    }
}

impl LimitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nu_list.is_empty() {
            return Err(Error::Config("nu_list is empty".into()));
        }
        if self.nu_list.iter().any(|&nu| !(nu > 0.0 && nu.is_finite())) {
            return Err(Error::Config(format!("nu values must be positive: {:?}", self.nu_list)));
        }
        if self.nu_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(format!("nu_list must be strictly decreasing: {:?}", self.nu_list)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }

    /// Base configuration whose ν-image ends at the physical horizon.
    fn base_for(&self, nu: f64) -> SimConfig {
        SimConfig { horizon: self.horizon / nu, ..self.sim.clone() }
    }
}

/// Distances at one trace time of a ν-run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistancePoint {
    pub t: f64,
    /// ‖u^ν − ū(· − Y_ν)‖.
    pub distance: f64,
    /// ‖u^ν − ũ^ν(· − Y_ν)‖.
    pub perturbation: f64,
    pub shift: f64,
}

/// One member of the ν family.
#[derive(Debug, Clone, Serialize)]
pub struct NuRun {
    pub nu: f64,
    /// ‖u₀^ν − ũ^ν‖.
    pub initial_perturbation: f64,
    /// ‖u₀^ν − ū‖.
    pub initial_distance: f64,
    /// ‖ũ^ν − ū‖.
    pub profile_gap: f64,
    /// max over t of ‖u^ν − ū(· − Y_ν)‖ − ‖u₀^ν − ũ^ν‖.
    pub excess_max: f64,
    /// max over t of ‖u^ν − ū(· − Y_ν)‖ − ‖u₀^ν − ū‖.
    pub datum_excess_max: f64,
    pub distances: Vec<DistancePoint>,
    pub summary: RunSummary,
    #[serde(skip)]
    pub trace: ContractionTrace,
}

impl NuRun {
    pub fn from_run(profile: &Profile, nu: f64, run: &SimRun) -> Result<Self> {
        let shock = RiemannShock::of(&profile.params);
        let grid = run.grid;
        let first = run
            .snapshots
            .first()
            .ok_or_else(|| Error::Dimension("limit runs need snapshots".into()))?;
        let (reference, _) = crate::pde::sim::reference_at(profile, nu, &grid.nodes(), 0.0);
        let distances: Vec<DistancePoint> = run
            .snapshots
            .iter()
            .zip(run.trace.points.iter())
            .map(|(snap, point)| DistancePoint {
                t: snap.t,
                distance: riemann_distance(&grid, &snap.u, &shock, snap.t, snap.shift),
                perturbation: point.l2w2.sqrt(),
                shift: snap.shift,
            })
            .collect();
        let initial_perturbation = run.trace.initial_l2w2.sqrt();
        let initial_distance = riemann_distance(&grid, &first.u, &shock, 0.0, 0.0);
        let peak = distances.iter().map(|d| d.distance).fold(f64::NEG_INFINITY, f64::max);
        Ok(NuRun {
            nu,
            initial_perturbation,
            initial_distance,
            profile_gap: riemann_distance(&grid, &reference, &shock, 0.0, 0.0),
            excess_max: peak - initial_perturbation,
            datum_excess_max: peak - initial_distance,
            distances,
            summary: run.summary.clone(),
            trace: run.trace.clone(),
        })
    }
}

/// Least-squares fit y ≈ a·√ν.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqrtFit {
    pub slope: f64,
    /// ‖y − a√ν‖ / ‖y‖; `None` for a degenerate fit.
    pub residual: Option<f64>,
    /// Fewer than two points or all excesses zero.
    pub degenerate: bool,
    /// a > 0 and every y ≤ 1.2·a√ν.
    pub within_band: bool,
}

pub fn fit_sqrt(nu: &[f64], y: &[f64]) -> SqrtFit {
    let num: f64 = nu.iter().zip(y).map(|(n, v)| n.sqrt() * v).sum();
    let den: f64 = nu.iter().sum();
    let slope = if den > 0.0 { num / den } else { 0.0 };
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let degenerate = nu.len() < 2 || norm == 0.0;
    let residual = (!degenerate).then(|| {
        nu.iter().zip(y).map(|(n, v)| (v - slope * n.sqrt()).powi(2)).sum::<f64>().sqrt() / norm
    });
    let within_band = slope > 0.0 && nu.iter().zip(y).all(|(n, v)| *v <= 1.2 * slope * n.sqrt());
    SqrtFit { slope, residual, degenerate, within_band }
}

/// One line of the sweep report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub nu: f64,
    pub excess_max: f64,
    pub fit_slope: f64,
    pub fit_residual: Option<f64>,
}

/// A completed sweep.
#[derive(Debug, Clone, Serialize)]
pub struct LimitRun {
    pub nu_list: Vec<f64>,
    pub runs: Vec<NuRun>,
    pub fit: SqrtFit,
    pub notes: Vec<String>,
}

impl LimitRun {
    pub fn rows(&self) -> Vec<SweepRow> {
        self.runs
            .iter()
            .map(|r| SweepRow { nu: r.nu, excess_max: r.excess_max, fit_slope: self.fit.slope, fit_residual: self.fit.residual })
            .collect()
    }
}

/// Run every ν of `config` on at most `jobs` threads and fit the excess.
pub fn nu_sweep(profile: &Profile, config: &LimitConfig, jobs: usize) -> Result<LimitRun> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let runs: Vec<NuRun> = pool.install(|| {
        config
            .nu_list
            .par_iter()
            .map(|&nu| {
                let run = scaled_run(profile, &config.base_for(nu), nu, config.policy)?;
                NuRun::from_run(profile, nu, &run)
            })
            .collect::<Result<_>>()
    })?;
    let excess: Vec<f64> = runs.iter().map(|r| r.excess_max).collect();
    let fit = fit_sqrt(&config.nu_list, &excess);
    let mut notes = vec![
        "excess_max = max_t ||u^nu - ubar(. - Y_nu)|| - ||u0^nu - utilde^nu||".to_string(),
        "datum_excess_max = max_t ||u^nu - ubar(. - Y_nu)|| - ||u0^nu - ubar||".to_string(),
    ];
    if fit.degenerate {
        notes.push("degenerate fit: fewer than two nu values or vanishing excess".into());
    }
    Ok(LimitRun { nu_list: config.nu_list.clone(), runs, fit, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_square_root() {
        let nu = [1.0, 0.5, 0.25];
        let y: Vec<f64> = nu.iter().map(|n: &f64| 0.7 * n.sqrt()).collect();
        let f = fit_sqrt(&nu, &y);
        assert!((f.slope - 0.7).abs() < 1e-15);
        assert!(f.residual.unwrap() < 1e-15);
        assert!(f.within_band && !f.degenerate);
    }

    #[test]
    fn degenerate_fits() {
        let f = fit_sqrt(&[1.0], &[0.3]);
        assert!(f.degenerate && f.residual.is_none());
        assert!((f.slope - 0.3).abs() < 1e-15);
        assert!(fit_sqrt(&[1.0, 0.5], &[0.0, 0.0]).degenerate);
    }

    #[test]
    fn linear_data_leaves_a_residual() {
        let nu = [1.0, 0.5, 0.25, 0.125];
        let f = fit_sqrt(&nu, &nu);
        assert!(f.residual.unwrap() > 0.05);
    }

    #[test]
    fn list_must_decrease() {
        let c = LimitConfig { nu_list: vec![0.5, 1.0], ..LimitConfig::default() };
        assert!(c.validate().is_err());
        let c = LimitConfig { nu_list: vec![], ..LimitConfig::default() };
        assert!(c.validate().is_err());
    }
}
