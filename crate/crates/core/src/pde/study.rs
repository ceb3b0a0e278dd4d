//! Refinement studies and the Galilean frame check.

use rayon::prelude::*;
use serde::Serialize;

use super::config::SimConfig;
use super::operator::{Coefficients, Grid, ImexStepper};
use super::sim::{SimRun, Simulation};
use crate::error::{Error, Result};
use crate::profile::Profile;

/// `config` with Δx and dt divided by 2ᵏ and the trace cadence kept.
pub fn refined(config: &SimConfig, k: u32) -> SimConfig {
    let f = 1usize << k;
    SimConfig {
        grid_size: config.grid_size * f,
        dt: config.dt / f as f64,
        output_every: config.output_every * f,
        ..config.clone()
    }
}

/// `fine ≤ coarse/factor`; true when both vanish.
pub fn shrinks(coarse: f64, fine: f64, factor: f64) -> bool {
    fine * factor <= coarse
}

/// One level of a refinement study.
#[derive(Debug, Clone, Serialize)]
pub struct LevelResult {
    pub grid_size: usize,
    pub dt: f64,
    pub dx: f64,
    pub max_violation: f64,
    pub tolerance_band: f64,
    pub proof_max_violation: f64,
    pub max_key1_residual: f64,
    pub pass: bool,
}

/// Violations and energy residuals over successive refinements.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementStudy {
    pub levels: Vec<LevelResult>,
    /// log₂ of successive key1 residual ratios.
    pub key1_orders: Vec<f64>,
    /// Successive violation ratios coarse/fine (`None` when the finer
    /// violation vanishes).
    pub violation_ratios: Vec<Option<f64>>,
    /// Every level shrinks its violation at least threefold.
    pub violations_shrink: bool,
}

impl RefinementStudy {
    /// Smallest observed order of the energy residual.
    pub fn min_key1_order(&self) -> f64 {
        self.key1_orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Run `config` refined 0, 1, …, `levels − 1` times (in parallel).
pub fn refinement_runs(profile: &Profile, config: &SimConfig, levels: u32) -> Result<Vec<SimRun>> {
    (0..levels)
        .into_par_iter()
        .map(|k| Simulation::new(profile, &refined(config, k))?.run_with(true))
        .collect()
}

pub fn refinement_study(profile: &Profile, config: &SimConfig, levels: u32) -> Result<RefinementStudy> {
    let runs = refinement_runs(profile, config, levels)?;
    Ok(study_from_runs(&runs))
}

pub fn study_from_runs(runs: &[SimRun]) -> RefinementStudy {
    let levels: Vec<LevelResult> = runs
        .iter()
        .map(|r| LevelResult {
            grid_size: r.state.u.len() - 1,
            dt: r.summary.dt,
            dx: r.summary.dx,
            max_violation: r.summary.max_violation,
            tolerance_band: r.summary.tolerance_band,
            proof_max_violation: r.summary.proof_max_violation,
            max_key1_residual: r.summary.max_key1_residual,
            pass: r.summary.pass,
        })
        .collect();
    let pairs: Vec<(&LevelResult, &LevelResult)> = levels.iter().zip(levels.iter().skip(1)).collect();
    RefinementStudy {
        key1_orders: pairs.iter().map(|(a, b)| (a.max_key1_residual / b.max_key1_residual).log2()).collect(),
        violation_ratios: pairs
            .iter()
            .map(|(a, b)| (b.max_violation > 0.0).then(|| a.max_violation / b.max_violation))
            .collect(),
        violations_shrink: pairs.iter().all(|(a, b)| shrinks(a.max_violation, b.max_violation, 3.0)),
        levels,
    }
}

/// Largest differences of u and X between two runs whose grids are nested
/// with ratio 2ᵏ and whose snapshots share trace times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunDifference {
    pub max_u: f64,
    pub max_shift: f64,
    pub samples: usize,
}

pub fn run_difference(coarse: &SimRun, fine: &SimRun) -> Result<RunDifference> {
    let (nc, nf) = (coarse.state.u.len() - 1, fine.state.u.len() - 1);
    if nf % nc != 0 {
        return Err(Error::Dimension(format!("grids of {nc} and {nf} intervals are not nested")));
    }
    let ratio = nf / nc;
    let mut out = RunDifference { max_u: 0.0, max_shift: 0.0, samples: 0 };
    for (a, b) in coarse.snapshots.iter().zip(&fine.snapshots) {
        if (a.t - b.t).abs() > 1e-9 * a.t.abs().max(1.0) {
            return Err(Error::Dimension(format!("snapshot times {} and {} differ", a.t, b.t)));
        }
        for (j, v) in a.u.iter().enumerate() {
            out.max_u = out.max_u.max((v - b.u[j * ratio]).abs());
        }
        out.max_shift = out.max_shift.max((a.shift - b.shift).abs());
        out.samples += 1;
    }
    if out.samples == 0 {
        return Err(Error::Dimension("runs carry no snapshots".into()));
    }
    Ok(out)
}

/// Outcome of comparing a moving-frame run with the normalized run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GalileanReport {
    pub eps: f64,
    pub sigma: f64,
    pub delta: f64,
    pub dt: f64,
    pub max_deviation: f64,
    pub samples: usize,
}

/// Simulate the un-normalized equation with viscosity `eps`, dispersion
/// δε² and states σ ± s, and compare with the normalized run mapped by
/// u = σ + v(t/ε, (x − σt)/ε). The time step is Δx/(σ q), so the frame
/// moves one node every `q` steps and the comparison needs no
/// interpolation. Neither run is well balanced.
pub fn galilean_check(profile: &Profile, config: &SimConfig, eps: f64, sigma: f64, q: usize) -> Result<GalileanReport> {
    if !(sigma > 0.0 && eps > 0.0 && q > 0) {
        return Err(Error::Config("galilean check needs sigma > 0, eps > 0 and q >= 1".into()));
    }
    let grid = config.grid();
    let dt = grid.dx / (sigma * q as f64);
    let steps = (config.horizon / dt).round() as usize / q * q;
    let cfg = SimConfig { dt, horizon: steps as f64 * dt, ..config.clone() };
    let grid = cfg.validate(profile)?;
    let order = cfg.scheme.order;
    let v0 = cfg.initial_data(profile, &grid);
    let moved = steps / q;
    let delta = profile.delta();
    let normalized = ImexStepper::new(grid, order, Coefficients { eps: 1.0, delta, flux: true }, dt)?;

    let wide = Grid { x0: eps * grid.x0, dx: eps * grid.dx, len: grid.len + moved, boundary: grid.boundary };
    let far: Vec<f64> = (grid.len..wide.len).map(|j| grid.x(j)).collect();
    let mut tail = vec![0.0; far.len()];
    let mut dtail = vec![0.0; far.len()];
    profile.sample_sorted(&far, &mut tail, &mut dtail);
    let tail_pert = cfg.perturbation.sample(profile, &far);
    let mut u: Vec<f64> = v0.iter().map(|v| sigma + v).collect();
    u.extend(tail.iter().zip(&tail_pert).map(|(a, b)| sigma + a + b));
    let moving = ImexStepper::new(wide, order, Coefficients { eps, delta: delta * eps * eps, flux: true }, eps * dt)?;
    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if eps * dt * umax / wide.dx > 0.5 {
        return Err(Error::Precondition(format!("moving-frame CFL number {} exceeds 0.5", eps * dt * umax / wide.dx)));
    }

    let mut v = v0;
    let margin = 4 * (order / 2 + 1);
    let mut report = GalileanReport { eps, sigma, delta: delta * eps * eps, dt: eps * dt, max_deviation: 0.0, samples: 0 };
    for n in 1..=steps {
        v = normalized.step(&v)?;
        u = moving.step(&u)?;
        if n % q == 0 {
            let m = n / q;
            for i in margin..grid.len - margin {
                report.max_deviation = report.max_deviation.max((u[i + m] - (sigma + v[i])).abs());
            }
            report.samples += 1;
        }
    }
    Ok(report)
}
