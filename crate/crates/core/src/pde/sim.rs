//! Time stepping of the perturbed profile together with the shift X(t).

use serde::Serialize;

use super::config::SimConfig;
use super::operator::{active_rows, derivative, pinned_width, Coefficients, Grid, ImexStepper};
use super::trace::{ContractionTrace, LyapunovWeights, RunSummary, StepRecord};
use crate::error::{Error, Result};
use crate::profile::Profile;

/// Sign convention of the shift ODE, recorded in every report.
pub const SHIFT_SIGN_NOTE: &str =
    "shift rate uses the dissipative sign: dX/dt = -(2M/(u_- - u_+)) * integral of w * u'(x - X)";

/// Solution at one time level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimState {
    pub step: usize,
    pub t: f64,
    pub u: Vec<f64>,
    /// X(t).
    pub shift: f64,
    /// Ẋ(t).
    pub shift_rate: f64,
    /// u − ũ^ν(· − X) on the grid.
    pub w: Vec<f64>,
}

/// Reference profile and perturbation quantities at one shift.
#[derive(Debug, Clone)]
pub struct FieldEval {
    pub w: Vec<f64>,
    /// ũ^ν′(x − X).
    pub reference_slope: Vec<f64>,
    /// ∫ w ũ′.
    pub inner: f64,
    pub shift_rate: f64,
}

/// Integrals entering the energy identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// ‖w‖².
    pub l2w2: f64,
    /// ∫ w ũ′.
    pub inner: f64,
    /// ∫ w² ũ′.
    pub cubic: f64,
    /// ‖w_x‖².
    pub grad2: f64,
}

/// A configured simulation against one reference profile.
#[derive(Debug, Clone)]
pub struct Simulation<'p> {
    pub config: SimConfig,
    pub grid: Grid,
    pub stepper: ImexStepper,
    profile: &'p Profile,
    nodes: Vec<f64>,
}

impl<'p> Simulation<'p> {
    pub fn new(profile: &'p Profile, config: &SimConfig) -> Result<Self> {
        let grid = config.validate(profile)?;
        let nu = config.nu;
        let coeffs = Coefficients { eps: nu * profile.params.eps, delta: nu * nu * profile.delta(), flux: true };
        let mut stepper = ImexStepper::new(grid, config.scheme.order, coeffs, config.dt)?;
        let sim_nodes = grid.nodes();
        if config.scheme.well_balanced {
            let (reference, _) = reference_at(profile, nu, &sim_nodes, 0.0);
            stepper.balance(&reference)?;
        }
        Ok(Simulation { config: config.clone(), grid, stepper, profile, nodes: sim_nodes })
    }

    pub fn profile(&self) -> &Profile {
        self.profile
    }

    /// Diffusion coefficient of the simulated equation.
    pub fn eps(&self) -> f64 {
        self.stepper.coeffs.eps
    }

    fn jump(&self) -> f64 {
        self.profile.params.u_minus - self.profile.params.u_plus
    }

    /// w, ũ′ and Ẋ for the field `u` at shift `shift`.
    pub fn evaluate(&self, u: &[f64], shift: f64) -> FieldEval {
        let (reference, slope) = reference_at(self.profile, self.config.nu, &self.nodes, shift);
        let w: Vec<f64> = u.iter().zip(&reference).map(|(a, b)| a - b).collect();
        let prod: Vec<f64> = w.iter().zip(&slope).map(|(a, b)| a * b).collect();
        let inner = self.grid.integrate(&prod);
        FieldEval { w, reference_slope: slope, inner, shift_rate: -(2.0 * self.config.shift_gain / self.jump()) * inner }
    }

    pub fn diagnostics(&self, eval: &FieldEval) -> Result<Diagnostics> {
        let w2: Vec<f64> = eval.w.iter().map(|v| v * v).collect();
        let cubic: Vec<f64> = w2.iter().zip(&eval.reference_slope).map(|(a, b)| a * b).collect();
        let wx = derivative(&self.grid, self.config.scheme.order, 1, &eval.w)?;
        let wx2: Vec<f64> = wx.iter().map(|v| v * v).collect();
        Ok(Diagnostics {
            l2w2: self.grid.integrate(&w2),
            inner: eval.inner,
            cubic: self.grid.integrate(&cubic),
            grad2: self.grid.integrate(&wx2),
        })
    }

    /// Initial state: ũ^ν + perturbation, X = 0.
    pub fn initial_state(&self) -> SimState {
        let u = self.config.initial_data(self.profile, &self.grid);
        let eval = self.evaluate(&u, 0.0);
        SimState { step: 0, t: 0.0, u, shift: 0.0, shift_rate: eval.shift_rate, w: eval.w }
    }

    /// One IMEX step for u and one Heun step for X.
    pub fn step(&self, state: &SimState) -> Result<(SimState, FieldEval)> {
        let u = self.stepper.step(&state.u)?;
        let next = state.step + 1;
        let t = next as f64 * self.config.dt;
        if let Some(j) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::SimulationAbort { t, reason: format!("non-finite value at node {j}") });
        }
        let dt = self.config.dt;
        let predicted = state.shift + dt * state.shift_rate;
        let rate_pred = self.evaluate(&u, predicted).shift_rate;
        let shift = state.shift + 0.5 * dt * (state.shift_rate + rate_pred);
        if !shift.is_finite() {
            return Err(Error::SimulationAbort { t, reason: "non-finite shift".into() });
        }
        let eval = self.evaluate(&u, shift);
        let p = pinned_width(self.config.scheme.order);
        let edge = eval.w[p].abs().max(eval.w[eval.w.len() - 1 - p].abs());
        if edge > 1e-6 * self.profile.s() {
            return Err(Error::SimulationAbort {
                t,
                reason: format!("perturbation reached the boundary: |w| = {edge:e} next to a pinned node"),
            });
        }
        let state = SimState { step: next, t, u, shift, shift_rate: eval.shift_rate, w: eval.w.clone() };
        Ok((state, eval))
    }

    /// Run to the horizon, recording the trace.
    pub fn run(&self) -> Result<SimRun> {
        self.run_with(false)
    }

    /// Run to the horizon; with `keep_snapshots` the field is stored at
    /// every trace time.
    pub fn run_with(&self, keep_snapshots: bool) -> Result<SimRun> {
        let steps = self.config.steps();
        let mut state = self.initial_state();
        let first = self.evaluate(&state.u, 0.0);
        let mut records = vec![StepRecord::new(&state, &self.diagnostics(&first)?)];
        let mut snapshots = Vec::new();
        if keep_snapshots {
            snapshots.push(Snapshot { step: 0, t: 0.0, shift: 0.0, u: state.u.clone() });
        }
        let mut aborted = None;
        for _ in 0..steps {
            match self.step(&state) {
                Ok((next, eval)) => {
                    records.push(StepRecord::new(&next, &self.diagnostics(&eval)?));
                    state = next;
                    if keep_snapshots && state.step % self.config.output_every == 0 {
                        snapshots.push(Snapshot { step: state.step, t: state.t, shift: state.shift, u: state.u.clone() });
                    }
                }
                Err(Error::SimulationAbort { t, reason }) => {
                    aborted = Some(format!("aborted at t = {t}: {reason}"));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let weights = LyapunovWeights::stated(self.jump(), self.config.shift_gain, self.eps());
        let trace = ContractionTrace::from_records(&records, weights, self.eps(), self.config.dt, self.profile.s(), self.config.output_every);
        let summary = RunSummary::new(self, &records, &trace, aborted);
        Ok(SimRun { grid: self.grid, state, trace, summary, snapshots })
    }
}

/// Field at one trace time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub shift: f64,
    pub u: Vec<f64>,
}

/// Result of a complete run.
#[derive(Debug, Clone, Serialize)]
pub struct SimRun {
    pub grid: Grid,
    pub state: SimState,
    pub trace: ContractionTrace,
    pub summary: RunSummary,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
}

/// ũ^ν(x − X) and ũ^ν′(x − X) at increasing `nodes`.
pub fn reference_at(profile: &Profile, nu: f64, nodes: &[f64], shift: f64) -> (Vec<f64>, Vec<f64>) {
    let xi: Vec<f64> = nodes.iter().map(|x| (x - shift) / nu).collect();
    let mut u = vec![0.0; xi.len()];
    let mut du = vec![0.0; xi.len()];
    profile.sample_sorted(&xi, &mut u, &mut du);
    du.iter_mut().for_each(|d| *d /= nu);
    (u, du)
}

/// Build the initial state for `config`.
pub fn init_sim(profile: &Profile, config: &SimConfig) -> Result<SimState> {
    Ok(Simulation::new(profile, config)?.initial_state())
}

/// Ẋ = −(2M/(u₋ − u₊)) ∫ w ũ′(x − X) dx for the field `u`.
pub fn shift_rhs(sim: &Simulation, u: &[f64], shift: f64) -> f64 {
    sim.evaluate(u, shift).shift_rate
}

/// Configure and run in one call.
pub fn run(config: &SimConfig, profile: &Profile) -> Result<SimRun> {
    Simulation::new(profile, config)?.run()
}

/// Sum of the flux term over the active rows times Δx: the rate of change
/// of ∫u from convection alone.
pub fn convective_mass_rate(grid: &Grid, order: usize, u: &[f64]) -> Result<f64> {
    let mut out = vec![0.0; u.len()];
    super::operator::flux_term(grid, order, u, &mut out)?;
    Ok(active_rows(grid, order).map(|j| out[j]).sum::<f64>() * grid.dx)
}
