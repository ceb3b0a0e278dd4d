//! Contraction monitor: the Lyapunov total and the residual of the energy
//! identity along a run.

use serde::Serialize;

use super::sim::{Diagnostics, SimState, Simulation, SHIFT_SIGN_NOTE};
use crate::report;

/// Per-step quantities kept during a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub shift: f64,
    pub shift_rate: f64,
    pub diag: Diagnostics,
}

impl StepRecord {
    pub fn new(state: &SimState, diag: &Diagnostics) -> Self {
        StepRecord { step: state.step, t: state.t, shift: state.shift, shift_rate: state.shift_rate, diag: *diag }
    }
}

/// Weights of the accumulated shift and dissipation terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovWeights {
    pub shift: f64,
    pub dissipation: f64,
}

impl LyapunovWeights {
    /// (u₋ − u₊)/M and ε/10, as in the contraction statement.
    pub fn stated(jump: f64, gain: f64, eps: f64) -> Self {
        LyapunovWeights { shift: jump / gain, dissipation: eps / 10.0 }
    }

    /// (u₋ − u₊)/(2M) and ε/5: the weights delivered by the differential
    /// inequality closing the contraction argument.
    pub fn proof(jump: f64, gain: f64, eps: f64) -> Self {
        LyapunovWeights { shift: jump / (2.0 * gain), dissipation: eps / 5.0 }
    }
}

/// One row of the trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    /// ‖w‖².
    pub l2w2: f64,
    /// Weighted ∫₀ᵗ Ẋ².
    pub shift_term: f64,
    /// Weighted ∫₀ᵗ ‖w_x‖².
    pub dissipation: f64,
    pub total: f64,
    pub shift: f64,
    pub shift_rate: f64,
    /// Energy identity residual in units of s³.
    pub key1_residual: f64,
}

/// Components of the Lyapunov functional at one trace point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovParts {
    pub l2w2: f64,
    pub shift_term: f64,
    pub dissipation: f64,
    pub total: f64,
}

pub fn lyapunov(point: &TracePoint) -> LyapunovParts {
    LyapunovParts {
        l2w2: point.l2w2,
        shift_term: point.shift_term,
        dissipation: point.dissipation,
        total: point.l2w2 + point.shift_term + point.dissipation,
    }
}

/// Trace at the output cadence plus full-resolution verdict quantities.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionTrace {
    pub weights: LyapunovWeights,
    pub points: Vec<TracePoint>,
    pub initial_l2w2: f64,
    /// Largest rise of the Lyapunov total above its running minimum,
    /// over every step.
    pub max_violation: f64,
    pub max_key1_residual: f64,
}

pub const TRACE_HEADER: [&str; 8] =
    ["t", "l2w2", "shift_term_cum", "dissipation_cum", "lyapunov_total", "X", "Xdot", "key1_residual"];

/// Running integrals ∫Ẋ² and ∫‖w_x‖² by the trapezoid rule in time.
pub fn cumulative_integrals(records: &[StepRecord], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let mut shift = vec![0.0; records.len()];
    let mut diss = vec![0.0; records.len()];
    for n in 1..records.len() {
        let (a, b) = (&records[n - 1], &records[n]);
        shift[n] = shift[n - 1] + 0.5 * dt * (a.shift_rate.powi(2) + b.shift_rate.powi(2));
        diss[n] = diss[n - 1] + 0.5 * dt * (a.diag.grad2 + b.diag.grad2);
    }
    (shift, diss)
}

/// Lyapunov totals at every step.
pub fn lyapunov_totals(records: &[StepRecord], weights: LyapunovWeights, dt: f64) -> Vec<f64> {
    let (shift, diss) = cumulative_integrals(records, dt);
    records
        .iter()
        .enumerate()
        .map(|(n, r)| r.diag.l2w2 + weights.shift * shift[n] + weights.dissipation * diss[n])
        .collect()
}

/// Largest rise of a series above its running minimum.
pub fn max_rise(series: &[f64]) -> f64 {
    let mut lowest = f64::INFINITY;
    let mut worst = 0.0f64;
    for &v in series {
        lowest = lowest.min(v);
        worst = worst.max(v - lowest);
    }
    worst
}

/// d/dt ½‖w‖² − [Ẋ∫wũ′ − ½∫w²ũ′ − ε‖w_x‖²] at every step, divided by s³.
/// The time derivative is centered in the interior and one-sided of
/// second order at the ends.
pub fn key1_residual(records: &[StepRecord], eps: f64, dt: f64, s: f64) -> Vec<f64> {
    let n = records.len();
    if n < 3 {
        return vec![f64::NAN; n];
    }
    let e: Vec<f64> = records.iter().map(|r| 0.5 * r.diag.l2w2).collect();
    (0..n)
        .map(|k| {
            let de = if k == 0 {
                (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * dt)
            } else if k == n - 1 {
                (3.0 * e[k] - 4.0 * e[k - 1] + e[k - 2]) / (2.0 * dt)
            } else {
                (e[k + 1] - e[k - 1]) / (2.0 * dt)
            };
            let r = &records[k];
            let rhs = r.shift_rate * r.diag.inner - 0.5 * r.diag.cubic - eps * r.diag.grad2;
            (de - rhs) / s.powi(3)
        })
        .collect()
}

impl ContractionTrace {
    pub fn from_records(records: &[StepRecord], weights: LyapunovWeights, eps: f64, dt: f64, s: f64, every: usize) -> Self {
        let (shift, diss) = cumulative_integrals(records, dt);
        let totals = lyapunov_totals(records, weights, dt);
        let key1 = key1_residual(records, eps, dt, s);
        let last = records.len().saturating_sub(1);
        let points = records
            .iter()
            .enumerate()
            .filter(|(n, _)| n % every == 0 || *n == last)
            .map(|(n, r)| TracePoint {
                t: r.t,
                l2w2: r.diag.l2w2,
                shift_term: weights.shift * shift[n],
                dissipation: weights.dissipation * diss[n],
                total: totals[n],
                shift: r.shift,
                shift_rate: r.shift_rate,
                key1_residual: key1[n],
            })
            .collect();
        ContractionTrace {
            weights,
            points,
            initial_l2w2: records.first().map_or(0.0, |r| r.diag.l2w2),
            max_violation: max_rise(&totals),
            max_key1_residual: key1.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    pub fn lyapunov(&self, k: usize) -> Option<LyapunovParts> {
        self.points.get(k).map(lyapunov)
    }

    pub fn to_csv(&self) -> String {
        report::csv(
            &TRACE_HEADER,
            self.points.iter().map(|p| {
                vec![p.t, p.l2w2, p.shift_term, p.dissipation, p.total, p.shift, p.shift_rate, p.key1_residual]
            }),
        )
    }
}

/// Verdict of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub dx: f64,
    pub dt: f64,
    pub initial_l2w2: f64,
    pub final_l2w2: f64,
    pub final_total: f64,
    pub max_violation: f64,
    /// C·(dt² + Δx²)·T·s³.
    pub tolerance_band: f64,
    /// Same monitor with the weights of the closing differential inequality.
    pub proof_weights: LyapunovWeights,
    pub proof_max_violation: f64,
    pub max_key1_residual: f64,
    pub shift_final: f64,
    pub shift_rate_final: f64,
    pub shift_rate_max: f64,
    pub shift_rate_last_quarter_max: f64,
    /// |Ẋ(T)| below its running maximum.
    pub shift_rate_decaying: bool,
    pub aborted: Option<String>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl RunSummary {
    pub fn new(sim: &Simulation, records: &[StepRecord], trace: &ContractionTrace, aborted: Option<String>) -> Self {
        let cfg = &sim.config;
        let s = sim.profile().s();
        let jump = sim.profile().params.u_minus - sim.profile().params.u_plus;
        let proof_weights = LyapunovWeights::proof(jump, cfg.shift_gain, sim.eps());
        let proof_max_violation = max_rise(&lyapunov_totals(records, proof_weights, cfg.dt));
        let tolerance_band = cfg.band_constant * (cfg.dt.powi(2) + sim.grid.dx.powi(2)) * cfg.horizon * s.powi(3);
        let rates: Vec<f64> = records.iter().map(|r| r.shift_rate.abs()).collect();
        let quarter = records.len() * 3 / 4;
        let last = records.last().expect("a run has at least its initial record");
        let shift_rate_max = rates.iter().fold(0.0f64, |m, &v| m.max(v));
        let pass = aborted.is_none() && trace.max_violation <= tolerance_band;
        RunSummary {
            steps: last.step,
            t_final: last.t,
            dx: sim.grid.dx,
            dt: cfg.dt,
            initial_l2w2: trace.initial_l2w2,
            final_l2w2: last.diag.l2w2,
            final_total: trace.points.last().map_or(0.0, |p| p.total),
            max_violation: trace.max_violation,
            tolerance_band,
            proof_weights,
            proof_max_violation,
            max_key1_residual: trace.max_key1_residual,
            shift_final: last.shift,
            shift_rate_final: last.shift_rate,
            shift_rate_max,
            shift_rate_last_quarter_max: rates[quarter..].iter().fold(0.0f64, |m, &v| m.max(v)),
            shift_rate_decaying: rates.len() < 2 || last.shift_rate.abs() < shift_rate_max || shift_rate_max == 0.0,
            aborted,
            pass,
            notes: vec![SHIFT_SIGN_NOTE.to_string()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(step: usize, dt: f64, l2w2: f64, rate: f64, grad2: f64) -> StepRecord {
        StepRecord {
            step,
            t: step as f64 * dt,
            shift: 0.0,
            shift_rate: rate,
            diag: Diagnostics { l2w2, inner: 0.0, cubic: 0.0, grad2 },
        }
    }

    #[test]
    fn max_rise_measures_running_minimum() {
        assert_eq!(max_rise(&[3.0, 2.0, 2.5, 1.0, 1.2]), 0.5);
        assert_eq!(max_rise(&[3.0, 2.0, 1.0]), 0.0);
    }

    #[test]
    fn totals_at_start_equal_initial_norm() {
        let recs: Vec<StepRecord> = (0..5).map(|k| record(k, 0.1, 2.0 - 0.1 * k as f64, 1.0, 4.0)).collect();
        let w = LyapunovWeights::stated(2.0, 4.0 / 3.0, 1.0);
        let totals = lyapunov_totals(&recs, w, 0.1);
        assert_eq!(totals[0], 2.0);
        // After 4 steps: 1.6 + 1.5·0.4 + 0.1·1.6.
        assert!((totals[4] - (1.6 + 1.5 * 0.4 + 0.1 * 1.6)).abs() < 1e-14);
    }

    #[test]
    fn key1_residual_of_exact_quadratic_energy() {
        // ½‖w‖² = t² and Ẋ∫wũ′ = 2t reproduce d/dt exactly with second order differences.
        let dt = 0.1;
        let recs: Vec<StepRecord> = (0..6)
            .map(|k| {
                let t = k as f64 * dt;
                StepRecord {
                    step: k,
                    t,
                    shift: 0.0,
                    shift_rate: 1.0,
                    diag: Diagnostics { l2w2: 2.0 * t * t, inner: 2.0 * t, cubic: 0.0, grad2: 0.0 },
                }
            })
            .collect();
        let r = key1_residual(&recs, 1.0, dt, 1.0);
        assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
        assert!(key1_residual(&recs[..2], 1.0, dt, 1.0)[0].is_nan());
    }

    #[test]
    fn csv_has_declared_columns() {
        let recs: Vec<StepRecord> = (0..4).map(|k| record(k, 0.5, 1.0, 0.0, 0.0)).collect();
        let trace = ContractionTrace::from_records(&recs, LyapunovWeights::stated(2.0, 1.5, 1.0), 1.0, 0.5, 1.0, 2);
        let csv = trace.to_csv();
        assert!(csv.starts_with("t,l2w2,shift_term_cum,dissipation_cum,lyapunov_total,X,Xdot,key1_residual\n"));
        assert_eq!(trace.points.len(), 3);
        assert_eq!(trace.points[2].t, 1.5);
    }
}
