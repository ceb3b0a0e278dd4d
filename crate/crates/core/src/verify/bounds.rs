//! Closed-form amplitude bounds, the bootstrap for the first maximum and
//! the decay-rate table.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::find_root;
use crate::profile::{compute_profile, Profile, ProfileOptions, ShockParams};

/// One row of the tabulated decay rates: ceiling A, the relative bound α₀
/// with u₀ ≤ (1 + α₀)s, and the claimed ratios ρ_* (increasing pieces) and
/// ρ^* (decreasing pieces).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayTableRow {
    pub a: f64,
    pub alpha0: f64,
    pub rho_star: f64,
    pub rho_upper: f64,
}

pub const DECAY_TABLE: [DecayTableRow; 5] = [
    DecayTableRow { a: 1.0 / 3.0, alpha0: 0.03, rho_star: 6.05, rho_upper: 6.14 },
    DecayTableRow { a: 0.5, alpha0: 0.0601, rho_star: 4.64, rho_upper: 4.77 },
    DecayTableRow { a: 2.0 / 3.0, alpha0: 0.092, rho_star: 3.89, rho_upper: 4.06 },
    DecayTableRow { a: 0.75, alpha0: 0.11, rho_star: 3.63, rho_upper: 3.81 },
    DecayTableRow { a: 1.0, alpha0: 0.15, rho_star: 3.10, rho_upper: 3.30 },
];

/// Tabulated row for ceiling `a`, if any.
pub fn table_row(a: f64) -> Option<DecayTableRow> {
    DECAY_TABLE.iter().copied().find(|r| (r.a - a).abs() < 1e-12)
}

fn check_ceiling(a: f64) -> Result<()> {
    if a > 0.25 && a <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("ceiling A must lie in (1/4, 1], got {a}")))
    }
}

/// Upper bound on u₀ − s for half-jump `s`:
/// s·(1/(100A))·(√(9 + 25(√(1+4A) − 1)²) − 3)².
pub fn u0_closed_bound(a: f64, s: f64) -> Result<f64> {
    check_ceiling(a)?;
    let r = (1.0 + 4.0 * a).sqrt() - 1.0;
    let inner = (9.0 + 25.0 * r * r).sqrt() - 3.0;
    Ok(s * inner * inner / (100.0 * a))
}

/// One step of the bootstrap for u₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapStep {
    pub k: f64,
    pub k_star: f64,
    /// Resulting bound u₀ ≤ factor·s.
    pub factor: f64,
    /// Admissibility limit on k implied by the previous bound.
    pub k_limit: f64,
}

/// Replay the bootstrap k = 1/2 → 4/5 → 1 starting from u₀ < 2s.
pub fn lem_rm_bootstrap(a: f64) -> Result<Vec<BootstrapStep>> {
    lem_rm_bootstrap_with(a, &[0.5, 0.8, 1.0])
}

/// Bootstrap with an arbitrary sequence of k values.
pub fn lem_rm_bootstrap_with(a: f64, ks: &[f64]) -> Result<Vec<BootstrapStep>> {
    check_ceiling(a)?;
    let mut previous = 2.0;
    let mut steps = Vec::with_capacity(ks.len());
    for (n, &k) in ks.iter().enumerate() {
        let k_limit = rm_k_limit(a, previous - 1.0);
        if !(k > 0.0 && k <= 1.0 && k < k_limit) {
            return Err(Error::CertificateFailure(format!(
                "bootstrap step {n} (k = {k}): admissibility requires 0 < k <= 1 and k < {k_limit} given u0 <= {previous}s"
            )));
        }
        let k_star = 1.0 + 32.0 * k * k / (25.0 * a);
        let factor = 1.0 + k_star - (k_star * k_star - 1.0).sqrt();
        steps.push(BootstrapStep { k, k_star, factor, k_limit });
        previous = factor;
    }
    Ok(steps)
}

/// Largest admissible k (exclusive) when u₀ − s ≤ `alpha`·s:
/// (2√A/(1 + √(1+4A)))·√(1/α).
pub fn rm_k_limit(a: f64, alpha: f64) -> f64 {
    2.0 * a.sqrt() / (1.0 + (1.0 + 4.0 * a).sqrt()) / alpha.sqrt()
}

/// l(ρ) = 3(ρ−1) + (ρ²−ρ+1)α₀/ρ − (3/4)π√(1/A)√(2 − α₀/ρ)√(ρ+1).
/// Negative values mean the increasing-interval inequality fails at ρ.
pub fn inc_decay_function(rho: f64, a: f64, alpha0: f64) -> f64 {
    3.0 * (rho - 1.0) + (rho * rho - rho + 1.0) * alpha0 / rho
        - 0.75 * PI * (1.0 / a).sqrt() * (2.0 - alpha0 / rho).sqrt() * (rho + 1.0).sqrt()
}

/// 3(ρ−1) − (3k/4)π√(2/A)√(ρ+1); negative values mean the
/// decreasing-interval inequality fails at ρ.
pub fn dec_decay_function(rho: f64, a: f64, k: f64) -> f64 {
    3.0 * (rho - 1.0) - 0.75 * k * PI * (2.0 / a).sqrt() * (rho + 1.0).sqrt()
}

/// Root of l(ρ) = 0 on (1, ∞): the sharpest ρ_* the inequality supports.
pub fn derived_rho_star(a: f64, alpha0: f64) -> Result<f64> {
    check_ceiling(a)?;
    find_root(|r| inc_decay_function(r, a, alpha0), 1.0 + 1e-9, 100.0, 1e-13)
}

/// Root of the k = 1 decreasing-interval inequality on (1, ∞).
pub fn derived_rho_upper(a: f64) -> Result<f64> {
    check_ceiling(a)?;
    find_root(|r| dec_decay_function(r, a, 1.0), 1.0, 100.0, 1e-13)
}

/// Measured oscillation ratios of one profile against the claimed bounds.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub a: f64,
    /// (i, (u_{i−1}−s)/(s−uᵢ)) for odd i.
    pub ratios_inc: Vec<(usize, f64)>,
    /// (i, (s−uᵢ)/(u_{i+1}−s)) for odd i.
    pub ratios_dec: Vec<(usize, f64)>,
    pub rho_star: f64,
    pub rho_star_upper: f64,
    pub u0_excess: f64,
    pub u0_bound: f64,
    pub pass: bool,
}

impl DecayReport {
    pub fn min_inc(&self) -> f64 {
        self.ratios_inc.iter().map(|r| r.1).fold(f64::INFINITY, f64::min)
    }

    pub fn min_dec(&self) -> f64 {
        self.ratios_dec.iter().map(|r| r.1).fold(f64::INFINITY, f64::min)
    }
}

/// Claimed (ρ_*, ρ^*, α₀) for ceiling `a`: tabulated values when `a` is one
/// of the tabulated ceilings, else the derived roots with α₀ from the
/// closed-form bound.
pub fn claimed_rates(a: f64) -> Result<(f64, f64, f64)> {
    if let Some(r) = table_row(a) {
        return Ok((r.rho_star, r.rho_upper, r.alpha0));
    }
    let alpha0 = u0_closed_bound(a, 1.0)?;
    Ok((derived_rho_star(a, alpha0)?, derived_rho_upper(a)?, alpha0))
}

/// Ratios over the resolved extrema of `profile`, checked against the
/// claimed rates for ceiling `a`.
pub fn decay_report(profile: &Profile, a: f64, margin_tol: f64) -> Result<DecayReport> {
    let (rho_star, rho_star_upper, _) = claimed_rates(a)?;
    let s = profile.s();
    let u: Vec<f64> = profile.extrema[..profile.resolved].iter().map(|e| e.u).collect();
    let mut ratios_inc = Vec::new();
    let mut ratios_dec = Vec::new();
    for i in (1..u.len()).step_by(2) {
        ratios_inc.push((i, (u[i - 1] - s) / (s - u[i])));
        if i + 1 < u.len() {
            ratios_dec.push((i, (s - u[i]) / (u[i + 1] - s)));
        }
    }
    let u0_excess = u.first().map_or(0.0, |u0| u0 - s);
    let u0_bound = u0_closed_bound(a, s)?;
    let mut report = DecayReport {
        a,
        ratios_inc,
        ratios_dec,
        rho_star,
        rho_star_upper,
        u0_excess,
        u0_bound,
        pass: false,
    };
    report.pass = report.min_inc() >= rho_star - margin_tol
        && report.min_dec() >= rho_star_upper - margin_tol
        && u0_excess <= u0_bound + margin_tol * s;
    Ok(report)
}

/// Row of the measured decay-rate table.
#[derive(Debug, Clone, Serialize)]
pub struct MeasuredRow {
    pub a: f64,
    pub rho_star_claimed: f64,
    pub rho_star_measured_min: f64,
    pub rho_upper_claimed: f64,
    pub rho_upper_measured_min: f64,
    pub kappas: Vec<f64>,
}

/// κ samples strictly inside (1/4, A): `n` equispaced interior points.
pub fn kappa_grid(a: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| 0.25 + (a - 0.25) * k as f64 / (n + 1) as f64).collect()
}

/// Measure the minimum oscillation ratios over `n_kappa` profiles per
/// tabulated ceiling.
pub fn decay_table(n_kappa: usize, options: &ProfileOptions) -> Result<Vec<MeasuredRow>> {
    DECAY_TABLE
        .par_iter()
        .map(|row| {
            let kappas = kappa_grid(row.a, n_kappa);
            let reports: Vec<DecayReport> = kappas
                .par_iter()
                .map(|&kappa| {
                    let params = ShockParams::from_kappa(kappa, 1.0)?;
                    let profile = compute_profile(&params, options)?;
                    decay_report(&profile, row.a, options.tol.margin_tol)
                })
                .collect::<Result<_>>()?;
            Ok(MeasuredRow {
                a: row.a,
                rho_star_claimed: row.rho_star,
                rho_star_measured_min: reports.iter().map(DecayReport::min_inc).fold(f64::INFINITY, f64::min),
                rho_upper_claimed: row.rho_upper,
                rho_upper_measured_min: reports.iter().map(DecayReport::min_dec).fold(f64::INFINITY, f64::min),
                kappas,
            })
        })
        .collect()
}

/// CSV mirroring the decay-rate table layout.
pub fn decay_table_csv(rows: &[MeasuredRow]) -> String {
    let mut out = String::from("A,rho_star_claimed,rho_star_measured_min,rho_upper_claimed,rho_upper_measured_min\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.a, r.rho_star_claimed, r.rho_star_measured_min, r.rho_upper_claimed, r.rho_upper_measured_min
        );
    }
    out
}
