//! Weighted L² sizes of the profile on the overlapping intervals Jᵢ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quad_adaptive;
use crate::profile::Profile;
use crate::verify::certificate::CertificateStatus;

/// One quadrature value compared against its bound.
#[derive(Debug, Clone, Serialize)]
pub struct L2Entry {
    /// Interval index; `None` for the left tail.
    pub i: Option<usize>,
    pub interval: (f64, f64),
    pub value: f64,
    pub error: f64,
    pub bound: f64,
    pub status: CertificateStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct L2Report {
    pub rho_star: f64,
    pub entries: Vec<L2Entry>,
    pub left_tail: L2Entry,
}

impl L2Report {
    /// Every resolved entry passes.
    pub fn pass(&self) -> bool {
        self.entries
            .iter()
            .chain(std::iter::once(&self.left_tail))
            .all(|e| matches!(e.status, CertificateStatus::Pass | CertificateStatus::Unresolved))
    }
}

/// Bound on (1/|uᵢ−uᵢ₋₁|)∫_{Jᵢ}(ũ−uᵢ)² for i ≥ 1.
pub fn l2_bound(i: usize, rho_star: f64) -> f64 {
    match i {
        0 => f64::NAN,
        1 => 0.178,
        _ if i % 2 == 0 => 0.81 * rho_star.powi(-(i as i32)),
        _ => 0.82 * rho_star.powi(-(i as i32)),
    }
}

/// Integrate `f` over (lo, hi), splitting at the given interior breakpoints.
fn integrate_split<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64], tol: f64) -> (f64, f64) {
    let mut pts: Vec<f64> = std::iter::once(lo)
        .chain(breaks.iter().copied().filter(|&b| b > lo && b < hi))
        .chain(std::iter::once(hi))
        .collect();
    pts.sort_by(f64::total_cmp);
    let per = tol / (pts.len() - 1) as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for w in pts.windows(2) {
        let q = quad_adaptive(&f, w[0], w[1], per);
        value += q.value;
        error += q.error;
    }
    (value, error)
}

fn status(value: f64, error: f64, bound: f64) -> CertificateStatus {
    if error > 0.01 * bound {
        CertificateStatus::Inconclusive
    } else if value <= bound {
        CertificateStatus::Pass
    } else {
        CertificateStatus::Fail
    }
}

/// Quadrature of the Jᵢ integrals and of ∫_{−∞}^{ξ_s}(ũ−s)², compared
/// with their bounds; quadrature error above 1% of a bound marks the entry
/// inconclusive.
pub fn l2_interval_bounds(profile: &Profile, rho_star: f64) -> Result<L2Report> {
    let s = profile.s();
    let xi_s = profile
        .markers
        .xi_s
        .ok_or_else(|| Error::Precondition("profile has no crossing of s".into()))?;
    let breaks: Vec<f64> = profile.extrema.iter().map(|e| e.xi).collect();
    let mut entries = Vec::new();
    for set in &profile.markers.sets {
        let i = set.i;
        let (xi_i, u_i) = (profile.extrema[i].xi, profile.extrema[i].u);
        let u_p = profile.extrema[i - 1].u;
        let width = (u_i - u_p).abs();
        let bound = l2_bound(i, rho_star);
        let (raw, raw_err) = integrate_split(|x| (profile.u_at(x) - u_i).powi(2), xi_i, set.xi_sup, &breaks, 1e-5 * bound * width);
        let (value, error) = (raw / width, raw_err / width);
        let st = if profile.is_resolved(i) { status(value, error, bound) } else { CertificateStatus::Unresolved };
        entries.push(L2Entry { i: Some(i), interval: (xi_i, set.xi_sup), value, error, bound, status: st });
    }
    let lo = profile.xi_left_far();
    let bound = 0.001 * s;
    let (value, error) = integrate_split(|x| (profile.u_at(x) - s).powi(2), lo, xi_s, &breaks, 1e-5 * bound);
    let left_tail = L2Entry { i: None, interval: (lo, xi_s), value, error, bound, status: status(value, error, bound) };
    Ok(L2Report { rho_star, entries, left_tail })
}
