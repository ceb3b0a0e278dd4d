//! Sampled inequality certificates.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::numerics::chebyshev_points;
use crate::profile::Profile;

/// Default number of interior samples per monotone interval.
pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Pass,
    Fail,
    /// Hypotheses of the inequality do not hold for the measured extrema.
    NotApplicable,
    /// The interval lies beyond the resolved oscillations.
    Unresolved,
    /// Numerical error too large to decide.
    Inconclusive,
}

/// Outcome of checking `LHS ≥ RHS` on sampled points of an interval.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCertificate {
    pub name: String,
    /// Monotone-interval index, when the inequality belongs to one.
    pub index: Option<usize>,
    pub interval: (f64, f64),
    /// Minimum of LHS − RHS over the interior samples.
    pub margin: f64,
    pub argmin: f64,
    pub samples: usize,
    /// max(|LHS|, |RHS|, s²) over the samples.
    pub scale: f64,
    /// Minimum of LHS/RHS over samples with RHS above 1e-9·scale.
    pub ratio_min: f64,
    pub margin_tol: f64,
    /// Margin within tolerance, regardless of applicability.
    pub pass: bool,
    pub status: CertificateStatus,
    pub constants_used: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl InequalityCertificate {
    /// Margin relative to the certificate scale.
    pub fn relative_margin(&self) -> f64 {
        self.margin / self.scale
    }

    pub fn with_constant(mut self, key: &str, value: f64) -> Self {
        self.constants_used.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Override the status while keeping the sampled margin.
    pub fn mark(mut self, status: CertificateStatus) -> Self {
        self.status = status;
        self
    }
}

/// Interior Chebyshev samples of (lo, hi), excluding the endpoints.
pub fn interior_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let pts = chebyshev_points(lo, hi, n + 2);
    pts[1..=n].to_vec()
}

/// Sample `lhs(ũ, ũ′) − rhs(ũ, ũ′)` at `n` interior Chebyshev points of
/// (lo, hi). The endpoints, where both sides vanish, are not sampled.
pub fn certify<F>(
    name: &str,
    index: Option<usize>,
    profile: &Profile,
    (lo, hi): (f64, f64),
    n: usize,
    margin_tol: f64,
    sides: F,
) -> InequalityCertificate
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let xs = interior_samples(lo, hi, n);
    let mut u = vec![0.0; n];
    let mut du = vec![0.0; n];
    profile.sample_sorted(&xs, &mut u, &mut du);
    let s = profile.s();
    let values: Vec<(f64, f64)> = (0..n).map(|k| sides(u[k], du[k])).collect();
    let scale = values.iter().fold(s * s, |acc, &(l, r)| acc.max(l.abs()).max(r.abs()));
    let mut margin = f64::INFINITY;
    let mut argmin = lo;
    let mut ratio_min = f64::INFINITY;
    for (k, &(l, r)) in values.iter().enumerate() {
        let m = l - r;
        if m < margin || m.is_nan() {
            margin = m;
            argmin = xs[k];
        }
        if r > 1e-9 * scale {
            ratio_min = ratio_min.min(l / r);
        }
    }
    let pass = margin >= -margin_tol * scale;
    InequalityCertificate {
        name: name.to_string(),
        index,
        interval: (lo, hi),
        margin,
        argmin,
        samples: n,
        scale,
        ratio_min,
        margin_tol,
        pass,
        status: if pass { CertificateStatus::Pass } else { CertificateStatus::Fail },
        constants_used: BTreeMap::new(),
        notes: Vec::new(),
    }
}

/// `√max(x, 0)`; guards rounding just outside the admissible range.
pub(crate) fn sqrt_pos(x: f64) -> f64 {
    x.max(0.0).sqrt()
}
