//! Linearization of the traveling-wave system at its two equilibria.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::ShockParams;

/// A pair of eigenvalues `re[k] + i·im[k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenPair {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl EigenPair {
    pub fn is_complex(&self) -> bool {
        self.im[0] != 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibria {
    /// Eigenvalues at the right state (saddle), larger first.
    pub saddle: EigenPair,
    /// Eigenvalues at the left state (focus or node).
    pub focus: EigenPair,
    /// Discriminant 1 − 4δs of the focus in the normalized frame.
    pub focus_discriminant: f64,
    /// Stable slope of the saddle, −2s/(1 + √(1 + 4δs)).
    pub tail_slope: f64,
}

/// Roots of δλ² − λ + c = 0.
fn quadratic_roots(delta: f64, c: f64) -> (EigenPair, f64) {
    let disc = 1.0 - 4.0 * delta * c;
    let pair = if disc >= 0.0 {
        let r = disc.sqrt();
        EigenPair { re: [(1.0 + r) / (2.0 * delta), (1.0 - r) / (2.0 * delta)], im: [0.0, 0.0] }
    } else {
        let i = (-disc).sqrt() / (2.0 * delta);
        let re = 1.0 / (2.0 * delta);
        EigenPair { re: [re, re], im: [i, -i] }
    };
    (pair, disc)
}

/// Eigenvalues at both equilibria in the normalized frame (ε = 1), scaled
/// by 1/ε for physical parameters.
pub fn equilibrium_eigen(params: &ShockParams) -> Equilibria {
    let delta = params.delta / (params.eps * params.eps);
    let s = params.s;
    let (mut saddle, _) = quadratic_roots(delta, -s);
    let (mut focus, disc) = quadratic_roots(delta, s);
    for v in saddle.re.iter_mut().chain(focus.re.iter_mut()).chain(focus.im.iter_mut()) {
        *v /= params.eps;
    }
    let tail_slope = -2.0 * s / (1.0 + (1.0 + 4.0 * delta * s).sqrt()) / params.eps;
    Equilibria { saddle, focus, focus_discriminant: disc, tail_slope }
}

/// Amplitude ratio per half oscillation near the left state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRatios {
    /// exp(Re λ·π/Im λ) with the focus eigenvalues, taken as the ratio of a
    /// later (further left) deviation to the earlier one.
    pub eigen: f64,
    /// The closed-form expression exp(−π/(2δ√(κ − 1/4))).
    pub printed: f64,
}

impl DecayRatios {
    /// Ratio |uᵢ − s| / |uᵢ₊₁ − s| implied by the eigenvalues.
    pub fn eigen_inverse(&self) -> f64 {
        1.0 / self.eigen
    }
}

pub fn linearized_decay_ratio(params: &ShockParams) -> Result<DecayRatios> {
    if params.kappa <= 0.25 {
        return Err(Error::Precondition(format!(
            "no oscillation for kappa = {} <= 1/4",
            params.kappa
        )));
    }
    let eq = equilibrium_eigen(params);
    let eigen = (-std::f64::consts::PI * eq.focus.re[0] / eq.focus.im[0]).exp();
    let printed = (-std::f64::consts::PI / (2.0 * params.delta * (params.kappa - 0.25).sqrt())).exp();
    Ok(DecayRatios { eigen, printed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_discriminant_vanishes() {
        let p = ShockParams::normalized(0.25, 1.0).unwrap();
        let e = equilibrium_eigen(&p);
        assert_eq!(e.focus_discriminant, 0.0);
        assert_eq!(e.focus.re[0], e.focus.re[1]);
        assert!(!e.focus.is_complex());
    }

    #[test]
    fn wide_dispersion_saddle() {
        let p = ShockParams::normalized(10.0, 1.0).unwrap();
        let e = equilibrium_eigen(&p);
        let r = 41f64.sqrt();
        assert!((e.saddle.re[0] - (1.0 + r) / 20.0).abs() < 1e-15);
        assert!((e.saddle.re[1] - (1.0 - r) / 20.0).abs() < 1e-15);
        assert!(e.saddle.re[0] > 0.0 && e.saddle.re[1] < 0.0);
        assert!(e.focus.is_complex());
    }

    #[test]
    fn tail_slope_matches_stable_root() {
        let p = ShockParams::normalized(0.45, 1.0).unwrap();
        let e = equilibrium_eigen(&p);
        assert!((e.tail_slope - (-2.0 / (1.0 + 2.8f64.sqrt()))).abs() < 1e-15);
        assert!((e.tail_slope + 0.7471).abs() < 1.5e-3);
        assert!((e.tail_slope - e.saddle.re[1]).abs() < 1e-14);
    }

    #[test]
    fn physical_eigen_scale_with_viscosity() {
        let p = ShockParams::new(2.0, 1.2, 3.0, 1.0).unwrap();
        let e = equilibrium_eigen(&p);
        // (ε ± √(ε² − 2δ(u₋−u₊)))/(2δ) with complex root.
        let disc: f64 = 4.0 - 2.0 * 1.2 * 2.0;
        assert!(disc < 0.0);
        assert!((e.focus.re[0] - 2.0 / 2.4).abs() < 1e-14);
        assert!((e.focus.im[0] - (-disc).sqrt() / 2.4).abs() < 1e-14);
    }

    #[test]
    fn decay_ratios() {
        let p = ShockParams::normalized(0.45, 1.0).unwrap();
        let r = linearized_decay_ratio(&p).unwrap();
        assert!((r.eigen - (-std::f64::consts::PI / 0.8f64.sqrt()).exp()).abs() < 1e-15);
        assert!((r.printed - (-std::f64::consts::PI / (0.9 * 0.2f64.sqrt())).exp()).abs() < 1e-15);
        let near = linearized_decay_ratio(&ShockParams::from_kappa(0.25 + 1e-9, 1.0).unwrap()).unwrap();
        assert!(near.eigen < 1e-100 && near.printed < 1e-100);
        assert!(linearized_decay_ratio(&ShockParams::normalized(0.2, 1.0).unwrap()).is_err());
    }
}
