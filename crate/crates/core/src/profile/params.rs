//! Shock parameters and the maps to the normalized frame (ε = 1, σ = 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of a KdV–Burgers shock and derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockParams {
    pub eps: f64,
    pub delta: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    /// Wave speed (u₋ + u₊)/2.
    pub sigma: f64,
    /// Half jump (u₋ − u₊)/2.
    pub s: f64,
    /// δ(u₋ − u₊)/(2ε²).
    pub kappa: f64,
    /// Analysis ceiling A with κ < A ≤ 1.
    pub ceiling: f64,
}

impl ShockParams {
    /// Build from the four physical parameters. `delta` must be positive;
    /// use [`normalize`] for negative dispersion.
    pub fn new(eps: f64, delta: f64, u_minus: f64, u_plus: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParams(format!("viscosity must be positive, got {eps}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParams(format!("dispersion must be positive, got {delta}")));
        }
        if !(u_minus > u_plus) || !u_minus.is_finite() || !u_plus.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need u_minus > u_plus, got {u_minus} and {u_plus}"
            )));
        }
        let kappa = delta * (u_minus - u_plus) / (2.0 * eps * eps);
        Ok(Self {
            eps,
            delta,
            u_minus,
            u_plus,
            sigma: (u_minus + u_plus) / 2.0,
            s: (u_minus - u_plus) / 2.0,
            kappa,
            ceiling: default_ceiling(kappa),
        })
    }

    /// Normalized parameters: ε = 1, u± = ∓s.
    pub fn normalized(delta: f64, s: f64) -> Result<Self> {
        Self::new(1.0, delta, s, -s)
    }

    /// Normalized parameters for a target κ with half jump `s`.
    pub fn from_kappa(kappa: f64, s: f64) -> Result<Self> {
        Self::normalized(kappa / s, s)
    }

    /// Replace the analysis ceiling A.
    pub fn with_ceiling(mut self, ceiling: f64) -> Result<Self> {
        if !(ceiling > 0.25 && ceiling <= 1.0) {
            return Err(Error::InvalidParams(format!("ceiling A must lie in (1/4, 1], got {ceiling}")));
        }
        self.ceiling = ceiling;
        Ok(self)
    }

    pub fn is_oscillatory(&self) -> bool {
        self.kappa > 0.25
    }

    pub fn in_contraction_regime(&self) -> bool {
        self.kappa > 0.25 && self.kappa < 0.5
    }

    pub fn is_normalized(&self) -> bool {
        self.eps == 1.0 && self.sigma == 0.0
    }
}

/// Smallest of the tabulated ceilings {1/3, 1/2, 2/3, 3/4, 1} above κ.
fn default_ceiling(kappa: f64) -> f64 {
    [1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 1.0]
        .into_iter()
        .find(|a| kappa < *a)
        .unwrap_or(1.0)
}

/// Affine change of variables between the physical frame and the
/// normalized frame, including the optional reflection x → −x, u → −u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameMap {
    pub eps: f64,
    /// Speed removed by the Galilean shift (after reflection).
    pub sigma: f64,
    pub reflected: bool,
}

impl FrameMap {
    fn sign(&self) -> f64 {
        if self.reflected {
            -1.0
        } else {
            1.0
        }
    }

    /// Physical (t, x, u) to normalized (τ, ξ, ũ).
    pub fn to_normalized(&self, t: f64, x: f64, u: f64) -> (f64, f64, f64) {
        let r = self.sign();
        let x1 = r * x - self.sigma * t;
        (t / self.eps, x1 / self.eps, r * u - self.sigma)
    }

    /// Normalized (τ, ξ, ũ) to physical (t, x, u).
    pub fn to_physical(&self, tau: f64, xi: f64, v: f64) -> (f64, f64, f64) {
        let r = self.sign();
        let t = tau * self.eps;
        let x1 = xi * self.eps + self.sigma * t;
        (t, r * x1, r * (v + self.sigma))
    }
}

/// Map raw parameters (δ of either sign) to the normalized frame.
///
/// Returns the normalized parameters and the frame map that undoes it.
pub fn normalize(eps: f64, delta: f64, u_minus: f64, u_plus: f64) -> Result<(ShockParams, FrameMap)> {
    if delta == 0.0 {
        return Err(Error::InvalidParams("dispersion must be nonzero".into()));
    }
    let reflected = delta < 0.0;
    let (delta, um, up) = if reflected {
        (-delta, -u_plus, -u_minus)
    } else {
        (delta, u_minus, u_plus)
    };
    let physical = ShockParams::new(eps, delta, um, up)?;
    let normalized = ShockParams::normalized(delta / (eps * eps), physical.s)?;
    let mut normalized = normalized;
    normalized.kappa = physical.kappa;
    normalized.ceiling = physical.ceiling;
    Ok((
        normalized,
        FrameMap { eps, sigma: physical.sigma, reflected },
    ))
}
