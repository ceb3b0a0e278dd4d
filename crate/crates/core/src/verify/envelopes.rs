//! Pointwise lower bounds on |ũ′| in terms of ũ on each monotone interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad_adaptive;
use crate::profile::Profile;
use crate::verify::bounds::{dec_decay_function, rm_k_limit};
use crate::verify::certificate::{certify, sqrt_pos, CertificateStatus, InequalityCertificate, DEFAULT_SAMPLES};

/// Shared settings for envelope checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckOptions {
    /// Analysis ceiling A with κ < A ≤ 1.
    pub a: f64,
    pub samples: usize,
    pub margin_tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self::new(0.5)
    }
}

impl CheckOptions {
    pub fn new(a: f64) -> Self {
        CheckOptions { a, samples: DEFAULT_SAMPLES, margin_tol: 1e-7 }
    }

    pub fn for_profile(profile: &Profile) -> Self {
        CheckOptions { margin_tol: profile.options.tol.margin_tol, ..Self::new(profile.params.ceiling) }
    }

    pub fn with_samples(self, samples: usize) -> Self {
        CheckOptions { samples, ..self }
    }
}

fn require_extremum(profile: &Profile, i: usize) -> Result<(f64, f64)> {
    profile
        .extrema
        .get(i)
        .map(|e| (e.xi, e.u))
        .ok_or_else(|| Error::Precondition(format!("extremum {i} not available ({} found)", profile.extrema.len())))
}

fn require_oscillatory(profile: &Profile, a: f64) -> Result<()> {
    if profile.extrema.is_empty() {
        return Err(Error::Precondition("profile has no extrema".into()));
    }
    if !(profile.params.kappa < a && a <= 1.0) {
        return Err(Error::Precondition(format!("need kappa = {} < A = {a} <= 1", profile.params.kappa)));
    }
    Ok(())
}

fn resolved_status(profile: &Profile, i: usize, cert: InequalityCertificate) -> InequalityCertificate {
    if profile.is_resolved(i) {
        cert
    } else {
        cert.mark(CertificateStatus::Unresolved)
    }
}

/// Constants (λ, μ) of the two-term envelope on the rightmost decreasing
/// piece.
pub fn rm_constants(a: f64, s: f64, u0: f64) -> (f64, f64) {
    let lambda = ((u0 - s) / (u0 + s)).sqrt() / a.sqrt();
    let mu = (2.0 * s / (1.0 + (1.0 + 4.0 * a).sqrt()) - (s * (u0 - s)).sqrt() / a.sqrt()) / (u0 + s);
    (lambda, mu)
}

/// −ũ′ ≥ λ√s(u₀−ũ)^{1/2}(ũ+s) + μ(u₀−ũ)(ũ+s) on (ξ₀, ∞).
pub fn check_rm_envelope(profile: &Profile, opts: &CheckOptions) -> Result<InequalityCertificate> {
    require_oscillatory(profile, opts.a)?;
    let s = profile.s();
    let (xi0, u0) = require_extremum(profile, 0)?;
    let (lambda, mu) = rm_constants(opts.a, s, u0);
    if mu <= 0.0 {
        return Err(Error::CertificateFailure(format!(
            "rm_envelope: mu = {mu:e} <= 0 for u0 = {u0}, A = {}",
            opts.a
        )));
    }
    let root_s = s.sqrt();
    let cert = certify("rm_envelope", Some(0), profile, (xi0, profile.xi_right_far()), opts.samples, opts.margin_tol, |u, du| {
        let rhs = lambda * root_s * sqrt_pos(u0 - u) * (u + s) + mu * (u0 - u) * (u + s);
        (-du, rhs)
    });
    Ok(cert
        .with_constant("A", opts.a)
        .with_constant("lambda", lambda)
        .with_constant("mu", mu)
        .with_constant("u0", u0)
        .with_note("right end stands in for +infinity at u + s < 1e-30 s"))
}

/// −ũ′ ≥ λ√s(u₀−ũ)^{1/2}(ũ+s) on (ξ₀, ∞) with λ = k√(1/A)√((u₀−s)/(u₀+s)),
/// for k admissible given the measured u₀.
pub fn check_rm_lemma(profile: &Profile, k: f64, opts: &CheckOptions) -> Result<InequalityCertificate> {
    require_oscillatory(profile, opts.a)?;
    let s = profile.s();
    let (xi0, u0) = require_extremum(profile, 0)?;
    let limit = rm_k_limit(opts.a, (u0 - s) / s);
    if !(k > 0.0 && k <= 1.0 && k < limit) {
        return Err(Error::Precondition(format!("k = {k} not admissible: need 0 < k <= 1 and k < {limit}")));
    }
    let lambda = k * ((u0 - s) / (u0 + s)).sqrt() / opts.a.sqrt();
    let root_s = s.sqrt();
    let cert = certify("rm_lemma", Some(0), profile, (xi0, profile.xi_right_far()), opts.samples, opts.margin_tol, |u, du| {
        (-du, lambda * root_s * sqrt_pos(u0 - u) * (u + s))
    });
    Ok(cert.with_constant("A", opts.a).with_constant("k", k).with_constant("lambda", lambda).with_constant("k_limit", limit))
}

/// Integrated consequence of the increasing-interval envelope:
/// ∫(ũ′)² over the interval against (π/8)λᵢ(uᵢ₋₁−uᵢ)².
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyCheck {
    pub integral: f64,
    pub error: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IncCheck {
    pub certificate: InequalityCertificate,
    pub energy: EnergyCheck,
}

/// λᵢ = √(1/A)√(s(s²−uᵢ²)/(uᵢ₋₁−uᵢ)).
pub fn inc_lambda(a: f64, s: f64, u_prev: f64, u_i: f64) -> f64 {
    (s * (s * s - u_i * u_i) / (u_prev - u_i)).sqrt() / a.sqrt()
}

/// ũ′ ≥ λᵢ(uᵢ₋₁−ũ)^{1/2}(ũ−uᵢ)^{1/2} on (ξᵢ, ξᵢ₋₁), odd i.
pub fn check_inc_envelope(profile: &Profile, i: usize, opts: &CheckOptions) -> Result<IncCheck> {
    if i % 2 == 0 {
        return Err(Error::Precondition(format!("increasing intervals have odd index, got {i}")));
    }
    let s = profile.s();
    let (xi_i, u_i) = require_extremum(profile, i)?;
    let (xi_p, u_p) = require_extremum(profile, i - 1)?;
    let lambda = inc_lambda(opts.a, s, u_p, u_i);
    let cert = certify("inc_envelope", Some(i), profile, (xi_i, xi_p), opts.samples, opts.margin_tol, |u, du| {
        (du, lambda * sqrt_pos(u_p - u) * sqrt_pos(u - u_i))
    });
    let cert = resolved_status(profile, i, cert.with_constant("A", opts.a).with_constant("lambda", lambda));
    let bound = std::f64::consts::PI / 8.0 * lambda * (u_p - u_i).powi(2);
    let q = quad_adaptive(|x| profile.du_at(x).powi(2), xi_i, xi_p, 1e-6 * bound.max(f64::MIN_POSITIVE));
    let energy = EnergyCheck {
        integral: q.value,
        error: q.error,
        bound,
        pass: q.value + q.error >= bound * (1.0 - opts.margin_tol),
    };
    Ok(IncCheck { certificate: cert, energy })
}

/// Hypotheses of the decreasing-interval envelope.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecHypotheses {
    pub k: f64,
    /// min(1, √((s²−uᵢ₋₁²)/(uᵢ²−s²))).
    pub k_max: f64,
    /// ρ = (s−uᵢ₋₁)/(uᵢ−s).
    pub rho: f64,
    pub k_admissible: bool,
    pub rho_below_ten: bool,
}

impl DecHypotheses {
    pub fn hold(&self) -> bool {
        self.k_admissible && self.rho_below_ten
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecCheck {
    pub certificate: InequalityCertificate,
    pub hypotheses: DecHypotheses,
    /// 3(ρ−1) − (3k/4)π√(2/A)√(ρ+1) at the measured ρ.
    pub ratio_margin: f64,
}

/// −ũ′ ≥ λᵢ(uᵢ−ũ)^{1/2}(ũ−uᵢ₋₁)^{1/2} on (ξᵢ, ξᵢ₋₁), even i ≥ 2, with
/// λᵢ = k√(1/A)√(s(uᵢ²−s²)/(uᵢ−uᵢ₋₁)).
pub fn check_dec_envelope(profile: &Profile, i: usize, k: f64, opts: &CheckOptions) -> Result<DecCheck> {
    if i < 2 || i % 2 == 1 {
        return Err(Error::Precondition(format!("decreasing intervals need even index >= 2, got {i}")));
    }
    let s = profile.s();
    let (xi_i, u_i) = require_extremum(profile, i)?;
    let (xi_p, u_p) = require_extremum(profile, i - 1)?;
    let k_max = ((s * s - u_p * u_p) / (u_i * u_i - s * s)).sqrt().min(1.0);
    let rho = (s - u_p) / (u_i - s);
    let hypotheses = DecHypotheses {
        k,
        k_max,
        rho,
        k_admissible: (0.5..=k_max).contains(&k),
        rho_below_ten: rho < 10.0,
    };
    let lambda = k * (s * (u_i * u_i - s * s) / (u_i - u_p)).sqrt() / opts.a.sqrt();
    let cert = certify("dec_envelope", Some(i), profile, (xi_i, xi_p), opts.samples, opts.margin_tol, |u, du| {
        (-du, lambda * sqrt_pos(u_i - u) * sqrt_pos(u - u_p))
    })
    .with_constant("A", opts.a)
    .with_constant("k", k)
    .with_constant("lambda", lambda)
    .with_constant("rho", rho);
    let cert = if hypotheses.hold() {
        resolved_status(profile, i, cert)
    } else {
        cert.mark(CertificateStatus::NotApplicable)
            .with_note(format!("hypotheses fail: k in [1/2, {k_max}] is {}, rho = {rho} < 10 is {}", hypotheses.k_admissible, hypotheses.rho_below_ten))
    };
    Ok(DecCheck { certificate: cert, hypotheses, ratio_margin: dec_decay_function(rho, opts.a, k) })
}

/// Constants λ̄ᵢ of the parabola envelopes, indexed by interval i:
/// λ̄₀, λ̄₁, then `even`·ρⁱ for even i ≥ 2 and ρⁱ/`odd_divisor` for odd i ≥ 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LambdaBar {
    pub l0: f64,
    pub l1: f64,
    pub even: f64,
    pub odd_divisor: f64,
    pub rho: f64,
}

impl Default for LambdaBar {
    fn default() -> Self {
        LambdaBar { l0: 0.355, l1: 9.60, even: 1.94, odd_divisor: 0.51, rho: 4.64 }
    }
}

impl LambdaBar {
    pub fn value(&self, i: usize) -> f64 {
        match i {
            0 => self.l0,
            1 => self.l1,
            _ if i % 2 == 0 => self.even * self.rho.powi(i as i32),
            _ => self.rho.powi(i as i32) / self.odd_divisor,
        }
    }
}

/// Parabola envelopes on every monotone interval with available extrema:
/// −ũ′ ≥ λ̄ᵢ(uᵢ−ũ)(ũ−uᵢ₋₁) for even i and ũ′ ≥ λ̄ᵢ(uᵢ₋₁−ũ)(ũ−uᵢ) for odd i,
/// with ξ₋₁ = +∞ and u₋₁ = −s.
pub fn check_parabola_envelopes(profile: &Profile, lambda_bar: &LambdaBar, opts: &CheckOptions) -> Result<Vec<InequalityCertificate>> {
    if profile.params.kappa >= 0.5 {
        return Err(Error::Precondition(format!(
            "parabola constants are only available for kappa < 1/2, got {}",
            profile.params.kappa
        )));
    }
    let mut out = Vec::with_capacity(profile.extrema.len());
    for i in 0..profile.extrema.len() {
        let (xi_i, u_i) = require_extremum(profile, i)?;
        let u_p = profile.extremum_u(i as isize - 1).unwrap();
        let xi_p = if i == 0 { profile.xi_right_far() } else { profile.extrema[i - 1].xi };
        let lb = lambda_bar.value(i);
        let even = i % 2 == 0;
        let cert = certify("parabola_envelope", Some(i), profile, (xi_i, xi_p), opts.samples, opts.margin_tol, |u, du| {
            if even {
                (-du, lb * (u_i - u) * (u - u_p))
            } else {
                (du, lb * (u_p - u) * (u - u_i))
            }
        })
        .with_constant("lambda_bar", lb)
        .with_note("lambda_bar indexed by interval i, proportional to rho^i");
        out.push(resolved_status(profile, i, cert));
    }
    Ok(out)
}
