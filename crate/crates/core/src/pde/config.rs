//! Simulation settings, initial perturbations and their validation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operator::Grid;
use crate::error::{Error, Result};
use crate::profile::Profile;

/// Width of the Gaussian envelope of random Fourier perturbations.
pub const FOURIER_ENVELOPE: f64 = 8.0;

/// Initial perturbation added to the reference profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Perturbation {
    None,
    /// amplitude·exp(−((x − center)/width)²).
    Gaussian { amplitude: f64, width: f64, center: f64 },
    /// Start from the translate ũ(x − h).
    ShiftedProfile { h: f64 },
    /// Seeded trigonometric polynomial under a Gaussian envelope, bounded
    /// by `amplitude`.
    RandomFourier { seed: u64, modes: usize, amplitude: f64 },
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation::Gaussian { amplitude: 0.3, width: 2.0, center: 0.0 }
    }
}

impl Perturbation {
    /// Perturbation values at `xs` (unscaled coordinates).
    pub fn sample(&self, profile: &Profile, xs: &[f64]) -> Vec<f64> {
        match *self {
            Perturbation::None => vec![0.0; xs.len()],
            Perturbation::Gaussian { amplitude, width, center } => {
                xs.iter().map(|&x| amplitude * (-((x - center) / width).powi(2)).exp()).collect()
            }
            Perturbation::ShiftedProfile { h } => xs.iter().map(|&x| profile.u_at(x - h) - profile.u_at(x)).collect(),
            Perturbation::RandomFourier { seed, modes, amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let coeffs: Vec<(f64, f64)> =
                    (0..modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let norm: f64 = coeffs.iter().map(|(a, b)| a.abs() + b.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
                xs.iter()
                    .map(|&x| {
                        let series: f64 = coeffs
                            .iter()
                            .enumerate()
                            .map(|(m, &(a, b))| {
                                let (sn, cs) = ((m + 1) as f64 * std::f64::consts::PI * x / FOURIER_ENVELOPE).sin_cos();
                                a * cs + b * sn
                            })
                            .sum();
                        amplitude * (-(x / FOURIER_ENVELOPE).powi(2)).exp() * series / norm
                    })
                    .collect()
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Perturbation::None)
    }
}

/// Discretization choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemeOptions {
    /// Spatial order of the finite differences, 2 or 4.
    pub order: usize,
    /// Subtract the discrete residual of the reference profile so that it
    /// is an exact steady state of the scheme.
    pub well_balanced: bool,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions { order: 2, well_balanced: true }
    }
}

/// Settings of one simulation in the normalized frame. With `nu` ≠ 1 the
/// run solves the scaled equation with diffusion ν and dispersion ν²δ
/// against the reference ũ(x/ν).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Domain is [−half_width, half_width].
    pub half_width: f64,
    /// Number of grid intervals N.
    pub grid_size: usize,
    pub dt: f64,
    pub horizon: f64,
    /// Shift gain M.
    pub shift_gain: f64,
    pub perturbation: Perturbation,
    pub scheme: SchemeOptions,
    /// Trace cadence in steps.
    pub output_every: usize,
    /// C in the tolerance band C·(dt² + Δx²)·T·s³.
    pub band_constant: f64,
    pub nu: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            half_width: 150.0,
            grid_size: 4096,
            dt: 0.02,
            horizon: 50.0,
            shift_gain: 4.0 / 3.0,
            perturbation: Perturbation::default(),
            scheme: SchemeOptions::default(),
            output_every: 25,
            band_constant: 1.0,
            nu: 1.0,
        }
    }
}

/// Smallest admissible shift gain.
pub const MIN_SHIFT_GAIN: f64 = 4.0 / 3.0;

impl SimConfig {
    pub fn grid(&self) -> Grid {
        Grid::pinned(self.half_width, self.grid_size)
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Half wavelength of the linear oscillation at the left state,
    /// π δ/√(δ s − 1/4), in unscaled coordinates; `None` when monotone.
    pub fn half_wavelength(profile: &Profile) -> Option<f64> {
        let (d, s) = (profile.delta(), profile.s());
        (d * s > 0.25).then(|| std::f64::consts::PI * d / (d * s - 0.25).sqrt())
    }

    /// Check every precondition of a run against `profile` and return the
    /// grid.
    pub fn validate(&self, profile: &Profile) -> Result<Grid> {
        let positive = [
            ("half_width", self.half_width),
            ("dt", self.dt),
            ("horizon", self.horizon),
            ("nu", self.nu),
            ("band_constant", self.band_constant),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.grid_size < 16 {
            return Err(Error::Config(format!("grid_size must be at least 16, got {}", self.grid_size)));
        }
        if self.output_every == 0 {
            return Err(Error::Config("output_every must be at least 1".into()));
        }
        if !matches!(self.scheme.order, 2 | 4) {
            return Err(Error::Config(format!("scheme.order must be 2 or 4, got {}", self.scheme.order)));
        }
        if !(self.shift_gain >= MIN_SHIFT_GAIN) {
            return Err(Error::Config(format!("shift_gain must be at least 4/3, got {}", self.shift_gain)));
        }
        if !profile.params.is_normalized() {
            return Err(Error::Precondition("simulations run in the normalized frame".into()));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Config(format!("horizon {} is not a multiple of dt {}", self.horizon, self.dt)));
        }
        let grid = self.grid();
        let (s, nu) = (profile.s(), self.nu);
        let reach = self.half_width / nu;
        let decay_length = 1.0 / profile.tail_slope().abs();
        if reach < 10.0 * decay_length {
            return Err(Error::Precondition(format!(
                "domain reaches {reach} profile units, fewer than 10 saddle decay lengths ({decay_length})"
            )));
        }
        let (left, right) = (profile.u_at(-reach) - s, profile.u_at(reach) + s);
        if left.abs() >= 1e-8 * s || right.abs() >= 1e-8 * s {
            return Err(Error::Precondition(format!(
                "profile not settled at the domain ends: |u(-L) - u_-| = {:e}, |u(L) - u_+| = {:e}",
                left.abs(),
                right.abs()
            )));
        }
        if let Some(hw) = Self::half_wavelength(profile) {
            let limit = nu * hw / 20.0;
            if grid.dx > limit {
                return Err(Error::Precondition(format!(
                    "grid spacing {} exceeds a twentieth of the oscillation half wavelength ({limit})",
                    grid.dx
                )));
            }
        }
        let ends = self.perturbation.sample(profile, &[-reach, reach]);
        if ends.iter().any(|p| p.abs() >= 1e-8 * s) {
            return Err(Error::Precondition(format!("perturbation does not vanish at the domain ends: {ends:?}")));
        }
        let umax = self.initial_data(profile, &grid).iter().fold(0.0f64, |m, u| m.max(u.abs()));
        let cfl = self.dt * umax / grid.dx;
        if cfl > 0.5 {
            return Err(Error::Precondition(format!("advective CFL number {cfl} exceeds 0.5")));
        }
        Ok(grid)
    }

    /// ũ^ν + perturbation(x/ν) on the grid nodes.
    pub fn initial_data(&self, profile: &Profile, grid: &Grid) -> Vec<f64> {
        let xi: Vec<f64> = grid.nodes().iter().map(|x| x / self.nu).collect();
        let mut u = vec![0.0; xi.len()];
        let mut du = vec![0.0; xi.len()];
        profile.sample_sorted(&xi, &mut u, &mut du);
        for (v, p) in u.iter_mut().zip(self.perturbation.sample(profile, &xi)) {
            *v += p;
        }
        u
    }
}
