//! Finite-difference stencils and the implicit-explicit time step for
//! `u_t + (u²/2)_x = ε u_xx − δ u_xxx`.
//!
//! The flux is advanced explicitly in conservative central form, the linear
//! part implicitly with Crank–Nicolson weights. Each step is a Heun
//! predictor-corrector written in increment form, so constants and (with
//! well balancing) the reference profile are reproduced bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{BandedLu, BandedMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Outer nodes held at their initial values.
    Pinned,
    Periodic,
}

/// Uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    /// Number of nodes.
    pub len: usize,
    pub boundary: Boundary,
}

impl Grid {
    /// Nodes −L, −L + Δx, …, L with Δx = 2L/N.
    pub fn pinned(half_width: f64, intervals: usize) -> Self {
        Grid { x0: -half_width, dx: 2.0 * half_width / intervals as f64, len: intervals + 1, boundary: Boundary::Pinned }
    }

    /// `n` nodes on [0, length) with period `length`.
    pub fn periodic(length: f64, n: usize) -> Self {
        Grid { x0: 0.0, dx: length / n as f64, len: n, boundary: Boundary::Periodic }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.x(j)).collect()
    }

    /// Trapezoid rule over the whole grid (rectangle rule when periodic).
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let sum: f64 = f.iter().sum();
        match self.boundary {
            Boundary::Pinned => (sum - 0.5 * (f[0] + f[self.len - 1])) * self.dx,
            Boundary::Periodic => sum * self.dx,
        }
    }
}

/// Central stencil: offsets −r..=r, weights to be divided by Δxᵏ.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub weights: &'static [f64],
    pub power: i32,
}

impl Stencil {
    pub fn radius(&self) -> usize {
        self.weights.len() / 2
    }
}

const D1_2: [f64; 3] = [-0.5, 0.0, 0.5];
const D1_4: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2_2: [f64; 3] = [1.0, -2.0, 1.0];
const D2_4: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D3_2: [f64; 5] = [-0.5, 1.0, 0.0, -1.0, 0.5];
const D3_4: [f64; 7] = [0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125];

/// First, second and third derivative stencils of spatial order 2 or 4.
pub fn stencils(order: usize) -> Result<[Stencil; 3]> {
    match order {
        2 => Ok([
            Stencil { weights: &D1_2, power: 1 },
            Stencil { weights: &D2_2, power: 2 },
            Stencil { weights: &D3_2, power: 3 },
        ]),
        4 => Ok([
            Stencil { weights: &D1_4, power: 1 },
            Stencil { weights: &D2_4, power: 2 },
            Stencil { weights: &D3_4, power: 3 },
        ]),
        _ => Err(Error::Config(format!("spatial order must be 2 or 4, got {order}"))),
    }
}

/// Number of outer nodes pinned on each side for a given order.
pub fn pinned_width(order: usize) -> usize {
    order / 2 + 1
}

/// Coefficients of the equation; `flux` toggles the convective term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub eps: f64,
    pub delta: f64,
    pub flux: bool,
}

/// Apply a stencil at every row in `rows`, writing into `out`. The weights
/// sum to zero, so differences against the centre value are taken and
/// constants give exactly zero.
fn apply(grid: &Grid, st: &Stencil, f: &[f64], rows: std::ops::Range<usize>, out: &mut [f64]) {
    let r = st.radius();
    let scale = 1.0 / grid.dx.powi(st.power);
    let n = grid.len;
    for j in rows {
        let mut acc = 0.0;
        for (k, &c) in st.weights.iter().enumerate() {
            if c != 0.0 {
                let idx = match grid.boundary {
                    Boundary::Pinned => j + k - r,
                    Boundary::Periodic => (j + n + k - r) % n,
                };
                acc += c * (f[idx] - f[j]);
            }
        }
        out[j] = acc * scale;
    }
}

/// Rows updated by the scheme.
pub fn active_rows(grid: &Grid, order: usize) -> std::ops::Range<usize> {
    match grid.boundary {
        Boundary::Pinned => pinned_width(order)..grid.len - pinned_width(order),
        Boundary::Periodic => 0..grid.len,
    }
}

/// Central derivative of `f` on the active rows (zero elsewhere).
pub fn derivative(grid: &Grid, order: usize, which: usize, f: &[f64]) -> Result<Vec<f64>> {
    let st = stencils(order)?[which - 1];
    let mut out = vec![0.0; grid.len];
    let rows = match grid.boundary {
        Boundary::Pinned => st.radius()..grid.len - st.radius(),
        Boundary::Periodic => 0..grid.len,
    };
    apply(grid, &st, f, rows, &mut out);
    Ok(out)
}

/// −(u²/2)_x in conservative central form on the active rows.
pub fn flux_term(grid: &Grid, order: usize, u: &[f64], out: &mut [f64]) -> Result<()> {
    let st = stencils(order)?[0];
    let f: Vec<f64> = u.iter().map(|v| 0.5 * v * v).collect();
    out.iter_mut().for_each(|v| *v = 0.0);
    apply(grid, &st, &f, active_rows(grid, order), out);
    for j in active_rows(grid, order) {
        out[j] = -out[j];
    }
    Ok(())
}

/// ε D₂u − δ D₃u on the active rows (zero elsewhere).
pub fn linear_apply(grid: &Grid, order: usize, coeffs: &Coefficients, u: &[f64]) -> Result<Vec<f64>> {
    let [_, d2, d3] = stencils(order)?;
    let rows = active_rows(grid, order);
    let (mut a, mut b) = (vec![0.0; u.len()], vec![0.0; u.len()]);
    apply(grid, &d2, u, rows.clone(), &mut a);
    apply(grid, &d3, u, rows, &mut b);
    Ok(a.iter().zip(&b).map(|(x, y)| coeffs.eps * x - coeffs.delta * y).collect())
}

/// Matrix of ε D₂ − δ D₃ on the active rows; pinned rows are zero.
pub fn linear_operator(grid: &Grid, order: usize, coeffs: &Coefficients) -> Result<BandedMatrix> {
    let [_, d2, d3] = stencils(order)?;
    let r = d3.radius();
    let n = grid.len;
    let bw = match grid.boundary {
        Boundary::Pinned => r,
        Boundary::Periodic => n - 1,
    };
    let mut m = BandedMatrix::zeros(n, bw, bw);
    let s2 = coeffs.eps / grid.dx.powi(2);
    let s3 = coeffs.delta / grid.dx.powi(3);
    let r2 = d2.radius() as isize;
    for j in active_rows(grid, order) {
        for k in 0..=2 * r {
            let o = k as isize - r as isize;
            let c2 = if o.abs() <= r2 { d2.weights[(o + r2) as usize] } else { 0.0 };
            let v = c2 * s2 - d3.weights[k] * s3;
            if v == 0.0 {
                continue;
            }
            let col = match grid.boundary {
                Boundary::Pinned => j + k - r,
                Boundary::Periodic => (j + n + k - r) % n,
            };
            m.set(j, col, m.get(j, col) + v);
        }
    }
    Ok(m)
}

/// Heun–Crank–Nicolson stepper with a factorized implicit matrix.
#[derive(Debug, Clone)]
pub struct ImexStepper {
    pub grid: Grid,
    pub order: usize,
    pub coeffs: Coefficients,
    pub dt: f64,
    linear: BandedMatrix,
    lu: BandedLu,
    forcing: Option<Vec<f64>>,
}

impl ImexStepper {
    pub fn new(grid: Grid, order: usize, coeffs: Coefficients, dt: f64) -> Result<Self> {
        if grid.len < 2 * pinned_width(order) + 1 {
            return Err(Error::Config(format!("grid of {} nodes is too small", grid.len)));
        }
        let linear = linear_operator(&grid, order, &coeffs)?;
        let (kl, ku) = linear.bandwidths();
        let mut implicit = BandedMatrix::identity(grid.len, kl, ku);
        for j in active_rows(&grid, order) {
            let lo = j.saturating_sub(kl);
            let hi = (j + ku).min(grid.len - 1);
            for col in lo..=hi {
                let v = linear.get(j, col);
                if v != 0.0 {
                    implicit.set(j, col, implicit.get(j, col) - 0.5 * dt * v);
                }
            }
        }
        let lu = implicit.factor()?;
        Ok(ImexStepper { grid, order, coeffs, dt, linear, lu, forcing: None })
    }

    pub fn linear(&self) -> &BandedMatrix {
        &self.linear
    }

    /// Make `steady` an exact fixed point by subtracting its discrete
    /// residual from every step.
    pub fn balance(&mut self, steady: &[f64]) -> Result<()> {
        self.forcing = None;
        let res = self.residual(steady)?;
        self.forcing = Some(res.iter().map(|r| -r).collect());
        Ok(())
    }

    pub fn is_balanced(&self) -> bool {
        self.forcing.is_some()
    }

    /// Explicit part: flux term plus any balancing forcing.
    fn explicit(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        if self.coeffs.flux {
            flux_term(&self.grid, self.order, u, out)?;
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
        }
        Ok(())
    }

    /// Full semi-discrete right-hand side, including balancing.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut e = vec![0.0; u.len()];
        self.explicit(u, &mut e)?;
        let lu = linear_apply(&self.grid, self.order, &self.coeffs, u)?;
        let mut out: Vec<f64> = e.iter().zip(&lu).map(|(a, b)| a + b).collect();
        if let Some(f) = &self.forcing {
            out.iter_mut().zip(f).for_each(|(o, c)| *o += c);
        }
        Ok(out)
    }

    /// Advance `u` by one step.
    pub fn step(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = u.len();
        if n != self.grid.len {
            return Err(Error::Dimension(format!("state of length {n} on a grid of {} nodes", self.grid.len)));
        }
        let rows = active_rows(&self.grid, self.order);
        let dt = self.dt;
        let lin = linear_apply(&self.grid, self.order, &self.coeffs, u)?;
        let mut e0 = vec![0.0; n];
        self.explicit(u, &mut e0)?;
        let forcing = |j: usize| self.forcing.as_ref().map_or(0.0, |f| f[j]);

        let mut inc = vec![0.0; n];
        for j in rows.clone() {
            inc[j] = dt * ((e0[j] + lin[j]) + forcing(j));
        }
        self.lu.solve_in_place(&mut inc);
        let stage: Vec<f64> = u.iter().zip(&inc).map(|(a, d)| a + d).collect();

        let mut e1 = vec![0.0; n];
        self.explicit(&stage, &mut e1)?;
        let mut inc = vec![0.0; n];
        for j in rows {
            inc[j] = dt * ((0.5 * (e0[j] + e1[j]) + lin[j]) + forcing(j));
        }
        self.lu.solve_in_place(&mut inc);
        Ok(u.iter().zip(&inc).map(|(a, d)| a + d).collect())
    }
}
