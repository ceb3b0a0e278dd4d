//! The inviscid Riemann shock and the L² distance to it.

use serde::{Deserialize, Serialize};

use crate::pde::Grid;
use crate::profile::ShockParams;

/// ū(t, x) = u₋ for x − σt < 0 and u₊ for x − σt > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannShock {
    pub u_minus: f64,
    pub u_plus: f64,
    pub sigma: f64,
}

impl RiemannShock {
    /// Entropy shock with the Rankine–Hugoniot speed of `params`.
    pub fn of(params: &ShockParams) -> Self {
        RiemannShock { u_minus: params.u_minus, u_plus: params.u_plus, sigma: params.sigma }
    }

    /// Jump position at time `t` after an extra translation `shift`.
    pub fn jump_at(&self, t: f64, shift: f64) -> f64 {
        self.sigma * t + shift
    }

    /// ū(t, x − shift); the right state is used on the jump itself.
    pub fn value(&self, t: f64, x: f64, shift: f64) -> f64 {
        if x < self.jump_at(t, shift) {
            self.u_minus
        } else {
            self.u_plus
        }
    }
}

/// ∫₀ʰ of the square of the linear function through d0 and d1.
fn linear_square(h: f64, d0: f64, d1: f64) -> f64 {
    h * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0
}

/// ‖u − ū(t, · − shift)‖ over the grid, with u linear between nodes. The
/// cell holding the jump is split there, so every cell is integrated
/// exactly.
pub fn riemann_distance(grid: &Grid, u: &[f64], shock: &RiemannShock, t: f64, shift: f64) -> f64 {
    let jump = shock.jump_at(t, shift);
    let (l, r) = (shock.u_minus, shock.u_plus);
    let mut sum = 0.0;
    for j in 0..u.len().saturating_sub(1) {
        let (a, b) = (grid.x(j), grid.x(j + 1));
        let (ua, ub) = (u[j], u[j + 1]);
        if b <= jump {
            sum += linear_square(b - a, ua - l, ub - l);
        } else if a >= jump {
            sum += linear_square(b - a, ua - r, ub - r);
        } else {
            let theta = (jump - a) / (b - a);
            let uj = ua + theta * (ub - ua);
            sum += linear_square(jump - a, ua - l, uj - l) + linear_square(b - jump, uj - r, ub - r);
        }
    }
    sum.sqrt()
}
