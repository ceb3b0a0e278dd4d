//! Shooting computation of the heteroclinic shock profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_ode, DenseTrajectory, Flow, ToleranceSet};
use crate::profile::{equilibrium_eigen, ShockParams};

/// Options controlling the shooting integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileOptions {
    pub tol: ToleranceSet,
    /// Initial offset from the right state, in units of s.
    pub seed_offset: f64,
    /// Extremum budget.
    pub max_extrema: usize,
    /// Integration stops once |ũ − s| + |ũ′| falls below this multiple of s;
    /// extrema with |uᵢ − s| below it are not resolved.
    pub cutoff: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            tol: ToleranceSet {
                abs_tol: 1e-17,
                rel_tol: 1e-12,
                event_tol: 1e-13,
                margin_tol: 1e-7,
            },
            seed_offset: 1e-8,
            max_extrema: 12,
            cutoff: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub i: usize,
    pub xi: f64,
    pub u: f64,
    pub kind: ExtremumKind,
}

/// Markers attached to extremum index `i ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkerSet {
    pub i: usize,
    /// ξ^i: ũ(ξ^i) = uᵢ with ξ^i in (ξᵢ₋₁, ξᵢ₋₂).
    pub xi_sup: f64,
    /// ξ_*: first crossing of the midpoint (uᵢ + uᵢ₋₁)/2 right of ξᵢ.
    pub xi_star: f64,
    /// ξ^*: second crossing of the same midpoint, in (ξᵢ₋₁, ξ^i).
    pub xi_starstar: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalMarkers {
    /// Crossing ũ = s in (ξ₁, ξ₀).
    pub xi_s: Option<f64>,
    pub sets: Vec<MarkerSet>,
}

impl IntervalMarkers {
    pub fn get(&self, i: usize) -> Option<&MarkerSet> {
        self.sets.iter().find(|m| m.i == i)
    }
}

/// Heteroclinic profile ũ in the normalized frame.
///
/// Inside the integrated range values come from the dense output of the
/// shooting integration; to the right of the seed the stable linear mode of
/// the saddle is used and to the left of the stopping point the linearized
/// flow around the left state.
#[derive(Debug, Clone)]
pub struct Profile {
    pub params: ShockParams,
    pub options: ProfileOptions,
    pub xi: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub energy: Vec<f64>,
    pub extrema: Vec<Extremum>,
    /// Number of leading extrema with |uᵢ − s| ≥ cutoff·s.
    pub resolved: usize,
    pub markers: IntervalMarkers,
    pub warnings: Vec<String>,
    /// State is (ũ − s, ũ′).
    dense: DenseTrajectory,
    xi_seed: f64,
    seed_gap: f64,
    tail_slope: f64,
    xi_end: f64,
    end_state: (f64, f64),
}

impl Profile {
    pub fn s(&self) -> f64 {
        self.params.s
    }

    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    /// Abscissa of the shooting seed (right end of the integrated range).
    pub fn xi_seed(&self) -> f64 {
        self.xi_seed
    }

    /// Left end of the integrated range.
    pub fn xi_end(&self) -> f64 {
        self.xi_end
    }

    pub fn tail_slope(&self) -> f64 {
        self.tail_slope
    }

    pub fn dense(&self) -> &DenseTrajectory {
        &self.dense
    }

    /// (ũ − s, ũ′) at ξ.
    fn deviation(&self, xi: f64) -> (f64, f64) {
        let s = self.params.s;
        if xi > self.xi_seed {
            let w = self.seed_gap * (self.tail_slope * (xi - self.xi_seed)).exp();
            (w - 2.0 * s, self.tail_slope * w)
        } else if xi < self.xi_end {
            linear_focus_flow(self.params.delta, s, self.end_state, xi - self.xi_end)
        } else {
            (self.dense.eval_component(xi, 0), self.dense.eval_component(xi, 1))
        }
    }

    pub fn u_at(&self, xi: f64) -> f64 {
        self.deviation(xi).0 + self.params.s
    }

    pub fn du_at(&self, xi: f64) -> f64 {
        self.deviation(xi).1
    }

    /// (ũ, ũ′) at ξ.
    pub fn eval(&self, xi: f64) -> (f64, f64) {
        let (v, p) = self.deviation(xi);
        (v + self.params.s, p)
    }

    /// ũ″ from the profile equation.
    pub fn d2u_at(&self, xi: f64) -> f64 {
        let (u, p) = self.eval(xi);
        let s = self.params.s;
        (p - 0.5 * (u - s) * (u + s)) / self.params.delta
    }

    /// ũ″ from differentiating the interpolant of ũ′ (independent of the
    /// equation; used for residual checks).
    pub fn d2u_interpolated(&self, xi: f64) -> f64 {
        if xi < self.xi_end || xi > self.xi_seed {
            return self.d2u_at(xi);
        }
        self.dense.eval_derivative_component(xi, 1)
    }

    /// Fill `u_out` and `du_out` at increasing abscissae `xs`.
    pub fn sample_sorted(&self, xs: &[f64], u_out: &mut [f64], du_out: &mut [f64]) {
        let lo = xs.partition_point(|&x| x < self.xi_end);
        let hi = xs.partition_point(|&x| x <= self.xi_seed);
        let s = self.params.s;
        for k in (0..lo).chain(hi..xs.len()) {
            let (v, p) = self.deviation(xs[k]);
            u_out[k] = v + s;
            du_out[k] = p;
        }
        if hi > lo {
            self.dense.eval_sorted(&xs[lo..hi], 0, &mut u_out[lo..hi]);
            self.dense.eval_sorted(&xs[lo..hi], 1, &mut du_out[lo..hi]);
            for v in &mut u_out[lo..hi] {
                *v += s;
            }
        }
    }

    /// ξ of extremum `i`, with ξ₋₁ = +∞.
    pub fn extremum_xi(&self, i: isize) -> Option<f64> {
        if i < 0 {
            Some(f64::INFINITY)
        } else {
            self.extrema.get(i as usize).map(|e| e.xi)
        }
    }

    /// Value uᵢ, with u₋₁ = −s.
    pub fn extremum_u(&self, i: isize) -> Option<f64> {
        if i < 0 {
            Some(-self.params.s)
        } else {
            self.extrema.get(i as usize).map(|e| e.u)
        }
    }

    pub fn is_resolved(&self, i: usize) -> bool {
        i < self.resolved
    }

    /// Finite right end to stand in for +∞: far enough that ũ + s is below
    /// 1e-30·s.
    pub fn xi_right_far(&self) -> f64 {
        self.xi_seed + (1e-30 / self.options.seed_offset).ln() / self.tail_slope
    }

    /// Finite left end to stand in for −∞.
    pub fn xi_left_far(&self) -> f64 {
        let rate = 1.0 / (2.0 * self.params.delta);
        let rate = if self.params.kappa > 0.25 {
            rate
        } else {
            let disc = (1.0 - 4.0 * self.params.delta * self.params.s).max(0.0).sqrt();
            (1.0 - disc) / (2.0 * self.params.delta)
        };
        self.xi_end - 70.0 / rate
    }
}

/// Solution of δv″ − v′ + s v = 0 at offset τ from the state (v, v′).
fn linear_focus_flow(delta: f64, s: f64, state: (f64, f64), tau: f64) -> (f64, f64) {
    let (v0, p0) = state;
    let disc = 1.0 - 4.0 * delta * s;
    if disc < 0.0 {
        let a = 1.0 / (2.0 * delta);
        let b = (-disc).sqrt() / (2.0 * delta);
        let c2 = (p0 - a * v0) / b;
        let (sn, cs) = (b * tau).sin_cos();
        let e = (a * tau).exp();
        let v = e * (v0 * cs + c2 * sn);
        let p = e * (a * (v0 * cs + c2 * sn) + b * (-v0 * sn + c2 * cs));
        (v, p)
    } else if disc == 0.0 {
        let l = 1.0 / (2.0 * delta);
        let e = (l * tau).exp();
        let c = p0 - l * v0;
        (e * (v0 + c * tau), e * (l * (v0 + c * tau) + c))
    } else {
        let r = disc.sqrt();
        let l1 = (1.0 + r) / (2.0 * delta);
        let l2 = (1.0 - r) / (2.0 * delta);
        let c1 = (p0 - l2 * v0) / (l1 - l2);
        let c2 = v0 - c1;
        let (e1, e2) = ((l1 * tau).exp(), (l2 * tau).exp());
        (c1 * e1 + c2 * e2, l1 * c1 * e1 + l2 * c2 * e2)
    }
}

/// Compute the profile by shooting from the saddle along its stable
/// direction in decreasing ξ.
pub fn compute_profile(params: &ShockParams, options: &ProfileOptions) -> Result<Profile> {
    if !params.is_normalized() {
        return Err(Error::InvalidParams(
            "profile computation expects normalized parameters (eps = 1, sigma = 0)".into(),
        ));
    }
    options.tol.validate()?;
    let s = params.s;
    let delta = params.delta;
    let slope = equilibrium_eigen(params).tail_slope;
    let eta = options.seed_offset * s;
    let y0 = [eta - 2.0 * s, slope * eta];

    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let v = y[0];
        dy[0] = y[1];
        dy[1] = (y[1] - 0.5 * v * (v + 2.0 * s)) / delta;
    };
    let turn = |_: f64, y: &[f64]| y[1];
    let mut count = 0usize;
    let mut left_first_piece = false;
    let stop = options.cutoff * s;
    let budget = options.max_extrema;

    // Generous span; the observer stops integration long before it.
    let span_len = 2000.0 * (1.0 + delta) / s.min(1.0);
    let sol = integrate_ode(rhs, &y0, (0.0, -span_len), &options.tol, &[&turn], |info| {
        count += info.new_hits.len();
        if info.y[0] > -s {
            left_first_piece = true;
        }
        let near = info.y[0].abs() + info.y[1].abs() < stop;
        if count >= budget || (left_first_piece && near) {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    if !sol.stopped_early {
        return Err(Error::NoConvergence(format!(
            "after {} steps the orbit is at (u - s, u') = ({:e}, {:e})",
            sol.steps, sol.y_final[0], sol.y_final[1]
        )));
    }

    let mut dense = sol.trajectory;
    let mut warnings = Vec::new();

    // Refine extrema: bisection result plus one Newton step on ũ′.
    let mut raw: Vec<(f64, f64)> = Vec::new();
    for hit in &sol.hits {
        let mut x = hit.t;
        let p = dense.eval_component(x, 1);
        let v = dense.eval_component(x, 0);
        let dp = (p - 0.5 * v * (v + 2.0 * s)) / delta;
        if dp.abs() < options.tol.event_tol {
            warnings.push(format!("degenerate extremum near xi = {x:e} merged"));
            continue;
        }
        let step = p / dp;
        if step.abs() < 1e-3 {
            x -= step;
        }
        raw.push((x, dense.eval_component(x, 0) + s));
    }

    // Origin: ũ = 0 on the rightmost monotone piece.
    let right_lo = raw.first().map(|e| e.0).unwrap_or(sol.t_final);
    let mid = find_root(
        |x| dense.eval_component(x, 0) + s,
        right_lo,
        0.0,
        options.tol.event_tol,
    )?;
    dense.shift_abscissa(-mid);
    let xi_seed = -mid;
    let xi_end = sol.t_final - mid;

    let mut extrema = Vec::with_capacity(raw.len());
    for (x, u) in raw {
        let i = extrema.len();
        let kind = if u > s { ExtremumKind::Max } else { ExtremumKind::Min };
        let expected = if i % 2 == 0 { ExtremumKind::Max } else { ExtremumKind::Min };
        if kind != expected {
            warnings.push(format!("extremum at xi = {:e} breaks alternation; dropped", x - mid));
            continue;
        }
        extrema.push(Extremum { i, xi: x - mid, u, kind });
    }
    let resolved = extrema
        .iter()
        .take_while(|e| (e.u - s).abs() >= options.cutoff * s)
        .count();

    // Samples: accepted nodes plus three interior points per step, increasing ξ.
    let mut xi: Vec<f64> = Vec::new();
    let nodes: Vec<f64> = dense.nodes.iter().rev().map(|n| n.0).collect();
    for w in nodes.windows(2) {
        for k in 0..4 {
            xi.push(w[0] + (w[1] - w[0]) * k as f64 / 4.0);
        }
    }
    if let Some(last) = nodes.last() {
        xi.push(*last);
    }
    let mut u = vec![0.0; xi.len()];
    let mut du = vec![0.0; xi.len()];
    dense.eval_sorted(&xi, 0, &mut u);
    dense.eval_sorted(&xi, 1, &mut du);
    for v in &mut u {
        *v += s;
    }
    let energy = u
        .iter()
        .zip(&du)
        .map(|(a, b)| energy_value(s, delta, *a, *b))
        .collect();

    let mut profile = Profile {
        params: *params,
        options: *options,
        xi,
        u,
        du,
        energy,
        extrema,
        resolved,
        markers: IntervalMarkers::default(),
        warnings,
        dense,
        xi_seed,
        seed_gap: eta,
        tail_slope: slope,
        xi_end,
        end_state: (sol.y_final[0], sol.y_final[1]),
    };
    profile.markers = locate_markers(&profile);
    Ok(profile)
}

/// (1/6)(ũ+s)²(ũ−2s) + (δ/2)ũ′².
pub fn energy_value(s: f64, delta: f64, u: f64, du: f64) -> f64 {
    (u + s) * (u + s) * (u - 2.0 * s) / 6.0 + 0.5 * delta * du * du
}

/// Effective energy at ξ.
pub fn effective_energy(profile: &Profile, xi: f64) -> f64 {
    let (u, du) = profile.eval(xi);
    energy_value(profile.s(), profile.delta(), u, du)
}

/// Ordered extremum list (rightmost first).
pub fn detect_extrema(profile: &Profile) -> Vec<Extremum> {
    profile.extrema.clone()
}

/// Locate ξ_s and, for each i ≥ 1 whose brackets exist, ξ^i, ξ_* and ξ^*.
pub fn locate_markers(profile: &Profile) -> IntervalMarkers {
    let s = profile.s();
    let tol = profile.options.tol.event_tol;
    let root = |target: f64, a: f64, b: f64| -> Option<f64> {
        let t = tol * (1.0 + a.abs().max(b.abs()));
        find_root(|x| profile.u_at(x) - target, a, b, t).ok()
    };
    let ex = &profile.extrema;
    let mut markers = IntervalMarkers::default();
    if ex.len() >= 2 {
        markers.xi_s = root(s, ex[1].xi, ex[0].xi);
    }
    let right_far = profile.xi_right_far();
    for i in 1..ex.len() {
        let ui = ex[i].u;
        let uprev = ex[i - 1].u;
        let hi_outer = if i >= 2 { ex[i - 2].xi } else { right_far };
        let Some(xi_sup) = root(ui, ex[i - 1].xi, hi_outer) else { break };
        let midv = 0.5 * (ui + uprev);
        let Some(xi_star) = root(midv, ex[i].xi, ex[i - 1].xi) else { break };
        let Some(xi_starstar) = root(midv, ex[i - 1].xi, xi_sup) else { break };
        markers.sets.push(MarkerSet { i, xi_sup, xi_star, xi_starstar });
    }
    markers
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_flow_solves_its_equation() {
        for &(d, s) in &[(0.45, 1.0), (0.2, 1.0), (0.25, 1.0)] {
            let st = (1e-9, -3e-10);
            let h = 1e-4;
            let tau = -2.3;
            let (v, p) = linear_focus_flow(d, s, st, tau);
            let (vp, pp) = linear_focus_flow(d, s, st, tau + h);
            let (vm, pm) = linear_focus_flow(d, s, st, tau - h);
            assert!(((vp - vm) / (2.0 * h) - p).abs() < 1e-15);
            let d2 = (pp - pm) / (2.0 * h);
            assert!((d * d2 - p + s * v).abs() < 1e-15);
            assert!((linear_focus_flow(d, s, st, 0.0).0 - st.0).abs() < 1e-24);
        }
    }

    #[test]
    fn energy_endpoints() {
        assert_eq!(energy_value(1.0, 0.45, -1.0, 0.0), 0.0);
        assert!((energy_value(1.0, 0.45, 1.0, 0.0) + 2.0 / 3.0).abs() < 1e-15);
    }
}
