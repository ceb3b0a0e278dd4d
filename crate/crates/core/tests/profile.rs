use shocklab::numerics::{integrate_ode, Flow, ToleranceSet};
use shocklab::profile::*;

/// Fixed-step RK4 integration of ũ″ = (ũ′ − ½(ũ² − s²))/δ from the same
/// saddle seed, stepping in decreasing ξ. Returns (extremum values, final state).
fn rk4_oracle(delta: f64, s: f64, length: f64, h: f64) -> (Vec<f64>, (f64, f64)) {
    let slope = -2.0 * s / (1.0 + (1.0 + 4.0 * delta * s).sqrt());
    let eta = 1e-8 * s;
    let f = |u: f64, p: f64| (p, (p - 0.5 * (u * u - s * s)) / delta);
    let (mut u, mut p) = (-s + eta, slope * eta);
    let mut extrema = Vec::new();
    let n = (length / h) as usize;
    let hh = -h;
    for _ in 0..n {
        let (k1u, k1p) = f(u, p);
        let (k2u, k2p) = f(u + 0.5 * hh * k1u, p + 0.5 * hh * k1p);
        let (k3u, k3p) = f(u + 0.5 * hh * k2u, p + 0.5 * hh * k2p);
        let (k4u, k4p) = f(u + hh * k3u, p + hh * k3p);
        let un = u + hh / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        let pn = p + hh / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if p != 0.0 && p.signum() != pn.signum() {
            // Quadratic (Hermite) estimate of the extremum value.
            let theta = p / (p - pn);
            let upp = (p - 0.5 * (u * u - s * s)) / delta;
            let dx = theta * hh;
            extrema.push(u + p * dx + 0.5 * upp * dx * dx);
        }
        u = un;
        p = pn;
    }
    (extrema, (u, p))
}

fn profile(delta: f64) -> Profile {
    compute_profile(&ShockParams::normalized(delta, 1.0).unwrap(), &ProfileOptions::default()).unwrap()
}

#[test]
fn matches_fixed_step_oracle() {
    let p = profile(0.45);
    let length = p.xi_seed() - p.xi_end() + 10.0;
    let (ex, (u_end, _)) = rk4_oracle(0.45, 1.0, length, 1e-4);
    assert!((u_end - 1.0).abs() < 1e-8);
    assert!((p.u_at(p.xi_end()) - 1.0).abs() < 1e-8);
    for k in 0..4 {
        let d = (ex[k] - p.extrema[k].u).abs();
        assert!(d < 1e-10 * (ex[k] - 1.0).abs().max(1e-6) * 1e4, "extremum {k}: {} vs {}", ex[k], p.extrema[k].u);
    }
}

#[test]
fn monotone_regime_has_no_extrema() {
    let p = profile(0.2);
    assert!(p.extrema.is_empty());
    assert!(p.du.iter().all(|d| *d <= 1e-14));
    assert!(p.markers.xi_s.is_none());
}

#[test]
fn oscillatory_structure() {
    let p = profile(0.45);
    let s = 1.0;
    assert!(p.resolved >= 6, "resolved {}", p.resolved);
    for e in &p.extrema {
        let expected = if e.i % 2 == 0 { ExtremumKind::Max } else { ExtremumKind::Min };
        assert_eq!(e.kind, expected);
        assert!(p.du_at(e.xi).abs() < 1e-12);
    }
    assert!(p.extrema.windows(2).all(|w| w[0].xi > w[1].xi));
    let (u0, u1) = (p.extrema[0].u, p.extrema[1].u);
    assert!(u0 > s && s > u1);
    assert!(u0 - s > s - u1);
    assert!(u0 <= 1.0601);
    assert!((u0 - s) / (s - u1) >= 4.64);
    // Interleaving on each side of s.
    for i in 0..p.resolved.saturating_sub(2) {
        let (a, b) = (p.extrema[i].u - s, p.extrema[i + 2].u - s);
        assert!(a.signum() == b.signum() && b.abs() < a.abs());
    }
}

#[test]
fn origin_and_bounds() {
    let p = profile(0.45);
    assert!(p.u_at(0.0).abs() < 1e-12);
    assert!(p.extrema[0].xi < 0.0 && p.xi_seed() > 0.0);
    assert!(p.u.iter().all(|u| *u > -1.0 && *u < 2.0));
    assert!(p.xi.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn residual_and_energy() {
    for delta in [0.3, 0.45, 10.0] {
        let p = profile(delta);
        let s = p.s();
        for &x in p.xi.iter().step_by(3) {
            let (u, du) = p.eval(x);
            let r = du - delta * p.d2u_interpolated(x) - 0.5 * (u * u - s * s);
            assert!(r.abs() < 1e-7 * s * s, "delta {delta} residual {r:e} at {x}");
        }
        for w in p.energy.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        let e_left = effective_energy(&p, p.xi_left_far());
        let e_right = effective_energy(&p, p.xi_right_far());
        assert!((e_left + 2.0 / 3.0 * s.powi(3)).abs() < 1e-12);
        assert!(e_right.abs() < 1e-12);
        // E′ = ũ′² via finite differences at interior points.
        let x = p.extrema.first().map(|e| e.xi + 0.3).unwrap_or(0.1);
        let h = 1e-5;
        let de = (effective_energy(&p, x + h) - effective_energy(&p, x - h)) / (2.0 * h);
        assert!((de - p.du_at(x).powi(2)).abs() < 1e-7);
        if let Some(e0) = p.extrema.first() {
            let exact = (e0.u + s).powi(2) * (e0.u - 2.0 * s) / 6.0;
            assert!((effective_energy(&p, e0.xi) - exact).abs() < 1e-14);
        }
    }
}

#[test]
fn tail_slope_matches_measured_ratio() {
    let p = profile(0.45);
    let x = p.xi_seed() - 2.0;
    let (u, du) = p.eval(x);
    let measured = du / (u + 1.0);
    assert!((measured - p.tail_slope()).abs() < 1e-5, "{measured} vs {}", p.tail_slope());
    assert!((p.tail_slope() + 2.0 / (1.0 + 2.8f64.sqrt())).abs() < 1e-15);
    assert!((p.tail_slope() + 0.7471).abs() < 1.5e-3);
}

#[test]
fn measured_tail_decay_matches_eigenvalues() {
    let p = profile(0.45);
    let r = linearized_decay_ratio(&p.params).unwrap();
    let s = p.s();
    let ratios: Vec<f64> = (0..p.resolved - 1)
        .map(|i| (p.extrema[i].u - s).abs() / (p.extrema[i + 1].u - s).abs())
        .collect();
    let last = ratios[ratios.len() - 1];
    assert!((last - r.eigen_inverse()).abs() / r.eigen_inverse() < 1e-3, "{ratios:?}");
    let printed_inverse = 1.0 / r.printed;
    assert!((last - printed_inverse).abs() / printed_inverse > 0.5);
}

#[test]
fn markers_satisfy_definitions() {
    let p = profile(0.45);
    let s = p.s();
    let m = &p.markers;
    let xs = m.xi_s.unwrap();
    assert!(xs > p.extrema[1].xi && xs < p.extrema[0].xi);
    assert!((p.u_at(xs) - s).abs() < 1e-12);
    assert!(m.sets.len() >= 5);
    for set in &m.sets {
        let i = set.i;
        let ui = p.extrema[i].u;
        let mid = 0.5 * (ui + p.extrema[i - 1].u);
        assert!(p.extrema[i].xi < set.xi_star);
        assert!(set.xi_star < set.xi_starstar && set.xi_starstar < set.xi_sup);
        assert!(set.xi_sup > p.extrema[i - 1].xi);
        if i >= 2 {
            assert!(set.xi_sup < p.extrema[i - 2].xi);
        }
        assert!((p.u_at(set.xi_sup) - ui).abs() < 1e-12);
        assert!((p.u_at(set.xi_star) - mid).abs() < 1e-12);
        assert!((p.u_at(set.xi_starstar) - mid).abs() < 1e-12);
    }
    // ξ^1 lies on the rightmost decreasing piece.
    assert!(m.get(1).unwrap().xi_sup > p.extrema[0].xi);
}

#[test]
fn tolerance_refinement_self_converges() {
    let params = ShockParams::normalized(0.45, 1.0).unwrap();
    let mut opts = ProfileOptions::default();
    let mut runs = Vec::new();
    for scale in [1e2, 1e1, 1.0] {
        opts.tol = ProfileOptions::default().tol.scaled(scale);
        opts.tol.margin_tol = 1e-7;
        runs.push(compute_profile(&params, &opts).unwrap());
    }
    for i in 0..3 {
        let d1 = (runs[0].extrema[i].u - runs[1].extrema[i].u).abs();
        let d2 = (runs[1].extrema[i].u - runs[2].extrema[i].u).abs();
        assert!(d2 <= 10.0 * d1 + 1e-15, "i={i}: {d1:e} then {d2:e}");
    }
}

#[test]
fn wide_dispersion_profile() {
    let p = profile(10.0);
    assert!(p.extrema[0].u > 1.4);
    assert_eq!(p.extrema.len(), 12);
    let s = p.s();
    let r: Vec<f64> = (1..6).map(|i| (p.extrema[i - 1].u - s).abs() / (p.extrema[i].u - s).abs()).collect();
    assert!(r.iter().all(|x| *x > 1.0 && *x < 2.5), "{r:?}");
    let (ex, _) = rk4_oracle(10.0, 1.0, p.xi_seed() - p.extrema[5].xi + 1.0, 1e-3);
    for k in 0..6 {
        assert!((ex[k] - p.extrema[k].u).abs() < 1e-9, "{k}: {} vs {}", ex[k], p.extrema[k].u);
    }
}

#[test]
fn integrator_exponential_tolerance_ratio() {
    let err = |tol: f64| {
        let t = ToleranceSet { abs_tol: tol, rel_tol: tol, ..Default::default() };
        let sol = integrate_ode(|_, y, dy| dy[0] = y[0], &[1.0], (0.0, 1.0), &t, &[], |_| Flow::Continue).unwrap();
        (sol.y_final[0] - std::f64::consts::E).abs()
    };
    let mut prev = err(1e-6);
    for k in 7..12 {
        let cur = err(10f64.powi(-k));
        assert!(cur <= prev * 10.0, "tol 1e-{k}: {cur:e} after {prev:e}");
        prev = cur;
    }
}
