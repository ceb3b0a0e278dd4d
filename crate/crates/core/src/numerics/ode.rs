//! Dormand–Prince 5(4) integrator with PI step control, continuous
//! (dense) output and event location.

use crate::error::{Error, Result};
use crate::numerics::ToleranceSet;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension of one accepted step.
#[derive(Debug, Clone)]
struct Segment {
    t0: f64,
    h: f64,
    /// Five coefficient blocks of length `dim`, stored contiguously.
    coef: Vec<f64>,
}

impl Segment {
    fn lo(&self) -> f64 {
        self.t0.min(self.t0 + self.h)
    }

    fn hi(&self) -> f64 {
        self.t0.max(self.t0 + self.h)
    }

    fn eval_component(&self, t: f64, comp: usize, dim: usize) -> f64 {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = |k: usize| self.coef[k * dim + comp];
        r(0) + th * (r(1) + th1 * (r(2) + th * (r(3) + th1 * r(4))))
    }

    fn eval_derivative_component(&self, t: f64, comp: usize, dim: usize) -> f64 {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = |k: usize| self.coef[k * dim + comp];
        let rr = r(3) + th1 * r(4);
        let q = r(2) + th * rr;
        let p = r(1) + th1 * q;
        let dq = rr - th * r(4);
        let dp = -q + th1 * dq;
        (p + th * dp) / self.h
    }
}

/// Dense output of an integration: accepted nodes plus a fourth-order
/// continuous interpolant on every step.
#[derive(Debug, Clone)]
pub struct DenseTrajectory {
    dim: usize,
    /// Segments sorted by increasing lower abscissa.
    segments: Vec<Segment>,
    /// Accepted nodes in integration order.
    pub nodes: Vec<(f64, Vec<f64>)>,
    /// Order of the continuous interpolant.
    pub interpolant_order: usize,
}

impl DenseTrajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_min(&self) -> f64 {
        self.segments.first().map(|s| s.lo()).unwrap_or(f64::NAN)
    }

    pub fn t_max(&self) -> f64 {
        self.segments.last().map(|s| s.hi()).unwrap_or(f64::NAN)
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    fn locate(&self, t: f64) -> usize {
        let idx = self.segments.partition_point(|s| s.lo() <= t);
        idx.saturating_sub(1).min(self.segments.len() - 1)
    }

    /// Evaluate one component at `t` (clamped to the covered range).
    pub fn eval_component(&self, t: f64, comp: usize) -> f64 {
        let t = t.clamp(self.t_min(), self.t_max());
        let seg = &self.segments[self.locate(t)];
        seg.eval_component(t, comp, self.dim)
    }

    /// Derivative of the interpolant of one component at `t`.
    pub fn eval_derivative_component(&self, t: f64, comp: usize) -> f64 {
        let t = t.clamp(self.t_min(), self.t_max());
        let seg = &self.segments[self.locate(t)];
        seg.eval_derivative_component(t, comp, self.dim)
    }

    /// Evaluate the full state at `t` (clamped to the covered range).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        (0..self.dim).map(|c| self.eval_component(t, c)).collect()
    }

    /// Evaluate one component at increasing abscissae with a linear walk.
    pub fn eval_sorted(&self, ts: &[f64], comp: usize, out: &mut [f64]) {
        let (lo, hi) = (self.t_min(), self.t_max());
        let mut k = 0usize;
        for (t, o) in ts.iter().zip(out.iter_mut()) {
            let t = t.clamp(lo, hi);
            while k + 1 < self.segments.len() && self.segments[k].hi() < t {
                k += 1;
            }
            *o = self.segments[k].eval_component(t, comp, self.dim);
        }
    }

    /// Translate every abscissa by `delta`.
    pub fn shift_abscissa(&mut self, delta: f64) {
        for s in &mut self.segments {
            s.t0 += delta;
        }
        for n in &mut self.nodes {
            n.0 += delta;
        }
    }
}

/// Location of a sign change of an event function.
#[derive(Debug, Clone, PartialEq)]
pub struct EventHit {
    pub event: usize,
    pub t: f64,
    pub y: Vec<f64>,
    /// +1 when the event function increases through zero, -1 otherwise.
    pub direction: i8,
}

/// Information passed to the step observer after every accepted step.
pub struct StepInfo<'a> {
    pub t: f64,
    pub y: &'a [f64],
    pub new_hits: &'a [EventHit],
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub trajectory: DenseTrajectory,
    pub hits: Vec<EventHit>,
    pub t_final: f64,
    pub y_final: Vec<f64>,
    pub stopped_early: bool,
    pub steps: usize,
    pub rejected: usize,
}

pub type EventFn<'a> = &'a dyn Fn(f64, &[f64]) -> f64;

const MAX_STEPS: usize = 2_000_000;

fn error_norm(err: &[f64], y: &[f64], ynew: &[f64], tol: &ToleranceSet) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y.iter().zip(ynew))
        .map(|(e, (a, b))| {
            let sc = tol.abs_tol + tol.rel_tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrate `y' = rhs(t, y)` from `span.0` to `span.1` (either direction).
///
/// Every accepted step is recorded for dense evaluation; sign changes of the
/// `events` functions are located by bisection on the interpolant. The
/// `observer` may stop the integration early.
pub fn integrate_ode<F, O>(
    rhs: F,
    y0: &[f64],
    span: (f64, f64),
    tol: &ToleranceSet,
    events: &[EventFn<'_>],
    mut observer: O,
) -> Result<OdeSolution>
where
    F: Fn(f64, &[f64], &mut [f64]),
    O: FnMut(&StepInfo<'_>) -> Flow,
{
    let (t0, t_end) = span;
    if !(t0.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidParams("integration span must be finite".into()));
    }
    let dim = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let length = (t_end - t0).abs();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];
    let mut err = vec![0.0; dim];

    rhs(t, &y, &mut k[0]);

    // Initial step guess (Hairer–Wanner).
    let sc: Vec<f64> = y.iter().map(|v| tol.abs_tol + tol.rel_tol * v.abs()).collect();
    let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / dim as f64).sqrt();
    let d1 = (k[0].iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / dim as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(length.max(f64::MIN_POSITIVE));
    for i in 0..dim {
        ytmp[i] = y[i] + dir * h * k[0][i];
    }
    let mut f1 = vec![0.0; dim];
    rhs(t + dir * h, &ytmp, &mut f1);
    let d2 = (f1
        .iter()
        .zip(&k[0])
        .zip(&sc)
        .map(|((a, b), s)| ((a - b) / s).powi(2))
        .sum::<f64>()
        / dim as f64)
        .sqrt()
        / h;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    h = (100.0 * h).min(h1).min(length.max(f64::MIN_POSITIVE));

    let mut segments: Vec<Segment> = Vec::new();
    let mut nodes = vec![(t, y.clone())];
    let mut hits: Vec<EventHit> = Vec::new();
    let mut g_prev: Vec<f64> = events.iter().map(|g| g(t, &y)).collect();
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;
    let mut stopped_early = false;

    while dir * (t_end - t) > 0.0 {
        if steps + rejected > MAX_STEPS {
            return Err(Error::StepBudget { max_steps: MAX_STEPS, t });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, h, state: y.clone() });
        }
        let last = h >= dir * (t_end - t);
        if last {
            h = dir * (t_end - t);
        }
        let hs = dir * h;

        for i in 0..dim {
            ytmp[i] = y[i] + hs * A21 * k[0][i];
        }
        rhs(t + C2 * hs, &ytmp, &mut k[1]);
        for i in 0..dim {
            ytmp[i] = y[i] + hs * (A31 * k[0][i] + A32 * k[1][i]);
        }
        rhs(t + C3 * hs, &ytmp, &mut k[2]);
        for i in 0..dim {
            ytmp[i] = y[i] + hs * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        rhs(t + C4 * hs, &ytmp, &mut k[3]);
        for i in 0..dim {
            ytmp[i] = y[i]
                + hs * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        rhs(t + C5 * hs, &ytmp, &mut k[4]);
        for i in 0..dim {
            ytmp[i] = y[i]
                + hs * (A61 * k[0][i]
                    + A62 * k[1][i]
                    + A63 * k[2][i]
                    + A64 * k[3][i]
                    + A65 * k[4][i]);
        }
        rhs(t + hs, &ytmp, &mut k[5]);
        for i in 0..dim {
            ynew[i] = y[i]
                + hs * (A71 * k[0][i]
                    + A73 * k[2][i]
                    + A74 * k[3][i]
                    + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        rhs(t + hs, &ynew, &mut k[6]);
        for i in 0..dim {
            err[i] = hs
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
        }
        let en = error_norm(&err, &y, &ynew, tol);
        if !en.is_finite() {
            rejected += 1;
            h *= 0.1;
            last_rejected = true;
            continue;
        }

        let fac11 = en.powf(0.17);
        if en <= 1.0 {
            // Accept.
            let mut coef = vec![0.0; 5 * dim];
            for i in 0..dim {
                let dy = ynew[i] - y[i];
                let bspl = hs * k[0][i] - dy;
                coef[i] = y[i];
                coef[dim + i] = dy;
                coef[2 * dim + i] = bspl;
                coef[3 * dim + i] = dy - hs * k[6][i] - bspl;
                coef[4 * dim + i] = hs
                    * (D1 * k[0][i]
                        + D3 * k[2][i]
                        + D4 * k[3][i]
                        + D5 * k[4][i]
                        + D6 * k[5][i]
                        + D7 * k[6][i]);
            }
            let seg = Segment { t0: t, h: hs, coef };
            let t_new = t + hs;

            let mut new_hits = Vec::new();
            for (e, g) in events.iter().enumerate() {
                let g_new = g(t_new, &ynew);
                let g_old = g_prev[e];
                if g_old != 0.0 && (g_old.signum() != g_new.signum() || g_new == 0.0) {
                    let hit = locate_event(&seg, dim, *g, e, t, t_new, g_old, g_new, tol)?;
                    new_hits.push(hit);
                }
                g_prev[e] = g_new;
            }
            new_hits.sort_by(|a, b| (dir * a.t).total_cmp(&(dir * b.t)));

            segments.push(seg);
            t = t_new;
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            nodes.push((t, y.clone()));
            steps += 1;
            hits.extend(new_hits.iter().cloned());

            let flow = observer(&StepInfo {
                t,
                y: &y,
                new_hits: &new_hits,
                steps,
            });
            if flow == Flow::Stop {
                stopped_early = dir * (t_end - t) > 0.0;
                break;
            }

            let mut fac = fac11 / err_old.powf(0.04);
            fac = (fac / 0.9).clamp(0.1, 5.0);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            err_old = en.max(1e-4);
            last_rejected = false;
            h = h_new;
        } else {
            rejected += 1;
            h /= (fac11 / 0.9).min(5.0);
            last_rejected = true;
        }
    }

    if dir < 0.0 {
        segments.reverse();
    }
    Ok(OdeSolution {
        trajectory: DenseTrajectory {
            dim,
            segments,
            nodes,
            interpolant_order: 4,
        },
        hits,
        t_final: t,
        y_final: y,
        stopped_early,
        steps,
        rejected,
    })
}

#[allow(clippy::too_many_arguments)]
fn locate_event(
    seg: &Segment,
    dim: usize,
    g: EventFn<'_>,
    index: usize,
    t_old: f64,
    t_new: f64,
    g_old: f64,
    g_new: f64,
    tol: &ToleranceSet,
) -> Result<EventHit> {
    let state = |t: f64| -> Vec<f64> { (0..dim).map(|c| seg.eval_component(t, c, dim)).collect() };
    let direction = if g_new > g_old { 1 } else { -1 };
    if g_new == 0.0 {
        return Ok(EventHit { event: index, t: t_new, y: state(t_new), direction });
    }
    let (mut a, mut b) = (t_old, t_new);
    let mut ga = g_old;
    let width_tol = tol.event_tol * t_old.abs().max(t_new.abs()).max(1.0);
    let mut iter = 0;
    while (b - a).abs() > width_tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let gm = g(m, &state(m));
        if gm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
        iter += 1;
        if iter > 200 {
            return Err(Error::EventBracket { lo: a.min(b), hi: a.max(b) });
        }
    }
    let t = 0.5 * (a + b);
    Ok(EventHit { event: index, t, y: state(t), direction })
}
