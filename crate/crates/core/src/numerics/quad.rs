//! Composite and adaptive quadrature, plus Chebyshev sample placement.

use crate::error::{Error, Result};

/// Value of a quadrature together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Composite Simpson rule with `n` panels (`n` rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let x = a + i as f64 * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Composite Simpson with panel doubling until the Richardson error
/// estimate falls below `tol * (1 + |value|)`.
///
/// An empty interval yields zero.
pub fn quad_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let mut n = 16;
    let mut prev = simpson(&f, a, b, n);
    loop {
        n *= 2;
        let cur = simpson(&f, a, b, n);
        let err = (cur - prev).abs() / 15.0;
        if err <= tol * (1.0 + cur.abs()) {
            return Ok(QuadResult { value: cur, error: err });
        }
        if n > (1 << 22) {
            return Err(Error::Precondition(format!(
                "composite quadrature on [{a}, {b}] did not reach tolerance {tol:e} (estimate {err:e})"
            )));
        }
        prev = cur;
    }
}

/// Adaptive Simpson quadrature; copes with integrable endpoint
/// singularities of square-root type.
pub fn quad_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0 };
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut error = 0.0;
    let value = adapt(&f, a, b, fa, fm, fb, whole, tol.max(1e-300), 60, &mut error);
    QuadResult { value, error }
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    error: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        *error += diff.abs() / 15.0;
        return left + right + diff / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, error)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, error)
}

/// Trapezoid rule on sampled data with arbitrary (monotone) abscissae.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// `n` Chebyshev–Lobatto points on `[a, b]`, increasing, endpoints included.
pub fn chebyshev_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::PI * (n - 1 - k) as f64 / (n - 1) as f64;
            if k == 0 {
                a
            } else if k == n - 1 {
                b
            } else {
                mid + half * theta.cos()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| 4.0 * x * x * x - 3.0 * x * x + 2.0, -1.0, 2.0, 2);
        assert!((v - (16.0 - 1.0 - 9.0 + 6.0)).abs() < 1e-13);
    }

    #[test]
    fn composite_square() {
        let r = quad_composite(|x| x * x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(quad_composite(|x| x, 1.0, 1.0, 1e-8).unwrap().value, 0.0);
    }

    #[test]
    fn adaptive_square_root_endpoint() {
        let (s, u0) = (1.0, 1.05);
        let r = quad_adaptive(|z: f64| (u0 - z).max(0.0).sqrt() * (z + s), -s, u0, 1e-13);
        let exact = 4.0 / 15.0 * (u0 + s).powf(2.5);
        assert!((r.value - exact).abs() < 1e-9, "{} vs {}", r.value, exact);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let x = [0.0, 0.3, 1.0, 2.5];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((trapezoid(&x, &y) - (6.25 + 2.5)).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_clusters_at_ends() {
        let p = chebyshev_points(0.0, 1.0, 9);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[8], 1.0);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert!(p[1] - p[0] < p[5] - p[4]);
    }
}
