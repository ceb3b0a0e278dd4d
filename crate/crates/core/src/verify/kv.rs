//! Weighted Poincaré inequality on an interval:
//! ∫f² ≤ ½∫(y−a)(b−y)f′² + (1/(b−a))(∫f)².

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KvCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// RHS − LHS.
    pub slack: f64,
    pub scale: f64,
    pub pass: bool,
}

/// Simpson weights on a uniform grid with an odd number of nodes.
fn simpson_sum(h: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    let mut sum = 0.0;
    for (k, v) in values.enumerate() {
        let w = if k == 0 || k == n - 1 {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * v;
    }
    sum * h / 3.0
}

/// Evaluate both sides from samples of f and f′ on a uniform grid `ys`
/// (odd length) and compare with relative tolerance `margin_tol`.
pub fn kv_inequality_check(ys: &[f64], f: &[f64], df: &[f64], margin_tol: f64) -> Result<KvCheck> {
    let n = ys.len();
    if n < 3 || n % 2 == 0 || f.len() != n || df.len() != n {
        return Err(Error::Dimension(format!(
            "need matching odd-length samples, got {n}, {}, {}",
            f.len(),
            df.len()
        )));
    }
    let (a, b) = (ys[0], ys[n - 1]);
    let h = (b - a) / (n - 1) as f64;
    let lhs = simpson_sum(h, f.iter().map(|v| v * v));
    let weighted = simpson_sum(h, ys.iter().zip(df).map(|(&y, &d)| (y - a) * (b - y) * d * d));
    let mean = simpson_sum(h, f.iter().copied());
    let rhs = 0.5 * weighted + mean * mean / (b - a);
    let slack = rhs - lhs;
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok(KvCheck { lhs, rhs, slack, scale, pass: slack >= -margin_tol * scale })
}

/// Uniform grid with `n` nodes on [a, b].
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
}
