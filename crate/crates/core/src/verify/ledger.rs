//! Bookkeeping of the induction over monotone intervals: the weight
//! sequences, the diffusion coefficients each step consumes, and the total
//! drawn from every interval.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::verify::envelopes::LambdaBar;

/// C₀ fixed in the base step.
pub const C0: f64 = 13.0 / 10.0;
/// C₁ solving C₁/(12C₁ + 1) = 1/15.
pub const C1: f64 = 1.0 / 3.0;
/// Smallest admissible shift gain, (40/39)·C₀.
pub const M_MIN: f64 = 520.0 / 390.0;
/// Fraction of the diffusion term any interval may spend.
pub const BUDGET_CAP: f64 = 0.9;
/// Right-tail L² bound factor (times s).
const TAIL_L2: f64 = 0.001;

/// aₙ = (1/15)·2⁻ⁿ.
pub fn a_seq(n: usize) -> f64 {
    1.0 / 15.0 / 2f64.powi(n as i32)
}

/// C₀, C₁, then C₂ₙ = a₂ₙ₋₁ + 3/2 + 1/(2a₂ₙ₋₁) and C₂ₙ₊₁ = a₂ₙ.
pub fn c_seq(n: usize) -> f64 {
    match n {
        0 => C0,
        1 => C1,
        _ if n % 2 == 0 => {
            let a = a_seq(n - 1);
            a + 1.5 + 1.0 / (2.0 * a)
        }
        _ => a_seq(n - 1),
    }
}

/// A diffusion coefficient drawn by one step, with the rounded value the
/// argument carries forward and the intervals it touches.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientCheck {
    pub name: String,
    /// Odd induction index for inductive-step coefficients.
    pub step: Option<usize>,
    pub value: f64,
    pub rounded: f64,
    pub intervals: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BudgetEntry {
    pub interval: usize,
    pub actual: f64,
    pub rounded: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InductionLedger {
    pub n_max: usize,
    pub m: f64,
    pub m_min: f64,
    pub rho_star: f64,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    /// C₀ must dominate 14s/(222s − 198u₀) at u₀ = (1 + α₀)s.
    pub c0_required: f64,
    pub coefficients: Vec<CoefficientCheck>,
    pub budget: Vec<BudgetEntry>,
    pub pass: bool,
}

impl InductionLedger {
    pub fn max_budget(&self) -> f64 {
        self.budget.iter().map(|b| b.actual.max(b.rounded)).fold(0.0, f64::max)
    }
}

fn check(name: &str, step: Option<usize>, value: f64, rounded: f64, intervals: Vec<usize>) -> CoefficientCheck {
    CoefficientCheck { name: name.into(), step, value, rounded, intervals, pass: value <= rounded * (1.0 + 1e-12) }
}

/// Materialize the sequences and verify every coefficient bound for odd
/// i ≤ `n_max`, at the ceiling A = 1/2 constants.
pub fn induction_ledger(n_max: usize, m: f64) -> Result<InductionLedger> {
    induction_ledger_with(n_max, m, &LambdaBar::default(), 0.0601)
}

pub fn induction_ledger_with(n_max: usize, m: f64, lb: &LambdaBar, alpha0: f64) -> Result<InductionLedger> {
    if n_max < 3 {
        return Err(Error::InvalidParams(format!("n_max must be at least 3, got {n_max}")));
    }
    if m < M_MIN {
        return Err(Error::InvalidParams(format!("shift gain M = {m} below 4/3")));
    }
    let rho = lb.rho;
    let top = n_max + 2;
    let a: Vec<f64> = (0..=top).map(a_seq).collect();
    let c: Vec<f64> = (0..=top).map(c_seq).collect();
    let mut coefficients = vec![
        check("tail_transfer", None, 20.0 * C0 * TAIL_L2, 0.026, (1..=top).collect()),
        check("right_poincare", None, 7.0 / 24.0 / lb.l0, 0.83, vec![0]),
        check("first_transfer", None, 0.178 * C1, 0.06, vec![0, 1]),
        check("first_poincare", None, a_seq(1) / lb.l1, 0.01, vec![1]),
    ];
    for i in (1..=n_max).step_by(2) {
        let (i1, i2) = (i + 1, i + 2);
        let r1 = rho.powi(-(i1 as i32));
        let r2 = rho.powi(-(i2 as i32));
        coefficients.push(check("even_transfer", Some(i), 0.81 * r1 * c[i1], 0.63, vec![i, i1]));
        coefficients.push(check("odd_transfer", Some(i), 0.82 * r2 * c[i2], 0.01, vec![i1, i2]));
        coefficients.push(check("even_poincare", Some(i), 0.5 * (0.5 + a[i1]) / lb.even * r1, 0.01, vec![i1]));
        coefficients.push(check("odd_poincare", Some(i), 0.5 * a[i2] * lb.odd_divisor * r2, 0.01, vec![i2]));
    }
    let mut budget: Vec<BudgetEntry> = (0..=top).map(|j| BudgetEntry { interval: j, actual: 0.0, rounded: 0.0 }).collect();
    for co in &coefficients {
        for &j in &co.intervals {
            budget[j].actual += co.value;
            budget[j].rounded += co.rounded;
        }
    }
    let c0_required = 14.0 / (222.0 - 198.0 * (1.0 + alpha0));
    let pass = coefficients.iter().all(|c| c.pass)
        && budget.iter().all(|b| b.actual < BUDGET_CAP && b.rounded < BUDGET_CAP)
        && C0 >= c0_required;
    Ok(InductionLedger { n_max, m, m_min: M_MIN, rho_star: rho, a, c, c0_required, coefficients, budget, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences() {
        assert_eq!(a_seq(1), 1.0 / 30.0);
        assert_eq!(a_seq(2), 1.0 / 60.0);
        assert_eq!(c_seq(0), 1.3);
        assert_eq!(c_seq(1), 1.0 / 3.0);
        assert!((c_seq(2) - (1.0 / 30.0 + 1.5 + 15.0)).abs() < 1e-14);
        assert_eq!(c_seq(3), a_seq(2));
        assert_eq!(M_MIN, 4.0 / 3.0);
        for i in (1..40).step_by(2) {
            assert!(c_seq(i + 3) <= 4.0 * c_seq(i + 1));
        }
    }

    #[test]
    fn ledger_passes_through_twenty_one() {
        let l = induction_ledger(21, 4.0 / 3.0).unwrap();
        assert!(l.pass, "{:#?}", l.coefficients.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert!((l.budget[0].rounded - 0.89).abs() < 1e-12);
        assert!(l.max_budget() < 0.9);
        let first = l.coefficients.iter().find(|c| c.name == "even_transfer").unwrap();
        assert!(first.value < 0.63 && first.value > 0.6);
        assert!((l.c0_required - 1.157).abs() < 1e-3);
    }

    #[test]
    fn ledger_rejects_small_gain_and_depth() {
        assert!(induction_ledger(21, 1.3).is_err());
        assert!(induction_ledger(1, 2.0).is_err());
    }

    #[test]
    fn larger_first_constant_breaks_budget() {
        let lb = LambdaBar { l0: 0.3, ..LambdaBar::default() };
        let l = induction_ledger_with(5, 2.0, &lb, 0.0601).unwrap();
        assert!(!l.pass);
    }
}
