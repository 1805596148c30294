//! Empirical q-Gevrey order of computed solutions.
//!
//! A series `Σ a_m t^m` has q-Gevrey order `s` when
//! `|a_m| ≤ C·A^m·|q|^{s·m²/2}`. Branch series are re-indexed on the integer
//! grid `m = e / step` of their exponent lattice, so `t = x^{step}`. Two
//! estimates are produced from `ln|a_m|` at a numeric `q`:
//!
//! * the pointwise `s_m = 2·ln|a_m| / (m²·ln|q|)` at the top of the window;
//! * the least-squares slope of `ln|a_m|` against `m²·ln|q|/2` over the
//!   window, reported as `s_emp`.
//!
//! CSV output has the columns `m,log_abs_coeff,pointwise_s_m`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::field::rational::Rational;
use crate::field::Coefficient;
use crate::solver::{BranchStatus, PivotData, SolutionBranch};

/// Fewest nonzero coefficients accepted in a fit window.
pub const MIN_COEFFICIENTS: usize = 20;

/// Allowed excess of `s_emp` over the bound.
pub const DOMINANCE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GevreyError {
    #[error("|q| = 1: the q-Gevrey order is undefined")]
    QModulusOne,
    #[error("only {found} nonzero coefficients in the window, need {needed}")]
    InsufficientCoefficients { found: usize, needed: usize },
    #[error("invalid window {lo}:{hi}")]
    InvalidWindow { lo: u64, hi: u64 },
}

/// Estimates from coefficient growth alone.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalOrder {
    pub s_emp: f64,
    /// `s_m` at the largest `m` in the window.
    pub s_pointwise: f64,
    pub fit_window: (u64, u64),
    /// `(m, ln|a_m|)` for the nonzero coefficients in the window.
    pub per_m: Vec<(u64, f64)>,
}

impl EmpiricalOrder {
    pub fn to_csv(&self, ln_q: f64) -> String {
        let mut out = String::from("m,log_abs_coeff,pointwise_s_m\n");
        for &(m, l) in &self.per_m {
            out.push_str(&format!("{m},{l},{}\n", pointwise(m, l, ln_q)));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GevreyReport {
    pub s_emp: f64,
    pub s_pointwise: f64,
    pub fit_window: (u64, u64),
    pub per_m: Vec<(u64, f64)>,
    pub s_bound: Rational,
    pub dominated: bool,
}

impl GevreyReport {
    pub fn new(emp: EmpiricalOrder, s_bound: Rational) -> Self {
        let bound = crate::field::rational::to_f64(&s_bound);
        Self {
            dominated: emp.s_emp <= bound + DOMINANCE_TOLERANCE,
            s_emp: emp.s_emp,
            s_pointwise: emp.s_pointwise,
            fit_window: emp.fit_window,
            per_m: emp.per_m,
            s_bound,
        }
    }
}

fn pointwise(m: u64, log_abs: f64, ln_q: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    2.0 * log_abs / (m * m * ln_q)
}

fn ln_modulus(q: Complex64) -> Result<f64, GevreyError> {
    let l = q.norm().ln();
    if !l.is_finite() || l.abs() < 1e-12 {
        return Err(GevreyError::QModulusOne);
    }
    Ok(l)
}

/// Fits `(m, ln|a_m|)` samples. Entries outside `window` are ignored.
pub fn fit_log_coefficients(
    samples: &[(u64, f64)],
    q: Complex64,
    window: (u64, u64),
) -> Result<EmpiricalOrder, GevreyError> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(GevreyError::InvalidWindow { lo, hi });
    }
    let ln_q = ln_modulus(q)?;
    let per_m: Vec<(u64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(m, l)| (lo..=hi).contains(&m) && l.is_finite())
        .collect();
    if per_m.len() < MIN_COEFFICIENTS {
        return Err(GevreyError::InsufficientCoefficients {
            found: per_m.len(),
            needed: MIN_COEFFICIENTS,
        });
    }
    let xs: Vec<f64> = per_m
        .iter()
        .map(|&(m, _)| (m as f64).powi(2) * ln_q / 2.0)
        .collect();
    let n = per_m.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = per_m.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, &(_, y)) in xs.iter().zip(&per_m) {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    let s_emp = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let &(m_top, l_top) = per_m.last().expect("nonempty");
    Ok(EmpiricalOrder {
        s_emp,
        s_pointwise: pointwise(m_top, l_top, ln_q),
        fit_window: (per_m[0].0, m_top),
        per_m,
    })
}

/// Lattice step used to re-index a branch.
pub fn grid_step<C: Coefficient>(branch: &SolutionBranch<C>) -> Rational {
    branch.exponent_grid().map_or_else(
        || Rational::new(BigInt::one(), BigInt::from(branch.ramification.max(1))),
        |g| g.step,
    )
}

/// `(m, ln|a_m|)` for every nonzero coefficient, with `m = e / step`.
pub fn log_coefficients<C: Coefficient>(
    branch: &SolutionBranch<C>,
    q: Complex64,
) -> Vec<(u64, f64)> {
    let step = grid_step(branch);
    branch
        .series
        .terms()
        .iter()
        .filter_map(|(e, c)| {
            let m = e / &step;
            if !m.is_integer() || m.is_negative() {
                return None;
            }
            let m = u64::try_from(m.to_integer()).ok()?;
            let l = c.log_abs_at(q).ok()?;
            l.is_finite().then_some((m, l))
        })
        .collect()
}

/// Empirical order of a branch. Exact finite solutions have order 0.
pub fn empirical_order<C: Coefficient>(
    branch: &SolutionBranch<C>,
    q: Complex64,
    window: (u64, u64),
) -> Result<EmpiricalOrder, GevreyError> {
    ln_modulus(q)?;
    if window.0 > window.1 {
        return Err(GevreyError::InvalidWindow {
            lo: window.0,
            hi: window.1,
        });
    }
    let samples = log_coefficients(branch, q);
    if branch.status == BranchStatus::ExactZero {
        let per_m: Vec<(u64, f64)> = samples
            .into_iter()
            .filter(|(m, _)| (window.0..=window.1).contains(m))
            .collect();
        let hi = per_m.last().map_or(window.0, |p| p.0);
        return Ok(EmpiricalOrder {
            s_emp: 0.0,
            s_pointwise: 0.0,
            fit_window: (per_m.first().map_or(window.0, |p| p.0), hi),
            per_m,
        });
    }
    fit_log_coefficients(&samples, q, window)
}

/// Upper bound for the q-Gevrey order of solutions of an equation of order
/// `n`, normalized as `|q|^{s·m²/2}` on the branch grid.
///
/// A post-pivot coefficient is fixed by `D(μ)·a = b`, where `b` collects
/// earlier coefficients shifted by at most `σⁿ`, each raising `ln|a|` by at
/// most `n·m·ln|q|` per unit step of `x`. Summing gives `n·m²/2`.
pub fn theoretical_bound<C>(n: usize, _pivot: Option<&PivotData<C>>) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Empirical order plus the bound for the equation's order `n`.
pub fn report<C: Coefficient>(
    branch: &SolutionBranch<C>,
    n: usize,
    q: Complex64,
    window: (u64, u64),
) -> Result<GevreyReport, GevreyError> {
    let emp = empirical_order(branch, q, window)?;
    Ok(GevreyReport::new(
        emp,
        theoretical_bound(n, branch.pivot.as_ref()),
    ))
}
