//! The Newton–Puiseux polygon process for q-difference equations.
//!
//! A branch starts from `P` and the zero series. While the `y`-free part of
//! the current polynomial is nonzero, every admissible co-slope `μ` of its
//! Newton polygon and every nonzero root `c` of `Φ_μ` produce a child with
//! `P ← P(x, c·x^μ + y)` and `c·x^μ` appended to the series. Once the
//! polygon has a height-1 vertex below every point of larger height (the
//! pivot), the remaining coefficients solve first-degree equations and are
//! produced by [`extend_linear_tail`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::characteristic::{approx_roots, exact_split, CharPolynomial};
use crate::field::rational::{denominator_lcm, Rational};
use crate::field::{Approx, Coefficient, KScalar};
use crate::polygon::NewtonPolygon;
use crate::qdiff::{substitute_series_upto, PuiseuxSeries, QDiffPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the equation is the zero polynomial")]
    ZeroPolynomial,
    #[error("the equation does not involve y")]
    NoUnknown,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Solution terms are computed up to and including this exponent.
    pub trunc: Rational,
    pub max_branches: usize,
    pub max_steps_before_pivot: usize,
    /// Polynomial terms above this `x`-exponent are discarded while
    /// expanding; defaults to `trunc + (max α − min α)`.
    pub working_trunc: Option<Rational>,
    /// When false, every coefficient is obtained by a full polygon step.
    pub use_pivot: bool,
    /// Used to report numeric values of roots that have no exact form.
    pub q_value: Option<Complex64>,
}

impl SolverConfig {
    pub fn new(trunc: Rational) -> Self {
        Self {
            trunc,
            max_branches: 64,
            max_steps_before_pivot: 64,
            working_trunc: None,
            use_pivot: true,
            q_value: None,
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        if !self.trunc.is_positive() {
            return Err(SolveError::InvalidConfig("trunc must be positive".into()));
        }
        if self.max_branches == 0 {
            return Err(SolveError::InvalidConfig(
                "max_branches must be at least 1".into(),
            ));
        }
        if let Some(w) = &self.working_trunc {
            if *w < self.trunc {
                return Err(SolveError::InvalidConfig(
                    "working_trunc must not be below trunc".into(),
                ));
            }
        }
        Ok(())
    }
}

/// `D(μ) = Σ a_w·q^{μ·w}`, the coefficient picked up by the pivot terms when
/// `y ↦ c·x^μ + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDivisor<C> {
    by_weight: BTreeMap<u64, C>,
}

impl<C: Coefficient> LinearDivisor<C> {
    pub fn from_weights(by_weight: BTreeMap<u64, C>) -> Self {
        Self { by_weight }
    }

    pub fn terms(&self) -> &BTreeMap<u64, C> {
        &self.by_weight
    }

    pub fn eval(&self, mu: &Rational, ctx: &C::Context) -> C {
        self.by_weight.iter().fold(C::zero(), |acc, (&w, a)| {
            let e = mu * Rational::from_integer(w.into());
            acc.add(&a.mul(&C::qpow(ctx, &e)))
        })
    }
}

impl<C: Coefficient> fmt::Display for LinearDivisor<C> {
    /// E.g. `q^mu - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self
            .by_weight
            .iter()
            .rev()
            .map(|(&w, a)| {
                let var = match w {
                    0 => vec![],
                    1 => vec!["q^mu".to_string()],
                    _ => vec![format!("q^({w}*mu)")],
                };
                crate::qdiff::fmt_product(a, &var)
            })
            .collect();
        f.write_str(&crate::qdiff::join_signed_terms(parts))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotData<C> {
    /// Abscissa of the height-1 vertex.
    pub alpha: Rational,
    pub divisor: LinearDivisor<C>,
    /// Exponents from here on lie in `(1/d)·Z`.
    pub ramification: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceRecord<C> {
    pub mu: Rational,
    pub root: C,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchStatus {
    /// The series solves the equation exactly.
    ExactZero,
    /// Correct up to the requested truncation.
    Truncated,
    /// Some coefficients were free; they were set to zero.
    FreeParameter(u32),
    /// A coefficient equation `D(μ)·c = b` had `D(μ) = 0 ≠ b`.
    ResonanceObstructed,
    /// A characteristic root has no exact representation.
    RootUnrepresentable,
}

impl fmt::Display for BranchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchStatus::ExactZero => f.write_str("exact-zero"),
            BranchStatus::Truncated => f.write_str("truncated"),
            BranchStatus::FreeParameter(k) => write!(f, "free-parameter({k})"),
            BranchStatus::ResonanceObstructed => f.write_str("resonance-obstructed"),
            BranchStatus::RootUnrepresentable => f.write_str("root-unrepresentable"),
        }
    }
}

/// Valuation of `P(series)` for the finite series actually emitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidualValuation {
    Infinite,
    Finite(Rational),
    /// No term up to this exponent.
    Above(Rational),
}

impl ResidualValuation {
    pub fn exceeds(&self, t: &Rational) -> bool {
        match self {
            ResidualValuation::Infinite => true,
            ResidualValuation::Finite(v) => v > t,
            ResidualValuation::Above(v) => v >= t,
        }
    }
}

impl fmt::Display for ResidualValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidualValuation::Infinite => f.write_str("inf"),
            ResidualValuation::Finite(v) => write!(f, "{v}"),
            ResidualValuation::Above(v) => write!(f, ">{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentGrid {
    pub head: Vec<Rational>,
    pub start: Rational,
    pub step: Rational,
    /// Every exponent after the head lies in `start + step·Z>0`.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBranch<C> {
    pub series: PuiseuxSeries<C>,
    pub status: BranchStatus,
    pub pivot: Option<PivotData<C>>,
    pub choice_log: Vec<ChoiceRecord<C>>,
    /// Number of leading exponents chosen by polygon steps.
    pub head_len: usize,
    /// `d` such that every exponent of the series lies in `(1/d)·Z`.
    pub ramification: u64,
    pub residual_valuation: ResidualValuation,
    pub notes: Vec<String>,
}

impl<C: Coefficient> SolutionBranch<C> {
    pub fn exponent_grid(&self) -> Option<ExponentGrid> {
        exponent_grid(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome<C> {
    pub branches: Vec<SolutionBranch<C>>,
    pub diagnostics: Vec<String>,
    pub budget_exceeded: bool,
}

/// Inductive state of one branch of the process.
#[derive(Debug, Clone)]
pub struct BranchState<C> {
    /// `P(x, partial + y)`, truncated in `x`.
    pub poly: QDiffPolynomial<C>,
    pub partial: PuiseuxSeries<C>,
    pub mu_last: Rational,
    pub choices: Vec<ChoiceRecord<C>>,
    pub pivot: Option<PivotData<C>>,
    /// Whether any term was discarded by the working truncation.
    pub lossy: bool,
    /// lcm of the `x`-exponent denominators of the original equation.
    pub base_ramification: u64,
}

impl<C: Coefficient> BranchState<C> {
    pub fn new(poly: QDiffPolynomial<C>) -> Self {
        let base = denominator_lcm(poly.terms().map(|(k, _)| &k.xexp));
        Self {
            poly,
            partial: PuiseuxSeries::zero(None),
            mu_last: Rational::zero(),
            choices: Vec::new(),
            pivot: None,
            lossy: false,
            base_ramification: to_u64(&base),
        }
    }

    /// `lcm` of the base ramification and the series exponent denominators.
    pub fn ramification(&self) -> u64 {
        let d = denominator_lcm(self.partial.exponents());
        to_u64(&d.lcm(&BigInt::from(self.base_ramification)))
    }

    fn step(&self, mu: &Rational, c: &C, ctx: &C::Context, limit: Option<&Rational>) -> Self {
        let (poly, dropped) = self.poly.shift_substitute_counted(c, mu, ctx, limit);
        let mut partial = self.partial.clone();
        partial.push(mu.clone(), c.clone());
        Self {
            poly,
            partial,
            mu_last: mu.clone(),
            choices: self.choices.clone(),
            pivot: self.pivot.clone(),
            lossy: self.lossy || dropped > 0,
            base_ramification: self.base_ramification,
        }
    }
}

fn to_u64(n: &BigInt) -> u64 {
    u64::try_from(n).unwrap_or(u64::MAX)
}

/// Roots of a characteristic polynomial usable as series coefficients.
pub struct RootChoices<C> {
    pub usable: Vec<(C, u32)>,
    /// Descriptions of roots that cannot be continued in this field.
    pub unrepresentable: Vec<String>,
}

/// Coefficient fields the solver can branch over.
pub trait BranchField: Coefficient {
    fn branch_roots(phi: &CharPolynomial<Self>, cfg: &SolverConfig) -> RootChoices<Self>;
}

impl BranchField for KScalar {
    fn branch_roots(phi: &CharPolynomial<Self>, cfg: &SolverConfig) -> RootChoices<Self> {
        let split = exact_split(phi);
        let mut unrepresentable = Vec::new();
        if split.unresolved_degree() > 0 {
            let factor = CharPolynomial::from_coeffs(
                split
                    .unresolved
                    .iter()
                    .enumerate()
                    .map(|(h, c)| (h as u32, c.clone()))
                    .collect(),
                phi.mu().clone(),
            );
            let mut text = format!(
                "mu = {}: {} root(s) of {} have no exact form",
                phi.mu(),
                split.unresolved_degree(),
                factor
            );
            if let Some(q) = cfg.q_value {
                let numeric: Option<Vec<Complex64>> = split
                    .unresolved
                    .iter()
                    .map(|c| c.eval_at_q(q).ok())
                    .collect();
                if let Some(dense) = numeric {
                    let vals: Vec<String> = crate::roots::polynomial_roots(&dense)
                        .into_iter()
                        .map(|(r, m)| format!("{}{:+}i (mult {m})", r.re, r.im))
                        .collect();
                    text.push_str(&format!("; at q = {q}: {}", vals.join(", ")));
                }
            }
            unrepresentable.push(text);
        }
        RootChoices {
            usable: split.roots,
            unrepresentable,
        }
    }
}

impl BranchField for Approx {
    fn branch_roots(phi: &CharPolynomial<Self>, _cfg: &SolverConfig) -> RootChoices<Self> {
        RootChoices {
            usable: approx_roots(phi),
            unrepresentable: Vec::new(),
        }
    }
}

/// Returns pivot data when the current polygon has a height-1 vertex
/// `(α_p, 1)` such that every point of height `h ≥ 2` satisfies
/// `α + h·μ ≥ α_p + μ` at `μ = mu_last` (hence strictly for larger `μ`).
pub fn detect_pivot<C: Coefficient>(state: &BranchState<C>) -> Option<PivotData<C>> {
    let alpha_p = state
        .poly
        .terms()
        .filter(|(k, _)| k.height() == 1)
        .map(|(k, _)| k.xexp.clone())
        .min()?;
    let blocked = state.poly.terms().any(|(k, _)| {
        let h = k.height();
        h >= 2
            && (&k.xexp - &alpha_p) + &state.mu_last * Rational::from_integer((h - 1).into())
                < Rational::zero()
    });
    if blocked {
        return None;
    }
    let mut by_weight: BTreeMap<u64, C> = BTreeMap::new();
    for (k, a) in state.poly.terms() {
        if k.height() == 1 && k.xexp == alpha_p {
            let slot = by_weight.entry(k.mi.weight()).or_insert_with(C::zero);
            *slot = slot.add(a);
        }
    }
    by_weight.retain(|_, c| !c.is_zero());
    Some(PivotData {
        alpha: alpha_p,
        divisor: LinearDivisor::from_weights(by_weight),
        ramification: state.ramification(),
    })
}

/// How the post-pivot recurrence stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailEnd {
    /// The `y`-free part vanished: the series is exact.
    Exact,
    /// The next exponent exceeds the requested bound.
    Truncated,
    Resonance,
    /// The next exponent would not exceed the previous one.
    Inconsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailOutcome {
    pub end: TailEnd,
    /// Lattice exponents where `D(μ)` and the right-hand side both vanish.
    pub free_parameters: u32,
}

/// Extends `state.partial` past the pivot: at the smallest exponent
/// `μ* = α₀ − α_p` realized by the `y`-free part, the next coefficient is
/// `−b/D(μ*)` with `b` the coefficient of `x^{α₀}`. Stops at exponents above
/// `upto`. Lattice exponents `e` skipped over with `D(e) = 0` are counted as
/// free parameters (their coefficient is left at zero).
///
/// # Panics
/// If `state.pivot` is `None`.
pub fn extend_linear_tail<C: Coefficient>(
    state: &mut BranchState<C>,
    upto: &Rational,
    ctx: &C::Context,
    limit: Option<&Rational>,
) -> TailOutcome {
    let pivot = state
        .pivot
        .clone()
        .expect("extend_linear_tail requires a pivot");
    let step = Rational::new(BigInt::one(), BigInt::from(pivot.ramification));
    let mut free = 0u32;
    let count_free = |from: &Rational, below: &Rational, inclusive: bool| -> u32 {
        let mut e = from + &step;
        let mut n = 0;
        while (inclusive && e <= *below) || (!inclusive && e < *below) {
            if pivot.divisor.eval(&e, ctx).is_zero() {
                n += 1;
            }
            e += &step;
        }
        n
    };
    loop {
        let lowest = state
            .poly
            .constant_part()
            .map(|(k, c)| (k.xexp.clone(), c.clone()))
            .next();
        let Some((alpha0, b)) = lowest else {
            free += count_free(&state.mu_last, upto, true);
            return TailOutcome {
                end: TailEnd::Exact,
                free_parameters: free,
            };
        };
        let mu = &alpha0 - &pivot.alpha;
        if mu <= state.mu_last {
            return TailOutcome {
                end: TailEnd::Inconsistent,
                free_parameters: free,
            };
        }
        if mu > *upto {
            free += count_free(&state.mu_last, upto, true);
            return TailOutcome {
                end: TailEnd::Truncated,
                free_parameters: free,
            };
        }
        free += count_free(&state.mu_last, &mu, false);
        let d = pivot.divisor.eval(&mu, ctx);
        let Ok(c) = b.neg().div(&d) else {
            return TailOutcome {
                end: TailEnd::Resonance,
                free_parameters: free,
            };
        };
        let mut next = state.step(&mu, &c, ctx, limit);
        next.choices = std::mem::take(&mut state.choices);
        *state = next;
    }
}

/// Head exponents, tail start and lattice step of a branch, with the check
/// that every post-head exponent lies on the lattice. `None` unless the
/// branch reached a pivot or is an exact solution.
pub fn exponent_grid<C: Coefficient>(branch: &SolutionBranch<C>) -> Option<ExponentGrid> {
    if branch.pivot.is_none() && branch.status != BranchStatus::ExactZero {
        return None;
    }
    let exps: Vec<Rational> = branch.series.exponents().cloned().collect();
    let head: Vec<Rational> = exps[..branch.head_len.min(exps.len())].to_vec();
    let d = branch
        .pivot
        .as_ref()
        .map_or(branch.ramification, |p| p.ramification);
    let step = Rational::new(BigInt::one(), BigInt::from(d));
    let start = head.last().cloned().unwrap_or_else(Rational::zero);
    let verified = exps[head.len()..].iter().all(|e| {
        let k = (e - &start) / &step;
        k.is_integer() && k.is_positive()
    });
    Some(ExponentGrid {
        head,
        start,
        step,
        verified,
    })
}

/// Runs the polygon process on `p` over the coefficient field `C`.
pub fn solve<C: BranchField>(
    p: &QDiffPolynomial<C>,
    cfg: &SolverConfig,
    ctx: &C::Context,
) -> Result<SolveOutcome<C>, SolveError> {
    cfg.validate()?;
    if p.is_zero() {
        return Err(SolveError::ZeroPolynomial);
    }
    if !p.has_y() {
        return Err(SolveError::NoUnknown);
    }
    let working = cfg
        .working_trunc
        .clone()
        .unwrap_or_else(|| &cfg.trunc + p.alpha_span());
    let (start, dropped) = p.truncate_x_counted(Some(&working));
    let mut root = BranchState::new(start);
    root.lossy = dropped > 0;
    root.base_ramification = BranchState::new(p.clone()).base_ramification;

    let mut run = Run {
        original: p,
        cfg,
        ctx,
        working,
        out: SolveOutcome {
            branches: Vec::new(),
            diagnostics: Vec::new(),
            budget_exceeded: false,
        },
    };
    if let Ok(np) = NewtonPolygon::build(&root.poly) {
        if np.has_nonpositive_coslopes() {
            run.out.diagnostics.push(
                "the polygon has edges with co-slope <= 0; solutions with nonpositive leading exponent are not supported".into(),
            );
        }
    }
    run.explore(root);
    Ok(run.out)
}

/// Exact-mode convenience wrapper.
pub fn solve_exact(
    p: &QDiffPolynomial<KScalar>,
    cfg: &SolverConfig,
) -> Result<SolveOutcome<KScalar>, SolveError> {
    solve(p, cfg, &())
}

/// Numeric mode: `q` is fixed to `q_value` and coefficients are complex.
pub fn solve_numeric(
    p: &QDiffPolynomial<KScalar>,
    cfg: &SolverConfig,
    q_value: Complex64,
) -> Result<SolveOutcome<Approx>, SolveError> {
    let np = p
        .to_numeric(q_value)
        .map_err(|e| SolveError::InvalidConfig(format!("cannot specialize q: {e}")))?;
    solve(&np, cfg, &q_value)
}

struct Run<'a, C: Coefficient> {
    original: &'a QDiffPolynomial<C>,
    cfg: &'a SolverConfig,
    ctx: &'a C::Context,
    working: Rational,
    out: SolveOutcome<C>,
}

impl<C: BranchField> Run<'_, C> {
    fn full(&mut self) -> bool {
        if self.out.branches.len() >= self.cfg.max_branches {
            self.out.budget_exceeded = true;
            true
        } else {
            false
        }
    }

    fn explore(&mut self, mut state: BranchState<C>) {
        if self.full() {
            return;
        }
        let exact_now = !state.poly.has_constant_part();
        if exact_now {
            let mut status = BranchStatus::ExactZero;
            if self.cfg.use_pivot && !state.choices.is_empty() {
                if let Some(pivot) = detect_pivot(&state) {
                    state.pivot = Some(pivot);
                    let outcome = extend_linear_tail(
                        &mut state,
                        &self.cfg.trunc,
                        self.ctx,
                        Some(&self.working),
                    );
                    if outcome.free_parameters > 0 {
                        status = BranchStatus::FreeParameter(outcome.free_parameters);
                    }
                    self.emit(&state, status, Vec::new());
                    return;
                }
            }
            self.emit(&state, status, Vec::new());
        } else if self.cfg.use_pivot && !state.choices.is_empty() {
            if let Some(pivot) = detect_pivot(&state) {
                state.pivot = Some(pivot);
                let outcome =
                    extend_linear_tail(&mut state, &self.cfg.trunc, self.ctx, Some(&self.working));
                let status = match (outcome.end, outcome.free_parameters) {
                    (TailEnd::Inconsistent, _) => {
                        self.out.diagnostics.push(format!(
                            "branch after {} discarded: pivot recurrence did not advance",
                            describe_head(&state)
                        ));
                        return;
                    }
                    (TailEnd::Resonance, _) => BranchStatus::ResonanceObstructed,
                    (_, k) if k > 0 => BranchStatus::FreeParameter(k),
                    (TailEnd::Exact, _) => BranchStatus::ExactZero,
                    (TailEnd::Truncated, _) => BranchStatus::Truncated,
                };
                self.emit(&state, status, Vec::new());
                return;
            }
        }
        if state.choices.len() >= self.cfg.max_steps_before_pivot {
            self.out.diagnostics.push(format!(
                "branch after {} aborted: no pivot within {} steps",
                describe_head(&state),
                self.cfg.max_steps_before_pivot
            ));
            return;
        }
        let Ok(polygon) = NewtonPolygon::build(&state.poly) else {
            return;
        };
        let candidates = polygon.admissible_coslopes(&state.mu_last);
        if candidates.is_empty() && !exact_now {
            self.out.diagnostics.push(format!(
                "branch after {} discarded: no admissible co-slope",
                describe_head(&state)
            ));
            return;
        }
        for cand in candidates {
            if self.full() {
                return;
            }
            if cand.mu > self.cfg.trunc {
                if !exact_now {
                    self.emit(&state, BranchStatus::Truncated, Vec::new());
                }
                break;
            }
            let phi = CharPolynomial::build(&state.poly, &cand.mu, self.ctx);
            let choices = C::branch_roots(&phi, self.cfg);
            for (c, mult) in choices.usable {
                if self.full() {
                    return;
                }
                let mut child = state.step(&cand.mu, &c, self.ctx, Some(&self.working));
                child.choices.push(ChoiceRecord {
                    mu: cand.mu.clone(),
                    root: c,
                    multiplicity: mult,
                });
                self.explore(child);
            }
            if !choices.unrepresentable.is_empty() && !self.full() {
                self.emit(
                    &state,
                    BranchStatus::RootUnrepresentable,
                    choices.unrepresentable,
                );
            }
        }
    }

    fn emit(&mut self, state: &BranchState<C>, mut status: BranchStatus, notes: Vec<String>) {
        if self.full() {
            return;
        }
        let exact_series = state.partial.with_trunc(None);
        let exact_claim = matches!(status, BranchStatus::ExactZero)
            || matches!(status, BranchStatus::FreeParameter(_)) && !state.poly.has_constant_part();
        let residual_valuation = if exact_claim && !state.lossy {
            ResidualValuation::Infinite
        } else {
            let limit = self.working.clone().max(self.cfg.trunc.clone()) + Rational::one();
            let cap = if exact_claim { None } else { Some(&limit) };
            let r = substitute_series_upto(self.original, &exact_series, self.ctx, cap);
            match (r.valuation(), cap) {
                (None, None) => ResidualValuation::Infinite,
                (None, Some(l)) => ResidualValuation::Above(l.clone()),
                (Some(v), _) => ResidualValuation::Finite(v.clone()),
            }
        };
        if status == BranchStatus::ExactZero && residual_valuation != ResidualValuation::Infinite {
            status = BranchStatus::Truncated;
        }
        let series = match status {
            BranchStatus::ExactZero => exact_series,
            _ if exact_claim && residual_valuation == ResidualValuation::Infinite => exact_series,
            _ => state.partial.with_trunc(Some(self.cfg.trunc.clone())),
        };
        let head_len = state.choices.len();
        self.out.branches.push(SolutionBranch {
            series,
            status,
            pivot: state.pivot.clone(),
            choice_log: state.choices.clone(),
            head_len,
            ramification: state.ramification(),
            residual_valuation,
            notes,
        });
    }
}

fn describe_head<C: Coefficient>(state: &BranchState<C>) -> String {
    if state.choices.is_empty() {
        return "the start".into();
    }
    let mus: Vec<String> = state.choices.iter().map(|c| c.mu.to_string()).collect();
    format!("exponents [{}]", mus.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational::{int, rat};

    type P = QDiffPolynomial<KScalar>;

    fn y(j: usize) -> P {
        P::shifted_y(j)
    }

    fn x(e: i64) -> P {
        P::x_monomial(KScalar::one(), int(e))
    }

    fn q() -> KScalar {
        KScalar::q()
    }

    fn solve_t(p: &P, t: i64) -> SolveOutcome<KScalar> {
        solve_exact(p, &SolverConfig::new(int(t))).unwrap()
    }

    #[test]
    fn first_order_linear() {
        let p = y(1).sub(&y(0)).sub(&x(1));
        let out = solve_t(&p, 10);
        assert_eq!(out.branches.len(), 1);
        let b = &out.branches[0];
        assert_eq!(b.status, BranchStatus::ExactZero);
        assert_eq!(b.series.to_string(), "(1/(q - 1))*x");
        assert_eq!(b.residual_valuation, ResidualValuation::Infinite);
        let g = b.exponent_grid().unwrap();
        assert_eq!(g.head, vec![int(1)]);
        assert_eq!(g.step, int(1));
        assert!(g.verified);
    }

    #[test]
    fn ramified_pair() {
        let p = y(0).mul(&y(1)).sub(&x(1));
        let out = solve_t(&p, 5);
        let got: Vec<String> = out.branches.iter().map(|b| b.series.to_string()).collect();
        assert_eq!(got, vec!["-q^(-1/4)*x^(1/2)", "q^(-1/4)*x^(1/2)"]);
        for b in &out.branches {
            assert_eq!(b.status, BranchStatus::ExactZero);
            let g = b.exponent_grid().unwrap();
            assert_eq!(g.head, vec![rat(1, 2)]);
            assert_eq!(g.step, rat(1, 2));
        }
    }

    #[test]
    fn linear_recurrence_branch() {
        let p = y(0).sub(&x(1).mul(&y(1))).sub(&x(1));
        let out = solve_t(&p, 10);
        assert_eq!(out.branches.len(), 1);
        let b = &out.branches[0];
        assert_eq!(b.status, BranchStatus::Truncated);
        assert_eq!(b.series.len(), 10);
        for (m, (e, c)) in (1i64..).zip(b.series.terms()) {
            assert_eq!(*e, int(m));
            assert_eq!(*c, KScalar::qpow(&int(m * (m - 1) / 2)));
        }
        let pivot = b.pivot.as_ref().unwrap();
        assert_eq!(pivot.alpha, int(0));
        assert_eq!(pivot.divisor.to_string(), "1");
        assert_eq!(b.residual_valuation, ResidualValuation::Finite(int(11)));
        let g = b.exponent_grid().unwrap();
        assert_eq!(g.head, vec![int(1)]);
        assert!(g.verified);
    }

    #[test]
    fn pivot_after_first_step() {
        let p = y(1).sub(&y(0)).sub(&x(1));
        let root = BranchState::new(p.clone());
        let c = (&q() - &KScalar::one()).inv().unwrap();
        let st = root.step(&int(1), &c, &(), None);
        let pivot = detect_pivot(&st).unwrap();
        assert_eq!(pivot.alpha, int(0));
        assert_eq!(pivot.divisor.to_string(), "q^mu - 1");

        let p = y(0).sub(&x(1).mul(&y(1))).sub(&x(1));
        let st = BranchState::new(p).step(&int(1), &KScalar::one(), &(), None);
        let pivot = detect_pivot(&st).unwrap();
        assert_eq!(pivot.divisor.to_string(), "1");
    }

    #[test]
    fn no_pivot_below_height_two_vertex() {
        // y^2 + x^2·y + x: at mu_last = 0 the point (0,2) lies left of (2,1)
        let p = y(0).mul(&y(0)).add(&x(2).mul(&y(0))).add(&x(1));
        assert!(detect_pivot(&BranchState::new(p)).is_none());
    }

    #[test]
    fn zero_series_reported_without_constant_part() {
        // y·(σy − x): y = 0 and y = x/q
        let p = y(0).mul(&y(1)).sub(&x(1).mul(&y(0)));
        let out = solve_t(&p, 5);
        let got: Vec<String> = out.branches.iter().map(|b| b.series.to_string()).collect();
        assert_eq!(got, vec!["0", "q^(-1)*x"]);
        assert!(out
            .branches
            .iter()
            .all(|b| b.status == BranchStatus::ExactZero));
    }

    #[test]
    fn free_parameter_is_flagged() {
        // σy − q·y − (q^2 − q)·x^2: D(μ) = q^μ − q vanishes at μ = 1, below the head
        let p = y(1)
            .sub(&y(0).scale(&q()))
            .sub(&x(2).scale(&(&(&q() * &q()) - &q())));
        let out = solve_t(&p, 5);
        assert_eq!(out.branches.len(), 1);
        let b = &out.branches[0];
        assert_eq!(b.series.to_string(), "x^2");
        assert_eq!(b.status, BranchStatus::ExactZero);
    }

    #[test]
    fn resonance_and_free_parameter_in_tail() {
        // σy − q^2·y − x: D(μ) = q^μ − q^2 vanishes at μ = 2 with nothing to solve
        let p = y(1).sub(&y(0).scale(&(&q() * &q()))).sub(&x(1));
        let out = solve_t(&p, 5);
        let b = &out.branches[0];
        assert_eq!(b.status, BranchStatus::FreeParameter(1));
        assert_eq!(b.residual_valuation, ResidualValuation::Infinite);

        // adding −x^2 makes the same equation inconsistent
        let p = p.sub(&x(2));
        let out = solve_t(&p, 5);
        assert_eq!(out.branches[0].status, BranchStatus::ResonanceObstructed);
    }

    #[test]
    fn budget_is_enforced() {
        let p = y(0).mul(&y(1)).sub(&x(1));
        let mut cfg = SolverConfig::new(int(5));
        cfg.max_branches = 1;
        let out = solve_exact(&p, &cfg).unwrap();
        assert_eq!(out.branches.len(), 1);
        assert!(out.budget_exceeded);
    }

    #[test]
    fn rejects_degenerate_input() {
        let cfg = SolverConfig::new(int(3));
        assert_eq!(
            solve_exact(&P::zero(), &cfg),
            Err(SolveError::ZeroPolynomial)
        );
        assert_eq!(solve_exact(&x(1), &cfg), Err(SolveError::NoUnknown));
        let bad = SolverConfig::new(int(0));
        assert!(matches!(
            solve_exact(&y(0), &bad),
            Err(SolveError::InvalidConfig(_))
        ));
    }

    #[test]
    fn unrepresentable_roots_are_reported() {
        // y^3 − 2x^3: c^3 = 2 has no rational root
        let p = y(0)
            .mul(&y(0))
            .mul(&y(0))
            .sub(&x(3).scale(&KScalar::from_int(2)));
        let mut cfg = SolverConfig::new(int(3));
        cfg.q_value = Some(Complex64::new(2.0, 0.0));
        let out = solve_exact(&p, &cfg).unwrap();
        assert_eq!(out.branches.len(), 1);
        assert_eq!(out.branches[0].status, BranchStatus::RootUnrepresentable);
        assert!(out.branches[0].notes[0].contains("3 root(s)"));
    }

    #[test]
    fn numeric_mode_matches_exact_values() {
        let p = y(0).sub(&x(1).mul(&y(1))).sub(&x(1));
        let qv = Complex64::new(2.0, 0.0);
        let out = solve_numeric(&p, &SolverConfig::new(int(8)), qv).unwrap();
        assert_eq!(out.branches.len(), 1);
        for (m, (_, c)) in (1i32..).zip(out.branches[0].series.terms()) {
            let want = 2f64.powi(m * (m - 1) / 2);
            assert!((c.value.re - want).abs() <= 1e-9 * want);
        }
    }
}
