//! Necessary condition for isospectrality of `D*D` under two sets of local
//! boundary conditions, and exact trace differences on cylinders.
//!
//! On a cylinder `D*D = -∂²_u + A²` mode by mode, with second-order
//! conditions induced at each end: the chirality killed by the first-order
//! condition gets Dirichlet, the other one Neumann (the adjoint condition on
//! `Dφ` reduces to `∂_u` of the surviving component).
//!
//! | end              | `ε` | `S⁺` | `S⁻` |
//! |------------------|-----|------|------|
//! | `u = 0` inward   | `+` | D    | N    |
//! | `u = 0` inward   | `-` | N    | D    |
//! | `u = L` reversed | `+` | N    | D    |
//! | `u = L` reversed | `-` | D    | N    |
//!
//! Every interval trace then factorises as `e^{-tλ²} Θ_{bc₀bc₁}(t)`, and
//! since `Θ_NN - Θ_DN → ½` and `Θ_DN - Θ_DD → ½` as `t → 0`, the trace
//! difference tends to `½(s₁ - s₂)` for the two index sums `s₁, s₂`.

use crate::error::{Error, Result};
use crate::heat1d::{check_time, interval_mode_eigenvalues, interval_theta_tail, IntervalEnd};
use crate::index::{Estimate, TraceSweep};
use crate::spectrum::{BoundaryCondition, ChiralSpectrum, Orientation};
use crate::sum::CompensatedSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct SwapComponent {
    pub spectrum: ChiralSpectrum,
    pub orientation: Orientation,
    pub eps: BoundaryCondition,
    pub eps_prime: BoundaryCondition,
}

impl SwapComponent {
    fn effective_index(&self) -> i64 {
        self.orientation.sign() * self.spectrum.index()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSwap {
    components: Vec<SwapComponent>,
}

impl ConditionSwap {
    pub fn new(components: Vec<SwapComponent>) -> Result<Self> {
        for (i, c) in components.iter().enumerate() {
            if !c.eps.is_local() || !c.eps_prime.is_local() {
                return Err(Error::WrongCondition(format!(
                    "component {i}: isospectral comparison is defined for local conditions only"
                )));
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[SwapComponent] {
        &self.components
    }

    /// `(s₁, s₂) = (Σ_{ε=-, ε'=+} ind, Σ_{ε=+, ε'=-} ind)`, effective indices.
    pub fn index_sums(&self) -> (i64, i64) {
        use BoundaryCondition::{Minus, Plus};
        let mut s = (0, 0);
        for c in &self.components {
            match (c.eps, c.eps_prime) {
                (Minus, Plus) => s.0 += c.effective_index(),
                (Plus, Minus) => s.1 += c.effective_index(),
                _ => {}
            }
        }
        s
    }

    /// `s₁ - s₂`.
    pub fn combination(&self) -> i64 {
        let (s1, s2) = self.index_sums();
        s1 - s2
    }

    /// Limit of the cylinder trace difference as `t → 0`: `½(s₁ - s₂)`.
    pub fn heat_constant(&self) -> f64 {
        0.5 * self.combination() as f64
    }

    pub fn inverted(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| SwapComponent { eps: c.eps_prime, eps_prime: c.eps, ..c.clone() })
            .collect();
        Self { components }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    RuledOut { s1: i64, s2: i64 },
    NotRuledOut,
}

/// Isospectrality requires both index sums to vanish.
pub fn necessary_condition(swap: &ConditionSwap) -> Verdict {
    let (s1, s2) = swap.index_sums();
    if s1 != 0 || s2 != 0 {
        Verdict::RuledOut { s1, s2 }
    } else {
        Verdict::NotRuledOut
    }
}

/// Cylinder `[0, L] × N` with two sets of local conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapProblem {
    pub spectrum: ChiralSpectrum,
    pub length: f64,
    pub eps: [BoundaryCondition; 2],
    pub eps_prime: [BoundaryCondition; 2],
}

impl SwapProblem {
    pub fn new(
        spectrum: ChiralSpectrum,
        length: f64,
        eps: [BoundaryCondition; 2],
        eps_prime: [BoundaryCondition; 2],
    ) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter(format!("cylinder length must be positive, got {length}")));
        }
        let p = Self { spectrum, length, eps, eps_prime };
        p.condition_swap()?;
        Ok(p)
    }

    pub fn condition_swap(&self) -> Result<ConditionSwap> {
        let orient = [Orientation::Inward, Orientation::Reversed];
        ConditionSwap::new(
            (0..2)
                .map(|i| SwapComponent {
                    spectrum: self.spectrum.clone(),
                    orientation: orient[i],
                    eps: self.eps[i],
                    eps_prime: self.eps_prime[i],
                })
                .collect(),
        )
    }

    pub fn inverted(&self) -> Self {
        Self { eps: self.eps_prime, eps_prime: self.eps, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
}

/// Second-order condition induced on one chirality at one end.
pub fn induced_condition(orientation: Orientation, eps: BoundaryCondition, chirality: Chirality) -> Result<IntervalEnd> {
    let sign = eps
        .local_sign()
        .ok_or_else(|| Error::WrongCondition(format!("{eps} is not a local condition")))?;
    let killed = match (orientation, sign) {
        (Orientation::Inward, 1) | (Orientation::Reversed, -1) => Chirality::Plus,
        _ => Chirality::Minus,
    };
    Ok(if killed == chirality { IntervalEnd::Dirichlet } else { IntervalEnd::Neumann })
}

/// Truncated `Θ(t) = Σ_k e^{-tμ_k}` over the first `budget` interval modes,
/// with a bound on the rest.
pub fn interval_theta(length: f64, bc0: IntervalEnd, bc1: IntervalEnd, t: f64, budget: usize) -> Estimate {
    let mut acc = CompensatedSum::new();
    for mu in interval_mode_eigenvalues(length, bc0, bc1, budget) {
        acc.add((-t * mu).exp());
    }
    let next = match (bc0, bc1) {
        (IntervalEnd::Dirichlet, IntervalEnd::Dirichlet) => budget as f64 + 1.0,
        (IntervalEnd::Neumann, IntervalEnd::Neumann) => budget as f64,
        _ => budget as f64 + 0.5,
    };
    Estimate { value: acc.total(), bound: interval_theta_tail(t, length, next) }
}

/// `Tr e^{-t(D*D, Q^ε)} - Tr e^{-t(D*D, Q^{ε'})}` on the cylinder.
pub fn trace_difference(problem: &SwapProblem, t: f64, mode_budget: usize, tol: f64) -> Result<Estimate> {
    check_time(t)?;
    let spec = &problem.spectrum;
    let s = spec.heat_sum(t);
    let spec_tail = spec.truncation_bound(t);
    let orient = [Orientation::Inward, Orientation::Reversed];
    let mut value = CompensatedSum::new();
    let mut bound = 0.0;
    for (chirality, kernel) in [(Chirality::Plus, spec.ker_plus()), (Chirality::Minus, spec.ker_minus())] {
        let ends = |eps: [BoundaryCondition; 2]| -> Result<(IntervalEnd, IntervalEnd)> {
            Ok((
                induced_condition(orient[0], eps[0], chirality)?,
                induced_condition(orient[1], eps[1], chirality)?,
            ))
        };
        let (x0, x1) = ends(problem.eps)?;
        let (y0, y1) = ends(problem.eps_prime)?;
        if (x0, x1) == (y0, y1) {
            continue;
        }
        let tx = interval_theta(problem.length, x0, x1, t, mode_budget);
        let ty = interval_theta(problem.length, y0, y1, t, mode_budget);
        let delta = tx.value - ty.value;
        value.add(kernel as f64 * delta);
        value.add(s * delta);
        bound += (kernel as f64 + s) * (tx.bound + ty.bound) + (delta.abs() + tx.bound + ty.bound) * spec_tail;
    }
    if !(bound <= tol) {
        return Err(Error::Truncation { t, bound, tol });
    }
    Ok(Estimate { value: value.total(), bound })
}

/// [`trace_difference`] over a `t` grid.
pub fn trace_difference_sweep(problem: &SwapProblem, t: &[f64], mode_budget: usize, tol: f64) -> Result<TraceSweep> {
    let pts: Vec<Result<Estimate>> =
        t.par_iter().map(|&t| trace_difference(problem, t, mode_budget, tol)).collect();
    let mut values = Vec::with_capacity(t.len());
    let mut bounds = Vec::with_capacity(t.len());
    for p in pts {
        let e = p?;
        values.push(e.value);
        bounds.push(e.bound);
    }
    TraceSweep::new("trace_difference", t.to_vec(), None, values, bounds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractedConstant {
    pub constant: f64,
    pub residual_bound: f64,
    pub converged: bool,
}

/// Reads off the `t → 0` constant of a one-dimensional sweep: the value at
/// the smallest `t`, with the spread over the two smallest-`t` samples (plus
/// their truncation bounds) as residual.
pub fn extract_constant(sweep: &TraceSweep, tol: f64) -> Result<ExtractedConstant> {
    if sweep.u.is_some() {
        return Err(Error::NotAsymptotic("constant extraction needs a sweep over t only".into()));
    }
    if sweep.t.len() < 3 {
        return Err(Error::NotAsymptotic(format!("need at least 3 samples, got {}", sweep.t.len())));
    }
    let n = sweep.t.len();
    let (last, prev) = if sweep.t[0] > sweep.t[n - 1] { (n - 1, n - 2) } else { (0, 1) };
    let constant = sweep.values[last];
    let residual_bound = (sweep.values[last] - sweep.values[prev]).abs() + sweep.bounds[last] + sweep.bounds[prev];
    Ok(ExtractedConstant { constant, residual_bound, converged: residual_bound <= tol })
}

/// The three reference swaps on a cylinder over `spectrum`.
pub fn shipped_swaps(spectrum: &ChiralSpectrum, length: f64) -> Result<Vec<(&'static str, SwapProblem)>> {
    use BoundaryCondition::{Minus, Plus};
    Ok(vec![
        ("pure-swap", SwapProblem::new(spectrum.clone(), length, [Plus, Plus], [Minus, Minus])?),
        ("single-end-0", SwapProblem::new(spectrum.clone(), length, [Plus, Plus], [Minus, Plus])?),
        ("single-end-1", SwapProblem::new(spectrum.clone(), length, [Plus, Plus], [Plus, Minus])?),
    ])
}
