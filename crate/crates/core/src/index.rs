//! Boundary heat traces, index densities on the collar and the index
//! prediction from boundary data.

use crate::error::{Error, Result};
use crate::heat1d::{self, check_time, erf, robin_density_pair};
use crate::quadrature::integrate;
use crate::spectrum::{BoundaryComponent, BoundaryCondition, ChiralSpectrum};
use crate::sum::CompensatedSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A computed value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatTraces {
    pub tr_plus: f64,
    pub tr_minus: f64,
    /// Bound on the mode tail dropped by the cutoff, per chirality.
    pub bound: f64,
}

impl HeatTraces {
    pub fn supertrace(&self) -> f64 {
        self.tr_plus - self.tr_minus
    }
}

/// `Tr e^{-tA⁻A⁺}` and `Tr e^{-tA⁺A⁻}`.
///
/// Fails when the cutoff tail bound at `t` exceeds `tol`.
pub fn heat_traces(spec: &ChiralSpectrum, t: f64, tol: f64) -> Result<HeatTraces> {
    check_time(t)?;
    let bound = spec.truncation_bound(t);
    if bound > tol {
        return Err(Error::Truncation { t, bound, tol });
    }
    let s = spec.heat_sum(t);
    Ok(HeatTraces {
        tr_plus: spec.ker_plus() as f64 + s,
        tr_minus: spec.ker_minus() as f64 + s,
        bound,
    })
}

fn local_sign(comp: &BoundaryComponent) -> Result<f64> {
    comp.condition.local_sign().map(|s| s as f64).ok_or_else(|| {
        Error::WrongCondition(format!(
            "{} is not a local condition; use aps_density for spectral conditions",
            comp.condition
        ))
    })
}

/// Index density `-ε e^{-u²/t}/√(πt) · ind` of a half-cylinder with a local
/// condition.
pub fn local_density(comp: &BoundaryComponent, t: f64, u: f64) -> Result<f64> {
    check_time(t)?;
    check_depth(u)?;
    let eps = local_sign(comp)?;
    Ok(-eps * comp.effective_index() as f64 * (-u * u / t).exp() / (PI * t).sqrt())
}

/// `∫₀^U` of [`local_density`]; `upper = ∞` is allowed.
pub fn local_density_integral(comp: &BoundaryComponent, t: f64, upper: f64) -> Result<f64> {
    check_time(t)?;
    if !(upper > 0.0) {
        return Err(Error::InvalidParameter(format!("upper limit must be positive, got {upper}")));
    }
    let eps = local_sign(comp)?;
    let mass = if upper.is_infinite() { 1.0 } else { erf(upper / t.sqrt()) };
    Ok(-eps * 0.5 * comp.effective_index() as f64 * mass)
}

fn check_depth(u: f64) -> Result<()> {
    if u >= 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("u must be finite and nonnegative, got {u}")))
    }
}

/// How the second-order conditions of `D*D` and `DD*` are matched mode by
/// mode under the spectral condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApsPairing {
    /// Conditions induced by the adjoint boundary condition: both operators
    /// carry Dirichlet on `λ > 0` and the Robin condition on `λ < 0`, so
    /// every nonzero mode cancels and only the kernel of `A` survives.
    #[default]
    Adjoint,
    /// `DD*` carries the Robin condition of the mirrored eigenvalue; each
    /// mode leaves the Robin-pair difference `k1 - k2`, which does not decay
    /// at the boundary.
    Mirrored,
}

/// Zero-mode term `-ker_total · e^{-u²/t}/√(πt)`: Dirichlet minus Neumann.
fn aps_kernel_term(spec: &ChiralSpectrum, t: f64, u: f64) -> f64 {
    let k = spec.ker_total() as f64;
    k * (heat1d::dirichlet_density(t, u) - heat1d::neumann_density(t, u))
}

fn mirrored_modes(spec: &ChiralSpectrum, t: f64, u: f64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for m in spec.modes() {
        let (k1, k2) = robin_density_pair(t, u, -m.lambda)?;
        acc.add(m.multiplicity as f64 * (k1 - k2));
    }
    Ok(acc.total())
}

/// Index density of a half-cylinder with the spectral condition.
///
/// Under [`ApsPairing::Adjoint`] nonzero modes cancel identically, so the
/// value is exact (`bound = 0`). Under [`ApsPairing::Mirrored`] the modes
/// above the cutoff contribute without decay and the bound is infinite.
pub fn aps_density(spec: &ChiralSpectrum, t: f64, u: f64, pairing: ApsPairing) -> Result<Estimate> {
    check_time(t)?;
    check_depth(u)?;
    let zero = aps_kernel_term(spec, t, u);
    match pairing {
        ApsPairing::Adjoint => Ok(Estimate { value: zero, bound: 0.0 }),
        ApsPairing::Mirrored => {
            let modes = mirrored_modes(spec, t, u)?;
            Ok(Estimate { value: zero + modes, bound: f64::INFINITY })
        }
    }
}

/// `∫₀^U` of [`aps_density`]. The kernel term uses the closed form
/// `-½ ker_total · erf(U/√t)`; Robin pairs are integrated numerically.
pub fn aps_density_integral(
    spec: &ChiralSpectrum,
    t: f64,
    upper: f64,
    pairing: ApsPairing,
) -> Result<Estimate> {
    check_time(t)?;
    if !(upper > 0.0 && upper.is_finite()) {
        return Err(Error::InvalidParameter(format!("upper limit must be positive, got {upper}")));
    }
    let zero = -0.5 * spec.ker_total() as f64 * erf(upper / t.sqrt());
    match pairing {
        ApsPairing::Adjoint => Ok(Estimate { value: zero, bound: 0.0 }),
        ApsPairing::Mirrored => {
            if spec.modes().is_empty() {
                return Ok(Estimate { value: zero, bound: f64::INFINITY });
            }
            // The pair differences vary on the scale min(√t, 1/λ_max).
            let lmax = spec.modes().last().map_or(0.0, |m| m.lambda);
            let scale = t.sqrt().min(1.0 / lmax);
            let f = |u: f64| mirrored_modes(spec, t, u).unwrap_or(f64::NAN);
            let mut acc = CompensatedSum::new();
            let mut a = 0.0;
            let mut width = scale;
            while a < upper {
                let b = (a + width).min(upper);
                acc.add(integrate(f, a, b, 1e-9 * (b - a) / upper)?);
                a = b;
                width *= 2.0;
            }
            Ok(Estimate { value: zero + acc.total(), bound: f64::INFINITY })
        }
    }
}

/// Smallest `C` with `|aps_density(t, u)| ≤ C e^{-u²/(2t)}` on the reference
/// grid `u ∈ [0.2, 1]`, `t ∈ (0, 0.05]`.
pub fn aps_decay_constant(spec: &ChiralSpectrum, pairing: ApsPairing) -> Result<f64> {
    let mut c: f64 = 0.0;
    for i in 0..=40 {
        let u = 0.2 + 0.02 * i as f64;
        for j in 0..=60 {
            let t = 0.05 * (1e-3f64).powf(j as f64 / 60.0);
            let v = aps_density(spec, t, u, pairing)?.value;
            c = c.max(v.abs() * (u * u / (2.0 * t)).exp());
        }
    }
    Ok(c)
}

/// Index of a Dirac operator with the given boundary components, computed
/// from boundary data alone:
/// `½ Σ_{ε=-} ind A_i - ½ Σ_{ε=+} ind A_i - ½ Σ_{APS} dim ker A_i`.
pub fn predicted_index(components: &[BoundaryComponent]) -> Result<i64> {
    if components.is_empty() {
        return Err(Error::InvalidParameter("predicted_index needs at least one component".into()));
    }
    let mut twice: i64 = 0;
    for (i, c) in components.iter().enumerate() {
        twice += match c.condition {
            BoundaryCondition::Minus => c.effective_index(),
            BoundaryCondition::Plus => -c.effective_index(),
            BoundaryCondition::Aps => -(c.effective_ker_total() as i64),
            BoundaryCondition::ApsComplement => {
                return Err(Error::WrongCondition(format!(
                    "component {i}: the complement of the spectral projection is an adjoint condition, not a primary one"
                )))
            }
        };
    }
    if twice % 2 != 0 {
        return Err(Error::InconsistentBoundaryData(format!(
            "twice the predicted index is odd ({twice}); these components cannot bound a manifold"
        )));
    }
    Ok(twice / 2)
}

/// Values on a `t` (and optionally `u`) grid, `t`-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSweep {
    pub label: String,
    pub t: Vec<f64>,
    pub u: Option<Vec<f64>>,
    pub values: Vec<f64>,
    pub bounds: Vec<f64>,
}

fn strictly_monotone(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1]) || xs.windows(2).all(|w| w[0] > w[1])
}

impl TraceSweep {
    /// Axes must be nonempty and strictly monotone; sweeps towards `t → 0`
    /// run in decreasing `t`.
    pub fn new(
        label: impl Into<String>,
        t: Vec<f64>,
        u: Option<Vec<f64>>,
        values: Vec<f64>,
        bounds: Vec<f64>,
    ) -> Result<Self> {
        if t.is_empty() || !strictly_monotone(&t) || t.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter("t axis must be positive, nonempty and strictly monotone".into()));
        }
        if let Some(u) = &u {
            if u.is_empty() || !strictly_monotone(u) {
                return Err(Error::InvalidParameter("u axis must be nonempty and strictly monotone".into()));
            }
        }
        let n = t.len() * u.as_ref().map_or(1, Vec::len);
        if values.len() != n || bounds.len() != n {
            return Err(Error::InvalidParameter(format!(
                "sweep has {} values and {} bounds for {n} grid points",
                values.len(),
                bounds.len()
            )));
        }
        if bounds.iter().any(|b| !(*b >= 0.0)) {
            return Err(Error::InvalidParameter("truncation bounds must be nonnegative".into()));
        }
        Ok(Self { label: label.into(), t, u, values, bounds })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(t, u, value, bound)` in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, Option<f64>, f64, f64)> + '_ {
        let width = self.u.as_ref().map_or(1, Vec::len);
        (0..self.len()).map(move |k| {
            let t = self.t[k / width];
            let u = self.u.as_ref().map(|u| u[k % width]);
            (t, u, self.values[k], self.bounds[k])
        })
    }
}

fn grid_points(t: &[f64], u: &[f64]) -> Vec<(f64, f64)> {
    t.iter().flat_map(|&t| u.iter().map(move |&u| (t, u))).collect()
}

fn collect(points: Vec<Result<Estimate>>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut values = Vec::with_capacity(points.len());
    let mut bounds = Vec::with_capacity(points.len());
    for p in points {
        let e = p?;
        values.push(e.value);
        bounds.push(e.bound);
    }
    Ok((values, bounds))
}

/// [`local_density`] on a grid.
pub fn local_density_sweep(comp: &BoundaryComponent, t: &[f64], u: &[f64]) -> Result<TraceSweep> {
    let pts: Vec<Result<Estimate>> = grid_points(t, u)
        .into_par_iter()
        .map(|(t, u)| local_density(comp, t, u).map(|value| Estimate { value, bound: 0.0 }))
        .collect();
    let (values, bounds) = collect(pts)?;
    TraceSweep::new("local_density", t.to_vec(), Some(u.to_vec()), values, bounds)
}

/// [`aps_density`] on a grid.
pub fn aps_density_sweep(
    spec: &ChiralSpectrum,
    t: &[f64],
    u: &[f64],
    pairing: ApsPairing,
) -> Result<TraceSweep> {
    let pts: Vec<Result<Estimate>> = grid_points(t, u)
        .into_par_iter()
        .map(|(t, u)| aps_density(spec, t, u, pairing))
        .collect();
    let (values, bounds) = collect(pts)?;
    TraceSweep::new("aps_density", t.to_vec(), Some(u.to_vec()), values, bounds)
}

/// Supertrace `Tr e^{-tA⁻A⁺} - Tr e^{-tA⁺A⁻}` over a `t` grid.
pub fn supertrace_sweep(spec: &ChiralSpectrum, t: &[f64], tol: f64) -> Result<TraceSweep> {
    let pts: Vec<Result<Estimate>> = t
        .par_iter()
        .map(|&t| heat_traces(spec, t, tol).map(|h| Estimate { value: h.supertrace(), bound: h.bound }))
        .collect();
    let (values, bounds) = collect(pts)?;
    TraceSweep::new("supertrace", t.to_vec(), None, values, bounds)
}
