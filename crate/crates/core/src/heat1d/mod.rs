//! One-dimensional heat kernels on the half-line and on intervals.
//!
//! Diagonal densities are the closed forms obtained by the method of images
//! (Dirichlet, Neumann) and its Robin generalisation. The image point of `u`
//! sits at `-u`, so every diagonal correction carries `exp(-u²/t)`.
//! [`oracle`] evaluates the same kernels independently by eigenfunction
//! expansion on a long truncated interval.

mod erfc;
pub mod oracle;

pub use erfc::{erf, erfc, erfcx};
pub use oracle::{halfline_oracle, HalfLineEigensystem, OracleValue};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Boundary condition at `u = 0` for `-∂²_u` on the half-line.
///
/// `Robin(λ)` means `(∂_u + λ) φ = 0` at `u = 0`; `Robin(0)` is Neumann.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HalfLineCondition {
    Dirichlet,
    Neumann,
    Robin(f64),
}

/// Free-line diagonal density `(4πt)^{-1/2}`.
pub fn free_density(t: f64) -> f64 {
    1.0 / (4.0 * PI * t).sqrt()
}

/// Diagonal heat density of `-∂²_u` with Dirichlet condition at the origin.
pub fn dirichlet_density(t: f64, u: f64) -> f64 {
    free_density(t) * (1.0 - (-u * u / t).exp())
}

/// Diagonal heat density of `-∂²_u` with Neumann condition at the origin.
pub fn neumann_density(t: f64, u: f64) -> f64 {
    free_density(t) * (1.0 + (-u * u / t).exp())
}

/// Diagonal heat density of `-∂²_u + mass_sq` on the half-line.
///
/// The Robin branch is the Carslaw–Jaeger kernel for `φ' = hφ` with
/// `h = -λ`, evaluated through `erfcx` whenever the exponential prefactor
/// would overflow.
pub fn halfline_density(t: f64, u: f64, bc: HalfLineCondition, mass_sq: f64) -> f64 {
    let damping = (-mass_sq * t).exp();
    match bc {
        HalfLineCondition::Dirichlet => damping * dirichlet_density(t, u),
        HalfLineCondition::Neumann => damping * neumann_density(t, u),
        HalfLineCondition::Robin(lambda) => {
            let st = t.sqrt();
            let x = u / st - lambda * st;
            let correction = if lambda == 0.0 {
                0.0
            } else if x >= 0.0 {
                lambda * (-u * u / t - mass_sq * t).exp() * erfcx(x)
            } else {
                lambda * (-2.0 * lambda * u + (lambda * lambda - mass_sq) * t).exp() * erfc(x)
            };
            damping * neumann_density(t, u) + correction
        }
    }
}

/// The pair `(k1, k2)` of diagonal densities for one spectral mode `λ < 0`
/// of the boundary operator, per unit multiplicity.
///
/// `k1` solves `∂_t - ∂²_u + λ²` with `(∂_u + λ)φ = 0`; `k2` the same
/// equation with `(∂_u - λ)ψ = 0`, the condition carried by the mirrored
/// eigenvalue `-λ > 0`. At `u = 0` their difference is exactly `2λ`, and
/// `∫₀^∞ (k1 - k2) du = -erf(|λ|√t)`.
pub fn robin_density_pair(t: f64, u: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "robin_density_pair needs λ < 0, got {lambda}; mirror the sign or use the Dirichlet/Neumann pair at λ = 0"
        )));
    }
    check_time(t)?;
    let mass = lambda * lambda;
    Ok((
        halfline_density(t, u, HalfLineCondition::Robin(lambda), mass),
        halfline_density(t, u, HalfLineCondition::Robin(-lambda), mass),
    ))
}

/// End condition for interval spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalEnd {
    #[serde(rename = "D")]
    Dirichlet,
    #[serde(rename = "N")]
    Neumann,
}

/// First `count` eigenvalues of `-∂²` on `[0, L]`, ascending.
pub fn interval_mode_eigenvalues(
    length: f64,
    bc0: IntervalEnd,
    bc1: IntervalEnd,
    count: usize,
) -> Vec<f64> {
    use IntervalEnd::*;
    let (offset, first) = match (bc0, bc1) {
        (Dirichlet, Dirichlet) => (0.0, 1),
        (Neumann, Neumann) => (0.0, 0),
        _ => (0.5, 0),
    };
    (first..first + count)
        .map(|k| {
            let w = (k as f64 + offset) * PI / length;
            w * w
        })
        .collect()
}

/// Upper bound on `Σ_{k ≥ first} exp(-t (k + offset)² π²/L²)`.
pub fn interval_theta_tail(t: f64, length: f64, first: f64) -> f64 {
    let a = t * (PI / length).powi(2);
    let lead = (-a * first * first).exp();
    let ratio = (-2.0 * a * first).exp();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    lead / (1.0 - ratio)
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t must be positive and finite, got {t}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_boundary_and_far_field() {
        assert_eq!(dirichlet_density(0.3, 0.0), 0.0);
        assert!((dirichlet_density(0.04, 10.0) - free_density(0.04)).abs() < 1e-12);
        assert!((free_density(0.04) - 1.410_473_958_869_39).abs() < 1e-12);
    }

    #[test]
    fn closed_form_values() {
        // (4π·0.04)^{-1/2}(1 ∓ e^{-0.25})
        assert!((dirichlet_density(0.04, 0.1) - 0.311_995_735_200_085).abs() < 1e-9);
        assert!((neumann_density(0.04, 0.1) - 2.508_952_182_538_697).abs() < 1e-9);
    }

    #[test]
    fn dirichlet_plus_neumann_is_twice_free() {
        for &(t, u) in &[(0.04, 0.1), (1.0, 0.0), (0.002, 0.3), (5.0, 2.0)] {
            let s = dirichlet_density(t, u) + neumann_density(t, u);
            assert!((s - 2.0 * free_density(t)).abs() < 1e-14 * s);
        }
        assert!((neumann_density(0.7, 0.0) - 2.0 * free_density(0.7)).abs() < 1e-15);
    }

    #[test]
    fn robin_zero_is_neumann() {
        for &(t, u) in &[(0.1, 0.0), (0.1, 0.4), (2.0, 1.0)] {
            let r = halfline_density(t, u, HalfLineCondition::Robin(0.0), 0.3);
            let n = halfline_density(t, u, HalfLineCondition::Neumann, 0.3);
            assert_eq!(r, n);
        }
    }

    #[test]
    fn robin_pair_rejects_nonnegative_lambda() {
        assert!(robin_density_pair(0.1, 0.0, 0.0).is_err());
        assert!(robin_density_pair(0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn robin_pair_difference_at_boundary_is_two_lambda() {
        for &lambda in &[-0.5, -1.0, -2.0] {
            for &t in &[1e-4, 0.01, 0.3, 4.0] {
                let (k1, k2) = robin_density_pair(t, 0.0, lambda).unwrap();
                assert!((k1 - k2 - 2.0 * lambda).abs() < 1e-12, "λ={lambda} t={t}");
            }
        }
    }

    #[test]
    fn robin_pair_mirror_swaps_components() {
        // k1 for λ uses Robin(λ); the mirrored mode -λ > 0 would use Robin(-λ).
        let (t, u, lambda) = (0.1, 0.2, -1.0);
        let (k1, k2) = robin_density_pair(t, u, lambda).unwrap();
        let mass = lambda * lambda;
        assert_eq!(k2, halfline_density(t, u, HalfLineCondition::Robin(-lambda), mass));
        assert_eq!(k1, halfline_density(t, u, HalfLineCondition::Robin(lambda), mass));
    }

    #[test]
    fn interval_spectra() {
        use IntervalEnd::*;
        assert!((interval_mode_eigenvalues(PI, Dirichlet, Dirichlet, 1)[0] - 1.0).abs() < 1e-15);
        assert_eq!(interval_mode_eigenvalues(1.0, Neumann, Neumann, 1), vec![0.0]);
        let dn = interval_mode_eigenvalues(2.0, Dirichlet, Neumann, 1)[0];
        assert!((dn - 0.616_850_275_068_084_9).abs() < 1e-14);
        assert_eq!(
            interval_mode_eigenvalues(2.0, Dirichlet, Neumann, 5),
            interval_mode_eigenvalues(2.0, Neumann, Dirichlet, 5)
        );
    }

    #[test]
    fn theta_tail_bounds_direct_sum() {
        let (t, l) = (0.02, 1.0);
        let direct: f64 = (30..400).map(|k| (-t * (k as f64 * PI / l).powi(2)).exp()).sum();
        assert!(direct <= interval_theta_tail(t, l, 30.0));
    }
}
