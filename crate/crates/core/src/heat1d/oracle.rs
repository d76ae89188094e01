//! Brute-force heat kernels on `[0, R]` by eigenfunction expansion.
//!
//! The operator is `-∂²_u` with the requested condition at `u = 0` and
//! Dirichlet at `u = R`. Every eigenfunction is written `sin(k(R - u))`, so
//! only the condition at the origin selects the wavenumbers:
//!
//! * Dirichlet: `kR = jπ`, `j ≥ 1`
//! * Neumann:   `kR = (j + ½)π`, `j ≥ 0`
//! * Robin(λ):  `kR cot(kR) = λR`, one root per `(jπ, (j+1)π)`; when
//!   `λR > 1` the lowest state is `sinh(κ(R - u))` with `κR coth(κR) = λR`
//!   and eigenvalue `-κ²`; at `λR = 1` it is the linear zero mode `R - u`.

use super::HalfLineCondition;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Oscillatory(f64),
    Bound(f64),
    Linear,
}

/// Oracle output with its truncation tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Eigenvalues and eigenfunctions of `-∂²` on `[0, R]`, ascending.
#[derive(Debug, Clone)]
pub struct HalfLineEigensystem {
    bc: HalfLineCondition,
    radius: f64,
    modes: Vec<Mode>,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootBracketing(format!(
            "no sign change on [{lo}, {hi}] ({flo:.3e}, {fhi:.3e})"
        )));
    }
    while hi - lo > 1e-14 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl HalfLineEigensystem {
    /// Computes the lowest `count` modes.
    pub fn new(bc: HalfLineCondition, radius: f64, count: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("R must be positive, got {radius}")));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("mode count must be positive".into()));
        }
        let mut modes = Vec::with_capacity(count);
        match bc {
            HalfLineCondition::Dirichlet => {
                modes.extend((1..=count).map(|j| Mode::Oscillatory(j as f64 * PI / radius)));
            }
            HalfLineCondition::Neumann => {
                modes.extend((0..count).map(|j| Mode::Oscillatory((j as f64 + 0.5) * PI / radius)));
            }
            HalfLineCondition::Robin(lambda) => {
                let a = lambda * radius;
                let q = |x: f64| x.cos() - a * sinc(x);
                if a > 1.0 {
                    let r = |y: f64| y.cosh() - a * if y < 1e-8 { 1.0 } else { y.sinh() / y };
                    let y = bisect(r, 0.0, a)?;
                    modes.push(Mode::Bound(y / radius));
                } else if a == 1.0 {
                    modes.push(Mode::Linear);
                } else {
                    let x = bisect(q, 0.0, PI)?;
                    modes.push(Mode::Oscillatory(x / radius));
                }
                let mut j = 1usize;
                while modes.len() < count {
                    let lo = j as f64 * PI;
                    let x = bisect(q, lo, lo + PI)?;
                    modes.push(Mode::Oscillatory(x / radius));
                    j += 1;
                }
            }
        }
        Ok(Self { bc, radius, modes })
    }

    pub fn condition(&self) -> HalfLineCondition {
        self.bc
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Eigenvalues of `-∂²`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes
            .iter()
            .map(|m| match *m {
                Mode::Oscillatory(k) => k * k,
                Mode::Bound(kappa) => -kappa * kappa,
                Mode::Linear => 0.0,
            })
            .collect()
    }

    /// `e^{-tE} φ(u) φ(v) / ‖φ‖²` for one mode.
    fn term(&self, mode: Mode, t: f64, u: f64, v: f64) -> f64 {
        let r = self.radius;
        match mode {
            Mode::Oscillatory(k) => {
                let norm_sq = 0.5 * r - (2.0 * k * r).sin() / (4.0 * k);
                (-t * k * k).exp() * (k * (r - u)).sin() * (k * (r - v)).sin() / norm_sq
            }
            Mode::Bound(kappa) => {
                // sinh written as ½e^{κ(R-·)}(1 - e^{-2κ(R-·)}) with e^{2κR} cancelled.
                let damp = |x: f64| 1.0 - (-2.0 * kappa * (r - x)).exp();
                let e2 = (-2.0 * kappa * r).exp();
                let norm = (1.0 - e2 * e2) / (8.0 * kappa) - 0.5 * r * e2;
                (t * kappa * kappa).exp() * 0.25 * (-kappa * (u + v)).exp() * damp(u) * damp(v)
                    / norm
            }
            Mode::Linear => 3.0 * (r - u) * (r - v) / r.powi(3),
        }
    }

    /// Truncation bound for the modes not computed.
    fn tail_bound(&self, t: f64) -> f64 {
        let r = self.radius;
        let next = (self.modes.len() as f64 - 1.0).max(1.0) * PI / r;
        let weight = 1.0 / (0.5 * r - 1.0 / (4.0 * next));
        let a = t * (PI / r).powi(2);
        let first = next * r / PI;
        weight * (-a * first * first).exp() / (1.0 - (-2.0 * a * first).exp())
    }

    /// Heat kernel `K(t, u, v)` with its tail bound.
    pub fn kernel(&self, t: f64, u: f64, v: f64) -> OracleValue {
        let mut acc = CompensatedSum::new();
        for &m in &self.modes {
            acc.add(self.term(m, t, u, v));
        }
        OracleValue {
            value: acc.total(),
            tail_bound: self.tail_bound(t),
        }
    }
}

/// Heat kernel of `-∂²_u` on `[0, R]` (condition `bc` at 0, Dirichlet at
/// `R`) from its lowest `modes` eigenfunctions.
pub fn halfline_oracle(
    t: f64,
    u: f64,
    v: f64,
    bc: HalfLineCondition,
    radius: f64,
    modes: usize,
) -> Result<OracleValue> {
    super::check_time(t)?;
    if u < 0.0 || v < 0.0 {
        return Err(Error::InvalidParameter("u, v must be nonnegative".into()));
    }
    let required = u.max(v) + 10.0 * t.sqrt();
    if radius < required {
        return Err(Error::DomainTooSmall { radius, required });
    }
    Ok(HalfLineEigensystem::new(bc, radius, modes)?.kernel(t, u, v))
}

#[cfg(test)]
mod tests {
    use super::super::{dirichlet_density, free_density, halfline_density, neumann_density};
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn dirichlet_matches_closed_form() {
        let v = halfline_oracle(0.04, 0.1, 0.1, HalfLineCondition::Dirichlet, 20.0, 4000).unwrap();
        assert!((v.value - dirichlet_density(0.04, 0.1)).abs() < 1e-8);
        assert!(v.tail_bound < 1e-12);
    }

    #[test]
    fn neumann_boundary_value() {
        let v = halfline_oracle(0.04, 0.0, 0.0, HalfLineCondition::Neumann, 20.0, 4000).unwrap();
        assert!((v.value - 2.0 * free_density(0.04)).abs() < 1e-8);
        assert!((v.value - neumann_density(0.04, 0.0)).abs() < 1e-8);
    }

    #[test]
    fn robin_zero_coincides_with_neumann() {
        let n = HalfLineEigensystem::new(HalfLineCondition::Neumann, 20.0, 3000).unwrap();
        let r = HalfLineEigensystem::new(HalfLineCondition::Robin(0.0), 20.0, 3000).unwrap();
        for &t in &[0.05, 0.2] {
            for &u in &[0.0, 0.3, 1.0] {
                let a = n.kernel(t, u, u).value;
                let b = r.kernel(t, u, u).value;
                assert!((a - b).abs() < 1e-10, "t={t} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn robin_bound_state_appears_for_positive_lambda() {
        let sys = HalfLineEigensystem::new(HalfLineCondition::Robin(1.0), 40.0, 10).unwrap();
        let e0 = sys.eigenvalues()[0];
        assert!((e0 + 1.0).abs() < 1e-12, "bound state energy {e0}");
        let sys = HalfLineEigensystem::new(HalfLineCondition::Robin(-1.0), 40.0, 10).unwrap();
        assert!(sys.eigenvalues()[0] > 0.0);
    }

    #[test]
    fn robin_matches_closed_form_both_signs() {
        for &lambda in &[-1.5, -0.2, 0.3, 2.0] {
            let sys = HalfLineEigensystem::new(HalfLineCondition::Robin(lambda), 40.0, 20_000).unwrap();
            for &(t, u) in &[(0.05, 0.0), (0.1, 0.2), (0.2, 1.0)] {
                let oracle = sys.kernel(t, u, u).value;
                let closed = halfline_density(t, u, HalfLineCondition::Robin(lambda), 0.0);
                assert!((oracle - closed).abs() < 1e-8, "λ={lambda} t={t} u={u}: {oracle} vs {closed}");
            }
        }
    }

    #[test]
    fn linear_zero_mode_branch() {
        let r = 4.0;
        let sys = HalfLineEigensystem::new(HalfLineCondition::Robin(1.0 / r), r, 5).unwrap();
        assert_eq!(sys.eigenvalues()[0], 0.0);
        let others = sys.eigenvalues();
        assert!(others.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn domain_too_small() {
        let err = halfline_oracle(1.0, 5.0, 5.0, HalfLineCondition::Dirichlet, 6.0, 100);
        assert!(matches!(err, Err(Error::DomainTooSmall { .. })));
    }

    #[test]
    fn semigroup_property() {
        let r = 3.0;
        for bc in [
            HalfLineCondition::Dirichlet,
            HalfLineCondition::Neumann,
            HalfLineCondition::Robin(-0.7),
            HalfLineCondition::Robin(1.3),
        ] {
            let sys = HalfLineEigensystem::new(bc, r, 400).unwrap();
            let (t, s) = (0.03, 0.05);
            for &(u, v) in &[(0.2, 0.5), (0.0, 0.1), (1.0, 1.0)] {
                let direct = sys.kernel(t + s, u, v).value;
                let composed = integrate(
                    |w| sys.kernel(t, u, w).value * sys.kernel(s, w, v).value,
                    0.0,
                    r,
                    1e-10,
                )
                .unwrap();
                assert!((direct - composed).abs() < 1e-6, "{bc:?} ({u},{v}): {direct} vs {composed}");
            }
        }
    }
}
