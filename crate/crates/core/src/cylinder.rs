//! Exact kernel counting for Dirac boundary problems on `[0, L] × N`.
//!
//! On a product cylinder `D = cl(∂_u)(∂_u + A)` with `cl(∂_u) = diag(i, -i)`
//! splits over the spectrum of `A`. For an eigenvalue `λ > 0` a section is
//! `(a, b)` with
//!
//! ```text
//! D(a, b) = (i(a' + λb), -i(b' + λa))
//! ```
//!
//! and `Dφ = 0` has the solutions `a = αe^{-λu} + βe^{λu}`,
//! `b = αe^{-λu} - βe^{λu}`. The spectral components are
//! `p = (a+b)/2 = αe^{-λu}` (eigenvalue `+λ`) and `q = (a-b)/2 = βe^{λu}`
//! (eigenvalue `-λ`). Zero modes of `A` decouple into `a`-type constants
//! (`ker A⁺`) and `b`-type constants (`ker A⁻`).
//!
//! Green's formula reads
//!
//! ```text
//! ⟨Dφ, ψ⟩ - ⟨φ, Dψ⟩ = -i[ā c]₀^L + i[b̄ d]₀^L,
//! ```
//!
//! which in spectral components is `2(p̄ s + q̄ r)` at each end. The killed
//! functional of each condition:
//!
//! | condition        | `u = 0` (inward) | `u = L` (reversed) |
//! |------------------|------------------|--------------------|
//! | `Plus`           | `a`              | `b`                |
//! | `Minus`          | `b`              | `a`                |
//! | `Aps`            | `p`, zero modes  | `q`, zero modes    |
//! | `ApsComplement`  | `p`              | `q`                |
//!
//! At the reversed end the induced operator is `-A` with the chiral halves
//! exchanged, so its nonnegative spectral subspace is `q` plus the zero
//! modes. [`ReversedApsZeroModes::Free`] moves the zero modes from `Aps` to
//! `ApsComplement` at that end.
//!
//! Each condition matrix has entries `±e^{kλL}` with `k ∈ {-1, 0, 1}`, so
//! its rank is decided symbolically and no exceptional `(λ, L)` exists.

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::spectrum::{BoundaryComponent, BoundaryCondition, ChiralSpectrum, Orientation};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Whether zero modes of `A` belong to the projected subspace of the
/// spectral condition at the reversed end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReversedApsZeroModes {
    /// Projection onto `λ' ≥ 0` of `A' = -A`: zero modes are killed.
    #[default]
    Killed,
    /// Zero modes are left free at the reversed end.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OracleConfig {
    pub reversed_aps_zero_modes: ReversedApsZeroModes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderProblem {
    pub spectrum: ChiralSpectrum,
    pub length: f64,
    pub eps0: BoundaryCondition,
    pub eps1: BoundaryCondition,
}

impl CylinderProblem {
    pub fn new(
        spectrum: ChiralSpectrum,
        length: f64,
        eps0: BoundaryCondition,
        eps1: BoundaryCondition,
    ) -> Result<Self> {
        check_length(length)?;
        Ok(Self { spectrum, length, eps0, eps1 })
    }

    /// The two boundary components: `u = 0` inward, `u = L` reversed.
    pub fn components(&self) -> [BoundaryComponent; 2] {
        [
            BoundaryComponent::new(self.spectrum.clone(), self.eps0, Orientation::Inward),
            BoundaryComponent::new(self.spectrum.clone(), self.eps1, Orientation::Reversed),
        ]
    }

    /// The same problem seen through `u ↦ L - u`.
    pub fn reversed(&self) -> Self {
        Self {
            spectrum: self.spectrum.reversed(),
            length: self.length,
            eps0: self.eps1,
            eps1: self.eps0,
        }
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.spectrum.clone(), length, self.eps0, self.eps1)
    }
}

fn check_length(length: f64) -> Result<()> {
    if length > 0.0 && length.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("cylinder length must be positive, got {length}")))
    }
}

/// A linear functional on the boundary value `(a, b)` of a nonzero mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Functional {
    A,
    B,
    P,
    Q,
}

impl Functional {
    fn coefficients(self) -> [f64; 2] {
        match self {
            Self::A => [1.0, 0.0],
            Self::B => [0.0, 1.0],
            Self::P => [0.5, 0.5],
            Self::Q => [0.5, -0.5],
        }
    }
}

fn killed_nonzero(cond: BoundaryCondition, orientation: Orientation) -> Functional {
    use BoundaryCondition::*;
    match (cond, orientation) {
        (Plus, Orientation::Inward) | (Minus, Orientation::Reversed) => Functional::A,
        (Minus, Orientation::Inward) | (Plus, Orientation::Reversed) => Functional::B,
        (Aps | ApsComplement, Orientation::Inward) => Functional::P,
        (Aps | ApsComplement, Orientation::Reversed) => Functional::Q,
    }
}

/// `(kills a, kills b)` on zero modes.
fn killed_zero(cond: BoundaryCondition, orientation: Orientation, cfg: OracleConfig) -> (bool, bool) {
    use BoundaryCondition::*;
    let free_at_reversed = cfg.reversed_aps_zero_modes == ReversedApsZeroModes::Free;
    match (cond, orientation) {
        (Plus, Orientation::Inward) | (Minus, Orientation::Reversed) => (true, false),
        (Minus, Orientation::Inward) | (Plus, Orientation::Reversed) => (false, true),
        (Aps, Orientation::Inward) => (true, true),
        (ApsComplement, Orientation::Inward) => (false, false),
        (Aps, Orientation::Reversed) => (!free_at_reversed, !free_at_reversed),
        (ApsComplement, Orientation::Reversed) => (free_at_reversed, free_at_reversed),
    }
}

/// Functionals killed at one end, as coefficient rows on `(a, b)`.
fn killed_rows(cond: BoundaryCondition, orientation: Orientation, zero_mode: bool, cfg: OracleConfig) -> Vec<[f64; 2]> {
    if zero_mode {
        let (ka, kb) = killed_zero(cond, orientation, cfg);
        let mut rows = Vec::new();
        if ka {
            rows.push(Functional::A.coefficients());
        }
        if kb {
            rows.push(Functional::B.coefficients());
        }
        rows
    } else {
        vec![killed_nonzero(cond, orientation).coefficients()]
    }
}

/// `sign · e^{exp·λL}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    sign: i8,
    exp: i8,
}

/// Row of a functional evaluated on the basis `(αe^{-λu}, βe^{λu})` at
/// `u = 0` (`at_far_end = false`) or `u = L`.
fn symbolic_row(f: Functional, at_far_end: bool) -> [Entry; 2] {
    let (ea, eb) = if at_far_end { (-1, 1) } else { (0, 0) };
    let e = |sign: i8, exp: i8| Entry { sign, exp: if sign == 0 { 0 } else { exp } };
    match f {
        Functional::P => [e(1, ea), e(0, eb)],
        Functional::Q => [e(0, ea), e(1, eb)],
        Functional::A => [e(1, ea), e(1, eb)],
        Functional::B => [e(1, ea), e(-1, eb)],
    }
}

/// Rank of a 2×2 matrix of such entries, exact for every `λL > 0`.
fn symbolic_rank(r0: [Entry; 2], r1: [Entry; 2]) -> u32 {
    let t1 = (r0[0].sign * r1[1].sign, r0[0].exp + r1[1].exp);
    let t2 = (r0[1].sign * r1[0].sign, r0[1].exp + r1[0].exp);
    let singular = (t1.0 == 0 && t2.0 == 0) || (t1.0 == t2.0 && t1.1 == t2.1);
    if !singular {
        2
    } else if r0.iter().chain(r1.iter()).any(|e| e.sign != 0) {
        1
    } else {
        0
    }
}

/// One mode of the boundary operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeData {
    Zero { ker_plus: u32, ker_minus: u32 },
    Nonzero { lambda: f64, multiplicity: u32 },
}

/// Which zero-mode constants survive in `ker D` and `ker D*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroModePattern {
    pub d_plus: bool,
    pub d_minus: bool,
    pub dstar_plus: bool,
    pub dstar_minus: bool,
}

pub fn zero_mode_pattern(eps0: BoundaryCondition, eps1: BoundaryCondition, cfg: OracleConfig) -> ZeroModePattern {
    let free = |c0: BoundaryCondition, c1: BoundaryCondition| {
        let (a0, b0) = killed_zero(c0, Orientation::Inward, cfg);
        let (a1, b1) = killed_zero(c1, Orientation::Reversed, cfg);
        (!(a0 || a1), !(b0 || b1))
    };
    let (d_plus, d_minus) = free(eps0, eps1);
    let (dstar_plus, dstar_minus) = free(eps0.adjoint(), eps1.adjoint());
    ZeroModePattern { d_plus, d_minus, dstar_plus, dstar_minus }
}

/// `(dim ker D, dim ker D*)` restricted to one mode.
pub fn mode_kernel_dims(
    mode: ModeData,
    length: f64,
    eps0: BoundaryCondition,
    eps1: BoundaryCondition,
    cfg: OracleConfig,
) -> Result<(u64, u64)> {
    check_length(length)?;
    match mode {
        ModeData::Zero { ker_plus, ker_minus } => {
            let z = zero_mode_pattern(eps0, eps1, cfg);
            let count = |p: bool, m: bool| u64::from(p) * ker_plus as u64 + u64::from(m) * ker_minus as u64;
            Ok((count(z.d_plus, z.d_minus), count(z.dstar_plus, z.dstar_minus)))
        }
        ModeData::Nonzero { lambda, multiplicity } => {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidParameter(format!("nonzero mode needs λ > 0, got {lambda}")));
            }
            let dim = |c0: BoundaryCondition, c1: BoundaryCondition| {
                let r0 = symbolic_row(killed_nonzero(c0, Orientation::Inward), false);
                let r1 = symbolic_row(killed_nonzero(c1, Orientation::Reversed), true);
                (2 - symbolic_rank(r0, r1)) as u64 * multiplicity as u64
            };
            Ok((dim(eps0, eps1), dim(eps0.adjoint(), eps1.adjoint())))
        }
    }
}

/// `dim ker D - dim ker D*` summed over all stored modes.
///
/// Modes above the cutoff are not stored; every condition matrix for
/// `λ > 0` has full rank, so they contribute nothing.
pub fn cylinder_index(problem: &CylinderProblem, cfg: OracleConfig) -> Result<i64> {
    let (eps0, eps1, length) = (problem.eps0, problem.eps1, problem.length);
    let zero = ModeData::Zero { ker_plus: problem.spectrum.ker_plus(), ker_minus: problem.spectrum.ker_minus() };
    let (kd, kds) = mode_kernel_dims(zero, length, eps0, eps1, cfg)?;
    let nonzero: Result<Vec<i64>> = problem
        .spectrum
        .modes()
        .par_iter()
        .map(|m| {
            let mode = ModeData::Nonzero { lambda: m.lambda, multiplicity: m.multiplicity };
            mode_kernel_dims(mode, length, eps0, eps1, cfg).map(|(d, ds)| d as i64 - ds as i64)
        })
        .collect();
    Ok(kd as i64 - kds as i64 + nonzero?.into_iter().sum::<i64>())
}

/// A section of the collar restricted to one mode: `a` and `b` are cubic
/// polynomials in `u` with complex coefficients (ascending powers).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSection {
    pub lambda: f64,
    pub a: [Complex64; 4],
    pub b: [Complex64; 4],
}

fn poly(c: &[Complex64; 4], u: f64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * u + x)
}

fn poly_deriv(c: &[Complex64; 4], u: f64) -> Complex64 {
    c[1] + c[2] * (2.0 * u) + c[3] * (3.0 * u * u)
}

impl ModeSection {
    pub fn new(lambda: f64, a: [Complex64; 4], b: [Complex64; 4]) -> Self {
        Self { lambda, a, b }
    }

    pub fn zero(lambda: f64) -> Self {
        let z = [Complex64::new(0.0, 0.0); 4];
        Self { lambda, a: z, b: z }
    }

    pub fn value(&self, u: f64) -> (Complex64, Complex64) {
        (poly(&self.a, u), poly(&self.b, u))
    }

    /// `D` applied to the section, evaluated at `u`.
    pub fn apply(&self, u: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let (a, b) = self.value(u);
        let l = self.lambda;
        (i * (poly_deriv(&self.a, u) + b * l), -i * (poly_deriv(&self.b, u) + a * l))
    }

    /// Projects the boundary values into the domain of `D` (or of `D*` when
    /// `adjoint`) by subtracting linear corrections in `u`.
    pub fn project_onto_domain(
        &self,
        length: f64,
        eps0: BoundaryCondition,
        eps1: BoundaryCondition,
        adjoint: bool,
        cfg: OracleConfig,
    ) -> Self {
        let (c0, c1) = if adjoint { (eps0.adjoint(), eps1.adjoint()) } else { (eps0, eps1) };
        let zero_mode = self.lambda == 0.0;
        let fix = |v: (Complex64, Complex64), rows: Vec<[f64; 2]>| {
            let mut w = [v.0, v.1];
            for basis in orthonormalise(rows) {
                let proj = w[0] * basis[0] + w[1] * basis[1];
                w[0] -= proj * basis[0];
                w[1] -= proj * basis[1];
            }
            (w[0] - v.0, w[1] - v.1)
        };
        let d0 = fix(self.value(0.0), killed_rows(c0, Orientation::Inward, zero_mode, cfg));
        let d1 = fix(self.value(length), killed_rows(c1, Orientation::Reversed, zero_mode, cfg));
        // correction d0·(1 - u/L) + d1·(u/L)
        let mut out = *self;
        out.a[0] += d0.0;
        out.b[0] += d0.1;
        out.a[1] += (d1.0 - d0.0) / length;
        out.b[1] += (d1.1 - d0.1) / length;
        out
    }
}

fn orthonormalise(rows: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut basis: Vec<[f64; 2]> = Vec::new();
    for mut r in rows {
        for e in &basis {
            let d = r[0] * e[0] + r[1] * e[1];
            r[0] -= d * e[0];
            r[1] -= d * e[1];
        }
        let n = r[0].hypot(r[1]);
        if n > 1e-12 {
            basis.push([r[0] / n, r[1] / n]);
        }
    }
    basis
}

fn inner_product<F, G>(f: F, g: G, length: f64) -> Result<Complex64>
where
    F: Fn(f64) -> (Complex64, Complex64) + Copy,
    G: Fn(f64) -> (Complex64, Complex64) + Copy,
{
    let integrand = move |u: f64| {
        let (x0, x1) = f(u);
        let (y0, y1) = g(u);
        x0.conj() * y0 + x1.conj() * y1
    };
    // relative accuracy: the integrands are polynomials of degree ≤ 6
    let scale = (0..=8)
        .map(|k| integrand(length * k as f64 / 8.0).norm())
        .fold(1.0, f64::max)
        * length;
    let re = integrate(|u| integrand(u).re, 0.0, length, 1e-14 * scale)?;
    let im = integrate(|u| integrand(u).im, 0.0, length, 1e-14 * scale)?;
    Ok(Complex64::new(re, im))
}

/// `⟨Dφ, ψ⟩ - ⟨φ, Dψ⟩` by quadrature over `[0, L]`.
pub fn green_defect(phi: &ModeSection, psi: &ModeSection, length: f64) -> Result<Complex64> {
    check_length(length)?;
    if phi.lambda != psi.lambda {
        return Err(Error::InvalidParameter("sections belong to different modes".into()));
    }
    let lhs = inner_product(|u| phi.apply(u), |u| psi.value(u), length)?;
    let rhs = inner_product(|u| phi.value(u), |u| psi.apply(u), length)?;
    Ok(lhs - rhs)
}

/// `|⟨Dφ, ψ⟩ - ⟨φ, D*ψ⟩|`.
pub fn green_identity_residual(phi: &ModeSection, psi: &ModeSection, length: f64) -> Result<f64> {
    green_defect(phi, psi, length).map(|z| z.norm())
}

/// The boundary term `-i[ā c]₀^L + i[b̄ d]₀^L` of Green's formula.
pub fn boundary_pairing(phi: &ModeSection, psi: &ModeSection, length: f64) -> Complex64 {
    let i = Complex64::i();
    let term = |u: f64| {
        let (a, b) = phi.value(u);
        let (c, d) = psi.value(u);
        -i * a.conj() * c + i * b.conj() * d
    };
    term(length) - term(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::predicted_index;
    use crate::spectrum::{make_twisted_torus, BoundaryCondition::*};
    use std::f64::consts::PI;

    const ALL: [BoundaryCondition; 4] = [Plus, Minus, Aps, ApsComplement];

    fn torus3() -> ChiralSpectrum {
        make_twisted_torus(3, 2.0 * PI, 4.0).unwrap()
    }

    /// Numerical rank of the same condition matrix, for moderate λL.
    fn numeric_rank(c0: BoundaryCondition, c1: BoundaryCondition, lambda: f64, length: f64) -> u32 {
        let eval = |row: [Entry; 2]| row.map(|e| e.sign as f64 * (e.exp as f64 * lambda * length).exp());
        let r0 = eval(symbolic_row(killed_nonzero(c0, Orientation::Inward), false));
        let r1 = eval(symbolic_row(killed_nonzero(c1, Orientation::Reversed), true));
        let det = r0[0] * r1[1] - r0[1] * r1[0];
        let scale = r0.iter().chain(r1.iter()).map(|x| x.abs()).fold(0.0, f64::max);
        if det.abs() > 1e-9 * scale * scale {
            2
        } else if scale > 0.0 {
            1
        } else {
            0
        }
    }

    #[test]
    fn symbolic_rank_agrees_with_numeric() {
        for c0 in ALL {
            for c1 in ALL {
                for &(l, len) in &[(0.3, 0.5), (1.0, 1.0), (2.5, 2.0)] {
                    let r0 = symbolic_row(killed_nonzero(c0, Orientation::Inward), false);
                    let r1 = symbolic_row(killed_nonzero(c1, Orientation::Reversed), true);
                    assert_eq!(symbolic_rank(r0, r1), numeric_rank(c0, c1, l, len), "{c0} {c1}");
                }
            }
        }
    }

    #[test]
    fn nonzero_modes_never_contribute() {
        for c0 in ALL {
            for c1 in ALL {
                for &l in &[1e-8, 0.7, 3.0, 1e6] {
                    let m = ModeData::Nonzero { lambda: l, multiplicity: 5 };
                    assert_eq!(mode_kernel_dims(m, 1.0, c0, c1, OracleConfig::default()).unwrap(), (0, 0));
                }
            }
        }
    }

    #[test]
    fn kernel_dim_examples() {
        let cfg = OracleConfig::default();
        let m = ModeData::Nonzero { lambda: 1.0, multiplicity: 1 };
        assert_eq!(mode_kernel_dims(m, 1.0, Plus, Plus, cfg).unwrap(), (0, 0));
        let z = ModeData::Zero { ker_plus: 3, ker_minus: 0 };
        assert_eq!(mode_kernel_dims(z, 1.0, Plus, Minus, cfg).unwrap(), (0, 3));
        assert_eq!(mode_kernel_dims(m, 1.0, Aps, Aps, cfg).unwrap(), (0, 0));
    }

    #[test]
    fn twisted_torus_indices() {
        let cfg = OracleConfig::default();
        let cases = [((Plus, Minus), -3), ((Plus, Plus), 0), ((Aps, Aps), -3), ((Minus, Plus), 3)];
        for ((e0, e1), want) in cases {
            let p = CylinderProblem::new(torus3(), 1.0, e0, e1).unwrap();
            assert_eq!(cylinder_index(&p, cfg).unwrap(), want, "{e0} {e1}");
        }
    }

    #[test]
    fn oracle_matches_prediction_for_all_pairs() {
        let specs = [torus3(), torus3().reversed(), ChiralSpectrum::kernel_only(2, 5, 1.0).unwrap()];
        for s in specs {
            for e0 in BoundaryCondition::PRIMARY {
                for e1 in BoundaryCondition::PRIMARY {
                    let p = CylinderProblem::new(s.clone(), 1.0, e0, e1).unwrap();
                    let got = cylinder_index(&p, OracleConfig::default()).unwrap();
                    assert_eq!(got, predicted_index(&p.components()).unwrap(), "{e0} {e1}");
                    assert_eq!(got, cylinder_index(&p.reversed(), OracleConfig::default()).unwrap());
                }
            }
        }
    }

    #[test]
    fn alternative_zero_mode_convention_breaks_aps_pair() {
        let cfg = OracleConfig { reversed_aps_zero_modes: ReversedApsZeroModes::Free };
        let p = CylinderProblem::new(torus3(), 1.0, Aps, Aps).unwrap();
        assert_eq!(cylinder_index(&p, cfg).unwrap(), 0);
        assert_eq!(predicted_index(&p.components()).unwrap(), -3);
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(lambda: f64, s: f64) -> ModeSection {
        ModeSection::new(
            lambda,
            [c(1.0, s), c(-0.3, 0.2), c(0.5 * s, -1.0), c(0.1, 0.4)],
            [c(-0.7, 0.1), c(0.2, s), c(-0.4, 0.3), c(s, -0.2)],
        )
    }

    #[test]
    fn admissible_pairs_satisfy_green() {
        let cfg = OracleConfig::default();
        for lambda in [0.0, 1.0, 2.3] {
            for e0 in BoundaryCondition::PRIMARY {
                for e1 in BoundaryCondition::PRIMARY {
                    let phi = sample(lambda, 0.7).project_onto_domain(1.3, e0, e1, false, cfg);
                    let psi = sample(lambda, -1.1).project_onto_domain(1.3, e0, e1, true, cfg);
                    let r = green_identity_residual(&phi, &psi, 1.3).unwrap();
                    assert!(r < 1e-12, "{lambda} {e0} {e1}: {r}");
                }
            }
        }
    }

    #[test]
    fn violating_section_leaves_boundary_pairing() {
        let cfg = OracleConfig::default();
        // φ in the domain of (Plus, Plus); ψ with b(0) = 1 breaks the adjoint
        // condition b(0) = 0 at the inward end.
        let phi = sample(1.0, 0.4).project_onto_domain(1.0, Plus, Plus, false, cfg);
        let mut psi = sample(1.0, 0.0).project_onto_domain(1.0, Plus, Plus, true, cfg);
        psi.b[0] += c(1.0, 0.0);
        let defect = green_defect(&phi, &psi, 1.0).unwrap();
        let pairing = boundary_pairing(&phi, &psi, 1.0);
        assert!((defect - pairing).norm() < 1e-12);
        assert!(pairing.norm() > 0.1);
        assert_eq!(green_identity_residual(&ModeSection::zero(1.0), &psi, 1.0).unwrap(), 0.0);
    }
}
