//! Shipped families: QWZ bands over the torus and constant families.

use super::{BaseGrid, CMatrix, SpectralFamily};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// `d(k) = (sin k₁, sin k₂, m + cos k₁ + cos k₂)`.
pub fn qwz_vector(k1: f64, k2: f64, m: f64) -> [f64; 3] {
    [k1.sin(), k2.sin(), m + k1.cos() + k2.cos()]
}

fn pauli_dot(d: [f64; 3]) -> CMatrix {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    DMatrix::from_row_slice(2, 2, &[z(d[2], 0.0), z(d[0], -d[1]), z(d[0], d[1]), z(-d[2], 0.0)])
}

/// `(1 - d̂·σ)/2`, the lower-band projector of `h(k) = d(k)·σ`.
pub fn qwz_lower_projector(k1: f64, k2: f64, m: f64) -> CMatrix {
    let d = qwz_vector(k1, k2, m);
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let unit = d.map(|x| x / n);
    (CMatrix::identity(2, 2) - pauli_dot(unit)) * Complex64::new(0.5, 0.0)
}

fn min_gap(grid: BaseGrid, m: f64) -> Result<f64> {
    let g = (0..grid.vertex_count())
        .map(|v| {
            let (k1, k2) = grid.coordinates(v);
            let d = qwz_vector(k1, k2, m);
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    if g < 1e-6 {
        return Err(Error::InvalidParameter(format!("QWZ mass m = {m} closes the gap on this grid")));
    }
    Ok(g)
}

/// `A⁺(k) = u(k)*`, a `1 × 2` row built from the upper-band eigenvector, so
/// `ker A⁺` is the lower QWZ band and `ker A⁻ = 0`.
///
/// No continuous choice of `u` exists when the band is twisted; the phase is
/// fixed vertex by vertex, which is harmless since only projectors enter.
pub fn qwz_chiral_family(n: usize, m: f64) -> Result<SpectralFamily> {
    let grid = BaseGrid::new(n)?;
    min_gap(grid, m)?;
    let a_plus = (0..grid.vertex_count())
        .map(|v| {
            let (k1, k2) = grid.coordinates(v);
            let d = qwz_vector(k1, k2, m);
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            // two charts for the upper eigenvector of d·σ
            let (x, y) = if d[2] >= 0.0 {
                (Complex64::new(d[2] + r, 0.0), Complex64::new(d[0], d[1]))
            } else {
                (Complex64::new(d[0], -d[1]), Complex64::new(r - d[2], 0.0))
            };
            let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
            DMatrix::from_row_slice(1, 2, &[x.conj() / norm, y.conj() / norm])
        })
        .collect();
    SpectralFamily::new(grid, 2, 1, a_plus, 0.9, 1, None)
}

/// `A⁺(k) = h(k) + |d(k)|`: Hermitian, so both chiral kernels are the
/// lower band.
pub fn qwz_hermitian_family(n: usize, m: f64) -> Result<SpectralFamily> {
    let grid = BaseGrid::new(n)?;
    let gap = 2.0 * min_gap(grid, m)?;
    let a_plus = (0..grid.vertex_count())
        .map(|v| {
            let (k1, k2) = grid.coordinates(v);
            let d = qwz_vector(k1, k2, m);
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            pauli_dot(d) + CMatrix::identity(2, 2) * Complex64::new(r, 0.0)
        })
        .collect();
    SpectralFamily::new(grid, 2, 2, a_plus, 0.99 * gap, 2, None)
}

/// Constant family with kernels of dimensions `(ker_plus, ker_minus)` and
/// `rank` nonzero singular values equal to `sigma`.
pub fn constant_family(grid: BaseGrid, ker_plus: usize, ker_minus: usize, rank: usize, sigma: f64) -> Result<SpectralFamily> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    let (p, q) = (ker_plus + rank, ker_minus + rank);
    let mut a = CMatrix::zeros(q, p);
    for k in 0..rank {
        a[(ker_minus + k, ker_plus + k)] = Complex64::new(sigma, 0.0);
    }
    let a_plus = vec![a; grid.vertex_count()];
    SpectralFamily::new(grid, p, q, a_plus, 0.9 * sigma, (ker_plus + ker_minus) as u32, None)
}

/// Block sum `A⁺ = A⁺_f ⊕ A⁺_g`.
pub fn direct_sum(f: &SpectralFamily, g: &SpectralFamily) -> Result<SpectralFamily> {
    if f.grid() != g.grid() {
        return Err(Error::InconsistentFamilyData("direct sum needs a common grid".into()));
    }
    let (p, q) = (f.plus_dim() + g.plus_dim(), f.minus_dim() + g.minus_dim());
    let a_plus = f
        .a_plus()
        .iter()
        .zip(g.a_plus())
        .map(|(a, b)| {
            let mut m = CMatrix::zeros(q, p);
            m.view_mut((0, 0), a.shape()).copy_from(a);
            m.view_mut((f.minus_dim(), f.plus_dim()), b.shape()).copy_from(b);
            m
        })
        .collect();
    SpectralFamily::new(f.grid(), p, q, a_plus, f.gap().min(g.gap()), f.kernel_dim() + g.kernel_dim(), None)
}
