//! Kernel bundles of boundary-operator families over a parameter torus and
//! their Chern numbers.
//!
//! A family is sampled on an `n × n` periodic grid. Kernel projectors are
//! read off a gapped Hermitian eigendecomposition at each vertex; first
//! Chern numbers come from the plaquette (link-determinant) construction,
//! which is exact up to integer rounding once every plaquette phase stays
//! away from `±π`.

mod document;
mod models;

pub use document::{load_family, save_family};
pub use models::{constant_family, direct_sum, qwz_chiral_family, qwz_hermitian_family, qwz_lower_projector, qwz_vector};

use crate::cylinder::{cylinder_index, mode_kernel_dims, zero_mode_pattern, CylinderProblem, ModeData, OracleConfig};
use crate::error::{Error, Result};
use crate::index::predicted_index;
use crate::spectrum::{BoundaryComponent, BoundaryCondition, ChiralSpectrum, Mode, Orientation};
use crate::sum::CompensatedSum;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type CMatrix = DMatrix<Complex64>;

/// Periodic `n × n` vertex grid on the parameter torus. Vertex `(i, j)` sits
/// at `(2πi/n, 2πj/n)`; the first index is the first coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseGrid {
    n: usize,
}

impl BaseGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidParameter(format!("grid size must be at least 8, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.n * self.n
    }

    pub fn edge_count(&self) -> usize {
        2 * self.n * self.n
    }

    pub fn plaquette_count(&self) -> usize {
        self.n * self.n
    }

    /// `V - E + F`; zero for the torus.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.plaquette_count() as i64
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        (i % self.n) * self.n + (j % self.n)
    }

    pub fn coordinates(&self, v: usize) -> (f64, f64) {
        let h = 2.0 * PI / self.n as f64;
        ((v / self.n) as f64 * h, (v % self.n) as f64 * h)
    }

    /// Corners of plaquette `p`, counterclockwise from its lower-left vertex.
    pub fn plaquette(&self, p: usize) -> [usize; 4] {
        let (i, j) = (p / self.n, p % self.n);
        [self.vertex(i, j), self.vertex(i + 1, j), self.vertex(i + 1, j + 1), self.vertex(i, j + 1)]
    }
}

/// Orthogonal projector onto the eigenvectors of a Hermitian matrix whose
/// eigenvalues are at most `0.01·gap` in modulus.
///
/// Every other eigenvalue must be at least `gap` in modulus.
pub fn kernel_projector(matrix: &CMatrix, gap: f64) -> Result<CMatrix> {
    Ok(split_kernel(matrix, gap)?.0)
}

/// Kernel projector plus the nonzero eigenvalues.
fn split_kernel(matrix: &CMatrix, gap: f64) -> Result<(CMatrix, Vec<f64>)> {
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!("gap must be positive, got {gap}")));
    }
    if !matrix.is_square() {
        return Err(Error::InvalidParameter("kernel_projector needs a square matrix".into()));
    }
    let m = matrix.nrows();
    let eig = SymmetricEigen::new(matrix.clone());
    let mut proj = CMatrix::zeros(m, m);
    let mut rest = Vec::new();
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev.abs() <= 0.01 * gap {
            let v = eig.eigenvectors.column(k);
            proj += &v * v.adjoint();
        } else if ev.abs() >= gap {
            rest.push(ev);
        } else {
            return Err(Error::GapViolation(format!(
                "eigenvalue {ev:.6e} lies between 0.01·gap and gap = {gap}"
            )));
        }
    }
    Ok((proj, rest))
}

fn rank_of(p: &CMatrix) -> usize {
    p.trace().re.round() as usize
}

/// Orthonormal frame (columns) of the range of a projector.
pub fn projector_frame(p: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(p.clone());
    let cols: Vec<_> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &ev)| ev > 0.5)
        .map(|(k, _)| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        CMatrix::zeros(p.nrows(), 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// Projector-valued function on a [`BaseGrid`] of constant rank.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    grid: BaseGrid,
    rank: usize,
    projectors: Vec<CMatrix>,
}

impl ProjectorFamily {
    pub fn new(grid: BaseGrid, projectors: Vec<CMatrix>) -> Result<Self> {
        if projectors.len() != grid.vertex_count() {
            return Err(Error::InconsistentFamilyData(format!(
                "{} projectors for {} vertices",
                projectors.len(),
                grid.vertex_count()
            )));
        }
        let rank = projectors.first().map_or(0, rank_of);
        let dim = projectors.first().map_or(0, |p| p.nrows());
        for (v, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || !p.is_square() {
                return Err(Error::InconsistentFamilyData(format!("vertex {v}: projector shape changes")));
            }
            let r = rank_of(p);
            if r != rank {
                return Err(Error::KernelDimensionJump {
                    vertex: v,
                    detail: format!("projector rank {r}, expected {rank}"),
                });
            }
        }
        Ok(Self { grid, rank, projectors })
    }

    pub fn grid(&self) -> BaseGrid {
        self.grid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn frames(&self) -> Vec<CMatrix> {
        self.projectors.par_iter().map(projector_frame).collect()
    }
}

/// First Chern number of a projector family.
pub fn chern_number(family: &ProjectorFamily) -> Result<i64> {
    if family.rank == 0 {
        return Ok(0);
    }
    chern_from_frames(family.grid, &family.frames())
}

/// First Chern number from arbitrary per-vertex orthonormal frames; the
/// result does not depend on the frame chosen at each vertex.
pub fn chern_from_frames(grid: BaseGrid, frames: &[CMatrix]) -> Result<i64> {
    if frames.len() != grid.vertex_count() {
        return Err(Error::InconsistentFamilyData("one frame per vertex required".into()));
    }
    let phases: Vec<Result<f64>> = (0..grid.plaquette_count())
        .into_par_iter()
        .map(|p| {
            let [a, b, c, d] = grid.plaquette(p);
            let link = |x: usize, y: usize| frames[x].adjoint() * &frames[y];
            let cycle = link(a, b) * link(b, c) * link(c, d) * link(d, a);
            let det = cycle.determinant();
            let phase = det.arg();
            if det.norm() < 1e-10 || phase.abs() > PI - 0.2 {
                return Err(Error::CoarseGrid { plaquette: p, phase });
            }
            Ok(phase)
        })
        .collect();
    let mut total = CompensatedSum::new();
    for ph in phases {
        total.add(ph?);
    }
    let c = total.total() / (2.0 * PI);
    let rounded = c.round();
    if (c - rounded).abs() > 1e-6 {
        return Err(Error::InconsistentFamilyData(format!("plaquette phases sum to non-integer {c}")));
    }
    Ok(rounded as i64)
}

/// A graded family `A(b) = [[0, A⁺(b)*], [A⁺(b), 0]]` on a grid, with
/// `A⁺(b): ℂ^p → ℂ^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFamily {
    grid: BaseGrid,
    plus_dim: usize,
    minus_dim: usize,
    a_plus: Vec<CMatrix>,
    gap: f64,
    kernel_dim: u32,
    nonzero_modes: Option<ChiralSpectrum>,
    ker_plus: u32,
    ker_minus: u32,
    plus_bundle: ProjectorFamily,
    minus_bundle: ProjectorFamily,
    singular_values: Vec<Vec<f64>>,
}

impl SpectralFamily {
    /// Checks shapes, the gap and the constancy of both chiral kernel
    /// dimensions over the grid.
    pub fn new(
        grid: BaseGrid,
        plus_dim: usize,
        minus_dim: usize,
        a_plus: Vec<CMatrix>,
        gap: f64,
        kernel_dim: u32,
        nonzero_modes: Option<ChiralSpectrum>,
    ) -> Result<Self> {
        if a_plus.len() != grid.vertex_count() {
            return Err(Error::InconsistentFamilyData(format!(
                "{} matrices for {} vertices",
                a_plus.len(),
                grid.vertex_count()
            )));
        }
        if let Some((v, m)) = a_plus.iter().enumerate().find(|(_, m)| m.shape() != (minus_dim, plus_dim)) {
            return Err(Error::InconsistentFamilyData(format!(
                "vertex {v}: A⁺ has shape {:?}, expected ({minus_dim}, {plus_dim})",
                m.shape()
            )));
        }
        if let Some(s) = &nonzero_modes {
            if s.ker_total() != 0 {
                return Err(Error::InconsistentFamilyData(
                    "shared nonzero-mode spectrum must not carry a kernel".into(),
                ));
            }
        }
        let split: Vec<Result<(CMatrix, CMatrix, Vec<f64>)>> = a_plus
            .par_iter()
            .enumerate()
            .map(|(v, ap)| {
                let (proj, rest) = split_kernel(&graded(ap), gap).map_err(|e| Error::KernelDimensionJump {
                    vertex: v,
                    detail: e.to_string(),
                })?;
                let plus = proj.view((0, 0), (plus_dim, plus_dim)).into_owned();
                let minus = proj.view((plus_dim, plus_dim), (minus_dim, minus_dim)).into_owned();
                let mut sv: Vec<f64> = rest.into_iter().filter(|&e| e > 0.0).collect();
                sv.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                Ok((plus, minus, sv))
            })
            .collect();
        let mut plus_p = Vec::with_capacity(split.len());
        let mut minus_p = Vec::with_capacity(split.len());
        let mut singular_values = Vec::with_capacity(split.len());
        for s in split {
            let (p, m, sv) = s?;
            plus_p.push(p);
            minus_p.push(m);
            singular_values.push(sv);
        }
        let plus_bundle = ProjectorFamily::new(grid, plus_p)?;
        let minus_bundle = ProjectorFamily::new(grid, minus_p)?;
        let (ker_plus, ker_minus) = (plus_bundle.rank() as u32, minus_bundle.rank() as u32);
        if ker_plus + ker_minus != kernel_dim {
            return Err(Error::InconsistentFamilyData(format!(
                "declared kernel dimension {kernel_dim}, measured {ker_plus} + {ker_minus}"
            )));
        }
        Ok(Self {
            grid,
            plus_dim,
            minus_dim,
            a_plus,
            gap,
            kernel_dim,
            nonzero_modes,
            ker_plus,
            ker_minus,
            plus_bundle,
            minus_bundle,
            singular_values,
        })
    }

    pub fn grid(&self) -> BaseGrid {
        self.grid
    }

    pub fn plus_dim(&self) -> usize {
        self.plus_dim
    }

    pub fn minus_dim(&self) -> usize {
        self.minus_dim
    }

    pub fn a_plus(&self) -> &[CMatrix] {
        &self.a_plus
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn kernel_dim(&self) -> u32 {
        self.kernel_dim
    }

    pub fn nonzero_modes(&self) -> Option<&ChiralSpectrum> {
        self.nonzero_modes.as_ref()
    }

    pub fn kernel_dims(&self) -> (u32, u32) {
        (self.ker_plus, self.ker_minus)
    }

    /// `ker A⁺` and `ker A⁻` as projector families.
    pub fn kernel_bundles(&self) -> (&ProjectorFamily, &ProjectorFamily) {
        (&self.plus_bundle, &self.minus_bundle)
    }

    /// `(c₁(ker A⁺), c₁(ker A⁻))`.
    pub fn kernel_chern_numbers(&self) -> Result<(i64, i64)> {
        Ok((chern_number(&self.plus_bundle)?, chern_number(&self.minus_bundle)?))
    }

    /// Boundary spectrum at vertex `v`: chiral kernels, the nonzero
    /// singular values of `A⁺(v)` and the shared modes.
    pub fn vertex_spectrum(&self, v: usize) -> Result<ChiralSpectrum> {
        let mut lambdas: Vec<(f64, u32)> = self.singular_values[v].iter().map(|&s| (s, 1)).collect();
        if let Some(s) = &self.nonzero_modes {
            lambdas.extend(s.modes().iter().map(|m| (m.lambda, m.multiplicity)));
        }
        lambdas.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        let mut modes: Vec<Mode> = Vec::new();
        for (l, m) in lambdas {
            match modes.last_mut() {
                Some(last) if (l - last.lambda).abs() <= 1e-12 * l => last.multiplicity += m,
                _ => modes.push(Mode { lambda: l, multiplicity: m }),
            }
        }
        let cutoff = modes
            .last()
            .map_or(0.0, |m| m.lambda)
            .max(self.nonzero_modes.as_ref().map_or(self.gap, |s| s.cutoff()));
        ChiralSpectrum::new(modes, self.ker_plus, self.ker_minus, cutoff)
    }
}

fn graded(a_plus: &CMatrix) -> CMatrix {
    let (q, p) = a_plus.shape();
    let mut h = CMatrix::zeros(p + q, p + q);
    h.view_mut((p, 0), (q, p)).copy_from(a_plus);
    h.view_mut((0, p), (p, q)).copy_from(&a_plus.adjoint());
    h
}

/// Both degrees of the family index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyIndex {
    pub degree0: i64,
    pub degree2: i64,
}

#[derive(Debug, Clone, Copy)]
pub struct FamilyComponent<'a> {
    pub family: &'a SpectralFamily,
    pub condition: BoundaryCondition,
    pub orientation: Orientation,
}

/// Family index predicted from boundary data: the index formula applied to
/// kernel dimensions (degree 0) and to first Chern numbers of the kernel
/// bundles (degree 2).
pub fn family_predicted_chern(components: &[FamilyComponent<'_>]) -> Result<FamilyIndex> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidParameter("family_predicted_chern needs at least one component".into()))?;
    let grid = first.family.grid();
    let mut boundary = Vec::with_capacity(components.len());
    let mut twice: i64 = 0;
    for (i, c) in components.iter().enumerate() {
        if c.family.grid() != grid {
            return Err(Error::InconsistentFamilyData(format!("component {i} lives on a different grid")));
        }
        let (kp, km) = c.family.kernel_dims();
        let s = ChiralSpectrum::kernel_only(kp, km, c.family.gap())?;
        boundary.push(BoundaryComponent::new(s, c.condition, c.orientation));
        let (cp, cm) = c.family.kernel_chern_numbers()?;
        let c1_index = c.orientation.sign() * (cp - cm);
        twice += match c.condition {
            BoundaryCondition::Minus => c1_index,
            BoundaryCondition::Plus => -c1_index,
            BoundaryCondition::Aps => -(cp + cm),
            BoundaryCondition::ApsComplement => {
                return Err(Error::WrongCondition(format!("component {i}: adjoint condition given")))
            }
        };
    }
    let degree0 = predicted_index(&boundary).map_err(|e| match e {
        Error::InconsistentBoundaryData(m) => Error::InconsistentFamilyData(m),
        other => other,
    })?;
    if twice % 2 != 0 {
        return Err(Error::InconsistentFamilyData(format!("degree-2 total is half-integral ({twice}/2)")));
    }
    Ok(FamilyIndex { degree0, degree2: twice / 2 })
}

/// Family index on the cylinder over each vertex, computed from the kernels
/// of `D` and `D*` themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCylinderIndex {
    pub index: FamilyIndex,
    /// `cylinder_index` at each vertex.
    pub per_vertex_degree0: Vec<i64>,
}

pub fn family_cylinder_index_bundle(
    family: &SpectralFamily,
    eps0: BoundaryCondition,
    eps1: BoundaryCondition,
    length: f64,
    cfg: OracleConfig,
) -> Result<FamilyCylinderIndex> {
    let grid = family.grid();
    let per_vertex: Vec<Result<i64>> = (0..grid.vertex_count())
        .into_par_iter()
        .map(|v| {
            let spec = family.vertex_spectrum(v)?;
            for m in spec.modes() {
                let mode = ModeData::Nonzero { lambda: m.lambda, multiplicity: m.multiplicity };
                if mode_kernel_dims(mode, length, eps0, eps1, cfg)? != (0, 0) {
                    return Err(Error::KernelDimensionJump {
                        vertex: v,
                        detail: format!("nonzero mode λ = {} carries cylinder kernel", m.lambda),
                    });
                }
            }
            cylinder_index(&CylinderProblem::new(spec, length, eps0, eps1)?, cfg)
        })
        .collect();
    let per_vertex_degree0 = per_vertex.into_iter().collect::<Result<Vec<i64>>>()?;
    if let Some(v) = per_vertex_degree0.iter().position(|&d| d != per_vertex_degree0[0]) {
        return Err(Error::KernelDimensionJump {
            vertex: v,
            detail: format!("cylinder index {} differs from {}", per_vertex_degree0[v], per_vertex_degree0[0]),
        });
    }

    let pattern = zero_mode_pattern(eps0, eps1, cfg);
    let (plus, minus) = family.kernel_bundles();
    let (p, q) = (family.plus_dim(), family.minus_dim());
    let assemble = |keep_plus: bool, keep_minus: bool| -> Result<ProjectorFamily> {
        let projectors = (0..grid.vertex_count())
            .map(|v| {
                let mut m = CMatrix::zeros(p + q, p + q);
                if keep_plus {
                    m.view_mut((0, 0), (p, p)).copy_from(&plus.projectors()[v]);
                }
                if keep_minus {
                    m.view_mut((p, p), (q, q)).copy_from(&minus.projectors()[v]);
                }
                m
            })
            .collect();
        ProjectorFamily::new(grid, projectors)
    };
    let ker_d = assemble(pattern.d_plus, pattern.d_minus)?;
    let ker_dstar = assemble(pattern.dstar_plus, pattern.dstar_minus)?;
    let degree0 = ker_d.rank() as i64 - ker_dstar.rank() as i64;
    if degree0 != per_vertex_degree0[0] {
        return Err(Error::InconsistentFamilyData(format!(
            "kernel bundles have rank difference {degree0}, cylinder index {}",
            per_vertex_degree0[0]
        )));
    }
    let degree2 = chern_number(&ker_d)? - chern_number(&ker_dstar)?;
    Ok(FamilyCylinderIndex { index: FamilyIndex { degree0, degree2 }, per_vertex_degree0 })
}
