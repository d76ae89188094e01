//! Exact spectral models, heat kernels and index oracles for Dirac boundary
//! problems in odd dimensions.
//!
//! The building blocks, bottom up:
//!
//! - [`heat1d`]: closed-form half-line and interval heat densities plus an
//!   eigenfunction-expansion oracle;
//! - [`spectrum`]: boundary spectra ([`ChiralSpectrum`]) and analytic models;
//! - [`index`]: heat traces, index densities and the index predicted from
//!   boundary data;
//! - [`cylinder`]: exact kernel counting on finite cylinders;
//! - [`isospectral`]: the isospectrality condition and cylinder trace
//!   differences;
//! - [`family`]: kernel bundles over a parameter torus and Chern numbers;
//! - [`validation`]: the verification suite.

pub mod cylinder;
pub mod error;
pub mod family;
pub mod heat1d;
pub mod index;
pub mod isospectral;
pub mod quadrature;
pub mod spectrum;
pub mod sum;
pub mod validation;

pub use cylinder::{cylinder_index, CylinderProblem, OracleConfig, ReversedApsZeroModes};
pub use error::{Error, Result};
pub use family::{BaseGrid, FamilyIndex, ProjectorFamily, SpectralFamily};
pub use index::{predicted_index, ApsPairing, Estimate, TraceSweep};
pub use isospectral::{ConditionSwap, SwapProblem, Verdict};
pub use spectrum::{BoundaryComponent, BoundaryCondition, ChiralSpectrum, Mode, Orientation};
