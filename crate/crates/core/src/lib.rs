//! Numerical laboratory for fractional Laplacians, fractional heat
//! semigroups, and Dirichlet-Neumann operators, with executable verifiers
//! for the pointwise convexity inequalities they satisfy.

pub mod convexity;
pub mod dirichlet;
pub mod error;
mod fft;
pub mod grid;
pub mod heat;
pub mod manifold;
pub mod report;
mod sphere;
pub mod subordination;
pub mod torus;
pub mod transport;

pub use error::{Error, Result};
pub use grid::{random_band_limited, FractionalOrder, ScalarField, TorusGrid};
pub use manifold::{build_spectrum, ManifoldSpec, SpectrumDecomposition};
pub use report::{CheckMetadata, InequalityReport};
