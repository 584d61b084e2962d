//! Boundary data on S³ and the infinite-dimensional transform inside the unit ball.

pub mod data;
pub mod discretize;
pub mod grid;
pub mod kernel;
pub mod robin;
pub mod simple;
pub mod transform;

pub use data::{BoundaryData, BoundaryProfile, Monomial};
pub use discretize::{discretize_thooft, mc_phi, thooft_phi};
pub use grid::{build_grid, gauss_legendre, mc_grid, GridScheme, S3Grid, S3_VOLUME};
pub use kernel::{constraint_residual_inf, KernelP, LowRank};
pub use robin::{robin_data, HarmonicExpansion};
pub use simple::{simple_example, SimpleExample};
pub use transform::{
    ansatz_transform, general_transform, layer_potential, phi_boundary, BoundaryTransform, LayerPotential,
};
