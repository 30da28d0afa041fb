//! Special functions, quadrature, grids, differentiation and eigensolvers.

pub mod diff;
pub mod eigen;
pub mod grid;
pub mod poly;
pub mod quadrature;

pub use diff::second_derivative;
pub use eigen::{eig_sym_dense, eig_sym_tridiag, lowest_tridiag, SymEigen};
pub use grid::{CubicSpline, GridKind, RadialField, RadialGrid};
pub use poly::{laguerre_gen, laguerre_gen_deriv, legendre, legendre_deriv};
pub use quadrature::{gauss_legendre_rule, gauss_rule, QuadratureRule1D, WeightKind};
