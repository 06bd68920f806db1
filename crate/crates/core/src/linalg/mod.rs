//! Exact integer and rational linear algebra.

mod exterior;
mod group;
mod hermite;
mod matrix;
mod smith;

pub use exterior::{binomial, exterior_power, is_perfect_square};
pub use group::FiniteAbelianGroup;
pub use hermite::{column_hermite_form, rational_lattice_basis};
pub use matrix::{IntMatrix, Matrix, RatMatrix};
pub use smith::{cokernel_of, smith_normal_form, SmithDecomposition};
