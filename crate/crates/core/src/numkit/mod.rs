//! Dense real linear algebra: matrices, LU solves, the matrix exponential and
//! the orthonormal-basis engine behind every reachability computation.

mod basis;
mod expm;
mod lu;
mod matrix;

pub use basis::{OrthoBasis, RANK_TOL};
pub use expm::mat_exp;
pub use lu::{invert, Lu};
pub use matrix::{DenseMatrix, Vector};

pub(crate) use basis::normalized;
