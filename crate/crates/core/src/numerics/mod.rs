//! Dense linear algebra, exact rational elimination and special matrix functions.

mod decomp;
mod exact;
mod expm;
mod lanczos;
mod matrix;

pub(crate) use decomp::rank_profile;
pub use decomp::{
    fd_jacobian, independent_rows, normalize_sign, nullspace, rank, singular_values, svd, sylvester_commuting_dim,
    symmetric_eigenvalues, Svd, RANK_TOL,
};
pub use exact::{
    exact_determinant, exact_independent_rows, exact_nullspace, exact_rank, is_simple_rational, ratio_to_f64,
    RationalMatrix,
};
pub use expm::{expm, expm_skew};
pub use lanczos::{lanczos_jacobi, uniform_start, Jacobi};
pub use matrix::{DenseMatrix, SigmaList};
