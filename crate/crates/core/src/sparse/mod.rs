//! Sparse linear algebra: CSR storage, fill-reducing orderings, sparse
//! Cholesky, incomplete Cholesky on an imposed pattern, and static
//! condensation of cell-interior unknowns.

mod cholesky;
mod condense;
mod csr;
mod icc;
mod ordering;

pub use cholesky::{cholesky, CholFactor, Ordering};
pub use condense::{condense, CondensedOperator};
pub use csr::CsrMatrix;
pub use icc::{icc_imposed, sc_pattern, IccFactor, RowPattern};
pub use ordering::{nested_dissection_points, rcm};
