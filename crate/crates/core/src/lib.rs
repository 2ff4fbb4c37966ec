//! High-order finite element solvers for the weighted Riesz maps of the
//! L² de Rham complex — H(grad), H(curl), H(div), L² — on hexahedral meshes.
//!
//! The discretization uses interior-orthogonal "FDM" elements built from a
//! one-dimensional generalized eigenproblem, so that mass and stiffness
//! matrices on Cartesian cells are sparse at any polynomial degree. On
//! distorted cells the solvers precondition with a sparse auxiliary operator
//! obtained from diagonal approximations of broken-basis mass matrices.
//! Patch-based multigrid relaxations (vertex/edge/face stars, with optional
//! static condensation onto interface unknowns) are combined with a direct
//! p=1 coarse solve in a V(1,1) cycle and wrapped in CG or MINRES.
//!
//! All numerical kernels are generic over the scalar type through the
//! [`Real`] trait; concrete `f64` aliases are exported at the crate root.

pub mod assembly;
pub mod dense;
pub mod dofmap;
pub mod driver;
pub mod elements;
pub mod error;
pub mod fdm1d;
pub mod flops;
pub mod hodge;
pub mod krylov;
pub mod mesh;
pub mod patches;
pub mod precond;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default scalar type for the concrete aliases below.
pub type Scalar = f64;

pub type Matrix = dense::DenseMatrix<Scalar>;
pub type Rule = quadrature::QuadratureRule<Scalar>;
pub type Basis1D = fdm1d::FdmBasis1D<Scalar>;
