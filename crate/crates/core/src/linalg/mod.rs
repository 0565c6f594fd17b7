//! Real dense and sparse kernels backing the structure-preserving paths.

pub mod dense;
pub mod sparse;

pub use dense::RealMat;
pub use sparse::RealCsr;
