//! Quaternion linear algebra and Krylov solvers for ill-posed quaternion
//! inverse problems.
//!
//! The crate is organized around a small set of value types — [`Quaternion`],
//! [`QVector`], [`QMatrix`] and the structure-preserving [`RealCounterpart`]
//! mapping — on top of which sit:
//!
//! * [`krylov`]: the quaternion Arnoldi process and the QGMRES family
//!   (plain, left/right preconditioned, flexible) with SGS and residual-scaled
//!   diagonal preconditioners;
//! * [`tv`]: total-variation machinery for quaternion signals and color
//!   images (difference stacks, collaborative norms, iteratively reweighted
//!   norm weights, weighted pseudoinverse application) and the TV-regularized
//!   flexible solvers;
//! * [`imaging`]: forward models (Gaussian blur, additive noise), packing of
//!   color images and 3-D signals into quaternion vectors, and PSNR/SNR/SSIM
//!   quality metrics;
//! * [`io`]: Matrix Market readers (including an extended quaternion format),
//!   CSV signal import, and JSON run logs.

pub mod error;
pub mod imaging;
pub mod instances;
pub mod io;
pub mod krylov;
pub mod linalg;
pub mod qmat;
pub mod quat;
pub mod qvec;
pub mod realrep;
pub mod tv;

pub use error::{Error, Result};
pub use qmat::QMatrix;
pub use quat::Quaternion;
pub use qvec::QVector;
pub use realrep::RealCounterpart;
