//! Total-variation regularization for quaternion signals and color images:
//! difference operators, collaborative norms, iteratively reweighted norm
//! weights, weighted pseudoinverse application, and the TV-regularized
//! flexible solvers.

pub mod ctv;
pub mod diff;
pub mod pinv;
pub mod solver;
pub mod weights;

pub use ctv::{ctv_norm, gradient_tensor, psi_inverse, psi_map, GradientTensor};
pub use diff::{qtv, DifferenceStack};
pub use pinv::{apply_p_pinv, PinvConfig, WeightedStack};
pub use solver::{mgs_qr, qtv_fqgmres, qtv_fqgmres_improved, solve_reduced, LambdaRule, QtvConfig};
pub use weights::{build_weights, IrnWeights};
