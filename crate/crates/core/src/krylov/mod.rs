//! Quaternion Arnoldi process and the QGMRES solver family.

pub mod arnoldi;
pub mod grade;
pub mod hqls;
pub mod precond;
pub mod solver;

pub use arnoldi::{arnoldi, ArnoldiDecomposition, PrecondSide};
pub use grade::grade;
pub use hqls::solve_hqls;
pub use precond::{
    jacobi_sqrt_residual, sgs_preconditioner, IdentityPreconditioner, Preconditioner,
    SgsPreconditioner, SqrtResidualPreconditioner, StepContext,
};
pub use solver::{
    fqgmres, qgmres, qgmres_left, qgmres_right, ResidualKind, SolveReport, SolverConfig,
    Termination,
};
