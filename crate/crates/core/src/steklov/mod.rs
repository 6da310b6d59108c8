//! The weighted Steklov `(p, q)`-eigenvalue problem on the planar cusp:
//! graded meshes, the discrete functionals `E` and `B`, Rayleigh-quotient
//! minimization, a linear oracle for `p = q = 2`, and trace constants.

mod fem;
mod linalg;
mod mesh;
mod oracle;
mod solver;
mod trace;

pub use fem::{assemble_functionals, Assembler, FemFunction, Functionals};
pub use linalg::{CsrMatrix, SkylineCholesky};
pub use mesh::{generate_cusp_mesh, BoundaryEdge, MeshGrading, TriMesh, MESH_HEADER};
pub use oracle::{linear_oracle, linear_system, LinearSystem, OracleResult};
pub use solver::{
    minimize_rayleigh, minimize_rayleigh_from, rayleigh_quotient, weak_residual, SolverOptions,
    SteklovSolution,
};
pub use trace::{bound_factor, trace_constant, TraceConstant};
