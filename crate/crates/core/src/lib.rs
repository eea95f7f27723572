//! Finite element solver for the elliptic regularization
//! `-eps Lap u + beta . grad u + mu u = f` of a stationary advection problem on
//! the unit square, with tools to measure how fast the regularized solutions
//! approach the advection solution as `eps -> 0`.

pub mod error;
pub mod fem;
pub mod manufactured;
pub mod mesh;
pub mod norms;
pub mod plot;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod sparse;
pub mod sweep;

pub use error::{Error, Result};
pub use fem::{assemble, element_matrices, peclet_guard, Coefficients, DiscreteField, ElementSystem, SparseSystem};
pub use manufactured::{h_convergence, SineProduct};
pub use mesh::{classify_boundary, edge_quadrature, BoundaryTag, Mesh, Point};
pub use norms::{ErrorNorms, ErrorRecord, ExactSolution};
pub use problem::{alpha_of_s, alpha_rate, Norm, Problem, RegularizedProblem};
pub use quadrature::QuadratureRule;
pub use solver::{solve_direct, solve_iterative, SolveReport, SolverKind, SolverOptions};
pub use sparse::CsrMatrix;
pub use sweep::{alpha_study, fit_rate, run_sweep, AlphaRow, Preset, RateFit, SolveContext, SweepConfig};
