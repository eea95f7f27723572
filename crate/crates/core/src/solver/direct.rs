use faer::prelude::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use super::{SolveReport, SolverKind};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub const DIRECT_RESIDUAL_LIMIT: f64 = 1e-10;

const MAX_REFINEMENT_STEPS: usize = 3;

/// Sparse LU (COLAMD ordering, partial pivoting) followed by up to three
/// steps of iterative refinement when the residual is above the limit.
///
/// faer is built without rayon, so the factorization is sequential and its
/// output is reproducible bit for bit.
pub fn solve_direct(matrix: &CsrMatrix, rhs: &[f64]) -> Result<SolveReport> {
    let n = matrix.n;
    assert_eq!(rhs.len(), n);
    let mut triplets = Vec::with_capacity(matrix.nnz());
    for i in 0..n {
        let (cols, vals) = matrix.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            triplets.push(Triplet::new(i, j, v));
        }
    }
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Io(format!("sparse matrix creation failed: {e:?}")))?;
    let lu = a.sp_lu().map_err(|e| match e {
        LuError::SymbolicSingular { index } => Error::SingularMatrix { index },
        LuError::Generic(e) => Error::Io(format!("LU factorization failed: {e:?}")),
    })?;

    let b = Col::<f64>::from_fn(n, |i| rhs[i]);
    let x = lu.solve(&b);
    let mut solution: Vec<f64> = (0..n).map(|i| x[i]).collect();
    if let Some(index) = solution.iter().position(|v| !v.is_finite()) {
        return Err(Error::SingularMatrix { index });
    }

    let mut residual = matrix.relative_residual(&solution, rhs);
    for _ in 0..MAX_REFINEMENT_STEPS {
        if residual <= DIRECT_RESIDUAL_LIMIT {
            break;
        }
        let ax = matrix.mul(&solution);
        let r = Col::<f64>::from_fn(n, |i| rhs[i] - ax[i]);
        let dx = lu.solve(&r);
        for (i, xi) in solution.iter_mut().enumerate() {
            *xi += dx[i];
        }
        residual = matrix.relative_residual(&solution, rhs);
    }
    if residual.is_nan() || residual > DIRECT_RESIDUAL_LIMIT {
        return Err(Error::InaccurateSolve {
            residual,
            limit: DIRECT_RESIDUAL_LIMIT,
        });
    }
    Ok(SolveReport {
        solution,
        residual,
        iterations: 0,
        method: SolverKind::Direct,
    })
}
