use super::{Ilu0, SolveReport, SolverKind};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub const GMRES_RESTART: usize = 50;

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Restarted GMRES(50) with right ILU(0) preconditioning.
///
/// Succeeds when `||b - Ax||_inf / ||b||_inf <= tol`. Hitting `max_iter` inner
/// iterations, or a restart cycle that fails to reduce the residual, returns
/// `Error::NotConverged` carrying the best residual seen.
pub fn solve_iterative(matrix: &CsrMatrix, rhs: &[f64], tol: f64, max_iter: usize) -> Result<SolveReport> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
        });
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter {
            name: "max_iter",
            value: 0.0,
        });
    }
    let n = matrix.n;
    let precond = Ilu0::new(matrix)?;
    let b_inf = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if b_inf == 0.0 {
        return Ok(SolveReport {
            solution: vec![0.0; n],
            residual: 0.0,
            iterations: 0,
            method: SolverKind::Gmres,
        });
    }
    // ||r||_inf <= ||r||_2, so this inner target guarantees the inf-norm test.
    let target = tol * b_inf;
    let m = GMRES_RESTART.min(n.max(1));

    let mut x = vec![0.0; n];
    let mut residual = 1.0;
    let mut iterations = 0;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut precond_basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut hess = vec![vec![0.0; m]; m + 1];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut w = vec![0.0; n];

    loop {
        let ax = matrix.mul(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm2(&r);
        if beta == 0.0 {
            residual = 0.0;
            break;
        }

        basis.clear();
        precond_basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;

        let mut cols = 0;
        for j in 0..m {
            let mut z = basis[j].clone();
            precond.apply_in_place(&mut z);
            matrix.matvec(&z, &mut w);
            precond_basis.push(z);

            for (i, v) in basis.iter().enumerate() {
                let h = dot(&w, v);
                hess[i][j] = h;
                w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= h * vk);
            }
            let h_next = norm2(&w);
            hess[j + 1][j] = h_next;

            for i in 0..j {
                let (a, b) = (hess[i][j], hess[i + 1][j]);
                hess[i][j] = cs[i] * a + sn[i] * b;
                hess[i + 1][j] = -sn[i] * a + cs[i] * b;
            }
            let (a, b) = (hess[j][j], hess[j + 1][j]);
            let d = a.hypot(b);
            cs[j] = a / d;
            sn[j] = b / d;
            hess[j][j] = d;
            hess[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];

            cols = j + 1;
            iterations += 1;
            if g[j + 1].abs() <= target || iterations >= max_iter || h_next == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }

        let mut y = vec![0.0; cols];
        for i in (0..cols).rev() {
            let s: f64 = (i + 1..cols).map(|k| hess[i][k] * y[k]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        for (yi, z) in y.iter().zip(&precond_basis) {
            x.iter_mut().zip(z).for_each(|(xk, zk)| *xk += yi * zk);
        }

        let previous = residual;
        residual = matrix.relative_residual(&x, rhs);
        if residual <= tol {
            break;
        }
        if iterations >= max_iter || residual.is_nan() || residual >= previous {
            return Err(Error::NotConverged {
                iterations,
                best_residual: residual.min(previous),
            });
        }
    }

    Ok(SolveReport {
        solution: x,
        residual,
        iterations,
        method: SolverKind::Gmres,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_converges_in_one_iteration() {
        let b = vec![3.0, -1.0, 2.0];
        let rep = solve_iterative(&CsrMatrix::identity(3), &b, 1e-10, 10).unwrap();
        assert_eq!(rep.iterations, 1);
        for (x, b) in rep.solution.iter().zip(&b) {
            assert!((x - b).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_system() {
        let n = 40;
        let a = CsrMatrix::from_triplets(n, (0..n).map(|i| (i, i, (i + 1) as f64)).collect());
        let b = vec![1.0; n];
        let rep = solve_iterative(&a, &b, 1e-12, 100).unwrap();
        assert!(rep.residual <= 1e-12);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn nonsymmetric_convection_diffusion_1d() {
        let n = 200;
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, 2.0));
            if i > 0 {
                entries.push((i, i - 1, -1.6));
            }
            if i + 1 < n {
                entries.push((i, i + 1, -0.4));
            }
            if i + 7 < n {
                entries.push((i, i + 7, 0.05));
            }
        }
        let a = CsrMatrix::from_triplets(n, entries);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let rep = solve_iterative(&a, &b, 1e-11, 1000).unwrap();
        assert!(a.relative_residual(&rep.solution, &b) <= 1e-11);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let n = 300;
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, 1e-3));
            entries.push((i, (i + 1) % n, 1.0));
            entries.push((i, (i + 150) % n, 1.0));
        }
        let a = CsrMatrix::from_triplets(n, entries);
        let b = vec![1.0; n];
        match solve_iterative(&a, &b, 1e-12, 3) {
            Err(Error::NotConverged {
                iterations,
                best_residual,
            }) => {
                assert!(iterations <= 3);
                assert!(best_residual > 1e-12);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_controls() {
        let a = CsrMatrix::identity(2);
        assert!(solve_iterative(&a, &[1.0, 1.0], 1e-3, 10).is_err());
        assert!(solve_iterative(&a, &[1.0, 1.0], 1e-8, 0).is_err());
    }
}
