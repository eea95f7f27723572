use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Zero-fill incomplete LU factorization on the sparsity pattern of `A`.
/// `L` (unit diagonal, strictly lower part) and `U` share the CSR storage.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    factors: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.clone();
        let mut diag = vec![usize::MAX; n];
        for (i, d) in diag.iter_mut().enumerate() {
            let (cols, _) = lu.row(i);
            let k = cols.binary_search(&i).map_err(|_| Error::SingularMatrix { index: i })?;
            *d = lu.row_ptr[i] + k;
        }

        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (start, end) = (lu.row_ptr[i], lu.row_ptr[i + 1]);
            for p in start..end {
                pos[lu.col_idx[p]] = p;
            }
            for p in start..end {
                let k = lu.col_idx[p];
                if k >= i {
                    break;
                }
                let pivot = lu.values[diag[k]];
                let lik = lu.values[p] / pivot;
                lu.values[p] = lik;
                for q in diag[k] + 1..lu.row_ptr[k + 1] {
                    let j = lu.col_idx[q];
                    let target = pos[j];
                    if target != usize::MAX {
                        lu.values[target] -= lik * lu.values[q];
                    }
                }
            }
            for p in start..end {
                pos[lu.col_idx[p]] = usize::MAX;
            }
            let d = lu.values[diag[i]];
            if d == 0.0 || !d.is_finite() {
                return Err(Error::SingularMatrix { index: i });
            }
        }
        Ok(Self { factors: lu, diag })
    }

    /// Overwrites `x` with `(LU)^{-1} x`.
    pub fn apply_in_place(&self, x: &mut [f64]) {
        let lu = &self.factors;
        for i in 0..lu.n {
            let mut s = x[i];
            for p in lu.row_ptr[i]..self.diag[i] {
                s -= lu.values[p] * x[lu.col_idx[p]];
            }
            x[i] = s;
        }
        for i in (0..lu.n).rev() {
            let mut s = x[i];
            for p in self.diag[i] + 1..lu.row_ptr[i + 1] {
                s -= lu.values[p] * x[lu.col_idx[p]];
            }
            x[i] = s / lu.values[self.diag[i]];
        }
    }
}
