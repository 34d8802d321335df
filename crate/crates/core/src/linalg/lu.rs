use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of their row scale are treated as zero.
const PIVOT_TOL: f64 = 1e-14;

/// LU factorization with scaled partial pivoting, `P a = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut scale: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[(i, j)].norm()).fold(0.0, f64::max))
            .collect();
        if let Some(row) = scale.iter().position(|&s| s == 0.0) {
            return Err(Error::Singular {
                column: row,
                pivot: 0.0,
            });
        }

        for k in 0..n {
            let (piv, rel) = (k..n)
                .map(|i| (i, lu[(i, k)].norm() / scale[i]))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty pivot range");
            if rel < PIVOT_TOL {
                return Err(Error::Singular {
                    column: k,
                    pivot: lu[(piv, k)].norm(),
                });
            }
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
                scale.swap(k, piv);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Solves `a X = b` column by column.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(b.rows(), n);
        let mut out = ComplexMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<Complex64> = (0..n).map(|i| b[(i, j)]).collect();
            for (i, v) in self.solve(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

/// Solves `a x = b` with one step of iterative refinement.
pub fn solve_linear(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let lu = Lu::factor(a)?;
    let mut x = lu.solve(b);
    let ax = a.matvec(&x);
    let residual: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let dx = lu.solve(&residual);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    Ok(x)
}
