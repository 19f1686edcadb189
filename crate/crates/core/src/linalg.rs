//! Dense exact linear algebra over the coefficient field. Dimensions
//! here are tiny (basis sizes squared), so plain Gaussian elimination
//! is all that is needed.

use crate::error::EngineError;
use crate::scalar::{Scalar, VarSet};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zero(params: &VarSet, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![vec![Scalar::zero(params.clone()); cols]; rows],
        }
    }

    pub fn identity(params: &VarSet, n: usize) -> Matrix {
        let mut m = Matrix::zero(params, n, n);
        for i in 0..n {
            m.data[i][i] = Scalar::one(params.clone());
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<Scalar>>) -> Matrix {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        Matrix { rows, cols, data }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let params = self.data[0][0].vars().clone();
        let mut out = Matrix::zero(&params, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = self.data[i][k].mul(&other.data[k][j]);
                    out.data[i][j] = out.data[i][j].add(&p);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i][j] = out.data[i][j].add(&other.data[i][j]);
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut out = self.clone();
        for row in &mut out.data {
            for v in row.iter_mut() {
                *v = v.mul(s);
            }
        }
        out
    }

    pub fn neg(&self) -> Matrix {
        let mut out = self.clone();
        for row in &mut out.data {
            for v in row.iter_mut() {
                *v = v.neg();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|v| v.is_zero()))
    }

    /// Reduced row echelon form; returns (rref, pivot columns in the
    /// given column order). `col_order` lets callers steer which columns
    /// become basic variables.
    pub fn rref_with_order(&self, col_order: &[usize]) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for &c in col_order {
            if row >= m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.data[r][c].is_zero()) else {
                continue;
            };
            m.data.swap(row, p);
            let inv = m.data[row][c].inv().expect("pivot nonzero");
            for v in m.data[row].iter_mut() {
                *v = v.mul(&inv);
            }
            for r in 0..m.rows {
                if r != row && !m.data[r][c].is_zero() {
                    let f = m.data[r][c].clone();
                    for j in 0..m.cols {
                        let s = m.data[row][j].mul(&f);
                        m.data[r][j] = m.data[r][j].sub(&s);
                    }
                }
            }
            pivots.push(c);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_with_order(&order)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the right kernel {x : Mx = 0}.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let params = if self.rows > 0 && self.cols > 0 {
            self.data[0][0].vars().clone()
        } else {
            return Vec::new();
        };
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(params.clone()); self.cols];
            v[free] = Scalar::one(params.clone());
            for (prow, &pc) in pivots.iter().enumerate() {
                v[pc] = r.data[prow][free].neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solves M x = b, preferring the earliest columns (in `col_order`)
    /// as basic variables and zeroing the free ones. Returns None when
    /// inconsistent.
    pub fn solve_with_order(&self, b: &[Scalar], col_order: &[usize]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let params = b
            .first()
            .map(|s| s.vars().clone())
            .unwrap_or_else(|| self.data[0][0].vars().clone());
        let mut aug = self.clone();
        for (i, row) in aug.data.iter_mut().enumerate() {
            row.push(b[i].clone());
        }
        aug.cols += 1;
        let (r, pivots) = aug.rref_with_order(col_order);
        // Inconsistent iff a pivot lands in the appended column.
        for row in &r.data {
            if row[..self.cols].iter().all(|v| v.is_zero()) && !row[self.cols].is_zero() {
                return None;
            }
        }
        let mut x = vec![Scalar::zero(params.clone()); self.cols];
        for (prow, &pc) in pivots.iter().enumerate() {
            if pc < self.cols {
                x[pc] = r.data[prow][self.cols].clone();
            }
        }
        Some(x)
    }

    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.solve_with_order(b, &order)
    }

    pub fn inverse(&self) -> Result<Matrix, EngineError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let params = self.data[0][0].vars().clone();
        let mut aug = self.clone();
        for (i, row) in aug.data.iter_mut().enumerate() {
            for j in 0..n {
                row.push(if i == j {
                    Scalar::one(params.clone())
                } else {
                    Scalar::zero(params.clone())
                });
            }
        }
        aug.cols = 2 * n;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return Err(EngineError::InvalidSpec("matrix is singular".to_string()));
        }
        let data = r.data.into_iter().map(|row| row[n..].to_vec()).collect();
        Ok(Matrix {
            rows: n,
            cols: n,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> VarSet {
        VarSet::new(vec!["q"])
    }

    #[test]
    fn kernel_and_rank() {
        let p = params();
        let q = Scalar::var(p.clone(), 0);
        // [1 q; q q^2] has rank 1, kernel spanned by (-q, 1)
        let m = Matrix::from_rows(vec![
            vec![Scalar::one(p.clone()), q.clone()],
            vec![q.clone(), q.mul(&q)],
        ]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], q.neg());
        assert!(k[0][1].is_one());
    }

    #[test]
    fn inverse_roundtrip() {
        let p = params();
        let q = Scalar::var(p.clone(), 0);
        let m = Matrix::from_rows(vec![
            vec![Scalar::one(p.clone()), q.clone()],
            vec![Scalar::zero(p.clone()), q.clone()],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&p, 2));
    }
}
