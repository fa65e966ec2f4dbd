//! Dense row-major matrices and Householder least squares.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("design matrix is rank deficient at column {0}")]
    RankDeficient(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}-vector times {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn transpose_mul_vec(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "transpose of {}x{} times {}-vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(out)
    }
}

/// Least-squares solution of `X b = y` via Householder QR.
#[derive(Debug, Clone)]
pub struct QrSolution {
    pub coefficients: Vec<f64>,
    /// Inverse of the `p x p` upper-triangular factor `R`; `(X'X)^-1 = R^-1 R^-T`.
    pub r_inv: Matrix,
}

impl QrSolution {
    /// Diagonal of `(X'X)^-1`.
    pub fn xtx_inv_diag(&self) -> Vec<f64> {
        let p = self.r_inv.rows();
        (0..p)
            .map(|i| (i..p).map(|j| self.r_inv.get(i, j).powi(2)).sum())
            .collect()
    }
}

/// Relative size below which a diagonal entry of `R` marks a dependent column.
const RANK_TOL: f64 = 1e-10;

pub fn least_squares_qr(x: &Matrix, y: &[f64]) -> Result<QrSolution, LinalgError> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "{n} rows but {} responses",
            y.len()
        )));
    }
    if n < p {
        return Err(LinalgError::DimensionMismatch(format!("{n} rows for {p} columns")));
    }
    let mut a = x.clone();
    let mut qty = y.to_vec();
    let col_norms: Vec<f64> = (0..p)
        .map(|j| x.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    for k in 0..p {
        let norm = (k..n).map(|i| a.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm <= RANK_TOL * col_norms[k].max(f64::MIN_POSITIVE) {
            return Err(LinalgError::RankDeficient(k));
        }
        let alpha = if a.get(k, k) > 0.0 { -norm } else { norm };
        // v = a[k.., k] - alpha e_1, stored in place below the diagonal
        let mut v: Vec<f64> = (k..n).map(|i| a.get(i, k)).collect();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|t| t * t).sum();
        if vtv > 0.0 {
            for j in k..p {
                let dot: f64 = (k..n).map(|i| v[i - k] * a.get(i, j)).sum();
                let s = 2.0 * dot / vtv;
                for i in k..n {
                    a.set(i, j, a.get(i, j) - s * v[i - k]);
                }
            }
            let dot: f64 = (k..n).map(|i| v[i - k] * qty[i]).sum();
            let s = 2.0 * dot / vtv;
            for i in k..n {
                qty[i] -= s * v[i - k];
            }
        }
    }

    let mut r = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            r.set(i, j, a.get(i, j));
        }
    }
    let coefficients = back_substitute(&r, &qty[..p]);

    // columns of R^-1 from R e_j
    let mut r_inv = Matrix::zeros(p, p);
    for j in 0..p {
        let mut e = vec![0.0; p];
        e[j] = 1.0;
        let col = back_substitute(&r, &e);
        for (i, v) in col.into_iter().enumerate() {
            r_inv.set(i, j, v);
        }
    }
    Ok(QrSolution { coefficients, r_inv })
}

fn back_substitute(r: &Matrix, b: &[f64]) -> Vec<f64> {
    let p = r.cols();
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = ((i + 1)..p).map(|j| r.get(i, j) * x[j]).sum();
        x[i] = (b[i] - s) / r.get(i, i);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0], vec![1.0, 3.0]]).unwrap();
        let sol = least_squares_qr(&x, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-14);
        assert!((sol.coefficients[1] - 2.0).abs() < 1e-14);
        // (X'X)^-1 for x = 0..3 is [[0.7, -0.3], [-0.3, 0.2]]
        let d = sol.xtx_inv_diag();
        assert!((d[0] - 0.7).abs() < 1e-14 && (d[1] - 0.2).abs() < 1e-14);
    }

    #[test]
    fn dependent_column_detected() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(
            least_squares_qr(&x, &[1.0, 2.0, 3.0]).unwrap_err(),
            LinalgError::RankDeficient(1)
        );
    }

    #[test]
    fn shape_checks() {
        let x = Matrix::zeros(2, 3);
        assert!(matches!(
            least_squares_qr(&x, &[0.0, 0.0]),
            Err(LinalgError::DimensionMismatch(_))
        ));
        assert!(Matrix::from_row_major(2, 2, vec![1.0]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
