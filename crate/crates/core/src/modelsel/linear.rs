use nalgebra::DMatrix;

use super::ModelSelError;
use crate::matrix::Matrix;

/// Ordinary least squares with an intercept, one coefficient column per target.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    /// `(p + 1) × t`; row 0 is the intercept.
    pub coef: Matrix,
}

impl LinearModel {
    pub fn fit(x: &Matrix, y: &Matrix) -> Result<LinearModel, ModelSelError> {
        if x.rows() != y.rows() || x.rows() <= x.cols() {
            return Err(ModelSelError::Shape(format!("OLS needs more rows than columns ({}x{})", x.rows(), x.cols())));
        }
        let (n, p) = (x.rows(), x.cols());
        let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x.get(i, j - 1) });
        let rhs = DMatrix::from_fn(n, y.cols(), |i, j| y.get(i, j));
        let svd = design.svd(true, true);
        let beta = svd.solve(&rhs, 1e-12).map_err(|e| ModelSelError::Params(e.to_string()))?;
        let coef = Matrix::from_row_major(p + 1, y.cols(), (0..(p + 1) * y.cols()).map(|k| beta[(k / y.cols(), k % y.cols())]).collect());
        Ok(LinearModel { coef })
    }

    pub fn predict(&self, x: &Matrix) -> Matrix {
        let t = self.coef.cols();
        let mut out = Matrix::zeros(x.rows(), t);
        for i in 0..x.rows() {
            for j in 0..t {
                let mut v = self.coef.get(0, j);
                for (k, xv) in x.row(i).iter().enumerate() {
                    v += self.coef.get(k + 1, j) * xv;
                }
                out.set(i, j, v);
            }
        }
        out
    }
}
