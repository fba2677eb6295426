//! Least-squares machinery shared by the harmonic fit, the memory
//! diagnostics and the Granger tests.

mod ftest;
mod lasso;
mod ols;

pub use ftest::{f_test_nested, f_upper_tail, FTestResult};
pub use lasso::{lambda_grid, lasso, lasso_path_cv, LassoFit, CD_MAX_SWEEPS, CD_TOLERANCE};
pub use ols::{independent_columns, ols, OlsFit, RANK_TOLERANCE};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense regressor matrix with one label per column.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    matrix: DMatrix<f64>,
    labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(matrix: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::Contract("design matrix has no rows".into()));
        }
        if labels.len() != matrix.ncols() {
            return Err(Error::Contract(format!(
                "{} labels for {} columns",
                labels.len(),
                matrix.ncols()
            )));
        }
        if let Some(pos) = matrix.iter().position(|v| !v.is_finite()) {
            let col = pos / matrix.nrows();
            return Err(Error::Contract(format!("non-finite entry in column `{}`", labels[col])));
        }
        Ok(DesignMatrix { matrix, labels })
    }

    /// Build from column vectors of equal length.
    pub fn from_columns(columns: &[Vec<f64>], labels: Vec<String>) -> Result<Self> {
        let nrows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != nrows) {
            return Err(Error::Contract("columns differ in length".into()));
        }
        let matrix = DMatrix::from_fn(nrows, columns.len(), |i, j| columns[j][i]);
        Self::new(matrix, labels)
    }

    /// Prepend a column of ones labelled `intercept`.
    pub fn with_intercept(&self) -> DesignMatrix {
        let n = self.nrows();
        let matrix = self.matrix.clone().insert_column(0, 1.0);
        debug_assert_eq!(matrix.nrows(), n);
        let mut labels = Vec::with_capacity(self.labels.len() + 1);
        labels.push("intercept".to_string());
        labels.extend(self.labels.iter().cloned());
        DesignMatrix { matrix, labels }
    }

    /// Intercept-only design with `n` rows.
    pub fn intercept_only(n: usize) -> Result<DesignMatrix> {
        Self::new(DMatrix::from_element(n, 1, 1.0), vec!["intercept".into()])
    }

    /// Columns `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> DesignMatrix {
        let matrix = self.matrix.select_columns(indices);
        let labels = indices.iter().map(|&j| self.labels[j].clone()).collect();
        DesignMatrix { matrix, labels }
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &DesignMatrix) -> Result<DesignMatrix> {
        if self.nrows() != other.nrows() {
            return Err(Error::Contract("row counts differ".into()));
        }
        let p = self.ncols();
        let matrix = DMatrix::from_fn(self.nrows(), p + other.ncols(), |i, j| {
            if j < p {
                self.matrix[(i, j)]
            } else {
                other.matrix[(i, j - p)]
            }
        });
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(DesignMatrix { matrix, labels })
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.column(j).iter().copied().collect()
    }
}
