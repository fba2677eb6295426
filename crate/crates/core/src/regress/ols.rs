use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::DesignMatrix;
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Ordinary least squares fit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OlsFit {
    pub labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub sigma2: f64,
    pub n: usize,
    pub p: usize,
}

impl OlsFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        row.iter().zip(&self.coefficients).map(|(x, b)| x * b).sum()
    }
}

/// Least squares through a Householder QR of `X`; the rank check and the
/// coefficient covariance both come from an SVD of the small `R` factor.
pub fn ols(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    let (n, p) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::Contract(format!("response has {} rows, design {n}", y.len())));
    }
    if p == 0 {
        return Err(Error::Contract("design matrix has no columns".into()));
    }
    if n <= p {
        return Err(Error::InsufficientData { needed: p, available: n });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("non-finite response value".into()));
    }

    let qr = x.matrix().clone().qr();
    let r = qr.r();
    let svd = r.clone().svd(false, true);
    let smax = svd.singular_values.max();
    let (jmin, smin) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, s)| if s < acc.1 { (j, s) } else { acc });
    if !(smax > 0.0) || smin <= RANK_TOLERANCE * smax {
        let v_t = svd.v_t.as_ref().expect("requested V");
        let null_dir = v_t.row(jmin);
        let peak = null_dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let column = (0..p)
            .rev()
            .find(|&j| null_dir[j].abs() >= 0.1 * peak)
            .unwrap_or(p - 1);
        return Err(Error::SingularDesign { column: x.labels()[column].clone() });
    }

    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, p).into_owned();
    let beta = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::SingularDesign { column: x.labels()[p - 1].clone() })?;

    let fitted_v = x.matrix() * &beta;
    let fitted: Vec<f64> = fitted_v.iter().copied().collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (n - p) as f64;

    // diag((X'X)^-1) = squared row norms of R^-1
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::SingularDesign { column: x.labels()[p - 1].clone() })?;
    let standard_errors = (0..p)
        .map(|j| (sigma2 * r_inv.row(j).norm_squared()).sqrt())
        .collect();

    Ok(OlsFit {
        labels: x.labels().to_vec(),
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        fitted,
        residuals,
        rss,
        sigma2,
        n,
        p,
    })
}

/// Greedy column screen in the given order: a column is kept when its
/// component orthogonal to the already-kept columns retains more than
/// `rel_tol` of its norm. Returns indices into `x`.
///
/// Earlier entries of `order` win, so listing a nested model's columns first
/// keeps them in preference to the extra ones.
pub fn independent_columns(x: &DesignMatrix, order: &[usize], rel_tol: f64) -> Vec<usize> {
    let n = x.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut kept = Vec::new();
    for &j in order {
        let col = x.matrix().column(j).into_owned();
        let norm0 = col.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = col;
        // two passes of Gram-Schmidt keep the projection accurate
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let rem = v.norm();
        if rem > rel_tol * norm0 {
            v /= rem;
            basis.push(v);
            kept.push(j);
        }
        if basis.len() == n {
            break;
        }
    }
    kept
}
