//! L1-penalized least squares by cyclic coordinate descent.
//!
//! Columns are standardized to zero mean and unit variance and the response
//! is centered, so the intercept is never penalized. The solver works on the
//! standardized Gram matrix, which lets cross-validation form each training
//! fold's problem by subtracting the held-out block's cross-products from the
//! totals instead of rescanning the data.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::DesignMatrix;
use crate::error::{Error, Result};

/// Stop once the largest coefficient change in a sweep is below this.
pub const CD_TOLERANCE: f64 = 1e-8;
/// Sweep cap; hitting it returns the current iterate with `converged = false`.
pub const CD_MAX_SWEEPS: usize = 10_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LassoFit {
    pub intercept: f64,
    /// Original-scale coefficients, one per design column.
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub active_set: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
}

impl LassoFit {
    pub fn predict_row(&self, row: impl IntoIterator<Item = f64>) -> f64 {
        self.intercept
            + row
                .into_iter()
                .zip(&self.coefficients)
                .map(|(x, b)| x * b)
                .sum::<f64>()
    }
}

/// Raw cross-products of a block of rows, taken after subtracting `shift`
/// from every column (and `y_shift` from the response).
#[derive(Clone)]
struct Moments {
    n: f64,
    sx: DVector<f64>,
    sy: f64,
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
}

impl Moments {
    fn of_rows(xc: &DMatrix<f64>, yc: &DVector<f64>, start: usize, len: usize) -> Self {
        let xb = xc.rows(start, len);
        let yb = yc.rows(start, len);
        Moments {
            n: len as f64,
            sx: xb.row_sum().transpose(),
            sy: yb.sum(),
            xtx: xb.tr_mul(&xb),
            xty: xb.tr_mul(&yb),
        }
    }

    fn minus(&self, other: &Moments) -> Moments {
        Moments {
            n: self.n - other.n,
            sx: &self.sx - &other.sx,
            sy: self.sy - other.sy,
            xtx: &self.xtx - &other.xtx,
            xty: &self.xty - &other.xty,
        }
    }

    fn add(&mut self, other: &Moments) {
        self.n += other.n;
        self.sx += &other.sx;
        self.sy += other.sy;
        self.xtx += &other.xtx;
        self.xty += &other.xty;
    }
}

/// Standardized problem: minimize `½βᵀGβ − cᵀβ + λ‖β‖₁`.
struct Problem {
    gram: DMatrix<f64>,
    c: DVector<f64>,
    means: Vec<f64>,
    sds: Vec<f64>,
    y_mean: f64,
}

impl Problem {
    fn from_moments(m: &Moments, shift: &[f64], y_shift: f64) -> Problem {
        let p = m.sx.len();
        let mean: Vec<f64> = m.sx.iter().map(|s| s / m.n).collect();
        let ym = m.sy / m.n;
        let mut sds = vec![0.0; p];
        for j in 0..p {
            let var = m.xtx[(j, j)] / m.n - mean[j] * mean[j];
            let scale = m.xtx[(j, j)] / m.n;
            if var > 1e-12 * scale.max(f64::MIN_POSITIVE) && var > 0.0 {
                sds[j] = var.sqrt();
            }
        }
        let mut gram = DMatrix::zeros(p, p);
        let mut c = DVector::zeros(p);
        for k in 0..p {
            for j in 0..p {
                if sds[j] > 0.0 && sds[k] > 0.0 {
                    let cov = m.xtx[(j, k)] / m.n - mean[j] * mean[k];
                    gram[(j, k)] = cov / (sds[j] * sds[k]);
                }
            }
            if sds[k] > 0.0 {
                c[k] = (m.xty[k] / m.n - mean[k] * ym) / sds[k];
            } else {
                // inert column: keeps its coefficient at zero
                gram[(k, k)] = 1.0;
            }
        }
        Problem {
            gram,
            c,
            means: mean.iter().zip(shift).map(|(m, s)| m + s).collect(),
            sds,
            y_mean: ym + y_shift,
        }
    }

    fn lambda_max(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn unscale(&self, beta: &DVector<f64>, lambda: f64, iterations: usize, converged: bool) -> LassoFit {
        let coefficients: Vec<f64> = beta
            .iter()
            .zip(&self.sds)
            .map(|(b, s)| if *s > 0.0 && *b != 0.0 { b / s } else { 0.0 })
            .collect();
        let intercept = self.y_mean
            - coefficients
                .iter()
                .zip(&self.means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        let active_set = coefficients
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect();
        LassoFit { intercept, coefficients, lambda, active_set, iterations, converged }
    }
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

/// Cyclic coordinate descent from the warm start in `beta`.
fn coordinate_descent(
    prob: &Problem,
    lambda: f64,
    beta: &mut DVector<f64>,
    mut on_sweep: impl FnMut(&DVector<f64>),
) -> (usize, bool) {
    let p = beta.len();
    let mut grad = &prob.c - &prob.gram * &*beta;
    for sweep in 1..=CD_MAX_SWEEPS {
        let mut max_delta = 0.0f64;
        for j in 0..p {
            let gjj = prob.gram[(j, j)];
            let z = grad[j] + gjj * beta[j];
            let updated = soft_threshold(z, lambda) / gjj;
            let delta = updated - beta[j];
            if delta != 0.0 {
                beta[j] = updated;
                grad.axpy(-delta, &prob.gram.column(j), 1.0);
                max_delta = max_delta.max(delta.abs());
            }
        }
        on_sweep(beta);
        if max_delta < CD_TOLERANCE {
            return (sweep, true);
        }
    }
    (CD_MAX_SWEEPS, false)
}

struct Centered {
    x: DMatrix<f64>,
    y: DVector<f64>,
    shift: Vec<f64>,
    y_shift: f64,
}

fn centered(x: &DesignMatrix, y: &[f64]) -> Result<Centered> {
    if y.len() != x.nrows() {
        return Err(Error::Contract(format!("response has {} rows, design {}", y.len(), x.nrows())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("non-finite response value".into()));
    }
    let n = x.nrows() as f64;
    let shift: Vec<f64> = x.matrix().column_iter().map(|c| c.sum() / n).collect();
    let y_shift = y.iter().sum::<f64>() / n;
    let mut xc = x.matrix().clone();
    for (j, mut col) in xc.column_iter_mut().enumerate() {
        col.add_scalar_mut(-shift[j]);
    }
    let yc = DVector::from_iterator(y.len(), y.iter().map(|v| v - y_shift));
    Ok(Centered { x: xc, y: yc, shift, y_shift })
}

fn full_problem(x: &DesignMatrix, y: &[f64]) -> Result<Problem> {
    let c = centered(x, y)?;
    let m = Moments::of_rows(&c.x, &c.y, 0, x.nrows());
    Ok(Problem::from_moments(&m, &c.shift, c.y_shift))
}

/// LASSO fit at a single penalty.
pub fn lasso(x: &DesignMatrix, y: &[f64], lambda: f64) -> Result<LassoFit> {
    if !(lambda >= 0.0) {
        return Err(Error::Contract(format!("lambda must be non-negative, got {lambda}")));
    }
    let prob = full_problem(x, y)?;
    let mut beta = DVector::zeros(x.ncols());
    let (iterations, converged) = coordinate_descent(&prob, lambda, &mut beta, |_| {});
    Ok(prob.unscale(&beta, lambda, iterations, converged))
}

/// `count` penalties spaced geometrically from `max_j |x_jᵀy|/n` (standardized
/// columns, centered response) down to `min_ratio` times that value.
pub fn lambda_grid(x: &DesignMatrix, y: &[f64], count: usize, min_ratio: f64) -> Result<Vec<f64>> {
    if count == 0 || !(min_ratio > 0.0 && min_ratio < 1.0) {
        return Err(Error::Contract("lambda grid needs count >= 1 and 0 < min_ratio < 1".into()));
    }
    let top = full_problem(x, y)?.lambda_max();
    if count == 1 {
        return Ok(vec![top]);
    }
    let step = min_ratio.ln() / (count - 1) as f64;
    Ok((0..count).map(|i| top * (step * i as f64).exp()).collect())
}

/// Choose the penalty by contiguous-block cross-validation and refit on all
/// rows. Ties go to the larger penalty.
pub fn lasso_path_cv(
    x: &DesignMatrix,
    y: &[f64],
    folds: usize,
    lambdas: &[f64],
) -> Result<(f64, LassoFit)> {
    let n = x.nrows();
    if folds < 2 || folds > n {
        return Err(Error::Contract(format!("need 2 <= folds <= {n}, got {folds}")));
    }
    if lambdas.is_empty() {
        return Err(Error::Contract("empty lambda grid".into()));
    }
    if lambdas.iter().any(|l| !(*l >= 0.0)) || lambdas.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Contract("lambda grid must be non-negative and descending".into()));
    }

    let c = centered(x, y)?;
    let bounds: Vec<(usize, usize)> = (0..folds)
        .map(|f| {
            let s = f * n / folds;
            (s, (f + 1) * n / folds - s)
        })
        .collect();
    let fold_moments: Vec<Moments> = bounds
        .iter()
        .map(|&(s, len)| Moments::of_rows(&c.x, &c.y, s, len))
        .collect();
    let mut total = fold_moments[0].clone();
    for m in &fold_moments[1..] {
        total.add(m);
    }

    let mut sse = vec![0.0; lambdas.len()];
    for (f, &(start, len)) in bounds.iter().enumerate() {
        let prob = Problem::from_moments(&total.minus(&fold_moments[f]), &c.shift, c.y_shift);
        let mut beta = DVector::zeros(x.ncols());
        for (li, &lambda) in lambdas.iter().enumerate() {
            let (it, conv) = coordinate_descent(&prob, lambda, &mut beta, |_| {});
            let fit = prob.unscale(&beta, lambda, it, conv);
            for i in start..start + len {
                let pred = fit.intercept
                    + fit
                        .active_set
                        .iter()
                        .map(|&j| fit.coefficients[j] * x.matrix()[(i, j)])
                        .sum::<f64>();
                sse[li] += (y[i] - pred).powi(2);
            }
        }
    }

    let mut best = 0;
    for li in 1..lambdas.len() {
        if sse[li] < sse[best] {
            best = li;
        }
    }
    let chosen = lambdas[best];
    let fit = lasso(x, y, chosen)?;
    Ok((chosen, fit))
}
