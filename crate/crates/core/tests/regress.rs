mod common;

use common::*;
use seaice_core::regress::{f_test_nested, f_upper_tail, lambda_grid, lasso_path_cv, ols, DesignMatrix};

fn design(cols: &[Vec<f64>]) -> DesignMatrix {
    DesignMatrix::from_columns(cols, (0..cols.len()).map(|j| format!("x{j}")).collect()).unwrap()
}

#[test]
fn f_tail_matches_quadrature() {
    for &(d1, d2) in &[(2.0, 2.0), (2.0, 7.0), (6.0, 40.0), (12.0, 300.0), (30.0, 5000.0)] {
        for &f in &[0.01, 0.3, 1.0, 1.7, 3.0, 9.0] {
            let (a, b) = (f_upper_tail(f, d1, d2), f_tail_oracle(f, d1, d2));
            assert!((a - b).abs() < 1e-10, "F({d1},{d2}) at {f}: {a} vs {b}");
        }
    }
}

#[test]
fn f_test_is_uniform_under_the_null() {
    let mut r = rng(11);
    let n = 200;
    let mut p = Vec::new();
    for _ in 0..1000 {
        let cols: Vec<Vec<f64>> = (0..5).map(|_| normals(&mut r, n)).collect();
        let y = normals(&mut r, n);
        let null = ols(&design(&cols[..2]).with_intercept(), &y).unwrap();
        let full = ols(&design(&cols).with_intercept(), &y).unwrap();
        p.push(f_test_nested(&null, &full, n).unwrap().p_value);
    }
    let ks = ks_uniform(&p);
    assert!(ks < ks_critical_1pct(p.len()), "KS {ks}");
}

#[test]
fn cv_leaves_pure_noise_nearly_empty() {
    let mut r = rng(12);
    let (n, p) = (500, 20);
    let mut sparse = 0;
    for _ in 0..100 {
        let x = design(&(0..p).map(|_| normals(&mut r, n)).collect::<Vec<_>>());
        let y = normals(&mut r, n);
        let grid = lambda_grid(&x, &y, 50, 1e-3).unwrap();
        let (_, fit) = lasso_path_cv(&x, &y, 5, &grid).unwrap();
        // near-empty: at most a tenth of the columns
        if fit.active_set.len() <= 2 {
            sparse += 1;
        }
    }
    assert!(sparse >= 90, "{sparse}/100");
}

#[test]
fn cv_keeps_the_true_support() {
    let mut r = rng(13);
    let (n, p) = (2000, 50);
    let mut covered = 0;
    for _ in 0..100 {
        let cols: Vec<Vec<f64>> = (0..p).map(|_| normals(&mut r, n)).collect();
        let e = normals(&mut r, n);
        let y: Vec<f64> = (0..n).map(|i| 0.3 * cols[3][i] - 0.2 * cols[17][i] + 0.25 * cols[41][i] + e[i]).collect();
        let x = design(&cols);
        let grid = lambda_grid(&x, &y, 50, 1e-3).unwrap();
        let (_, fit) = lasso_path_cv(&x, &y, 5, &grid).unwrap();
        if [3, 17, 41].iter().all(|j| fit.active_set.contains(j)) {
            covered += 1;
        }
    }
    assert!(covered >= 90, "{covered}/100");
}
