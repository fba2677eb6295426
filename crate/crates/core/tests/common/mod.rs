#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use seaice_core::ingest::{CalendarDate, DailySeries, Units};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn day0() -> CalendarDate {
    CalendarDate::new(1950, 1, 1).unwrap()
}

pub fn series(values: Vec<f64>) -> DailySeries {
    DailySeries::from_values(day0(), values, Units::Index).unwrap()
}

pub fn ar1(phi: f64, n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let e = normals(rng, n);
    let mut x = vec![0.0; n];
    x[0] = e[0];
    for t in 1..n {
        x[t] = phi * x[t - 1] + e[t];
    }
    x
}

/// Fractional Gaussian noise by circulant embedding (Davies and Harte).
/// The output has unit variance and autocovariance
/// `½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})` exactly.
pub fn fgn(h: f64, n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let gamma = |k: f64| 0.5 * ((k + 1.0).powf(2.0 * h) - 2.0 * k.powf(2.0 * h) + (k - 1.0).abs().powf(2.0 * h));
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let k = if j <= n { j } else { m - j };
            Complex::new(gamma(k as f64), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let lambda: Vec<f64> = row
        .iter()
        .map(|c| {
            assert!(c.re > -1e-8, "circulant embedding is not non-negative definite");
            c.re.max(0.0)
        })
        .collect();

    let mf = m as f64;
    let mut z = vec![Complex::new(0.0, 0.0); m];
    z[0] = Complex::new((lambda[0] / mf).sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
    z[n] = Complex::new((lambda[n] / mf).sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0);
    for k in 1..n {
        let s = (lambda[k] / (2.0 * mf)).sqrt();
        let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
        z[k] = Complex::new(s * a, s * b);
        z[m - k] = z[k].conj();
    }
    fft.process(&mut z);
    z[..n].iter().map(|c| c.re).collect()
}

/// `ln Γ(x)` by the Lanczos approximation (g = 7, nine coefficients).
pub fn lanczos_ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - lanczos_ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        // round-off caps the attainable accuracy per panel
        let tol = (0.5 * tol).max(1e-18);
        step(f, a, m, fa, flm, fm, left, tol, depth - 1) + step(f, m, b, fm, frm, fb, right, tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `P(F > f)` for `F(d1, d2)` by quadrature of the incomplete beta integral,
/// using only the helpers in this file. Valid for `d1, d2 ≥ 2`.
pub fn f_tail_oracle(f: f64, d1: f64, d2: f64) -> f64 {
    let (a, b) = (0.5 * d2, 0.5 * d1);
    let x = d2 / (d2 + d1 * f);
    let ln_beta = lanczos_ln_gamma(a) + lanczos_ln_gamma(b) - lanczos_ln_gamma(a + b);
    let integrand = |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            let edge = if t <= 0.0 { a } else { b };
            return if edge == 1.0 { (-ln_beta).exp() } else { 0.0 };
        }
        ((a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - ln_beta).exp()
    };
    // with large degrees of freedom the mass is a narrow spike; break the
    // range around it so no panel steps over it
    let (mode, sd) = ((a - 1.0) / (a + b - 2.0), (a * b / ((a + b).powi(2) * (a + b + 1.0))).sqrt());
    let mut cuts = vec![0.0, x];
    cuts.extend((-16..=16).map(|j| mode + 0.5 * j as f64 * sd).filter(|&c| c > 0.0 && c < x));
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| adaptive_simpson(&integrand, w[0], w[1], 1e-16)).sum()
}

/// Kolmogorov–Smirnov distance of `p` from the uniform distribution.
pub fn ks_uniform(p: &[f64]) -> f64 {
    let mut s = p.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| ((i as f64 + 1.0) / n - v).max(v - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// `y(t) = 0.5 y(t−1) + beta x(t−1) + e`, with `x` an independent AR(1) of coefficient 0.5.
pub fn causal_pair(n: usize, beta: f64, rng: &mut impl Rng) -> (DailySeries, DailySeries) {
    let x = ar1(0.5, n, rng);
    let e = normals(rng, n);
    let mut y = vec![0.0; n];
    for t in 1..n {
        y[t] = 0.5 * y[t - 1] + beta * x[t - 1] + e[t];
    }
    (series(y), series(x))
}
