//! Independent reference implementations shared by the integration tests and
//! the acceptance runner. Each one is written the slow, obvious way.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repclass::linear::loo_residuals;
use repclass::prep::{detect_peaks, resample_channel, smooth_savgol, PeakParams};
use repclass::rocket::{apply_kernel, generate_kernels, FeatureMatrix, RocketKernel};
use repclass::MultivariateSeries;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_series(rng: &mut ChaCha8Rng, channels: usize, len: usize) -> MultivariateSeries {
    MultivariateSeries::unnamed(
        (0..channels).map(|_| (0..len).map(|_| rng.random_range(-5.0..5.0)).collect()).collect(),
    )
    .unwrap()
}

/// Nested-loop dilated convolution minus bias, zero outside the series.
pub fn brute_force_kernel(x: &MultivariateSeries, k: &RocketKernel) -> (f64, f64) {
    let t = x.len() as isize;
    let span = ((k.length - 1) * k.dilation) as isize;
    let pad = if k.padding { span / 2 } else { 0 };
    let n_out = t + 2 * pad - span;
    let mut z = Vec::new();
    for i in 0..n_out {
        let mut acc = 0.0;
        for (ci, &c) in k.channels.iter().enumerate() {
            for j in 0..k.length {
                let src = i - pad + (j * k.dilation) as isize;
                if src >= 0 && src < t {
                    acc += k.weights[ci * k.length + j] * x.channel(c)[src as usize];
                }
            }
        }
        z.push(acc - k.bias);
    }
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ppv = z.iter().filter(|v| **v > 0.0).count() as f64 / z.len() as f64;
    (max, ppv)
}

/// Largest deviation between `apply_kernel` and the oracle over `pairs`
/// random (sample, kernel) pairs.
pub fn convolution_max_error(pairs: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for p in 0..pairs {
        let channels = r.random_range(1..6);
        let len = r.random_range(12..120);
        let x = random_series(&mut r, channels, len);
        let bank = generate_kernels(1, channels, len, seed * 1000 + p as u64).unwrap();
        let k = &bank.kernels[0];
        let (m1, p1) = apply_kernel(&x, k);
        let (m2, p2) = brute_force_kernel(&x, k);
        worst = worst.max((m1 - m2).abs()).max((p1 - p2).abs());
    }
    worst
}

/// Residual of sample `i` when ridge with an unpenalised intercept is refit
/// on every other row through the normal equations.
pub fn explicit_loo(x: &DMatrix<f64>, y: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    let (n, f) = x.shape();
    let mut out = DMatrix::zeros(n, y.ncols());
    for i in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&r| r != i).collect();
        let xs = x.select_rows(&keep);
        let ys = y.select_rows(&keep);
        let xm = xs.row_mean();
        let ym = ys.row_mean();
        let mut xc = xs.clone();
        for mut row in xc.row_iter_mut() {
            row -= &xm;
        }
        let mut yc = ys.clone();
        for mut row in yc.row_iter_mut() {
            row -= &ym;
        }
        let lhs = xc.transpose() * &xc + DMatrix::identity(f, f) * alpha;
        let w = lhs.lu().solve(&(xc.transpose() * yc)).unwrap();
        let pred = (x.row(i) - &xm) * w + &ym;
        out.set_row(i, &(y.row(i) - pred));
    }
    out
}

/// Largest deviation between closed-form and explicit leave-one-out
/// residuals on a random 10 x 5 problem over a 10-alpha grid.
pub fn loo_max_error(seed: u64) -> f64 {
    let mut r = rng(seed);
    let x = DMatrix::from_fn(10, 5, |_, _| r.random_range(-1.0..1.0));
    let y = DMatrix::from_fn(10, 2, |_, _| if r.random_bool(0.5) { 1.0 } else { -1.0 });
    let alphas = repclass::linear::default_alpha_grid();
    let fm = FeatureMatrix::from_rows((0..10).map(|i| x.row(i).iter().copied().collect()).collect());
    let closed = loo_residuals(&fm, &y, &alphas).unwrap();
    alphas.iter().zip(&closed).map(|(&a, c)| (c - explicit_loo(&x, &y, a)).abs().max()).fold(0.0, f64::max)
}

/// Value at `at` (window-relative) of the degree-`order` least-squares
/// polynomial through `window`, solved via SVD of the Vandermonde matrix.
fn poly_fit_at(window: &[f64], order: usize, at: f64) -> f64 {
    let n = window.len();
    let half = (n / 2) as f64;
    let v = DMatrix::from_fn(n, order + 1, |r, k| (r as f64 - half).powi(k as i32));
    let b = DVector::from_column_slice(window);
    let coef = v.svd(true, true).solve(&b, 1e-14).unwrap();
    (0..=order).map(|k| coef[k] * (at - half).powi(k as i32)).sum()
}

/// Savitzky-Golay by explicit per-window fits (boundary points from the
/// first and last full window).
pub fn savgol_oracle(x: &[f64], window: usize, order: usize) -> Vec<f64> {
    let n = x.len();
    let half = window / 2;
    (0..n)
        .map(|i| {
            if i < half {
                poly_fit_at(&x[..window], order, i as f64)
            } else if i >= n - half {
                poly_fit_at(&x[n - window..], order, (i - (n - window)) as f64)
            } else {
                poly_fit_at(&x[i - half..=i + half], order, half as f64)
            }
        })
        .collect()
}

pub fn savgol_max_error(seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = r.random_range(11..200);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let fast = smooth_savgol(&x, 11, 3).unwrap();
        let slow = savgol_oracle(&x, 11, 3);
        worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    worst
}

/// Enumerates every local maximum (plateaus at their middle), keeps those
/// with enough prominence, then greedily accepts them from highest to lowest
/// when no accepted peak lies closer than `distance`.
pub fn peaks_oracle(x: &[f64], distance: usize, min_prominence: f64) -> Vec<usize> {
    let n = x.len();
    let mut maxima = Vec::new();
    let mut a = 1;
    while a + 1 < n {
        let mut b = a;
        while b + 1 < n && x[b + 1] == x[a] {
            b += 1;
        }
        if b + 1 < n && x[a - 1] < x[a] && x[b + 1] < x[a] {
            maxima.push((a + b) / 2);
        }
        a = b + 1;
    }
    let range = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
    let prominent: Vec<usize> = maxima
        .into_iter()
        .filter(|&p| {
            let h = x[p];
            let left_end = (0..p).rev().find(|&i| x[i] > h).map_or(0, |i| i + 1);
            let right_end = (p + 1..n).find(|&i| x[i] > h).map_or(n - 1, |i| i - 1);
            let left = x[left_end..=p].iter().cloned().fold(f64::INFINITY, f64::min);
            let right = x[p..=right_end].iter().cloned().fold(f64::INFINITY, f64::min);
            h - left.max(right) >= min_prominence * range
        })
        .collect();
    let mut order = prominent.clone();
    order.sort_by(|&i, &j| x[j].total_cmp(&x[i]).then(i.cmp(&j)));
    let mut kept: Vec<usize> = Vec::new();
    for p in order {
        if kept.iter().all(|&k| k.abs_diff(p) >= distance) {
            kept.push(p);
        }
    }
    kept.sort_unstable();
    kept
}

/// Noisy quasi-periodic signals on a coarse grid (so plateaus occur).
pub fn peak_fixture(r: &mut ChaCha8Rng) -> Vec<f64> {
    let n = r.random_range(20..400);
    let period = r.random_range(8.0..40.0);
    (0..n)
        .map(|i| {
            let v = (2.0 * std::f64::consts::PI * i as f64 / period).sin() * 4.0 + r.random_range(-1.5..1.5);
            v.round()
        })
        .collect()
}

/// Number of fixtures on which `detect_peaks` and the oracle disagree.
pub fn peak_mismatches(cases: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    (0..cases)
        .filter(|_| {
            let x = peak_fixture(&mut r);
            let distance = r.random_range(1..20);
            let prom = r.random_range(0.0..0.5);
            detect_peaks(&x, &PeakParams { min_distance: distance, min_prominence: prom })
                != peaks_oracle(&x, distance, prom)
        })
        .count()
}

/// Largest error relative to the signal's peak magnitude when an 80-point
/// smooth signal is resampled to 161 points.
pub fn spline_max_rel_error() -> f64 {
    let f = |t: f64| (2.0 * std::f64::consts::PI * t).sin() + 0.4 * (5.0 * t).cos() + 0.2 * t * t;
    let src: Vec<f64> = (0..80).map(|i| f(i as f64 / 79.0)).collect();
    let out = resample_channel(&src, 161).unwrap();
    let scale = (0..1000).map(|i| f(i as f64 / 999.0).abs()).fold(0.0, f64::max);
    out.iter().enumerate().map(|(j, v)| (v - f(j as f64 / 160.0)).abs() / scale).fold(0.0, f64::max)
}
